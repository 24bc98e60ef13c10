"""Command-line driver: ``vlax <subcommand> [options]``.

Exit status: 0 when every check passes, 1 when a mathematical defect is
found, 2 on usage errors (bad flags, unknown algebra, unreadable input).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import linalg
from .aks import (Hamiltonian, NotCentralError, flow, hamiltonian_family, involution_matrix)
from .diffpoly import DiffPoly, ParseError
from .liealg import (DecompositionError, DecompositionUnavailable, LieAlgebraError,
                     LieAlgebraSpec, SpecFormatError, build_algebra)
from .parallel import max_workers
from .pva import SkewError, axioms_report, center_find, poisson_matrix
from .verify import FAMILIES, ContractError, default_grid, residual_check, rk4_integrate
from .vla import (AffineVLA, AxiomError, LevelError, RMatrix, affine_table, affine_vla,
                  axiom_witnesses, builtin_rmatrix, factorization_data, format_local,
                  local_bracket, mybe_defect, twisted_table)

EXIT_OK, EXIT_DEFECT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    algebra: str = "sl2"
    level: Fraction = Fraction(0)
    decomposition: str = "borel"
    sigma: int = -1
    family: str = "power"
    n: int = 1
    fmt: str = "text"
    tol: Optional[float] = None

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise UsageError("sigma must be +1 or -1")
        if self.n < 1:
            raise UsageError("--n must be at least 1")


@dataclass
class Output:
    text: str
    latex: str = ""
    data: Dict = field(default_factory=dict)
    status: int = EXIT_OK

    def render(self, fmt: str) -> str:
        if fmt == "json":
            body = dict(self.data)
            body["status"] = "pass" if self.status == EXIT_OK else "fail"
            return json.dumps(body, indent=2) + "\n"
        if fmt == "latex":
            return (self.latex or "\\begin{verbatim}\n" + self.text + "\n\\end{verbatim}") + "\n"
        return self.text + "\n"


def _config(args) -> RunConfig:
    try:
        level = Fraction(args.level)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"level must be rational, got {args.level!r}") from None
    return RunConfig(args.algebra, level, args.decomposition,
                     1 if args.strict_convention else -1,
                     getattr(args, "family", "power"), getattr(args, "n", 1),
                     args.format, getattr(args, "tol", None))


def _vla(cfg: RunConfig, level=None) -> AffineVLA:
    a = build_algebra(cfg.algebra)
    return affine_vla(a, cfg.level if level is None else level)


def _rmatrix(cfg: RunConfig, v: AffineVLA, strict: bool = False):
    return builtin_rmatrix(v, cfg.decomposition, strict=strict)


def _center(cfg: RunConfig, degree: int) -> List[DiffPoly]:
    """Nonconstant central elements of the untwisted level-0 bracket up to ``degree``."""
    v = _vla(cfg, level=0)
    return [p for p in center_find(v.table, degree) if not p.is_constant()]


def _matrix_lines(R: RMatrix, a: LieAlgebraSpec) -> List[str]:
    ring = a.ring()
    return [f"R({a.names[j]}) = {ring.linear(R.column(j))}" for j in range(a.dim)]


def _bmatrix(m) -> str:
    rows = [" & ".join(_frac_tex(x) for x in row) for row in m]
    return "\\begin{bmatrix}\n" + " \\\\\n".join(rows) + "\n\\end{bmatrix}"


def _frac_tex(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    sign = "-" if x < 0 else ""
    return f"{sign}\\frac{{{abs(x.numerator)}}}{{{x.denominator}}}"


# -- subcommands

def cmd_check_lie(cfg: RunConfig, args) -> Output:
    try:
        a = build_algebra(cfg.algebra)
    except SpecFormatError:
        raise
    except LieAlgebraError as exc:
        return Output(f"{cfg.algebra}: FAIL\n{exc}", data={"algebra": cfg.algebra,
                                                         "error": str(exc)},
                      status=EXIT_DEFECT)
    report = axioms_report(affine_table(a, cfg.level))
    lines = [f"algebra {a.name}, dim {a.dim}, generators {', '.join(a.names)}",
             "antisymmetry, Jacobi identity, symmetric invariant form: ok",
             f"invariant form nondegenerate: {'yes' if linalg.rank(a.form) == a.dim else 'no'}",
             str(report)]
    status = EXIT_OK if report.passed else EXIT_DEFECT
    data = {"algebra": a.to_json(), "affine_axioms": report.passed,
            "witnesses": report.witnesses()}
    return Output("\n".join(lines), data=data, status=status)


def cmd_rmatrix(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    R, d = _rmatrix(cfg, v, strict=args.strict_decomposition)
    lines = [d.report(), f"R = {R.label}"] + _matrix_lines(R, v.algebra)
    latex = "R = " + _bmatrix(R.matrix)
    data = {"decomposition": d.kind, "closed": d.closed,
            "closure_witnesses": [list(w) for w in d.closure_witnesses],
            "matrix": [[str(x) for x in row] for row in R.matrix],
            "images": {v.algebra.names[j]: str(v.ring.linear(R.column(j)))
                       for j in range(v.algebra.dim)}}
    return Output("\n".join(lines), latex, data)


def cmd_bracket_table(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    if args.untwisted:
        t = v.table
        sub = ""
    else:
        R, _ = _rmatrix(cfg, v)
        t = twisted_table(v, R, check=False)
        sub = "R_{L}"
    bad = axiom_witnesses(t, limit=args.witnesses)
    text = "\n".join(t.ope_lines()) if args.ope else str(t)
    if bad:
        text += "\naxiom failures:\n" + "\n".join("  " + w for w in bad)
    data = t.to_json()
    data["axiom_witnesses"] = bad
    if args.local:
        m, k = args.local
        rows = []
        for i in range(t.ngens):
            for j in range(t.ngens):
                res = format_local(local_bracket(t, i, m, j, k))
                rows.append(f"[{t.ring.names[i]}_[{m}], {t.ring.names[j]}_[{k}]] = {res}")
        text += "\n" + "\n".join(rows)
        data["local"] = rows
    return Output(text, t.to_latex(subscript=sub), data,
                  EXIT_DEFECT if bad else EXIT_OK)


def cmd_mybe(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    R, _ = _rmatrix(cfg, v)
    defects = mybe_defect(v, R, classical=args.cybe)
    names = v.ring.names
    bad = {k: d for k, d in sorted(defects.items()) if d}
    kind = "cYBE" if args.cybe else "mYBE"
    lines = [f"{kind} defect of {R.label} (scaled by {R.mybe_scale}): "
             f"{len(defects) - len(bad)}/{len(defects)} pairs vanish"]
    lines += [f"({names[i]}, {names[j]}): {d}" for (i, j), d in bad.items()]
    latex = "\\begin{align*}\n" + ",\\\\\n".join(
        f"&({names[i]},{names[j]}): {d.to_latex()}" for (i, j), d in bad.items()) \
        + "\n\\end{align*}" if bad else f"\\text{{{kind} defect vanishes}}"
    data = {"equation": kind, "scale": str(R.mybe_scale),
            "defects": {f"{names[i]},{names[j]}": d.to_json() for (i, j), d in bad.items()}}
    return Output("\n".join(lines), latex, data, EXIT_DEFECT if bad else EXIT_OK)


def cmd_factorize(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    R, _ = _rmatrix(cfg, v)
    fd = factorization_data(v, R, scaled=args.scaled)
    ring = v.ring

    def span(vs):
        return "span{" + ", ".join(str(ring.linear(x)) for x in vs) + "}" if vs else "0"

    lines = [f"R = {R.label}, scale {fd.scale}",
             f"L+ = (R+1)L = {span(fd.plus_image)}",
             f"L- = (R-1)L = {span(fd.minus_image)}",
             f"ker(R-1) = {span(fd.plus_kernel)}",
             f"ker(R+1) = {span(fd.minus_kernel)}",
             f"kernels contained in images: {fd.kernels_contained}",
             f"unique decomposition x = x+ - x- on a basis: {fd.decomposition_ok}",
             f"theta bijective: {fd.theta_bijective}"]
    lines += [f"not a homomorphism: {h}" for h in fd.homomorphism_defects]
    data = {"scale": str(fd.scale),
            "plus_image": [[str(x) for x in vec] for vec in fd.plus_image],
            "minus_image": [[str(x) for x in vec] for vec in fd.minus_image],
            "plus_kernel": [[str(x) for x in vec] for vec in fd.plus_kernel],
            "minus_kernel": [[str(x) for x in vec] for vec in fd.minus_kernel],
            "theta_bijective": fd.theta_bijective, "kernels_contained": fd.kernels_contained,
            "decomposition_ok": fd.decomposition_ok,
            "homomorphism_defects": fd.homomorphism_defects}
    return Output("\n".join(lines), data=data, status=EXIT_OK if fd.ok else EXIT_DEFECT)


def _twisted_matrix(cfg: RunConfig, v: AffineVLA):
    R, _ = _rmatrix(cfg, v)
    t = twisted_table(v, R, check=False)
    return t, poisson_matrix(t, cfg.sigma)


def cmd_poisson_matrix(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    t, P = _twisted_matrix(cfg, v)
    return Output(str(P), P.to_latex(), P.to_json())


def cmd_center(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    basis = center_find(v.table, args.max_degree)
    lines = [f"center of {v.table.label} up to degree {args.max_degree}:"]
    lines += [str(p) for p in basis]
    latex = "\\begin{align*}\n" + ",\\\\\n".join(f"&{p.to_latex()}" for p in basis) \
        + "\n\\end{align*}"
    return Output("\n".join(lines), latex, {"center": [str(p) for p in basis]})


def _hamiltonian(cfg: RunConfig, args, v: AffineVLA) -> Hamiltonian:
    if args.density:
        try:
            dens = v.ring.parse(args.density)
        except ParseError as exc:
            raise UsageError(str(exc)) from None
        return Hamiltonian(dens, "custom", cfg.n)
    center = _center(cfg, args.max_degree)
    if not 1 <= args.center_index <= len(center):
        raise UsageError(f"--center-index must be between 1 and {len(center)}")
    return hamiltonian_family(center[args.center_index - 1], cfg.family, cfg.n,
                              table=v.table if v.level == 0 else None)


def cmd_hierarchy(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    _, P = _twisted_matrix(cfg, v)
    h = _hamiltonian(cfg, args, v)
    fs = flow(h, P)
    text = str(fs)
    if fs.trivial:
        text += "\n(trivial flow)"
    return Output(text, fs.to_latex(), fs.to_json())


def cmd_involution(cfg: RunConfig, args) -> Output:
    v = _vla(cfg, level=0)
    R, _ = _rmatrix(cfg, v)
    tw = twisted_table(v, R, check=False)
    center = _center(cfg, args.max_degree)
    hs = [Hamiltonian(p, "custom", 1, p) for p in center]
    for p in center:
        for q in range(1, args.deriv_products + 1):
            hs.append(hamiltonian_family(p, "deriv_product", q))
    for text in args.extra:
        try:
            hs.append(Hamiltonian(v.ring.parse(text), "custom", 1))
        except ParseError as exc:
            raise UsageError(str(exc)) from None
    if not hs:
        raise UsageError("no Hamiltonians selected; raise --max-degree")
    M = involution_matrix(hs, tw)
    labels = [str(h.density) if h.family == "custom" else f"({h.base})*({h.base})^({h.n})"
              for h in hs]
    lines = [f"H{k + 1} = {lab}" for k, lab in enumerate(labels)]
    lines += [" ".join("T" if x else "F" for x in row) for row in M]
    ok = all(all(row) for row in M)
    lines.append("all pairs in involution" if ok else "involution FAILS")
    return Output("\n".join(lines), data={"hamiltonians": labels, "matrix": M},
                  status=EXIT_OK if ok else EXIT_DEFECT)


def _params(items: Sequence[str]) -> Dict[str, float]:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            out[key.strip()] = float(Fraction(val.strip()))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--param {key}: {val!r} is not a number") from None
    return out


def cmd_verify_solution(cfg: RunConfig, args) -> Output:
    try:
        sol = FAMILIES[args.solution](**_params(args.param))
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    alg, kind, family, n, sigma = sol.system
    if args.strict_convention:
        sigma = 1
    elif args.default_convention:
        sigma = -1
    v = affine_vla(build_algebra(alg), 0)
    R, _ = builtin_rmatrix(v, kind)
    P = poisson_matrix(twisted_table(v, R, check=False), sigma)
    S = _center(RunConfig(alg), 2)[0]
    fs = flow(hamiltonian_family(S, family, n), P)
    tol = cfg.tol if cfg.tol is not None else (1e-8 if sol.name == "soliton" else 1e-12)
    rep = residual_check(fs, sol, default_grid(sol), tol)
    head = (f"{sol.name} family {sol.params} against {alg} {kind} {family} n={n}, "
            f"sigma={sigma:+d}")
    data = {"solution": sol.name, "params": sol.params, "system": [alg, kind, family, n],
            "sigma": sigma, **rep.to_json()}
    return Output(head + "\n" + str(rep), data=data,
                  status=EXIT_OK if rep.passed else EXIT_DEFECT)


def cmd_integrate(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    _, P = _twisted_matrix(cfg, v)
    h = _hamiltonian(cfg, args, v)
    fs = flow(h, P)
    try:
        init = [float(Fraction(x)) for x in args.init.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--init must be comma-separated numbers, got {args.init!r}") from None
    integrals = {str(p): p for p in _center(cfg, args.max_degree)}
    traj = rk4_integrate(fs, init, (0.0, args.t_end), args.dt, integrals)
    lines = [str(fs), traj.table(every=args.every)]
    lines += [f"drift of {k}: {d:.3e}" for k, d in traj.drift.items()]
    ok = cfg.tol is None or all(d <= cfg.tol for d in traj.drift.values())
    data = {"flow": fs.to_json(), "times": traj.times[::args.every].tolist(),
            "states": traj.states[::args.every].tolist(), "drift": traj.drift}
    return Output("\n".join(lines), data=data, status=EXIT_OK if ok else EXIT_DEFECT)


def cmd_export(cfg: RunConfig, args) -> Output:
    v = _vla(cfg)
    R, d = _rmatrix(cfg, v)
    t = twisted_table(v, R, check=False)
    P = poisson_matrix(t, cfg.sigma)
    center = _center(cfg, args.max_degree)
    flows = [flow(hamiltonian_family(p, "power", 1), P) for p in center]
    text = "\n\n".join([
        f"# algebra\n{v.algebra.dumps().rstrip()}",
        f"# decomposition\n{d.report()}",
        "# R-matrix\n" + "\n".join(_matrix_lines(R, v.algebra)),
        f"# twisted bracket table\n{t}",
        f"# Poisson matrix (sigma={cfg.sigma:+d})\n{P}",
        "# center\n" + "\n".join(str(p) for p in center),
        "# first flows\n" + "\n\n".join(f"h = {fs.hamiltonian.density}\n{fs}" for fs in flows)])
    latex = "\n\n".join([t.to_latex(), "H_{R_L}(\\partial) = " + P.to_latex()]
                        + [fs.to_latex() for fs in flows])
    data = {"algebra": v.algebra.to_json(), "decomposition": d.kind,
            "rmatrix": [[str(x) for x in row] for row in R.matrix],
            "table": t.to_json(), "poisson_matrix": P.to_json(),
            "center": [str(p) for p in center], "flows": [fs.to_json() for fs in flows]}
    return Output(text, latex, data)


COMMANDS = {
    "check-lie": cmd_check_lie,
    "rmatrix": cmd_rmatrix,
    "bracket-table": cmd_bracket_table,
    "mybe": cmd_mybe,
    "factorize": cmd_factorize,
    "poisson-matrix": cmd_poisson_matrix,
    "center": cmd_center,
    "hierarchy": cmd_hierarchy,
    "involution": cmd_involution,
    "verify-solution": cmd_verify_solution,
    "integrate": cmd_integrate,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", default="sl2", help="builtin name (sl2, sl3) or JSON spec path")
    common.add_argument("--level", default="0", help="rational level k")
    common.add_argument("--decomposition", default="borel",
                        choices=["borel", "iwasawa", "custom", "identity"])
    common.add_argument("--strict-convention", action="store_true",
                        help="orient flows as du/dt = {h_L u} at L=0")
    common.add_argument("--format", default="text", choices=["text", "latex", "json"])
    common.add_argument("--output", help="write to this file instead of stdout")

    ham = argparse.ArgumentParser(add_help=False)
    ham.add_argument("--family", default="power", choices=["power", "deriv_product"])
    ham.add_argument("--n", type=int, default=1)
    ham.add_argument("--center-index", type=int, default=1,
                     help="1-based index into the nonconstant center elements")
    ham.add_argument("--max-degree", type=int, default=3)
    ham.add_argument("--density", help="custom Hamiltonian density")

    p = argparse.ArgumentParser(prog="vlax", description="Vertex Lie algebra R-matrices, "
                                "twisted Poisson structures and AKS hierarchies.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check-lie", parents=[common], help="validate a Lie algebra spec")
    s = sub.add_parser("rmatrix", parents=[common], help="factorizable R of a decomposition")
    s.add_argument("--strict-decomposition", action="store_true",
                   help="fail when a part is not a subalgebra")
    s = sub.add_parser("bracket-table", parents=[common], help="lambda-brackets on generators")
    s.add_argument("--untwisted", action="store_true")
    s.add_argument("--ope", action="store_true", help="print as OPEs")
    s.add_argument("--local", type=int, nargs=2, metavar=("M", "K"),
                   help="also print local Lie algebra brackets at modes M, K")
    s.add_argument("--witnesses", type=int, default=5)
    s = sub.add_parser("mybe", parents=[common], help="modified Yang-Baxter defect")
    s.add_argument("--cybe", action="store_true", help="classical YBE instead")
    s = sub.add_parser("factorize", parents=[common], help="factorization data of R")
    s.add_argument("--scaled", action="store_true", help="use the mYBE normalization of R")
    sub.add_parser("poisson-matrix", parents=[common], help="twisted Poisson structure")
    s = sub.add_parser("center", parents=[common], help="center of the untwisted bracket")
    s.add_argument("--max-degree", type=int, default=3)
    sub.add_parser("hierarchy", parents=[common, ham], help="AKS flow of a central Hamiltonian")
    s = sub.add_parser("involution", parents=[common], help="pairwise involution check")
    s.add_argument("--max-degree", type=int, default=3)
    s.add_argument("--deriv-products", type=int, default=0,
                   help="also include S*S^(q) for q up to this value")
    s.add_argument("--extra", action="append", default=[], help="additional density")
    s = sub.add_parser("verify-solution", parents=[common], help="residual of a closed form")
    s.add_argument("--solution", required=True, choices=sorted(FAMILIES))
    s.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    s.add_argument("--tol", type=float)
    s.add_argument("--default-convention", action="store_true",
                   help="force sigma=-1 instead of the family's declared orientation")
    s = sub.add_parser("integrate", parents=[common, ham], help="RK4 for an ODE flow")
    s.add_argument("--init", required=True, help="comma-separated initial state")
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--every", type=int, default=100, help="print every k-th step")
    s.add_argument("--tol", type=float, help="fail when first-integral drift exceeds this")
    s = sub.add_parser("export", parents=[common], help="bundle of all artifacts")
    s.add_argument("--max-degree", type=int, default=3)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        max_workers()
        cfg = _config(args)
        if getattr(args, "every", 1) < 1:
            raise UsageError("--every must be positive")
        out = COMMANDS[args.command](cfg, args)
    except (UsageError, SpecFormatError, DecompositionUnavailable, LevelError, KeyError,
            FileNotFoundError, ContractError, ParseError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"vlax: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (LieAlgebraError, DecompositionError, AxiomError, SkewError,
            NotCentralError) as exc:
        print(f"vlax: defect: {exc}", file=sys.stderr)
        return EXIT_DEFECT
    except ValueError as exc:
        print(f"vlax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rendered = out.render(cfg.fmt)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return out.status


if __name__ == "__main__":
    sys.exit(main())
