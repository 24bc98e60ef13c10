"""Poisson structures, axiom reports and the center of a lambda-bracket."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .diffpoly import DiffPoly, DiffRing, JetVar, poly_sum
from .lambdapoly import (BiLambdaPoly, BracketTable, LambdaPoly, all_jacobi_defects,
                         master_bracket, skew_defect)
from .liealg import _monomials, invariant_polynomials, kernel_polys

Operator = Tuple[DiffPoly, ...]  # coefficients of d^0, d^1, ...

DEFAULT_SIGMA = -1


class SkewError(ValueError):
    pass


def apply_operator(op: Operator, x: DiffPoly) -> DiffPoly:
    out = x.ring.zero()
    for n, c in enumerate(op):
        if c:
            out = out + c * x.derivative(n)
    return out


def adjoint(op: Operator, ring: DiffRing) -> Operator:
    """Formal adjoint of sum_n c_n d^n, i.e. sum_n (-d)^n o c_n in normal form."""
    out: Dict[int, DiffPoly] = {}
    for n, c in enumerate(op):
        if not c:
            continue
        sign = -1 if n % 2 else 1
        for s in range(n + 1):
            term = c.derivative(n - s) * (sign * comb(n, s))
            out[s] = out[s] + term if s in out else term
    top = max(out, default=-1)
    res = [out.get(k, ring.zero()) for k in range(top + 1)]
    while res and not res[-1]:
        res.pop()
    return tuple(res)


def _trim(op: Sequence[DiffPoly]) -> Operator:
    op = list(op)
    while op and not op[-1]:
        op.pop()
    return tuple(op)


@dataclass
class PoissonMatrix:
    """Matrix differential operator; ``entries[i][j]`` lists d-power coefficients.

    ``sigma`` records the orientation: entries are sigma times
    H_ij(d) = {u^j_{d} u^i}_->.
    """

    ring: DiffRing
    entries: List[List[Operator]]
    sigma: int = DEFAULT_SIGMA

    @property
    def dim(self) -> int:
        return self.ring.ngens

    def entry(self, i: int, j: int) -> Operator:
        return self.entries[i][j]

    def apply(self, vec: Sequence[DiffPoly]) -> List[DiffPoly]:
        return [poly_sum(self.ring, (apply_operator(self.entries[i][j], vec[j])
                                     for j in range(self.dim)))
                for i in range(self.dim)]

    def is_ultralocal(self) -> bool:
        return all(len(op) <= 1 for row in self.entries for op in row)

    def skew_adjoint_defects(self) -> List[Tuple[int, int]]:
        bad = []
        for i in range(self.dim):
            for j in range(self.dim):
                adj = adjoint(self.entries[j][i], self.ring)
                neg = _trim([-c for c in self.entries[i][j]])
                if adj != neg:
                    bad.append((i, j))
        return bad

    def entry_str(self, i: int, j: int) -> str:
        return format_operator(self.entries[i][j])

    def __str__(self):
        cells = [[self.entry_str(i, j) for j in range(self.dim)] for i in range(self.dim)]
        w = max(len(c) for row in cells for c in row)
        return "\n".join("[" + "  ".join(c.rjust(w) for c in row) + "]" for row in cells)

    def to_latex(self) -> str:
        rows = []
        for i in range(self.dim):
            rows.append(" & ".join(format_operator_latex(self.entries[i][j])
                                   for j in range(self.dim)))
        return "\\begin{bmatrix}\n" + " \\\\\n".join(rows) + "\n\\end{bmatrix}"

    def to_json(self):
        return {"generators": list(self.ring.names), "sigma": self.sigma,
                "entries": [[[str(c) for c in self.entries[i][j]] for j in range(self.dim)]
                            for i in range(self.dim)]}

    def scaled(self, c) -> "PoissonMatrix":
        return PoissonMatrix(self.ring, [[tuple(x * c for x in op) for op in row]
                                         for row in self.entries], self.sigma)

    def transposed(self) -> "PoissonMatrix":
        return PoissonMatrix(self.ring, [[self.entries[j][i] for j in range(self.dim)]
                                         for i in range(self.dim)], self.sigma)


def format_operator(op: Operator) -> str:
    if not op:
        return "0"
    parts = []
    for n, c in enumerate(op):
        if not c:
            continue
        if n == 0:
            parts.append(str(c))
        else:
            d = "d" if n == 1 else f"d^{n}"
            body = str(c)
            parts.append(d if body == "1" else "-" + d if body == "-1" else f"({body})*{d}")
    return " + ".join(parts)


def format_operator_latex(op: Operator) -> str:
    if not op:
        return "0"
    parts = []
    for n, c in enumerate(op):
        if not c:
            continue
        if n == 0:
            parts.append(c.to_latex())
        else:
            d = "\\partial" if n == 1 else f"\\partial^{{{n}}}"
            body = c.to_latex()
            parts.append(d if body == "1" else "-" + d if body == "-1" else f"({body}){d}")
    return " + ".join(parts)


def poisson_matrix(t: BracketTable, sigma: int = DEFAULT_SIGMA, check: bool = True) -> PoissonMatrix:
    """sigma * H with H_ij(d) = {u^j_L u^i} at L -> d acting to the right."""
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    if check:
        bad = {k: v for k, v in skew_defect(t).items() if v}
        if bad:
            (i, j), d = sorted(bad.items())[0]
            raise SkewError(f"table is not skew-symmetric at "
                            f"({t.ring.names[i]}, {t.ring.names[j]}): defect {d}")
    n = t.ngens
    entries = [[tuple(c * sigma for c in t.entries[(j, i)].coeffs) for j in range(n)]
               for i in range(n)]
    return PoissonMatrix(t.ring, entries, sigma)


# -- axioms

@dataclass
class AxiomsReport:
    label: str
    skew: Dict[Tuple[int, int], LambdaPoly]
    jacobi: Dict[Tuple[int, int, int], BiLambdaPoly]
    names: Tuple[str, ...] = ()

    @property
    def skew_failures(self):
        return {k: v for k, v in self.skew.items() if v}

    @property
    def jacobi_failures(self):
        return {k: v for k, v in self.jacobi.items() if v}

    @property
    def passed(self) -> bool:
        return not self.skew_failures and not self.jacobi_failures

    def witnesses(self, limit: Optional[int] = None) -> List[str]:
        n = self.names
        out = [f"skew ({n[i]}, {n[j]}): {d}" for (i, j), d in sorted(self.skew_failures.items())]
        out += [f"jacobi ({n[i]}, {n[j]}, {n[k]}): {d}"
                for (i, j, k), d in sorted(self.jacobi_failures.items())]
        return out[:limit] if limit else out

    def __str__(self):
        head = (f"{self.label}: skew {len(self.skew) - len(self.skew_failures)}/{len(self.skew)} "
                f"pairs ok, jacobi {len(self.jacobi) - len(self.jacobi_failures)}/"
                f"{len(self.jacobi)} triples ok -> {'PASS' if self.passed else 'FAIL'}")
        return "\n".join([head] + ["  " + w for w in self.witnesses()])


def axioms_report(t: BracketTable) -> AxiomsReport:
    return AxiomsReport(t.label, skew_defect(t), all_jacobi_defects(t), t.ring.names)


# -- center

def center_find(t: BracketTable, degree: int, algebra=None) -> List[DiffPoly]:
    """Jet-order-0 polynomials P of degree <= d with {P_L u^j} = 0 for all j."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    ring = t.ring
    algebra = algebra or t.algebra
    u = [ring.var(j) for j in range(t.ngens)]

    def conditions(mono: DiffPoly):
        out = {}
        for j in range(t.ngens):
            for n, c in enumerate(master_bracket(mono, u[j], t).coeffs):
                out[(j, n)] = c
        return out

    result = [ring.one()]
    for d in range(1, degree + 1):
        monos = list(_monomials(t.ngens, d))
        basis = kernel_polys(ring, monos, conditions)
        if not basis:
            continue
        if algebra is not None and d >= 2:
            ref = invariant_polynomials(algebra, d)
            if len(ref) == len(basis) and all(_centre_check(p, t) for p in ref):
                result.extend(ref)
                continue
        result.extend(_leading_one(p) for p in basis)
    return result


def _centre_check(p: DiffPoly, t: BracketTable) -> bool:
    return all(not master_bracket(p, t.ring.var(j), t) for j in range(t.ngens))


def _leading_one(p: DiffPoly) -> DiffPoly:
    _, c = p.sorted_terms()[0]
    return p / c


def is_central(p: DiffPoly, t: BracketTable) -> bool:
    return _centre_check(p, t)


# -- comparison with a printed display

@dataclass
class EntryDiff:
    i: int
    j: int
    printed: str
    computed: str
    witness: str = ""   # independent reason the printed entry cannot be right


@dataclass
class MatrixDiff:
    orientation: str
    entries: List[EntryDiff]
    names: Tuple[str, ...]
    alternative: int = 0   # discrepancy count in the other orientation
    scale: Fraction = Fraction(1)

    @property
    def unexplained(self) -> List[EntryDiff]:
        return [e for e in self.entries if not e.witness]

    def __str__(self):
        head = (f"orientation: {self.orientation}, {len(self.entries)} discrepant entries "
                f"({len(self.unexplained)} without witness; other orientation: "
                f"{self.alternative})")
        lines = [head]
        for e in self.entries:
            tag = f"  [{e.witness}]" if e.witness else ""
            shown = e.printed if self.scale == 1 else f"{self.scale}*({e.printed})"
            lines.append(f"({self.names[e.i]}, {self.names[e.j]}): printed {shown} "
                         f"| computed {e.computed}{tag}")
        return "\n".join(lines)


def _parse_entry(ring: DiffRing, text: str, scale: Fraction):
    from .diffpoly import ParseError
    try:
        return ring.parse(text) * scale, ""
    except ParseError as exc:
        return None, f"unparseable: {exc}"


def diff_printed_matrix(P: PoissonMatrix, rows: Sequence[Sequence[str]], scale=1) -> MatrixDiff:
    """Compare a matrix of order-0 operators against a printed display.

    The printed display may show P or its transpose; the orientation with
    fewer discrepancies is reported.  An entry gets a witness when it cannot
    belong to any skew-adjoint ultralocal matrix: an unknown symbol, or a
    mismatch with minus its printed mirror entry.
    """
    ring = P.ring
    n = P.dim
    scale = Fraction(scale)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"printed display must be {n}x{n}")
    parsed = [[_parse_entry(ring, rows[i][j], scale) for j in range(n)] for i in range(n)]

    def compare(transpose: bool) -> List[EntryDiff]:
        out = []
        for i in range(n):
            for j in range(n):
                a, b = (j, i) if transpose else (i, j)
                ours = P.entries[a][b]
                poly, err = parsed[i][j]
                if poly is not None and _trim((poly,)) == ours:
                    continue
                witness = err
                if not witness:
                    mirror, merr = parsed[j][i]
                    if mirror is not None and mirror != -poly:
                        witness = f"not skew: mirror entry is {rows[j][i]}"
                out.append(EntryDiff(a, b, rows[i][j], format_operator(ours), witness))
        return out

    plain, flipped = compare(False), compare(True)
    if len(flipped) < len(plain):
        return MatrixDiff("transposed", flipped, ring.names, len(plain), scale)
    return MatrixDiff("as printed", plain, ring.names, len(flipped), scale)
