"""Hamiltonian hierarchies of the AKS scheme and their involutivity."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .diffpoly import DiffPoly, DiffRing, latex_name
from .lambdapoly import (BracketTable, LambdaPoly, lambda_power_of_shift,
                         master_bracket, minus_shift_of_partial, shift_apply)
from .parallel import pmap
from .pva import DEFAULT_SIGMA, PoissonMatrix, is_central
from .vla import AffineVLA, RMatrix, twisted_table

FAMILIES = ("power", "deriv_product", "custom")


class NotCentralError(ValueError):
    pass


@dataclass
class Hamiltonian:
    density: DiffPoly
    family: str = "custom"
    n: int = 1
    base: Optional[DiffPoly] = None

    def label(self) -> str:
        if self.family == "power":
            return f"S^{self.n}"
        if self.family == "deriv_product":
            return f"S*S^({self.n})"
        return "h"


def hamiltonian_family(center_elt: DiffPoly, kind: str, n: int,
                       table: Optional[BracketTable] = None) -> Hamiltonian:
    """S^n or S * d^n(S); with ``table`` the input is first checked to be central."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if table is not None and not is_central(center_elt, table):
        raise NotCentralError(f"{center_elt} is not central for {table.label}")
    if kind == "power":
        return Hamiltonian(center_elt ** n, kind, n, center_elt)
    if kind == "deriv_product":
        return Hamiltonian(center_elt * center_elt.derivative(n), kind, n, center_elt)
    raise ValueError(f"unknown family {kind!r}; use power or deriv_product")


@dataclass
class FlowSystem:
    rhs: List[DiffPoly]
    hamiltonian: Hamiltonian
    matrix: PoissonMatrix
    time_label: int = 1

    @property
    def ring(self) -> DiffRing:
        return self.matrix.ring

    @property
    def trivial(self) -> bool:
        return all(not r for r in self.rhs)

    def max_order(self) -> int:
        return max((r.max_order() for r in self.rhs), default=-1)

    def lines(self) -> List[str]:
        names = self.ring.names
        return [f"d{names[i]}/dt_{self.time_label} = {r}" for i, r in enumerate(self.rhs)]

    def __str__(self):
        return "\n".join(self.lines())

    def to_latex(self) -> str:
        names = self.ring.names
        body = " \\\\\n".join(
            f"&\\frac{{d {latex_name(names[i])}}}{{dt_{{{self.time_label}}}}} = {r.to_latex()}"
            for i, r in enumerate(self.rhs))
        return "\\begin{align*}\n" + body + "\n\\end{align*}"

    def to_json(self):
        return {"time": self.time_label, "hamiltonian": str(self.hamiltonian.density),
                "sigma": self.matrix.sigma, "trivial": self.trivial,
                "rhs": {self.ring.names[i]: str(r) for i, r in enumerate(self.rhs)}}


def variational_gradient(h: DiffPoly) -> List[DiffPoly]:
    return [h.variational(i) for i in range(h.ring.ngens)]


def flow(h: Hamiltonian, H: PoissonMatrix, time_label: Optional[int] = None) -> FlowSystem:
    """du^i/dt = sum_j H_ij(d) dh/du^j."""
    if h.density.ring != H.ring:
        raise ValueError("Hamiltonian and Poisson matrix live in different rings")
    rhs = H.apply(variational_gradient(h.density))
    return FlowSystem(rhs, h, H, h.n if time_label is None else time_label)


def flow_via_bracket(h: DiffPoly, t: BracketTable, sigma: int = DEFAULT_SIGMA) -> List[DiffPoly]:
    """sigma * {h_L u^i} at L = 0, computed by the Master formula."""
    return [master_bracket(h, t.ring.var(i), t).at_zero() * sigma for i in range(t.ngens)]


def functional_bracket(f: DiffPoly, g: DiffPoly, t: BracketTable) -> DiffPoly:
    """Integrand of {int f, int g}: the L^0 part of {f_L g}."""
    return master_bracket(f, g, t).at_zero()


def is_total_derivative(a: DiffPoly) -> bool:
    """True iff every variational derivative vanishes (constants removed)."""
    a = a - a.constant_term()
    return all(not a.variational(i) for i in range(a.ring.ngens))


def involution_matrix(hs: Sequence[Hamiltonian], t_twisted: BracketTable,
                      t_untwisted: Optional[BracketTable] = None) -> List[List[bool]]:
    """(n, m) -> {int h_n, int h_m}_R vanishes in the quotient by total derivatives."""
    if t_untwisted is not None:
        for h in hs:
            base = h.base if h.base is not None else h.density
            if not is_central(base, t_untwisted):
                raise NotCentralError(f"{base} is not central for {t_untwisted.label}")
    pairs = [(i, j) for i in range(len(hs)) for j in range(len(hs))]
    vals = pmap(lambda ij: is_total_derivative(
        functional_bracket(hs[ij[0]].density, hs[ij[1]].density, t_twisted)), pairs)
    out = [[False] * len(hs) for _ in hs]
    for (i, j), v in zip(pairs, vals):
        out[i][j] = v
    return out


def twb_identity_defect(f: DiffPoly, g: DiffPoly, v: AffineVLA, r: RMatrix) -> LambdaPoly:
    """{f_L g}_R minus
    sum {R(u^i)_{L+d} g}_-> (-L-d)^p df/du^{i,p} + sum dg/du^{j,q} (d+L)^q {f_L R(u^j)}."""
    ring = v.ring
    t = v.table
    tw = twisted_table(v, r, check=False)
    lhs = master_bracket(f, g, tw)
    rhs = LambdaPoly.zero(ring)
    for var in f.variables():
        ru = ring.linear(r.column(var.gen))
        inner = master_bracket(ru, g, t)
        rhs = rhs + shift_apply(inner, minus_shift_of_partial(f, var), +1)
    for var in g.variables():
        ru = ring.linear(r.column(var.gen))
        inner = master_bracket(f, ru, t)
        rhs = rhs + lambda_power_of_shift(var.order, 1, ring, inner) * g.partial(var)
    return lhs - rhs


def lemma_twist_defect(v: AffineVLA, r: RMatrix) -> List[str]:
    """Pairs where the twisted Master formula differs from {Ru_L v} + {u_L Rv}."""
    ring = v.ring
    tw = twisted_table(v, r, check=False)
    bad = []
    for i in range(ring.ngens):
        for j in range(ring.ngens):
            ui, uj = ring.var(i), ring.var(j)
            direct = (master_bracket(ring.linear(r.column(i)), uj, v.table)
                      + master_bracket(ui, ring.linear(r.column(j)), v.table))
            if master_bracket(ui, uj, tw) != direct:
                bad.append(f"({ring.names[i]}, {ring.names[j]})")
    return bad


# -- comparison with printed systems

@dataclass
class FlowDiff:
    names: Sequence[str]
    printed: List[DiffPoly]
    computed: List[DiffPoly]
    scale: Optional[Fraction] = None

    @property
    def mismatched(self) -> List[int]:
        return [i for i, (p, c) in enumerate(zip(self.printed, self.computed)) if p != c]

    @property
    def matches(self) -> bool:
        return not self.mismatched

    def proportional(self) -> List[int]:
        """Equations where computed = scale * printed for the fitted scale."""
        if self.scale is None:
            return []
        return [i for i, (p, c) in enumerate(zip(self.printed, self.computed))
                if c == p * self.scale]

    def __str__(self):
        lines = [f"{len(self.mismatched)} of {len(self.names)} equations differ"]
        if self.scale is not None and self.mismatched:
            lines.append(f"best common scale computed/printed = {self.scale}: "
                         f"{len(self.proportional())} equations agree after scaling")
        for i in self.mismatched:
            lines.append(f"d{self.names[i]}: printed {self.printed[i]}")
            lines.append(f"{' ' * (len(self.names[i]) + 1)}  computed {self.computed[i]}")
            lines.append(f"{' ' * (len(self.names[i]) + 1)}  difference "
                         f"{self.computed[i] - self.printed[i]}")
        return "\n".join(lines)


def _fit_scale(printed: Sequence[DiffPoly], computed: Sequence[DiffPoly]) -> Optional[Fraction]:
    votes = {}
    for p, c in zip(printed, computed):
        if not p or not c:
            continue
        m, x = p.sorted_terms()[0]
        y = c.terms.get(m)
        if y:
            s = y / x
            votes[s] = votes.get(s, 0) + (c == p * s)
    if not votes:
        return None
    return max(sorted(votes), key=lambda s: votes[s])


def diff_printed_flow(fs: FlowSystem, printed: dict) -> FlowDiff:
    """``printed`` maps generator names to right-hand sides in the diffpoly grammar."""
    ring = fs.ring
    ps = [ring.parse(printed[name]) for name in ring.names]
    return FlowDiff(ring.names, ps, list(fs.rhs), _fit_scale(ps, fs.rhs))
