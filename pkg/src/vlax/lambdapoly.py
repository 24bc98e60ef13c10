"""Polynomials in lambda (and mu) with differential-polynomial coefficients.

Also hosts the bracket table of a lambda-bracket on generators, its extension
to all differential polynomials, and the axiom defects of a table.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .diffpoly import (DiffPoly, DiffRing, JetVar, RingMismatchError, latex_name, as_poly,
                       poly_sum)
from .parallel import pmap


class LambdaPoly:
    """sum_n coeffs[n] * L^n with trailing zeros trimmed."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: DiffRing, coeffs: Sequence[DiffPoly] = ()):
        cs = [as_poly(ring, c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.ring = ring
        self.coeffs: Tuple[DiffPoly, ...] = tuple(cs)

    @classmethod
    def const(cls, p: DiffPoly) -> "LambdaPoly":
        return cls(p.ring, [p])

    @classmethod
    def zero(cls, ring: DiffRing) -> "LambdaPoly":
        return cls(ring, [])

    def _check(self, other: "LambdaPoly"):
        if other.ring != self.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring.names} vs {other.ring.names}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, n: int) -> DiffPoly:
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else self.ring.zero()

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return LambdaPoly(self.ring, [self.coeff(i) + other.coeff(i) for i in range(n)])

    def __neg__(self):
        return LambdaPoly(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "LambdaPoly":
        if isinstance(other, LambdaPoly):
            self._check(other)
            if not self.coeffs or not other.coeffs:
                return LambdaPoly.zero(self.ring)
            out = [self.ring.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if not a:
                    continue
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
            return LambdaPoly(self.ring, out)
        return LambdaPoly(self.ring, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, LambdaPoly):
            return self.ring == other.ring and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def shift(self, k: int) -> "LambdaPoly":
        """Multiply by L^k."""
        return LambdaPoly(self.ring, [self.ring.zero()] * k + list(self.coeffs))

    def derivative(self, times: int = 1) -> "LambdaPoly":
        return LambdaPoly(self.ring, [c.derivative(times) for c in self.coeffs])

    def at_zero(self) -> DiffPoly:
        return self.coeff(0)

    def map(self, fn) -> "LambdaPoly":
        return LambdaPoly(self.ring, [fn(c) for c in self.coeffs])

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for n, c in enumerate(self.coeffs):
            if not c:
                continue
            if n == 0:
                parts.append(f"({c})")
            elif n == 1:
                parts.append(f"({c})*L")
            else:
                parts.append(f"({c})*L^{n}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LambdaPoly({str(self)!r})"

    def to_latex(self, var: str = "\\lambda") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for n, c in enumerate(self.coeffs):
            if not c:
                continue
            body = c.to_latex()
            if n == 0:
                parts.append(body)
                continue
            pw = var if n == 1 else f"{var}^{{{n}}}"
            if len(c.terms) == 1 and c.is_constant():
                k = c.constant_term()
                if k == 1:
                    parts.append(pw)
                elif k == -1:
                    parts.append("-" + pw)
                else:
                    parts.append(f"{body}{pw}")
            else:
                parts.append(f"({body}){pw}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def to_json(self):
        return [str(c) for c in self.coeffs]


class BiLambdaPoly:
    """sum coeffs[(a, b)] * L^a * M^b."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: DiffRing, coeffs: Mapping[Tuple[int, int], DiffPoly] = None):
        self.ring = ring
        self.coeffs: Dict[Tuple[int, int], DiffPoly] = {
            k: v for k, v in (coeffs or {}).items() if v}

    def __add__(self, other: "BiLambdaPoly") -> "BiLambdaPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return BiLambdaPoly(self.ring, out)

    def __neg__(self):
        return BiLambdaPoly(self.ring, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, BiLambdaPoly) and self.coeffs == other.coeffs

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for (a, b), c in sorted(self.coeffs.items()):
            mono = []
            if a:
                mono.append("L" if a == 1 else f"L^{a}")
            if b:
                mono.append("M" if b == 1 else f"M^{b}")
            parts.append(f"({c})" + "".join("*" + m for m in mono))
        return " + ".join(parts)

    @classmethod
    def from_lambda(cls, p: LambdaPoly, mu_power: int = 0, swap: bool = False) -> "BiLambdaPoly":
        """Embed p(L) * M^mu_power, or p(M) * L^mu_power when swap is set."""
        out = {}
        for n, c in enumerate(p.coeffs):
            out[(mu_power, n) if swap else (n, mu_power)] = c
        return cls(p.ring, out)


def lambda_power_of_shift(n: int, sign: int, ring: DiffRing, target: LambdaPoly) -> LambdaPoly:
    """(sign*(L + d))^n applied to target, d acting on coefficients."""
    out = LambdaPoly.zero(ring)
    for s in range(n + 1):
        c = comb(n, s) * (sign ** n)
        if not c:
            continue
        out = out + target.derivative(s).shift(n - s) * c
    return out


def shift_apply(b: LambdaPoly, target, sign: int = 1) -> LambdaPoly:
    """sum_n b_n (sign*(L + d))^n X, with d acting on X only.

    ``target`` may be a DiffPoly or a LambdaPoly in the same L.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if isinstance(target, DiffPoly):
        target = LambdaPoly.const(target)
    if target.ring != b.ring:
        raise RingMismatchError(f"ring mismatch: {b.ring.names} vs {target.ring.names}")
    ring = b.ring
    if not target:
        return LambdaPoly.zero(ring)
    out = LambdaPoly.zero(ring)
    for n, bn in enumerate(b.coeffs):
        if not bn:
            continue
        out = out + lambda_power_of_shift(n, sign, ring, target) * bn
    return out


def reflect(b: LambdaPoly) -> LambdaPoly:
    """sum_n (-L - d)^n b_n, d acting on the coefficient b_n."""
    ring = b.ring
    out = LambdaPoly.zero(ring)
    for n, bn in enumerate(b.coeffs):
        if bn:
            out = out + lambda_power_of_shift(n, -1, ring, LambdaPoly.const(bn))
    return out


def substitute_sum(p: LambdaPoly, lam_extra: int = 0) -> BiLambdaPoly:
    """p(L + M) * L^lam_extra expanded binomially."""
    out: Dict[Tuple[int, int], DiffPoly] = {}
    for n, c in enumerate(p.coeffs):
        if not c:
            continue
        for a in range(n + 1):
            key = (a + lam_extra, n - a)
            term = c * comb(n, a)
            out[key] = out[key] + term if key in out else term
    return BiLambdaPoly(p.ring, out)


@dataclass
class BracketTable:
    """The lambda-bracket {u^i_L u^j} on generators."""

    ring: DiffRing
    entries: Dict[Tuple[int, int], LambdaPoly]
    level: Fraction = Fraction(0)
    label: str = ""
    algebra: Optional[object] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = self.ring.ngens
        for i in range(n):
            for j in range(n):
                if (i, j) not in self.entries:
                    self.entries[(i, j)] = LambdaPoly.zero(self.ring)
        for (i, j), v in self.entries.items():
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"table entry ({i}, {j}) outside {n} generators")
            if v.ring != self.ring:
                raise RingMismatchError("table entry in a different ring")
        self._cache: Dict[Tuple[DiffPoly, int], LambdaPoly] = {}

    @property
    def ngens(self) -> int:
        return self.ring.ngens

    def entry(self, i: int, j: int) -> LambdaPoly:
        return self.entries[(i, j)]

    def is_ultralocal(self) -> bool:
        return all(v.degree <= 0 for v in self.entries.values())

    def __str__(self):
        names = self.ring.names
        return "\n".join(f"{{{names[i]}_L {names[j]}}} = {self.entries[(i, j)]}"
                         for i in range(self.ngens) for j in range(self.ngens))

    def to_latex(self, upper: bool = True, subscript: str = "R_{L}") -> str:
        """align* block, one line per pair; ``upper`` keeps only i <= j."""
        names = [latex_name(x) for x in self.ring.names]
        sub = f"_{{{subscript}}}" if subscript else ""
        lines = []
        for i in range(self.ngens):
            for j in range(self.ngens):
                if upper and j < i:
                    continue
                lines.append(f"&[{names[i]}{{_\\lambda}}{names[j]}]{sub}="
                             f"{self.entries[(i, j)].to_latex()}")
        return "\\begin{align*}\n" + ",\\\\\n".join(lines) + ".\n\\end{align*}"

    def ope_lines(self) -> List[str]:
        """u^i(z)u^j(w) ~ sum_n n! c_n(w)/(z-w)^(n+1) for {u^i_L u^j} = sum c_n L^n."""
        names = self.ring.names
        out = []
        for i in range(self.ngens):
            for j in range(self.ngens):
                parts = []
                fact = 1
                for n, c in enumerate(self.entries[(i, j)].coeffs):
                    if n:
                        fact *= n
                    if not c:
                        continue
                    den = "(z-w)" if n == 0 else f"(z-w)^{n + 1}"
                    parts.append(f"({c * fact})(w)/{den}")
                rhs = " + ".join(parts) if parts else "0"
                out.append(f"{names[i]}(z){names[j]}(w) ~ {rhs}")
        return out

    def to_json(self):
        names = self.ring.names
        return {"label": self.label, "level": str(self.level), "generators": list(names),
                "entries": [{"pair": [names[i], names[j]],
                             "lambda": self.entries[(i, j)].to_json()}
                            for i in range(self.ngens) for j in range(self.ngens)]}



def minus_shift_of_partial(f: DiffPoly, v: JetVar) -> LambdaPoly:
    """(-L - d)^p applied to df/du^{i,p}."""
    fp = f.partial(v)
    if not fp:
        return LambdaPoly.zero(f.ring)
    return lambda_power_of_shift(v.order, -1, f.ring, LambdaPoly.const(fp))


def bracket_with_generator(f: DiffPoly, j: int, t: BracketTable) -> LambdaPoly:
    """{f_L u^j} = sum_{i,p} {u^i_{L+d} u^j}_-> (-L-d)^p df/du^{i,p}."""
    key = (f, j)
    cached = t._cache.get(key)
    if cached is not None:
        return cached
    ring = t.ring
    out = LambdaPoly.zero(ring)
    for v in f.variables():
        b = t.entries[(v.gen, j)]
        if not b:
            continue
        out = out + shift_apply(b, minus_shift_of_partial(f, v), +1)
    t._cache[key] = out
    return out


def master_bracket(f, g, t: BracketTable) -> LambdaPoly:
    """{f_L g} = sum dg/du^{j,q} (L+d)^q {u^i_{L+d} u^j}_-> (-L-d)^p df/du^{i,p}."""
    ring = t.ring
    f = as_poly(ring, f)
    g = as_poly(ring, g)
    out = LambdaPoly.zero(ring)
    gvars = g.variables()
    if not gvars or not f.variables():
        return out
    by_gen: Dict[int, LambdaPoly] = {}
    for w in gvars:
        gq = g.partial(w)
        if w.gen not in by_gen:
            by_gen[w.gen] = bracket_with_generator(f, w.gen, t)
        inner = by_gen[w.gen]
        if not inner:
            continue
        shifted = lambda_power_of_shift(w.order, 1, ring, inner)
        out = out + shifted * gq
    return out


def skew_defect(t: BracketTable) -> Dict[Tuple[int, int], LambdaPoly]:
    """{u^i_L u^j} + {u^j_{-L-d} u^i} for every ordered pair."""
    n = t.ngens
    return {(i, j): t.entries[(i, j)] + reflect(t.entries[(j, i)])
            for i in range(n) for j in range(n)}


def jacobi_defect(t: BracketTable, i: int, j: int, k: int) -> BiLambdaPoly:
    """{u^i_L{u^j_M u^k}} - {u^j_M{u^i_L u^k}} - {{u^i_L u^j}_{L+M} u^k}."""
    ring = t.ring
    ui, uj, uk = ring.var(i), ring.var(j), ring.var(k)
    out = BiLambdaPoly(ring)
    for m, c in enumerate(t.entries[(j, k)].coeffs):
        out = out + BiLambdaPoly.from_lambda(master_bracket(ui, c, t), mu_power=m)
    for m, c in enumerate(t.entries[(i, k)].coeffs):
        out = out - BiLambdaPoly.from_lambda(master_bracket(uj, c, t), mu_power=m, swap=True)
    for m, c in enumerate(t.entries[(i, j)].coeffs):
        out = out - substitute_sum(master_bracket(c, uk, t), lam_extra=m)
    return out


def all_jacobi_defects(t: BracketTable) -> Dict[Tuple[int, int, int], BiLambdaPoly]:
    n = t.ngens
    triples = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
    values = pmap(lambda ijk: jacobi_defect(t, *ijk), triples)
    return dict(zip(triples, values))


def derived_bracket(t: BracketTable, a: JetVar, b: JetVar, first: str = "left") -> LambdaPoly:
    """{u^{k,r}_L u^{l,s}} from the generator entry {u^k_L u^l}.

    Uses {u^{k,r}_L u^l} = {u^k_L u^l}(-L)^r and
    {u^l_L u^{k,r}} = (d+L)^r {u^l_L u^k}; ``first`` picks which rule is
    applied first.  Both orders give the same result.
    """
    a, b = JetVar(*a), JetVar(*b)
    ring = t.ring
    base = t.entries[(a.gen, b.gen)]

    def left(p: LambdaPoly) -> LambdaPoly:
        sign = (-1) ** a.order
        return p.shift(a.order) * sign

    def right(p: LambdaPoly) -> LambdaPoly:
        return lambda_power_of_shift(b.order, 1, ring, p)

    if first == "left":
        return right(left(base))
    if first == "right":
        return left(right(base))
    raise ValueError("first must be 'left' or 'right'")


def table_from_strings(ring: DiffRing, data: Mapping[Tuple[str, str], Sequence[str]],
                       level=0, label: str = "") -> BracketTable:
    """Build a table from {(name_i, name_j): [coeff_0, coeff_1, ...]}."""
    entries = {}
    for (a, b), coeffs in data.items():
        entries[(ring.index(a), ring.index(b))] = LambdaPoly(ring, [ring.parse(c) for c in coeffs])
    return BracketTable(ring, entries, Fraction(level), label)
