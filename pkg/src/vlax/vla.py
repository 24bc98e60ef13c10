"""Affine vertex Lie algebras, classical R-matrices and twisted brackets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .diffpoly import DiffPoly, DiffRing, JetVar
from .lambdapoly import (BracketTable, LambdaPoly, all_jacobi_defects, jacobi_defect,
                         skew_defect)
from .liealg import Decomposition, LieAlgebraSpec, decomposition as make_decomposition
from .linalg import Matrix


class AxiomError(ValueError):
    """A bracket table violating skew-symmetry or the Jacobi identity."""


def axiom_witnesses(t: BracketTable, limit: int = 5) -> List[str]:
    names = t.ring.names
    out = []
    for (i, j), d in sorted(skew_defect(t).items()):
        if d:
            out.append(f"skew ({names[i]}, {names[j]}): {d}")
    for (i, j, k), d in sorted(all_jacobi_defects(t).items()):
        if d:
            out.append(f"jacobi ({names[i]}, {names[j]}, {names[k]}): {d}")
    return out[:limit] if limit else out


@dataclass
class AffineVLA:
    algebra: LieAlgebraSpec
    level: Fraction
    table: BracketTable

    @property
    def ring(self) -> DiffRing:
        return self.table.ring

    def bracket_vec(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> LambdaPoly:
        """{x_L y} = [x, y] + k (x|y) L for fiber vectors x, y."""
        ring = self.ring
        lin = ring.linear(self.algebra.bracket(x, y))
        central = self.level * self.algebra.pair(x, y)
        return LambdaPoly(ring, [lin, ring.const(central)])


def affine_table(a: LieAlgebraSpec, level=0, ring: Optional[DiffRing] = None) -> BracketTable:
    ring = ring or a.ring()
    level = Fraction(level)
    entries = {}
    for i in range(a.dim):
        for j in range(a.dim):
            entries[(i, j)] = LambdaPoly(ring, [ring.linear(a.bracket_basis(i, j)),
                                                ring.const(level * a.form[i][j])])
    return BracketTable(ring, entries, level, f"v_{level}({a.name})", algebra=a)


def affine_vla(a: LieAlgebraSpec, level=0, check: bool = True) -> AffineVLA:
    t = affine_table(a, level)
    if check:
        bad = axiom_witnesses(t, limit=1)
        if bad:
            raise AxiomError(f"affine table of {a.name} fails: {bad[0]}")
    return AffineVLA(a, Fraction(level), t)


@dataclass
class RMatrix:
    """Linear map on the generator fiber, extended degree-wise.

    ``matrix[i][j]`` is the coefficient of u^i in R(u^j).  ``unit`` is the
    eigenvalue on the vacuum, which only enters when R is applied to central
    terms.  The Yang-Baxter checks are evaluated on ``mybe_scale * R``.
    """

    matrix: Matrix
    unit: Fraction = Fraction(1, 2)
    mybe_scale: Fraction = Fraction(1)
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply_vec(self, v: Sequence[Fraction]) -> List[Fraction]:
        return linalg.matvec(self.matrix, v)

    def column(self, j: int) -> List[Fraction]:
        return [row[j] for row in self.matrix]

    def apply_poly(self, p: DiffPoly) -> DiffPoly:
        """R on linear combinations of u^{i,n} and constants."""
        ring = p.ring
        out = ring.zero()
        for m, c in p.terms.items():
            if not m:
                out = out + ring.const(c * self.unit)
                continue
            if len(m) != 1 or m[0][1] != 1:
                raise ValueError(f"R acts on the fiber only, got nonlinear {p}")
            v = m[0][0]
            for i, x in enumerate(self.column(v.gen)):
                if x:
                    out = out + ring.var(i, v.order) * (c * x)
        return out

    def apply_lambda(self, p: LambdaPoly) -> LambdaPoly:
        return p.map(self.apply_poly)

    def scaled(self, s) -> "RMatrix":
        s = Fraction(s)
        return RMatrix([[x * s for x in row] for row in self.matrix], self.unit * s,
                       Fraction(1), self.label)

    def __str__(self):
        return linalg.fmt_matrix(self.matrix)


def identity_rmatrix(n: int, scale=1) -> RMatrix:
    s = Fraction(scale)
    return RMatrix([[s * (i == j) for j in range(n)] for i in range(n)], s, Fraction(1),
                   f"{s}*Id")


def rmatrix_from_decomposition(v: AffineVLA, d: Decomposition) -> RMatrix:
    """R = (P_plus - P_minus)/2; the vacuum sits in the plus part."""
    Pp, Pm = d.projections()
    M = [[(x - y) / 2 for x, y in zip(rp, rm)] for rp, rm in zip(Pp, Pm)]
    return RMatrix(M, Fraction(1, 2), Fraction(2), f"factorizable[{d.kind}]")


def lemma_twist(v: AffineVLA, r: RMatrix, i: int, j: int) -> LambdaPoly:
    """{R u^i_L u^j} + {u^i_L R u^j} on fiber vectors."""
    a = v.algebra
    return (v.bracket_vec(r.column(i), a.unit(j)) + v.bracket_vec(a.unit(i), r.column(j)))


def twisted_table(v: AffineVLA, r: RMatrix, check: bool = True) -> BracketTable:
    a = v.algebra
    entries = {(i, j): lemma_twist(v, r, i, j) for i in range(a.dim) for j in range(a.dim)}
    t = BracketTable(v.ring, entries, v.level, f"{v.table.label}_R[{r.label}]", algebra=a)
    if check:
        bad = axiom_witnesses(t, limit=1)
        if bad:
            raise AxiomError(f"twisted table is not a lambda-bracket, {bad[0]}")
    return t


def mybe_defect(v: AffineVLA, r: RMatrix, classical: bool = False
                ) -> Dict[Tuple[int, int], LambdaPoly]:
    """{R u_L R v} - R{u_L v}_R + {u_L v} for R scaled by ``mybe_scale``.

    With ``classical`` the last term is dropped, giving the cYBE defect.
    """
    rs = r.scaled(r.mybe_scale)
    a = v.algebra
    out = {}
    for i in range(a.dim):
        for j in range(a.dim):
            ri, rj = rs.column(i), rs.column(j)
            d = v.bracket_vec(ri, rj) - rs.apply_lambda(lemma_twist(v, rs, i, j))
            if not classical:
                d = d + v.bracket_vec(a.unit(i), a.unit(j))
            out[(i, j)] = d
    return out


def cybe_defect(v: AffineVLA, r: RMatrix) -> Dict[Tuple[int, int], LambdaPoly]:
    return mybe_defect(v, r, classical=True)


# -- factorization data

@dataclass
class FactorizationData:
    plus_image: Matrix
    minus_image: Matrix
    plus_kernel: Matrix
    minus_kernel: Matrix
    theta: Matrix
    theta_bijective: bool
    kernels_contained: bool
    decomposition_ok: bool
    homomorphism_defects: List[str] = field(default_factory=list)
    scale: Fraction = Fraction(1)

    @property
    def ok(self) -> bool:
        return (self.theta_bijective and self.kernels_contained and self.decomposition_ok
                and not self.homomorphism_defects)


class FactorizationError(ValueError):
    pass


def _quotient_basis(space: Matrix, sub: Matrix) -> Matrix:
    """Vectors of ``space`` completing a basis of ``sub`` to one of ``space``."""
    chosen = [list(v) for v in sub]
    extra = []
    for v in space:
        if not linalg.in_span(v, chosen):
            chosen.append(list(v))
            extra.append(list(v))
    return extra


def decompose_unique(r: Matrix, x: Sequence[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    """x = x_plus - x_minus with x_plus = (R+1)(x/2), x_minus = (R-1)(x/2)."""
    half = [Fraction(c) / 2 for c in x]
    rx = linalg.matvec(r, half)
    return [a + b for a, b in zip(rx, half)], [a - b for a, b in zip(rx, half)]


def factorization_data(v: AffineVLA, r: RMatrix, scaled: bool = False) -> FactorizationData:
    """Images L_pm = (R pm 1)L, kernels ker(R -+ 1) and theta on the fiber.

    ``scaled`` uses ``mybe_scale * R``, the normalization in which the
    Yang-Baxter equation holds with unit constant.
    """
    s = r.mybe_scale if scaled else Fraction(1)
    R = [[x * s for x in row] for row in r.matrix]
    n = len(R)
    I = linalg.identity(n)
    Rp = linalg.add(R, I)
    Rm = linalg.add(R, I, scale=-1)
    plus_image = linalg.column_space(Rp)
    minus_image = linalg.column_space(Rm)
    plus_kernel = linalg.nullspace(Rm)   # ker(R - 1)
    minus_kernel = linalg.nullspace(Rp)  # ker(R + 1)
    kernels_contained = (linalg.is_subspace(plus_kernel, plus_image)
                         and linalg.is_subspace(minus_kernel, minus_image))

    # theta: L_+/ker(R-1) -> L_-/ker(R+1), [(R+1)u] -> [(R-1)u]
    src = _quotient_basis(plus_image, plus_kernel)
    dst = _quotient_basis(minus_image, minus_kernel)
    theta = []
    well_defined = True
    for y in src:
        u = linalg.solve(Rp, y)
        image = linalg.matvec(Rm, u)
        coords = linalg.solve(linalg.transpose(dst + minus_kernel) if (dst or minus_kernel)
                              else [[Fraction(0)] for _ in range(n)], image)
        if coords is None:
            well_defined = False
            theta.append([])
            continue
        theta.append(coords[:len(dst)])
    # independence of the representative u: ker(R+1) must map into ker(R+1)
    for z in minus_kernel:
        if not linalg.in_span(linalg.matvec(Rm, z), minus_kernel):
            well_defined = False
    theta_m = linalg.transpose(theta) if theta and theta[0] else [[] for _ in dst]
    bijective = well_defined and len(src) == len(dst) and (
        not src or linalg.rank(theta_m) == len(src))

    decomposition_ok = True
    for i in range(n):
        x = I[i]
        xp, xm = decompose_unique(R, x)
        if [a - b for a, b in zip(xp, xm)] != x:
            decomposition_ok = False
        if not (linalg.in_span(xp, plus_image) and linalg.in_span(xm, minus_image)):
            decomposition_ok = False

    homs = []
    if scaled:
        a = v.algebra
        for i, j in itertools.product(range(n), repeat=2):
            ei, ej = I[i], I[j]
            tw = [x + y for x, y in zip(a.bracket(linalg.matvec(R, ei), ej),
                                        a.bracket(ei, linalg.matvec(R, ej)))]
            for sign, M in ((1, Rp), (-1, Rm)):
                lhs = linalg.matvec(M, tw)
                rhs = a.bracket(linalg.matvec(M, ei), linalg.matvec(M, ej))
                if lhs != rhs:
                    homs.append(f"(R{'+' if sign > 0 else '-'}1) on "
                                f"({a.names[i]}, {a.names[j]})")
    return FactorizationData(plus_image, minus_image, plus_kernel, minus_kernel, theta_m,
                             bijective, kernels_contained, decomposition_ok, homs, s)


# -- local Lie algebra

def gen_binomial(m: int, n: int) -> Fraction:
    """C(m, n) for any integer m and n >= 0."""
    out = Fraction(1)
    for k in range(n):
        out = out * (m - k) / (k + 1)
    return out


def local_bracket(t: BracketTable, a: int, m: int, b: int, k: int) -> Dict[Tuple[str, int], Fraction]:
    """[a_[m], b_[k]] = sum_n C(m,n) (a_(n) b)_[m+k-n] with a_(n)b = n! * (L^n coeff).

    Constants are multiples of the vacuum, whose only nonzero mode is -1;
    those terms are reported under the key ("K", 0).
    """
    entry = t.entries[(a, b)]
    out: Dict[Tuple[str, int], Fraction] = {}
    fact = 1
    for n, c in enumerate(entry.coeffs):
        if n:
            fact *= n
        if not c:
            continue
        weight = gen_binomial(m, n) * fact
        if not weight:
            continue
        mode = m + k - n
        for mono, coef in c.terms.items():
            if not mono:
                if mode == -1:
                    out[("K", 0)] = out.get(("K", 0), 0) + weight * coef
                continue
            if len(mono) != 1 or mono[0][1] != 1 or mono[0][0].order != 0:
                raise ValueError(f"coefficient {c} is not linear in generators")
            key = (t.ring.names[mono[0][0].gen], mode)
            out[key] = out.get(key, 0) + weight * coef
    return {key: val for key, val in sorted(out.items()) if val}


def format_local(result: Dict[Tuple[str, int], Fraction]) -> str:
    if not result:
        return "0"
    parts = []
    for (name, mode), c in result.items():
        body = "K" if name == "K" else f"{name}_[{mode}]"
        mag = abs(c)
        parts.append(("-" if c < 0 else "+", body if mag == 1 else f"{mag}*{body}"))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out


class LevelError(ValueError):
    pass


def builtin_rmatrix(v: AffineVLA, kind: str, strict: bool = False) -> Tuple[RMatrix, Decomposition]:
    """Factorizable R of a named decomposition; Iwasawa is only defined at level 0."""
    if kind == "iwasawa" and v.level != 0:
        raise LevelError(f"the Iwasawa R-matrix is only defined at level 0, got {v.level}")
    d = make_decomposition(v.algebra, kind, strict=strict)
    return rmatrix_from_decomposition(v, d), d
