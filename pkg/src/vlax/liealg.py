"""Finite-dimensional Lie algebras: structure constants, invariant forms,
two-subalgebra decompositions and invariant polynomials."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .diffpoly import DiffPoly, DiffRing, JetVar
from .linalg import Matrix

Vector = List[Fraction]


class LieAlgebraError(ValueError):
    """Structure data violating antisymmetry, Jacobi or invariance."""


class SpecFormatError(LieAlgebraError):
    """Malformed algebra input, as opposed to data failing an axiom."""


class DecompositionError(ValueError):
    pass


class DecompositionUnavailable(DecompositionError):
    """The algebra lacks the data needed to build the requested decomposition."""


@dataclass
class LieAlgebraSpec:
    name: str
    names: Tuple[str, ...]
    structure: Dict[Tuple[int, int], Tuple[Tuple[int, Fraction], ...]]
    form: Matrix
    matrices: Optional[List[Matrix]] = field(default=None, repr=False)
    # (f_index, e_index) for each positive root, and the Cartan generators
    root_pairs: Tuple[Tuple[int, int], ...] = ()
    cartan: Tuple[int, ...] = ()
    decomposition_data: Optional[dict] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.names)

    def ring(self) -> DiffRing:
        return DiffRing(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def unit(self, i: int) -> Vector:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def bracket_basis(self, i: int, j: int) -> Vector:
        v = [Fraction(0)] * self.dim
        for k, c in self.structure.get((i, j), ()):
            v[k] += c
        return v

    def bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                for k, c in self.structure.get((i, j), ()):
                    out[k] += xi * yj * c
        return out

    def pair(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
        return sum((xi * self.form[i][j] * yj for i, xi in enumerate(x) if xi
                    for j, yj in enumerate(y) if yj), Fraction(0))

    def vector_label(self, v: Sequence[Fraction]) -> str:
        return str(self.ring().linear(v))

    def validate(self) -> None:
        n = self.dim
        if len(self.form) != n or any(len(r) != n for r in self.form):
            raise SpecFormatError(f"form must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                a = self.bracket_basis(i, j)
                b = self.bracket_basis(j, i)
                if any(x + y for x, y in zip(a, b)):
                    raise LieAlgebraError(
                        f"antisymmetry fails for ({self.names[i]}, {self.names[j]}): "
                        f"[{self.names[i]},{self.names[j]}] = {self.vector_label(a)}, "
                        f"[{self.names[j]},{self.names[i]}] = {self.vector_label(b)}")
        for i, j, k in itertools.combinations(range(n), 3):
            ei, ej, ek = self.unit(i), self.unit(j), self.unit(k)
            jac = [a + b + c for a, b, c in zip(
                self.bracket(ei, self.bracket(ej, ek)),
                self.bracket(ej, self.bracket(ek, ei)),
                self.bracket(ek, self.bracket(ei, ej)))]
            if any(jac):
                raise LieAlgebraError(
                    f"Jacobi identity fails for (i, j, k) = ({i}, {j}, {k}) "
                    f"= ({self.names[i]}, {self.names[j]}, {self.names[k]}): "
                    f"cyclic sum = {self.vector_label(jac)}")
        for i in range(n):
            for j in range(n):
                if self.form[i][j] != self.form[j][i]:
                    raise LieAlgebraError(
                        f"form is not symmetric at ({self.names[i]}, {self.names[j]})")
        for i, j, k in itertools.product(range(n), repeat=3):
            ei, ej, ek = self.unit(i), self.unit(j), self.unit(k)
            if self.pair(ei, self.bracket(ej, ek)) != self.pair(self.bracket(ei, ej), ek):
                raise LieAlgebraError(
                    f"form is not invariant for (i, j, k) = ({i}, {j}, {k}) "
                    f"= ({self.names[i]}, {self.names[j]}, {self.names[k]})")

    # -- serialization
    def to_json(self) -> dict:
        brackets = []
        for (i, j), items in sorted(self.structure.items()):
            if i < j:
                for k, c in items:
                    brackets.append([i, j, k, c.numerator, c.denominator])
        data = {
            "name": self.name,
            "dim": self.dim,
            "generators": list(self.names),
            "brackets": brackets,
            "form": [[str(x) for x in row] for row in self.form],
        }
        if self.decomposition_data is not None:
            data["decomposition"] = self.decomposition_data
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def from_json(data: dict) -> LieAlgebraSpec:
    try:
        names = tuple(data["generators"])
        dim = int(data["dim"])
        name = str(data.get("name", "custom"))
        raw = data["brackets"]
        form = linalg.to_fractions(data["form"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFormatError(f"malformed algebra spec: {exc}") from None
    if len(names) != dim:
        raise SpecFormatError(f"dim {dim} but {len(names)} generators")
    coeffs: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    given = set()
    for entry in raw:
        if len(entry) != 5:
            raise SpecFormatError(f"bracket entry {entry} must be [i, j, k, num, den]")
        i, j, k, num, den = (int(x) for x in entry)
        if not all(0 <= x < dim for x in (i, j, k)):
            raise SpecFormatError(f"bracket entry {entry} has an index out of range")
        if den == 0:
            raise SpecFormatError(f"bracket entry {entry} has zero denominator")
        c = Fraction(num, den)
        coeffs.setdefault((i, j), {})
        coeffs[(i, j)][k] = coeffs[(i, j)].get(k, 0) + c
        given.add((i, j))
    for (i, j) in list(given):
        if (j, i) not in given:
            coeffs[(j, i)] = {k: -c for k, c in coeffs[(i, j)].items()}
    structure = {key: tuple(sorted((k, c) for k, c in d.items() if c))
                 for key, d in coeffs.items()}
    structure = {k: v for k, v in structure.items() if v}
    spec = LieAlgebraSpec(name, names, structure, form,
                          decomposition_data=data.get("decomposition"))
    spec.validate()
    return spec


def load(path) -> LieAlgebraSpec:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecFormatError(f"{path}: not valid JSON ({exc})") from None
    return from_json(data)


# -- builtin algebras from the defining representation

def _elementary(n: int, i: int, j: int) -> Matrix:
    m = linalg.zeros(n, n)
    m[i][j] = Fraction(1)
    return m


def _commutator(a: Matrix, b: Matrix) -> Matrix:
    return linalg.add(linalg.matmul(a, b), linalg.matmul(b, a), scale=-1)


def _trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def from_matrices(name: str, names: Sequence[str], mats: Sequence[Matrix],
                  root_pairs=(), cartan=()) -> LieAlgebraSpec:
    """Structure constants and trace form of a matrix Lie algebra basis."""
    flat = linalg.transpose([[x for row in m for x in row] for m in mats])
    structure = {}
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            c = _commutator(a, b)
            coords = linalg.solve(flat, [x for row in c for x in row])
            if coords is None:
                raise LieAlgebraError(f"basis of {name} is not closed under the commutator")
            items = tuple((k, x) for k, x in enumerate(coords) if x)
            if items:
                structure[(i, j)] = items
    form = [[_trace(linalg.matmul(a, b)) for b in mats] for a in mats]
    spec = LieAlgebraSpec(name, tuple(names), structure, form, matrices=[m for m in mats],
                          root_pairs=tuple(root_pairs), cartan=tuple(cartan))
    spec.validate()
    return spec


def sl2() -> LieAlgebraSpec:
    f = _elementary(2, 1, 0)
    e = _elementary(2, 0, 1)
    h = _commutator(e, f)
    return from_matrices("sl2", ("f", "h", "e"), [f, h, e], root_pairs=[(0, 2)], cartan=[1])


def sl3() -> LieAlgebraSpec:
    E = lambda i, j: _elementary(3, i, j)  # noqa: E731
    e1, e2 = E(0, 1), E(1, 2)
    f1, f2 = E(1, 0), E(2, 1)
    e3 = _commutator(e1, e2)
    f3 = _commutator(f2, f1)
    h1 = _commutator(e1, f1)
    h2 = _commutator(e2, f2)
    names = ("f1", "f2", "f3", "h1", "h2", "e1", "e2", "e3")
    return from_matrices("sl3", names, [f1, f2, f3, h1, h2, e1, e2, e3],
                         root_pairs=[(0, 5), (1, 6), (2, 7)], cartan=[3, 4])


BUILTINS = {"sl2": sl2, "sl3": sl3}


def build_algebra(source) -> LieAlgebraSpec:
    """A builtin algebra by name, or one read from a JSON spec file."""
    if isinstance(source, LieAlgebraSpec):
        return source
    if source in BUILTINS:
        return BUILTINS[source]()
    path = Path(str(source))
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise FileNotFoundError(f"algebra spec file {path} not found")
        return load(path)
    raise KeyError(f"unknown algebra {source!r}; builtins are {sorted(BUILTINS)}")


# -- decompositions

@dataclass
class Decomposition:
    """g = a + b with both parts given by spanning vectors."""

    kind: str
    plus: Matrix
    minus: Matrix
    plus_labels: Tuple[str, ...] = ()
    minus_labels: Tuple[str, ...] = ()
    closure_witnesses: List[Tuple[str, str, str, str]] = field(default_factory=list)
    minus_isotropic: bool = True
    plus_isotropic: bool = False

    @property
    def closed(self) -> bool:
        return not self.closure_witnesses

    def basis_change(self) -> Matrix:
        """Columns: the plus vectors followed by the minus vectors."""
        return linalg.transpose(self.plus + self.minus)

    def projections(self) -> Tuple[Matrix, Matrix]:
        """(P_plus, P_minus) as matrices acting on coordinate columns."""
        B = self.basis_change()
        Binv = linalg.inverse(B)
        p = len(self.plus)
        n = len(B)
        Dp = [[Fraction(int(i == j and i < p)) for j in range(n)] for i in range(n)]
        Dm = [[Fraction(int(i == j and i >= p)) for j in range(n)] for i in range(n)]
        Pp = linalg.matmul(linalg.matmul(B, Dp), Binv)
        Pm = linalg.matmul(linalg.matmul(B, Dm), Binv)
        return Pp, Pm

    def report(self) -> str:
        lines = [f"decomposition {self.kind}",
                 "  a = span{" + ", ".join(self.plus_labels) + "}",
                 "  b = span{" + ", ".join(self.minus_labels) + "}"]
        if self.closed:
            lines.append("  both parts closed under the bracket")
        for part, x, y, z in self.closure_witnesses:
            lines.append(f"  not closed: [{x}, {y}] = {z} lies outside {part}")
        lines.append(f"  b isotropic: {'yes' if self.minus_isotropic else 'no'}")
        return "\n".join(lines)


def _closure_witnesses(a: LieAlgebraSpec, vectors: Matrix, part: str):
    out = []
    for x, y in itertools.combinations(vectors, 2):
        z = a.bracket(x, y)
        if not linalg.in_span(z, vectors):
            out.append((part, a.vector_label(x), a.vector_label(y), a.vector_label(z)))
    return out


def make_decomposition(a: LieAlgebraSpec, kind: str, plus: Matrix, minus: Matrix,
                       strict: bool = False) -> Decomposition:
    n = a.dim
    if linalg.rank(plus + minus) != n or len(plus) + len(minus) != n:
        raise DecompositionError(f"{kind}: the two parts do not form a direct sum spanning g")
    witnesses = _closure_witnesses(a, plus, "a") + _closure_witnesses(a, minus, "b")
    d = Decomposition(
        kind, plus, minus,
        tuple(a.vector_label(v) for v in plus), tuple(a.vector_label(v) for v in minus),
        witnesses,
        minus_isotropic=all(a.pair(x, y) == 0 for x in minus for y in minus),
        plus_isotropic=all(a.pair(x, y) == 0 for x in plus for y in plus))
    if strict and witnesses:
        part, x, y, z = witnesses[0]
        raise DecompositionError(
            f"{kind}: subspace {part} is not a subalgebra, [{x}, {y}] = {z}")
    return d


def decomposition(a: LieAlgebraSpec, kind: str, strict: bool = False) -> Decomposition:
    """Borel, Iwasawa or the custom decomposition stored with the algebra."""
    if kind == "borel":
        if not a.root_pairs:
            raise DecompositionUnavailable(f"{a.name} carries no root data")
        neg = sorted(fi for fi, _ in a.root_pairs)
        plus = [a.unit(i) for i in list(a.cartan) + sorted(ei for _, ei in a.root_pairs)]
        minus = [a.unit(i) for i in neg]
        return make_decomposition(a, kind, plus, minus, strict)
    if kind == "iwasawa":
        if not a.root_pairs:
            raise DecompositionUnavailable(f"{a.name} carries no root data")
        plus, minus = [], []
        for fi, ei in a.root_pairs:
            v = a.unit(ei)
            v[fi] += 1
            plus.append(v)
        plus += [a.unit(i) for i in a.cartan]
        for fi, ei in a.root_pairs:
            v = a.unit(ei)
            v[fi] -= 1
            minus.append(v)
        return make_decomposition(a, kind, plus, minus, strict)
    if kind == "custom":
        data = a.decomposition_data
        if not data:
            raise DecompositionUnavailable(f"{a.name} has no stored decomposition")
        plus_raw = data.get("plus", [])
        if plus_raw and all(isinstance(x, int) for x in plus_raw):
            plus = [a.unit(i) for i in plus_raw]
        else:
            plus = linalg.to_fractions(plus_raw)
        if "minus_basis" in data:
            minus = linalg.to_fractions(data["minus_basis"])
        else:
            minus = [a.unit(i) for i in data.get("minus", [])]
        return make_decomposition(a, kind, plus, minus, strict)
    if kind == "identity":
        return make_decomposition(a, kind, [a.unit(i) for i in range(a.dim)], [], strict)
    raise KeyError(f"unknown decomposition {kind!r}")


# -- invariant polynomials

def coadjoint_polys(a: LieAlgebraSpec, ring: DiffRing) -> Dict[Tuple[int, int], DiffPoly]:
    """[u^i, u^j] as linear polynomials."""
    return {(i, j): ring.linear(a.bracket_basis(i, j))
            for i in range(a.dim) for j in range(a.dim)}


def casimir(a: LieAlgebraSpec) -> DiffPoly:
    """sum (G^{-1})_{ab} u^a u^b for the invariant form G."""
    ring = a.ring()
    ginv = linalg.inverse(a.form)
    u = ring.gens()
    out = ring.zero()
    for i in range(a.dim):
        for j in range(a.dim):
            if ginv[i][j]:
                out = out + u[i] * u[j] * ginv[i][j]
    return out


def trace_power(a: LieAlgebraSpec, d: int) -> Optional[DiffPoly]:
    """tr(M^d) with M = sum_a u^a X^a and X^a the dual basis in the defining rep."""
    if not a.matrices:
        return None
    ring = a.ring()
    ginv = linalg.inverse(a.form)
    n = len(a.matrices[0])
    u = ring.gens()
    dual = []
    for i in range(a.dim):
        m = linalg.zeros(n, n)
        for j in range(a.dim):
            if ginv[i][j]:
                m = linalg.add(m, a.matrices[j], scale=ginv[i][j])
        dual.append(m)
    M = [[ring.zero() for _ in range(n)] for _ in range(n)]
    for i in range(a.dim):
        for r in range(n):
            for c in range(n):
                if dual[i][r][c]:
                    M[r][c] = M[r][c] + u[i] * dual[i][r][c]
    P = M
    for _ in range(d - 1):
        P = [[sum((P[r][k] * M[k][c] for k in range(n)), ring.zero())
              for c in range(n)] for r in range(n)]
    return sum((P[i][i] for i in range(n)), ring.zero())


def _monomials(ngens: int, d: int):
    for combo in itertools.combinations_with_replacement(range(ngens), d):
        counts: Dict[int, int] = {}
        for g in combo:
            counts[g] = counts.get(g, 0) + 1
        yield tuple((JetVar(g, 0), e) for g, e in sorted(counts.items()))


def kernel_polys(ring: DiffRing, monos: Sequence, conditions) -> List[DiffPoly]:
    """Basis of the span of monomials on which every linear condition vanishes.

    ``conditions(m)`` maps a monomial polynomial to DiffPolys that must all
    vanish, as a list or as a dict keyed by condition label.
    """
    rows: Dict[Tuple, Dict[int, Fraction]] = {}
    for col, m in enumerate(monos):
        mono = DiffPoly(ring, {m: Fraction(1)})
        conds = conditions(mono)
        items = conds.items() if isinstance(conds, dict) else enumerate(conds)
        for r, poly in items:
            for key, c in poly.terms.items():
                rows.setdefault((r, key), {})[col] = c
    basis = linalg.sparse_nullspace(list(rows.values()), len(monos))
    return [DiffPoly(ring, {m: c for m, c in zip(monos, v) if c}) for v in basis]


def _normalize_leading(p: DiffPoly) -> DiffPoly:
    _, c = p.sorted_terms()[0]
    return p / c


def invariant_polynomials(a: LieAlgebraSpec, degree: int) -> List[DiffPoly]:
    """Degree-d polynomials P with sum_i [u^i,u^j] dP/du^i = 0 for all j."""
    if degree < 2:
        raise ValueError("degree must be at least 2")
    ring = a.ring()
    br = coadjoint_polys(a, ring)
    u = ring.gens()
    monos = list(_monomials(a.dim, degree))

    def conditions(mono: DiffPoly):
        out = []
        for j in range(a.dim):
            acc = ring.zero()
            for v in mono.variables():
                acc = acc + br[(v.gen, j)] * mono.partial(v)
            out.append(acc)
        return out

    basis = kernel_polys(ring, monos, conditions)
    if not basis:
        return []
    if len(basis) == 1:
        ref = None
        if degree == 2:
            ref = casimir(a)
        elif a.matrices:
            ref = trace_power(a, degree)
        if ref:
            p = basis[0]
            m, c = p.sorted_terms()[0]
            ratio = ref.terms.get(m, Fraction(0)) / c
            if ratio and p * ratio == ref:
                return [ref]
    return [_normalize_leading(p) for p in basis]
