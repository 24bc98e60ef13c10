"""Differential polynomials in jet variables u^{i,n} with rational coefficients.

A ``DiffRing`` fixes the generator names.  A ``DiffPoly`` is a sparse map from
monomials to nonzero ``Fraction`` coefficients.  A monomial is a sorted tuple of
``((gen, order), exponent)`` pairs, so equal polynomials have equal term maps.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, NamedTuple, Sequence, Tuple

import numpy as np


class JetVar(NamedTuple):
    gen: int
    order: int


Monomial = Tuple[Tuple[JetVar, int], ...]

ONE: Monomial = ()


class RingMismatchError(ValueError):
    """Operands live in rings with different generators."""


class ParseError(ValueError):
    pass


class DiffRing:
    """The polynomial ring in u^{i,n}, i < len(names), n >= 0."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        for n in names:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", n):
                raise ValueError(f"bad generator name {n!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    @property
    def ngens(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def __eq__(self, other):
        return isinstance(other, DiffRing) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"DiffRing({list(self.names)})"

    def zero(self) -> "DiffPoly":
        return DiffPoly(self, {})

    def one(self) -> "DiffPoly":
        return DiffPoly(self, {ONE: Fraction(1)})

    def const(self, c) -> "DiffPoly":
        c = Fraction(c)
        return DiffPoly(self, {ONE: c} if c else {})

    def var(self, gen, order: int = 0) -> "DiffPoly":
        if isinstance(gen, str):
            gen = self.index(gen)
        if not 0 <= gen < self.ngens:
            raise IndexError(f"generator index {gen} out of range for {self.ngens} generators")
        if order < 0:
            raise ValueError("jet order must be non-negative")
        return DiffPoly(self, {((JetVar(gen, order), 1),): Fraction(1)})

    def gens(self) -> Tuple["DiffPoly", ...]:
        return tuple(self.var(i) for i in range(self.ngens))

    def linear(self, coeffs: Sequence) -> "DiffPoly":
        """sum_i coeffs[i] * u^i"""
        terms = {}
        for i, c in enumerate(coeffs):
            c = Fraction(c)
            if c:
                terms[((JetVar(i, 0), 1),)] = c
        return DiffPoly(self, terms)

    def var_name(self, v: JetVar) -> str:
        name = self.names[v.gen]
        if v.order <= 3:
            return name + "'" * v.order
        return f"{name}^({v.order})"

    def parse(self, text: str) -> "DiffPoly":
        return _Parser(self, text).parse()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


class DiffPoly:
    """Immutable differential polynomial."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: DiffRing, terms: Mapping[Monomial, Fraction]):
        self.ring = ring
        self.terms: Dict[Monomial, Fraction] = {m: c for m, c in terms.items() if c}
        self._hash = None

    # -- construction helpers
    def _new(self, terms) -> "DiffPoly":
        p = DiffPoly.__new__(DiffPoly)
        p.ring = self.ring
        p.terms = terms
        p._hash = None
        return p

    def _coerce(self, other) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            if other.ring != self.ring:
                raise RingMismatchError(
                    f"ring mismatch: {len(self.ring.names)} generators {self.ring.names} vs "
                    f"{len(other.ring.names)} generators {other.ring.names}")
            return other
        return self.ring.const(_as_fraction(other))

    # -- ring operations
    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return self._new(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._new({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "DiffPoly":
        c = _as_fraction(c)
        if not c:
            return self._new({})
        return self._new({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, DiffPoly):
            return self.scale(other)
        other = self._coerce(other)
        if len(other.terms) == 1 and ONE in other.terms:
            return self.scale(other.terms[ONE])
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = terms.get(m, 0) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
        return self._new(terms)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(1 / _as_fraction(other))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({ONE: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- inspection
    def constant_term(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def is_constant(self) -> bool:
        return all(m == ONE for m in self.terms)

    def variables(self) -> Tuple[JetVar, ...]:
        vs = set()
        for m in self.terms:
            vs.update(v for v, _ in m)
        return tuple(sorted(vs))

    def max_order(self) -> int:
        return max((v.order for v in self.variables()), default=-1)

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "DiffPoly":
        return self._new({m: c for m, c in self.terms.items() if sum(e for _, e in m) == d})

    def canonical(self) -> "DiffPoly":
        return self._new({m: c for m, c in self.terms.items() if c})

    # -- derivations
    def partial(self, v: JetVar) -> "DiffPoly":
        v = JetVar(*v)
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for k, (w, e) in enumerate(m):
                if w == v:
                    rest = m[:k] + (((w, e - 1),) if e > 1 else ()) + m[k + 1:]
                    terms[rest] = terms.get(rest, 0) + c * e
                    break
        return self._new({m: c for m, c in terms.items() if c})

    def derivative(self, times: int = 1) -> "DiffPoly":
        p = self
        for _ in range(times):
            p = p._derive_once()
        return p

    def _derive_once(self) -> "DiffPoly":
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for k, (w, e) in enumerate(m):
                up = JetVar(w.gen, w.order + 1)
                d = dict(m)
                if e > 1:
                    d[w] = e - 1
                else:
                    del d[w]
                d[up] = d.get(up, 0) + 1
                key = tuple(sorted(d.items()))
                s = terms.get(key, 0) + c * e
                if s:
                    terms[key] = s
                else:
                    terms.pop(key, None)
        return self._new(terms)

    def variational(self, gen: int) -> "DiffPoly":
        """delta/delta u^gen = sum_p (-d)^p d/du^{gen,p}"""
        if isinstance(gen, str):
            gen = self.ring.index(gen)
        orders = sorted({v.order for v in self.variables() if v.gen == gen})
        result = self.ring.zero()
        for p in orders:
            term = self.partial(JetVar(gen, p)).derivative(p)
            result = result + (term if p % 2 == 0 else -term)
        return result

    # -- evaluation
    def evaluate(self, values: Mapping[JetVar, object]):
        """Evaluate with numbers or numpy arrays bound to each jet variable."""
        total = 0
        for m, c in self.terms.items():
            t = float(c)
            for v, e in m:
                t = t * values[v] ** e
            total = total + t
        return total

    def compile(self):
        """Return f(values) evaluating the polynomial on float arrays."""
        items = [(float(c), tuple(m)) for m, c in self.terms.items()]

        def f(values):
            total = 0.0
            for c, m in items:
                t = c
                for v, e in m:
                    t = t * (values[v] if e == 1 else values[v] ** e)
                total = total + t
            return np.asarray(total, dtype=float)
        return f

    def substitute_constants(self, values: Mapping[JetVar, Fraction]) -> "DiffPoly":
        """Replace some jet variables by rational constants."""
        result = {}
        for m, c in self.terms.items():
            keep = []
            for v, e in m:
                if v in values:
                    c = c * Fraction(values[v]) ** e
                else:
                    keep.append((v, e))
            key = tuple(keep)
            result[key] = result.get(key, 0) + c
        return self._new({m: c for m, c in result.items() if c})

    # -- printing
    def sorted_terms(self):
        def key(item):
            m, _ = item
            deg = sum(e for _, e in m)
            return (-deg, tuple((v.gen, v.order, -e) for v, e in m))
        return sorted(self.terms.items(), key=key)

    def _mono_factors(self, m: Monomial):
        return sorted(((self.ring.var_name(v), e) for v, e in m),
                      key=lambda t: t[0])

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [n if e == 1 else f"{n}^{e}" for n, e in self._mono_factors(m)]
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"DiffPoly({str(self)!r})"

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for k, (m, c) in enumerate(self.sorted_terms()):
            factors = []
            for v, e in sorted(m, key=lambda t: self.ring.var_name(t[0])):
                name = latex_name(self.ring.names[v.gen])
                if v.order == 0:
                    s = name
                elif v.order <= 3:
                    s = name + "^{" + "\\prime" * v.order + "}"
                else:
                    s = f"{name}^{{({v.order})}}"
                if e != 1:
                    s = "{" + s + "}" + f"^{{{e}}}"
                factors.append(s)
            mag = abs(c)
            if mag == 1 and factors:
                coeff = ""
            elif mag.denominator == 1:
                coeff = str(mag.numerator)
            else:
                coeff = f"\\frac{{{mag.numerator}}}{{{mag.denominator}}}"
            body = " ".join(([coeff] if coeff else []) + factors)
            if k == 0:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out


def latex_name(name: str) -> str:
    m = re.fullmatch(r"([A-Za-z]+)_?(\d+)", name)
    if m:
        return f"{m.group(1)}_{{{m.group(2)}}}"
    return name


def as_poly(ring: DiffRing, x) -> DiffPoly:
    if isinstance(x, DiffPoly):
        if x.ring != ring:
            raise RingMismatchError(f"ring mismatch: {ring.names} vs {x.ring.names}")
        return x
    return ring.const(x)


def poly_sum(ring: DiffRing, items: Iterable[DiffPoly]) -> DiffPoly:
    terms: Dict[Monomial, Fraction] = {}
    for p in items:
        for m, c in p.terms.items():
            terms[m] = terms.get(m, 0) + c
    return DiffPoly(ring, terms)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\^\(\d+\))|('+)|(.))")


class _Parser:
    """Recursive-descent parser for the text grammar printed by ``str``."""

    def __init__(self, ring: DiffRing, text: str):
        self.ring = ring
        self.text = text
        self.tokens = []
        for m in _TOKEN.finditer(text):
            num, name, hat, primes, other = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num)))
            elif name is not None:
                self.tokens.append(("name", name))
            elif hat is not None:
                self.tokens.append(("order", int(hat[2:-1])))
            elif primes is not None:
                self.tokens.append(("order", len(primes)))
            elif other is not None and other.strip():
                self.tokens.append(("op", other))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r} in {self.text!r}")

    def parse(self) -> DiffPoly:
        if not self.tokens:
            raise ParseError("empty expression")
        p = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return p

    def expr(self) -> DiffPoly:
        kind, val = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        p = self.term().scale(sign)
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                p = p + t if val == "+" else p - t
            else:
                return p

    def term(self) -> DiffPoly:
        p = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                q = self.power()
                if val == "*":
                    p = p * q
                else:
                    if not q.is_constant() or not q:
                        raise ParseError(f"division by non-constant in {self.text!r}")
                    p = p / q.constant_term()
            elif kind in ("name", "num") or (kind == "op" and val == "("):
                p = p * self.power()
            else:
                return p

    def power(self) -> DiffPoly:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError(f"expected integer exponent in {self.text!r}")
            return base ** val
        return base

    def atom(self) -> DiffPoly:
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(val)
        if kind == "name":
            try:
                gen = self.ring.index(val)
            except KeyError:
                raise ParseError(f"unknown generator {val!r} in {self.text!r}") from None
            order = 0
            k2, v2 = self.peek()
            if k2 == "order":
                self.take()
                order = v2
            return self.ring.var(gen, order)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")
