"""Reference computations that share no code with the bracket machinery.

Everything here works with explicit 3x3 / 2x2 matrices in sympy: brackets
are matrix commutators, R-matrices act on matrices directly, Hamiltonians
are traces of powers.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import sympy as sp

DATA = Path(__file__).parent / "data"


def printed():
    with open(DATA / "printed.json") as fh:
        return json.load(fh)


def E(n, i, j):
    m = sp.zeros(n, n)
    m[i, j] = 1
    return m


def sl2_basis():
    f, e = E(2, 1, 0), E(2, 0, 1)
    return ("f", "h", "e"), [f, e * f - f * e, e]


def sl3_basis():
    e1, e2, f1, f2 = E(3, 0, 1), E(3, 1, 2), E(3, 1, 0), E(3, 2, 1)
    e3 = e1 * e2 - e2 * e1
    f3 = f2 * f1 - f1 * f2
    h1 = e1 * f1 - f1 * e1
    h2 = e2 * f2 - f2 * e2
    return ("f1", "f2", "f3", "h1", "h2", "e1", "e2", "e3"), [f1, f2, f3, h1, h2, e1, e2, e3]


BASES = {"sl2": sl2_basis, "sl3": sl3_basis}


def coords(basis, m):
    """Coordinates of a matrix in the basis, by solving the flattened system."""
    A = sp.Matrix.hstack(*[b.reshape(len(b), 1) for b in basis])
    sol = A.solve_least_squares(m.reshape(len(m), 1))
    assert A * sol == m.reshape(len(m), 1), "matrix not in span"
    return list(sol)


def r_borel(x):
    """(1/2)(b-part - n_minus-part): upper triangle with diagonal minus strict lower."""
    n = x.shape[0]
    up = sp.Matrix(n, n, lambda i, j: x[i, j] if j >= i else 0)
    low = x - up
    return (up - low) / 2


def r_iwasawa(x):
    """a = symmetric traceless, b = antisymmetric, so (P+ - P-)/2 is half the transpose."""
    return x.T / 2


R_ORACLES = {"borel": r_borel, "iwasawa": r_iwasawa}


def twisted_structure(alg, kind):
    """{u^i_L u^j}_R at level 0 as coordinate vectors: [R x_i, x_j] + [x_i, R x_j]."""
    names, basis = BASES[alg]()
    R = R_ORACLES[kind]
    out = {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            m = (R(a) * b - b * R(a)) + (a * R(b) - R(b) * a)
            out[(i, j)] = coords(basis, m)
    return names, out


def hamiltonian(alg, degree):
    """tr(M^d) with M = sum_a u_a X^a, X^a dual to the basis under the trace form."""
    names, basis = BASES[alg]()
    syms = sp.symbols(" ".join(names))
    G = sp.Matrix(len(basis), len(basis), lambda i, j: (basis[i] * basis[j]).trace())
    Ginv = G.inv()
    n = basis[0].shape[0]
    M = sp.zeros(n, n)
    for a in range(len(basis)):
        dual = sp.zeros(n, n)
        for b in range(len(basis)):
            dual += Ginv[a, b] * basis[b]
        M += syms[a] * dual
    return syms, sp.expand((M ** degree).trace())


def lie_poisson_flow(alg, kind, H, syms, sigma=-1):
    """ODE flow du^i/dt = sigma * sum_j {u^j_L u^i}_R dH/du^j at level 0."""
    names, table = twisted_structure(alg, kind)
    out = []
    for i in range(len(names)):
        acc = 0
        for j in range(len(names)):
            lin = sum(c * s for c, s in zip(table[(j, i)], syms))
            acc += lin * sp.diff(H, syms[j])
        out.append(sp.expand(sigma * acc))
    return out


def sympy_of(poly, syms):
    """A jet-order-0 DiffPoly as a sympy expression in the given symbols."""
    acc = sp.Integer(0)
    for mono, c in poly.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for v, e in mono:
            assert v.order == 0
            term *= syms[v.gen] ** e
        acc += term
    return sp.expand(acc)


def kdv_flow(density, sigma):
    """sigma * d(delta h / delta u) for {u_L u} = L, via sympy's Euler operator."""
    x = sp.Symbol("x")
    u = sp.Function("u")(x)
    h = density(u, u.diff(x))
    var = sp.diff(h, u) - sp.diff(sp.diff(h, u.diff(x)), x)
    return sp.expand(sigma * sp.diff(var, x)), u, x


def borel_theorem(a, k):
    """Borel-twisted table entries read off the displayed theorem, literally.

    Keys are index pairs (i, j) of the six displayed patterns; values are
    (lambda^0 vector, lambda^1 scalar).
    """
    neg = [fi for fi, _ in a.root_pairs]
    pos = [ei for _, ei in a.root_pairs]
    cart = list(a.cartan)
    e_of = dict(zip(neg, pos))
    zero = [Fraction(0)] * a.dim
    out = {}
    for i in neg:
        for j in neg:
            out[(i, j)] = (a.bracket_basis(i, j), -a.form[e_of[i]][e_of[j]])
        for p in cart:
            out[(i, p)] = (zero, Fraction(0))
        for j in pos:
            out[(i, j)] = (zero, Fraction(0))
    for p in cart:
        for q in cart:
            out[(p, q)] = (zero, a.form[p][q] * k)
        for j in pos:
            out[(p, j)] = (a.bracket_basis(p, j), a.form[p][j] * k)
    for i in pos:
        for j in pos:
            out[(i, j)] = (a.bracket_basis(i, j), a.form[i][j] * k)
    return out


def iwasawa_theorem(a):
    """Iwasawa-twisted level-0 entries read off the displayed theorem, literally."""
    neg = [fi for fi, _ in a.root_pairs]
    pos = [ei for _, ei in a.root_pairs]
    cart = list(a.cartan)
    partner = dict(zip(neg, pos))
    partner.update(zip(pos, neg))
    half = Fraction(1, 2)

    def comb(*terms):
        v = [Fraction(0)] * a.dim
        for c, vec in terms:
            for n, x in enumerate(vec):
                v[n] += c * x
        return v

    out = {}
    for i in neg:
        ei = partner[i]
        for j in neg:
            ej = partner[j]
            out[(i, j)] = comb((half, a.bracket_basis(ei, ej)), (half, a.bracket_basis(i, ej)))
        for p in cart:
            al = _alpha(a, p, ei)
            # the display writes e^{-alpha_j} here; only i is bound in this entry
            out[(i, p)] = comb((-al * half, a.unit(ei)), (al * half, a.unit(i)))
        for j in pos:
            fj = partner[j]
            out[(i, j)] = comb((half, a.bracket_basis(ei, j)), (half, a.bracket_basis(i, fj)))
    for p in cart:
        for q in cart:
            out[(p, q)] = [Fraction(0)] * a.dim
        for j in pos:
            al = _alpha(a, p, j)
            out[(p, j)] = comb((al * half, a.unit(j)), (-al * half, a.unit(partner[j])))
    for i in pos:
        for j in pos:
            out[(i, j)] = comb((half, a.bracket_basis(i, j)),)
    return {k: (v, Fraction(0)) for k, v in out.items()}


def _alpha(a, p, j):
    v = a.bracket_basis(p, j)
    return v[j]
