from fractions import Fraction

import sympy as sp
from hypothesis import given, settings, strategies as st

from vlax import linalg

small = st.integers(-3, 3).map(Fraction)
matrices = st.integers(1, 4).flatmap(
    lambda n: st.integers(1, 4).flatmap(
        lambda m: st.lists(st.lists(small, min_size=m, max_size=m), min_size=n, max_size=n)))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_and_nullspace_match_sympy(a):
    assert linalg.rank(a) == sp.Matrix(a).rank()
    ns = linalg.nullspace(a, len(a[0]))
    assert len(ns) == len(a[0]) - linalg.rank(a)
    for v in ns:
        assert all(x == 0 for x in linalg.matvec(a, v))


def test_inverse_and_solve():
    a = linalg.to_fractions([[2, 1], [1, 1]])
    assert linalg.matmul(a, linalg.inverse(a)) == linalg.identity(2)
    assert linalg.solve(a, [Fraction(3), Fraction(2)]) == [1, 1]
    assert linalg.solve(linalg.to_fractions([[1, 1], [1, 1]]), [Fraction(1), Fraction(2)]) is None


def test_sparse_nullspace_agrees():
    rows = [{0: Fraction(1), 2: Fraction(-1)}, {1: Fraction(2), 2: Fraction(-2)}]
    dense = [[Fraction(1), 0, Fraction(-1)], [0, Fraction(2), Fraction(-2)]]
    assert linalg.span_basis(linalg.sparse_nullspace(rows, 3)) == \
        linalg.span_basis(linalg.nullspace(dense, 3))


def test_span_predicates():
    basis = [[Fraction(1), Fraction(1), 0]]
    assert linalg.in_span([Fraction(2), Fraction(2), 0], basis)
    assert not linalg.in_span([Fraction(1), 0, 0], basis)
    assert linalg.is_subspace(basis, linalg.identity(3))
