from fractions import Fraction

import pytest

import oracles as O
from vlax.diffpoly import DiffRing
from vlax.lambdapoly import BracketTable, LambdaPoly
from vlax.liealg import build_algebra
from vlax.pva import (DEFAULT_SIGMA, SkewError, axioms_report, center_find, diff_printed_matrix,
                      is_central, poisson_matrix)
from vlax.vla import affine_vla, builtin_rmatrix, twisted_table


def twisted(alg, kind, level=0):
    v = affine_vla(build_algebra(alg), level)
    R, _ = builtin_rmatrix(v, kind)
    return v, twisted_table(v, R, check=False)


def test_default_orientation():
    assert DEFAULT_SIGMA == -1


def test_sl2_borel_matrix():
    _, t = twisted("sl2", "borel")
    P = poisson_matrix(t)
    assert [[P.entry_str(i, j) for j in range(3)] for i in range(3)] == \
        [["0", "0", "0"], ["0", "0", "2*e"], ["0", "-2*e", "0"]]
    strict = poisson_matrix(t, 1)
    assert strict.entry_str(1, 2) == "-2*e"


def test_sl2_iwasawa_matrix():
    _, t = twisted("sl2", "iwasawa")
    P = poisson_matrix(t)
    assert [[P.entry_str(i, j) for j in range(3)] for i in range(3)] == \
        [["0", "f - e", "0"], ["-f + e", "0", "-f + e"], ["0", "f - e", "0"]]


def test_heisenberg_is_d():
    r = DiffRing(("u",))
    t = BracketTable(r, {(0, 0): LambdaPoly(r, [r.zero(), r.one()])})
    assert poisson_matrix(t).entry_str(0, 0) == "-d"
    assert poisson_matrix(t, 1).entry_str(0, 0) == "d"


def test_skew_check():
    r = DiffRing(("u",))
    t = BracketTable(r, {(0, 0): LambdaPoly(r, [r.one()])})
    with pytest.raises(SkewError):
        poisson_matrix(t)


def test_axioms_pass_and_fail():
    a = build_algebra("sl2")
    assert axioms_report(affine_vla(a, 1).table).passed
    assert axioms_report(twisted("sl3", "borel", Fraction(1, 3))[1]).passed
    base = affine_vla(a, 0).table
    bad = dict(base.entries)
    bad[(2, 1)] = LambdaPoly(base.ring, [base.ring.parse("2*e")])
    rep = axioms_report(BracketTable(base.ring, bad))
    assert not rep.passed
    assert any("(e, h)" in w for w in rep.witnesses())


def test_center_sl2_and_sl3():
    a = build_algebra("sl2")
    t = affine_vla(a, 0).table
    one, S = center_find(t, 2)
    assert one == t.ring.one() and S == t.ring.parse("1/2*h^2 + 2*f*e")
    assert is_central(S.derivative(), t)
    assert not is_central(t.ring.var(2), t)
    b = build_algebra("sl3")
    basis = center_find(affine_vla(b, 0).table, 3)
    assert [p.degree() for p in basis] == [0, 2, 3]


def test_diff_matches_printed():
    printed = O.printed()["matrices"]
    _, t = twisted("sl2", "borel")
    d = diff_printed_matrix(poisson_matrix(t), printed["sl2_borel"]["rows"])
    assert not d.entries and d.orientation == "as printed"


def test_diff_reports_typos():
    _, t = twisted("sl2", "borel")
    rows = [["0", "0", "0"], ["0", "0", "2*e"], ["0", "-2*e8", "0"]]
    d = diff_printed_matrix(poisson_matrix(t), rows)
    assert [(x.i, x.j) for x in d.entries] == [(2, 1)]
    assert d.entries[0].witness.startswith("unparseable")
    assert not d.unexplained
    rows[1][2] = "3*e"
    rows[2][1] = "-2*e"
    d = diff_printed_matrix(poisson_matrix(t), rows)
    assert [(x.i, x.j) for x in d.entries] == [(1, 2)]
    assert "not skew" in d.entries[0].witness
