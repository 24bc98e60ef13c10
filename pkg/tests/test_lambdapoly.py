from fractions import Fraction

from vlax.diffpoly import DiffRing, JetVar
from vlax.lambdapoly import (BracketTable, LambdaPoly, derived_bracket, jacobi_defect,
                             master_bracket, shift_apply, skew_defect)
from vlax.liealg import build_algebra
from vlax.vla import affine_vla

U = DiffRing(("u",))
HEIS = BracketTable(U, {(0, 0): LambdaPoly(U, [U.zero(), U.one()])}, label="heisenberg")


def lam(ring, *coeffs):
    return LambdaPoly(ring, [ring.parse(c) if isinstance(c, str) else ring.const(c)
                             for c in coeffs])


def sl2(level=0):
    return affine_vla(build_algebra("sl2"), level).table


def test_shift_examples():
    f = DiffRing(("f", "h", "e"))
    assert shift_apply(lam(f, 0, 1), f.var(0)) == lam(f, "f'", "f")
    assert shift_apply(lam(f, 3), f.var(2)) == lam(f, "3*e")
    assert shift_apply(lam(f, 0, 0, 1), f.one()) == lam(f, 0, 0, 1)


def test_text_form():
    assert str(lam(U, "u'", 1)) == "(u') + (1)*L"
    assert str(LambdaPoly.zero(U)) == "0"


def test_master_bracket_examples():
    t = sl2()
    S = t.ring.parse("1/2*h^2 + 2*f*e")
    assert not master_bracket(S, t.ring.var(2), t)
    assert not master_bracket(t.ring.one(), t.ring.var(1), t)
    kdv = master_bracket(U.parse("u^3 + 1/2*u'^2"), U.var(0), HEIS)
    assert kdv.at_zero() == U.parse("6*u*u' - u'''")


def test_generator_entries_reproduced():
    t = sl2(Fraction(3))
    for (i, j), entry in t.entries.items():
        assert master_bracket(t.ring.var(i), t.ring.var(j), t) == entry


def test_skew_examples():
    assert not any(skew_defect(sl2()).values())
    assert not any(skew_defect(HEIS).values())
    t = sl2()
    bad = dict(t.entries)
    bad[(2, 1)] = lam(t.ring, "2*e")
    d = skew_defect(BracketTable(t.ring, bad))
    assert d[(2, 1)] == lam(t.ring, "4*e")


def test_jacobi_examples():
    t = sl2(Fraction(5, 2))
    assert all(not jacobi_defect(t, i, j, k)
               for i in range(3) for j in range(3) for k in range(3))
    bad = dict(t.entries)
    bad[(1, 2)] = lam(t.ring, "3*e")
    assert jacobi_defect(BracketTable(t.ring, bad), 1, 2, 0)


def test_derived_brackets():
    t = sl2()
    assert derived_bracket(t, JetVar(1, 0), JetVar(2, 0)) == t.entry(1, 2)
    assert derived_bracket(t, JetVar(1, 1), JetVar(2, 0)) == lam(t.ring, 0, "-2*e")
    assert derived_bracket(HEIS, JetVar(0, 0), JetVar(0, 1)) == lam(U, 0, 0, 1)


def test_table_renderings():
    t = sl2(1)
    js = t.to_json()
    assert js["generators"] == ["f", "h", "e"] and len(js["entries"]) == 9
    assert any("(z-w)^2" in line for line in t.ope_lines())
    assert "\\lambda" in t.to_latex()
