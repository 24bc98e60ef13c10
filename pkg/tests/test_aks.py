from fractions import Fraction

import pytest

import oracles as O
from vlax.aks import (Hamiltonian, NotCentralError, diff_printed_flow, flow, functional_bracket,
                      hamiltonian_family, involution_matrix, is_total_derivative,
                      lemma_twist_defect, twb_identity_defect)
from vlax.diffpoly import DiffRing
from vlax.liealg import build_algebra
from vlax.pva import center_find, poisson_matrix
from vlax.vla import affine_vla, builtin_rmatrix, twisted_table

U = DiffRing(("u",))


def setup(kind, alg="sl2"):
    v = affine_vla(build_algebra(alg), 0)
    R, _ = builtin_rmatrix(v, kind)
    t = twisted_table(v, R, check=False)
    return v, R, t, center_find(v.table, 2)[1]


def rhs(fs):
    return [str(p) for p in fs.rhs]


def test_families():
    v, _, _, S = setup("borel")
    assert hamiltonian_family(S, "power", 1).density == v.ring.parse("1/2*h^2 + 2*f*e")
    assert hamiltonian_family(S, "power", 2).density == S * S
    assert hamiltonian_family(S, "deriv_product", 2).density == S * S.derivative(2)
    with pytest.raises(NotCentralError):
        hamiltonian_family(v.ring.var(2), "power", 1, v.table)
    with pytest.raises(ValueError):
        hamiltonian_family(S, "power", 0)


def test_borel_first_flow():
    _, _, t, S = setup("borel")
    fs = flow(hamiltonian_family(S, "power", 1), poisson_matrix(t))
    assert rhs(fs) == ["0", "4*e*f", "-2*e*h"]


def test_borel_second_flow_h_component():
    v, _, t, S = setup("borel")
    fs = flow(hamiltonian_family(S, "deriv_product", 2), poisson_matrix(t, 1))
    assert fs.rhs[1] == v.ring.parse("-8*f*e*(h'^2 + 4*f'*e' + 2*e*f'' + h*h'' + 2*f*e'')")


def test_iwasawa_first_flow_strict():
    v, _, t, S = setup("iwasawa")
    fs = flow(hamiltonian_family(S, "power", 1), poisson_matrix(t, 1))
    assert fs.rhs == [v.ring.parse(x) for x in ("-h*(f - e)", "2*(f - e)*(f + e)", "-h*(f - e)")]
    default = flow(hamiltonian_family(S, "power", 1), poisson_matrix(t))
    assert default.rhs == [-p for p in fs.rhs]


@pytest.mark.parametrize("kind", ["borel", "iwasawa"])
def test_flows_match_lie_poisson_oracle(kind):
    v, _, t, S = setup(kind)
    syms, H = O.hamiltonian("sl2", 2)
    for sigma in (-1, 1):
        fs = flow(Hamiltonian(S), poisson_matrix(t, sigma))
        expect = O.lie_poisson_flow("sl2", kind, H, syms, sigma)
        assert O.sympy_of(S, syms) == H
        assert [O.sympy_of(p, syms) for p in fs.rhs] == expect


def test_functional_bracket_examples():
    v, _, t, S = setup("borel")
    assert not functional_bracket(S, S, v.table)
    g = functional_bracket(S, S * S, t)
    assert all(not g.variational(i) for i in range(3))
    he = functional_bracket(v.ring.var(1), v.ring.var(2), t)
    assert he == v.ring.parse("2*e") and not is_total_derivative(he)


def test_total_derivative_detection():
    assert is_total_derivative(U.parse("u*u'' + u'^2"))
    assert not is_total_derivative(U.parse("u*u''"))
    assert is_total_derivative(U.parse("u^3*u'''").derivative())


def test_involution_matrices():
    v, _, t, S = setup("borel")
    hs = [hamiltonian_family(S, "power", n) for n in (1, 2, 3)]
    assert involution_matrix(hs, t, v.table) == [[True] * 3] * 3
    v, _, t, S = setup("iwasawa")
    hs = [hamiltonian_family(S, "deriv_product", n) for n in (1, 2)]
    assert involution_matrix(hs, t, v.table) == [[True] * 2] * 2
    e = Hamiltonian(v.ring.var(2))
    assert not all(all(r) for r in involution_matrix([Hamiltonian(S), e], t))
    with pytest.raises(NotCentralError):
        involution_matrix([Hamiltonian(S), e], t, v.table)


def test_twisted_bracket_identity():
    v, R, _, S = setup("borel")
    r = v.ring
    for f, g in [("h^2 + f*e", "e*h'"), ("f*h + 3", "e^2 - h"), ("2", "f*e")]:
        assert not twb_identity_defect(r.parse(f), r.parse(g), v, R)
    vi, Ri, _, Si = setup("iwasawa")
    assert not twb_identity_defect(Si, Si, vi, Ri)
    assert lemma_twist_defect(v, R) == []


def test_diff_printed_flow():
    v, _, t, S = setup("borel")
    fs = flow(hamiltonian_family(S, "power", 1), poisson_matrix(t))
    ok = diff_printed_flow(fs, {"f": "0", "h": "4 e f", "e": "-2 e h"})
    assert ok.matches
    bad = diff_printed_flow(fs, {"f": "0", "h": "-4 e f", "e": "2 e h"})
    assert bad.mismatched == [1, 2]
    assert bad.scale == -1 and bad.proportional() == [0, 1, 2]
