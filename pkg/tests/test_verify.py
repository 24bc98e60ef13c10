from dataclasses import replace

import numpy as np
import pytest

from vlax.aks import Hamiltonian, flow, hamiltonian_family
from vlax.diffpoly import DiffRing
from vlax.lambdapoly import BracketTable, LambdaPoly
from vlax.liealg import build_algebra
from vlax.pva import center_find, poisson_matrix
from vlax.verify import (FAMILIES, ContractError, SampleGrid, default_grid, residual_check,
                         rk4_integrate)
from vlax.vla import affine_vla, builtin_rmatrix, twisted_table


def system(sol):
    alg, kind, fam, n, sigma = sol.system
    v = affine_vla(build_algebra(alg), 0)
    R, _ = builtin_rmatrix(v, kind)
    t = twisted_table(v, R)
    S = center_find(v.table, 2)[1]
    return flow(hamiltonian_family(S, fam, n), poisson_matrix(t, sigma)), S


@pytest.mark.parametrize("name, params, tol", [
    ("rational", {"C": 1.0}, 1e-12), ("rational", {"C": 3.5}, 1e-12),
    ("oscillator", {"A": 1.0}, 1e-12), ("oscillator", {"A": 0.3}, 1e-12),
    ("soliton", {"c": 1.0}, 1e-8), ("soliton", {"c": 2.5, "x0": 1.0}, 1e-8),
])
def test_closed_forms_solve_their_flows(name, params, tol):
    sol = FAMILIES[name](**params)
    fs, _ = system(sol)
    rep = residual_check(fs, sol, default_grid(sol), tol)
    assert rep.passed, rep.to_json()


def test_wrong_orientation_is_detected():
    sol = FAMILIES["rational"]()
    fs, _ = system(sol)
    flipped = replace(fs, rhs=[-p for p in fs.rhs])
    assert not residual_check(flipped, sol, default_grid(sol), 1e-12).passed


def test_contract_errors():
    sol = FAMILIES["rational"]()
    r = DiffRing(("u",))
    heis = BracketTable(r, {(0, 0): LambdaPoly(r, [r.zero(), r.one()])})
    fs = flow(Hamiltonian(r.parse("u^3")), poisson_matrix(heis))
    with pytest.raises(ContractError):
        residual_check(fs, sol, default_grid(sol), 1e-12)
    with pytest.raises(ContractError):
        rk4_integrate(fs, [1.0], (0.0, 1.0), 0.1)


def test_rk4_convergence_order():
    fs, S = system(FAMILIES["rational"]())
    errs = []
    for dt in (0.1, 0.05, 0.025):
        traj = rk4_integrate(fs, [1.0, 1.0, -0.25], (0.0, 1.0), dt)
        errs.append(abs(traj.states[-1][1] - 0.5))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 3.7)


def test_rk4_zero_rhs_and_drift():
    fs, S = system(FAMILIES["rational"]())
    zero = replace(fs, rhs=[p * 0 for p in fs.rhs])
    traj = rk4_integrate(zero, [0.3, -1.0, 2.0], (0.0, 1.0), 0.01, {"S": S})
    assert np.all(traj.states == traj.states[0]) and traj.drift["S"] == 0.0
    traj = rk4_integrate(fs, [0.7, 0.2, 1.1], (0.0, 0.5), 1e-3, {"S": S})
    assert traj.drift["S"] < 1e-10
    assert traj.table(every=250).count("\n") == 3


def test_rk4_bad_arguments():
    fs, _ = system(FAMILIES["rational"]())
    with pytest.raises(ValueError):
        rk4_integrate(fs, [1.0, 1.0, 1.0], (0.0, 1.0), 0.3)
    with pytest.raises(ValueError):
        rk4_integrate(fs, [1.0, 1.0], (0.0, 1.0), 0.1)
