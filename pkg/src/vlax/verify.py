"""Numerical checks of closed-form solutions and RK4 integration of ODE flows."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .aks import FlowSystem
from .diffpoly import DiffPoly, JetVar

X, T = sp.symbols("x t")


class ContractError(ValueError):
    pass


@dataclass
class ClosedFormField:
    """Analytic fields u^i(x, t) with exact x- and t-derivatives.

    ``system`` names the flow the family is meant to solve as
    (algebra, decomposition, family, n, sigma).
    """

    name: str
    generators: Tuple[str, ...]
    exprs: Dict[str, sp.Expr]
    max_order: int
    system: Tuple[str, str, str, int, int]
    params: Dict[str, float] = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        self._x = {}
        self._t = {}
        for g in self.generators:
            e = self.exprs[g]
            self._x[g] = [sp.lambdify((X, T), sp.diff(e, X, n), "numpy")
                          for n in range(self.max_order + 1)]
            self._t[g] = sp.lambdify((X, T), sp.diff(e, T), "numpy")

    def jet(self, xs: np.ndarray, ts: np.ndarray, order: int) -> Dict[JetVar, np.ndarray]:
        if order > self.max_order:
            raise ContractError(f"{self.name} provides x-derivatives up to order "
                                f"{self.max_order}, {order} requested")
        out = {}
        for i, g in enumerate(self.generators):
            for n in range(order + 1):
                out[JetVar(i, n)] = np.broadcast_to(
                    np.asarray(self._x[g][n](xs, ts), dtype=float), xs.shape)
        return out

    def time_derivative(self, xs, ts) -> List[np.ndarray]:
        return [np.broadcast_to(np.asarray(self._t[g](xs, ts), dtype=float), xs.shape)
                for g in self.generators]


def borel_rational(C: float = 1.0) -> ClosedFormField:
    s = 1 / (T + C)
    return ClosedFormField(
        "rational", ("f", "h", "e"),
        {"f": sp.Integer(1), "h": s, "e": -sp.Rational(1, 4) * s ** 2},
        max_order=4, system=("sl2", "borel", "power", 1, -1), params={"C": C})


def iwasawa_oscillator(A: float = 1.0) -> ClosedFormField:
    xi = A * sp.sin(T)
    return ClosedFormField(
        "oscillator", ("f", "h", "e"),
        {"f": (xi + sp.Rational(1, 2)) / 2, "h": A * sp.cos(T), "e": (xi - sp.Rational(1, 2)) / 2},
        max_order=4, system=("sl2", "iwasawa", "power", 1, -1), params={"A": A},
        notes="f - e = 1/2, xi = f + e = A sin t, eta = h = A cos t")


def borel_soliton(c: float = 1.0, x0: float = 0.0) -> ClosedFormField:
    """f = C/4, h = B tanh(phi), e = (B^2/C) sech^2(phi) with C = 2B^2/c.

    B = (9^(1/3) sqrt(c)/2) (x - x0)^(2/3) makes B (B^2)'' = c^(3/2)/2, so
    phi = (sqrt(c)/2)(x - c t) and e = (c/2) sech^2(phi).
    """
    cc = sp.nsimplify(c)
    B = sp.cbrt(9) * sp.sqrt(cc) / 2 * sp.cbrt((X - x0) ** 2)
    C = 2 * B ** 2 / cc
    phi = sp.sqrt(cc) / 2 * (X - cc * T)
    return ClosedFormField(
        "soliton", ("f", "h", "e"),
        {"f": C / 4, "h": B * sp.tanh(phi), "e": B ** 2 / C * sp.sech(phi) ** 2},
        max_order=4, system=("sl2", "borel", "deriv_product", 2, 1),
        params={"c": c, "x0": x0},
        notes="branch of the second Borel flow; grid excludes a neighbourhood of x0")


FAMILIES: Dict[str, Callable[..., ClosedFormField]] = {
    "rational": borel_rational,
    "oscillator": iwasawa_oscillator,
    "soliton": borel_soliton,
}


@dataclass
class SampleGrid:
    x_range: Tuple[float, float] = (0.0, 0.0)
    t_range: Tuple[float, float] = (0.0, 2.0)
    nx: int = 1
    nt: int = 201
    exclude: Tuple[Tuple[float, float], ...] = ()

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        xs = np.linspace(*self.x_range, self.nx)
        for centre, radius in self.exclude:
            xs = xs[np.abs(xs - centre) >= radius]
        ts = np.linspace(*self.t_range, self.nt)
        return np.meshgrid(xs, ts, indexing="ij")

    def describe(self) -> str:
        s = (f"x in [{self.x_range[0]:g}, {self.x_range[1]:g}] ({self.nx} pts), "
             f"t in [{self.t_range[0]:g}, {self.t_range[1]:g}] ({self.nt} pts)")
        for centre, radius in self.exclude:
            s += f", excluding |x - {centre:g}| < {radius:g}"
        return s


@dataclass
class ResidualReport:
    names: Tuple[str, ...]
    max_residual: Dict[str, float]
    grid: str
    tol: float

    @property
    def worst(self) -> float:
        return max(self.max_residual.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.max_residual.values())

    def __str__(self):
        lines = [f"grid: {self.grid}", f"tolerance: {self.tol:g}"]
        for n in self.names:
            lines.append(f"d{n}/dt residual max = {self.max_residual[n]:.3e}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)

    def to_json(self):
        return {"grid": self.grid, "tol": self.tol, "passed": self.passed,
                "max_residual": self.max_residual}


def residual_check(fs: FlowSystem, sol: ClosedFormField, grid: SampleGrid,
                   tol: float) -> ResidualReport:
    names = fs.ring.names
    if tuple(names) != tuple(sol.generators):
        raise ContractError(f"solution generators {sol.generators} do not match {names}")
    order = max(fs.max_order(), 0)
    if order > sol.max_order:
        raise ContractError(f"flow needs x-derivatives up to order {order}, "
                            f"{sol.name} provides {sol.max_order}")
    xs, ts = grid.nodes()
    jet = sol.jet(xs, ts, order)
    dts = sol.time_derivative(xs, ts)
    out = {}
    for i, rhs in enumerate(fs.rhs):
        r = dts[i] - rhs.compile()(jet)
        out[names[i]] = float(np.max(np.abs(r))) if r.size else 0.0
    return ResidualReport(tuple(names), out, grid.describe(), tol)


def default_grid(sol: ClosedFormField) -> SampleGrid:
    if sol.name == "soliton":
        x0 = sol.params.get("x0", 0.0)
        return SampleGrid((-10.0, 10.0), (0.0, 1.0), 801, 41, ((x0, 1e-2),))
    return SampleGrid((0.0, 0.0), (0.0, 2.0), 1, 401)


# -- RK4

@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    drift: Dict[str, float]
    names: Tuple[str, ...]

    def table(self, every: int = 1) -> str:
        """Tab-separated t and state values."""
        head = "t\t" + "\t".join(self.names)
        rows = [head]
        for k in range(0, len(self.times), every):
            rows.append("\t".join(f"{v:.12g}" for v in [self.times[k], *self.states[k]]))
        return "\n".join(rows)


def _ode_rhs(fs: FlowSystem):
    if fs.max_order() > 0:
        raise ContractError("flow contains x-derivatives; use residual_check for PDE flows")
    funcs = [r.compile() for r in fs.rhs]
    n = len(funcs)

    def f(y):
        vals = {JetVar(i, 0): y[i] for i in range(n)}
        return np.array([float(fn(vals)) for fn in funcs])
    return f


def rk4_integrate(fs: FlowSystem, init: Sequence[float], t_span: Tuple[float, float],
                  dt: float, first_integrals: Optional[Mapping[str, DiffPoly]] = None
                  ) -> Trajectory:
    """Classical fixed-step RK4; drift is max |I(t) - I(t0)| per first integral."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    f = _ode_rhs(fs)
    t0, t1 = t_span
    steps = int(round((t1 - t0) / dt))
    if steps < 1 or abs(t0 + steps * dt - t1) > 1e-9 * max(1.0, abs(t1)):
        raise ValueError("t_span must be a positive multiple of dt")
    y = np.array(init, dtype=float)
    if len(y) != fs.ring.ngens:
        raise ValueError(f"initial state needs {fs.ring.ngens} components")
    times = t0 + dt * np.arange(steps + 1)
    states = np.empty((steps + 1, len(y)))
    states[0] = y
    for k in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        states[k + 1] = y
    drift = {}
    for name, poly in (first_integrals or {}).items():
        g = poly.compile()
        vals = {JetVar(i, 0): states[:, i] for i in range(states.shape[1])}
        series = np.broadcast_to(g(vals), times.shape)
        drift[name] = float(np.max(np.abs(series - series[0])))
    return Trajectory(times, states, drift, tuple(fs.ring.names))
