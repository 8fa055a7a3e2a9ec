"""Wigner functions of the polaron ground state.

For two Gaussians of squeeze ``xi`` the Wigner function is built from

    N(D_i, D_j) = exp[-p^2/xi - xi (x + (D_i + D_j)/2)^2]     (envelope)
    M(D_i, D_j) = cos[(D_i + D_j) p]                           (fringes)

``W_plus_x`` / ``W_minus_x`` are the Wigner functions of psi(x) / psi(-x),
each carrying the 1/2 weight of its spin branch, so ``W_T`` integrates to one.
``W_E`` and ``W_O`` belong to the even / odd cats entangled with spin down / up
and integrate to ``P_-`` / ``P_+``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.integrate import simpson

from .errors import ConfigurationError, NumericalError, WidenGridError
from .gaussian import GaussianState

__all__ = [
    "PhaseGrid",
    "WignerField",
    "COMPONENTS",
    "default_grid",
    "validate_grid",
    "envelope",
    "fringe",
    "analytic_field",
    "numeric_field",
    "negativity",
    "converged_negativity",
    "field_negativities",
    "write_grid_csv",
    "read_grid_csv",
]

COMPONENTS = ("W_plus_x", "W_minus_x", "W_T", "W_E", "W_O", "W_D", "W_alive", "W_dead")


@dataclass(frozen=True)
class PhaseGrid:
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    nx: int
    np: int

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.np - 1)

    def refined(self) -> "PhaseGrid":
        """Halve both spacings (keeps every existing node)."""
        return replace(self, nx=2 * self.nx - 1, np=2 * self.np - 1)


@dataclass
class WignerField:
    grid: PhaseGrid
    components: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.components[name]


def _odd(n):
    return n if n % 2 == 1 else n + 1


def default_grid(vp, n: int = 512, x_width: float = 6.0, p_width: float = 6.0) -> PhaseGrid:
    """Grid covering the state with enough p-resolution for its fringes.

    Node counts are odd so Simpson's rule applies to the whole grid and the
    origin is a node.
    """
    d_max = max(abs(vp.d_alpha), abs(vp.d_beta))
    x_half = d_max + x_width / math.sqrt(vp.xi)
    p_half = p_width * max(1.0, math.sqrt(vp.xi))
    npoints = _odd(max(n, 65))
    spread = abs(vp.d_alpha) + abs(vp.d_beta)
    if spread > 0:
        dp_max = math.pi / (8.0 * spread)
        npoints_p = _odd(max(npoints, int(math.ceil(2 * p_half / dp_max)) + 1))
    else:
        npoints_p = npoints
    return PhaseGrid(-x_half, x_half, -p_half, p_half, npoints, npoints_p)


def validate_grid(grid: PhaseGrid, vp) -> None:
    """Raise :class:`ConfigurationError` if ``grid`` cannot represent ``vp``'s fields."""
    if grid.nx < 64 or grid.np < 64:
        raise ConfigurationError("grids need at least 64 nodes per axis")
    d_max = max(abs(vp.d_alpha), abs(vp.d_beta))
    x_need = d_max + 5.0 / math.sqrt(vp.xi)
    p_need = 5.0 * max(1.0, math.sqrt(vp.xi))
    if grid.x_min > -x_need or grid.x_max < x_need:
        raise ConfigurationError(f"x range must cover +-{x_need:.4g}")
    if grid.p_min > -p_need or grid.p_max < p_need:
        raise ConfigurationError(f"p range must cover +-{p_need:.4g}")
    spread = abs(vp.d_alpha) + abs(vp.d_beta)
    if spread > 0 and grid.dp > math.pi / (8.0 * spread) * (1 + 1e-12):
        raise ConfigurationError(
            f"p spacing {grid.dp:.4g} does not resolve fringes (need <= {math.pi / (8 * spread):.4g})"
        )


def envelope(di, dj, xi, x, p):
    return np.exp(-(p**2) / xi - xi * (x + 0.5 * (di + dj)) ** 2)


def fringe(di, dj, p):
    return np.cos((di + dj) * p)


def _components(vp, x, p, names):
    """Requested closed-form components on the outer product of ``p`` and ``x``."""
    a, b, xi = vp.alpha, vp.beta, vp.xi
    da, db = vp.d_alpha, vp.d_beta
    x = x[None, :]
    p = p[:, None]
    two_pi = 2.0 * math.pi
    cache = {}

    def get(name):
        if name in cache:
            return cache[name]
        # polaron and antipolaron lobes, right (R) and left (L)
        if name == "alpha_r":
            v = a * a * envelope(-da, -da, xi, x, p) / two_pi
        elif name == "alpha_l":
            v = a * a * envelope(da, da, xi, x, p) / two_pi
        elif name == "beta_r":
            v = b * b * envelope(-db, -db, xi, x, p) / two_pi
        elif name == "beta_l":
            v = b * b * envelope(db, db, xi, x, p) / two_pi
        # polaron-antipolaron interference: ridge midway between +D_alpha and -D_beta
        elif name == "i_plus":
            v = a * b * envelope(-da, db, xi, x, p) * fringe(da, db, p) / math.pi
        elif name == "i_minus":
            v = a * b * envelope(da, -db, xi, x, p) * fringe(da, db, p) / math.pi
        elif name == "W_plus_x":
            v = get("alpha_r") + get("i_plus") + get("beta_l")
        elif name == "W_minus_x":
            v = get("alpha_l") + get("i_minus") + get("beta_r")
        elif name == "W_T":
            v = get("W_plus_x") + get("W_minus_x")
        elif name == "W_D":
            n00 = envelope(0.0, 0.0, xi, x, p)
            v = (
                a * a * n00 * fringe(da, da, p)
                + b * b * n00 * fringe(db, db, p)
                + a * b * (
                    envelope(-da, -db, xi, x, p) * fringe(-da, db, p)
                    + envelope(da, db, xi, x, p) * fringe(da, -db, p)
                )
            ) / two_pi
        elif name == "W_E":
            v = 0.5 * get("W_T") + get("W_D")
        elif name == "W_O":
            v = 0.5 * get("W_T") - get("W_D")
        elif name == "W_alive":
            v = get("alpha_r") + get("i_plus")
        elif name == "W_dead":
            v = get("alpha_l") + get("i_minus")
        else:
            raise ConfigurationError(f"unknown component {name!r}; expected one of {COMPONENTS}")
        cache[name] = v
        return v

    return {n: get(n) for n in names}


def analytic_field(solution, grid: PhaseGrid | None = None, *, check: bool = True, components=COMPONENTS) -> WignerField:
    """Closed-form Wigner components of a variational solution.

    ``solution`` may be a :class:`~rabipolaron.variational.GroundStateSolution`
    or a bare :class:`~rabipolaron.variational.VariationalParams`.
    """
    vp = getattr(solution, "params", solution)
    grid = grid or default_grid(vp)
    if check:
        validate_grid(grid, vp)
    return WignerField(grid=grid, components=_components(vp, grid.x, grid.p, components))


def _wigner_by_quadrature(state: GaussianState, x, p, nodes):
    # W(x,p) = (1/pi) int psi(x-y) psi(x+y) cos(2 y p) dy for real psi
    lo, hi = state.support(9.0)
    y_half = 0.5 * (hi - lo)
    y, w = np.polynomial.legendre.leggauss(nodes)
    y = y * y_half
    w = w * y_half
    f = state(x[:, None] - y[None, :]) * state(x[:, None] + y[None, :])
    kernel = np.cos(2.0 * y[:, None] * p[None, :]) * w[:, None]
    return (f @ kernel).T / math.pi


def numeric_field(state: GaussianState, grid: PhaseGrid, *, atol: float = 1e-10, max_doublings: int = 6) -> np.ndarray:
    """Wigner function of ``state`` by direct quadrature of the defining integral.

    Returns an ``(np, nx)`` array (rows are momenta).  Gauss-Legendre nodes on
    the overlap region double until the max-norm change drops below ``atol``.
    """
    x, p = grid.x, grid.p
    lo, hi = state.support(9.0)
    reach = (hi - lo) * math.sqrt(state.xi) + 2.0 * max(abs(grid.p_min), abs(grid.p_max)) * (hi - lo)
    nodes = int(max(200, 2 * reach))
    current = _wigner_by_quadrature(state, x, p, nodes)
    for _ in range(max_doublings):
        nodes *= 2
        refined = _wigner_by_quadrature(state, x, p, nodes)
        if np.max(np.abs(refined - current)) <= atol:
            return refined
        current = refined
    raise NumericalError("Wigner quadrature did not converge", nodes=nodes)


def negativity(values: np.ndarray, grid: PhaseGrid, *, boundary_tol: float = 1e-10) -> float:
    """``integral(|W| - W) dx dp`` by composite Simpson on the grid."""
    values = np.asarray(values)
    edge = max(
        np.max(np.abs(values[0])),
        np.max(np.abs(values[-1])),
        np.max(np.abs(values[:, 0])),
        np.max(np.abs(values[:, -1])),
    )
    if edge >= boundary_tol:
        raise WidenGridError(f"field does not vanish on the grid boundary (max |W| = {edge:.3e})")
    neg = np.abs(values) - values
    return float(simpson(simpson(neg, x=grid.x, axis=1), x=grid.p))


def converged_negativity(evaluate, grid: PhaseGrid, *, tol: float = 1e-4, max_refinements: int = 4) -> float:
    """Negativity of ``evaluate(grid)`` refined by grid doubling until stable."""
    value = negativity(evaluate(grid), grid)
    for _ in range(max_refinements):
        grid = grid.refined()
        refined = negativity(evaluate(grid), grid)
        if abs(refined - value) < tol:
            return refined
        value = refined
    raise NumericalError("negativity did not converge under grid refinement", last=value)


def _chunked_negativities(vp, grid, components, rows, boundary_tol):
    x, p = grid.x, grid.p
    per_row = {c: np.empty(grid.np) for c in components}
    edge = 0.0
    for start in range(0, grid.np, rows):
        stop = min(start + rows, grid.np)
        for c, w in _components(vp, x, p[start:stop], components).items():
            edge = max(edge, float(np.max(np.abs(w[:, [0, -1]]))))
            if start == 0:
                edge = max(edge, float(np.max(np.abs(w[0]))))
            if stop == grid.np:
                edge = max(edge, float(np.max(np.abs(w[-1]))))
            per_row[c][start:stop] = simpson(np.abs(w) - w, x=x, axis=1)
    if edge >= boundary_tol:
        raise WidenGridError(f"field does not vanish on the grid boundary (max |W| = {edge:.3e})")
    return {c: float(simpson(v, x=p)) for c, v in per_row.items()}


def field_negativities(
    solution,
    grid: PhaseGrid | None = None,
    components=("W_T", "W_E", "W_O"),
    *,
    tol: float = 1e-4,
    max_refinements: int = 5,
    rows: int = 64,
    boundary_tol: float = 1e-10,
) -> dict:
    """Converged negativities of several analytic components on shared grids.

    Fields are evaluated ``rows`` momenta at a time so memory stays bounded
    as the grid is doubled.
    """
    vp = getattr(solution, "params", solution)
    grid = grid or default_grid(vp)
    validate_grid(grid, vp)
    values = _chunked_negativities(vp, grid, components, rows, boundary_tol)
    for _ in range(max_refinements):
        grid = grid.refined()
        refined = _chunked_negativities(vp, grid, components, rows, boundary_tol)
        if all(abs(refined[c] - values[c]) < tol for c in components):
            return refined
        values = refined
    raise NumericalError("negativity did not converge under grid refinement", last=values)


def write_grid_csv(path, grid: PhaseGrid, values: np.ndarray) -> None:
    """Write a field as CSV: two header lines then one row per momentum."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.np, grid.nx):
        raise ConfigurationError(f"values have shape {values.shape}, grid expects {(grid.np, grid.nx)}")
    lines = [
        f"# x: {grid.x_min!r} {grid.x_max!r} {grid.nx}",
        f"# p: {grid.p_min!r} {grid.p_max!r} {grid.np}",
    ]
    lines.extend(",".join(repr(float(v)) for v in row) for row in values)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_grid_csv(path) -> tuple[PhaseGrid, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        hx = fh.readline().split()
        hp = fh.readline().split()
        if hx[:2] != ["#", "x:"] or hp[:2] != ["#", "p:"]:
            raise ConfigurationError(f"{path} is not a Wigner grid file")
        grid = PhaseGrid(float(hx[2]), float(hx[3]), float(hp[2]), float(hp[3]), int(hx[4]), int(hp[4]))
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    values = np.array(rows, dtype=float)
    if values.shape != (grid.np, grid.nx):
        raise ConfigurationError(f"{path}: body shape {values.shape} does not match header")
    return grid, values
