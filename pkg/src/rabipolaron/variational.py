"""Polaron/antipolaron variational ground state.

The trial state in the sigma_x basis is

    Psi = (psi(x) |+> - psi(-x) |->) / sqrt(2),
    psi(x) = alpha phi_{+D_alpha}(x) + beta phi_{-D_beta}(x),

with both Gaussians sharing the squeeze ``xi`` and ``D_i = zeta_i g'``.
Requiring ``<psi|psi> = 1`` fixes ``beta`` from the other parameters, leaving
``{alpha, xi, zeta_alpha, zeta_beta}`` to minimise.

The energy functional is

    E = <psi|h|psi> - (delta/2) <psi(x)|psi(-x)> + eps0,   h = [p^2 + (x - g')^2]/2.

``psi(x)`` sits in the well at ``+g'`` so that optimal displacements come out
positive.  This pairs ``psi`` with the ``sigma_x = -`` block of
:func:`rabipolaron.model.hamiltonian_sigma_x`; the mirror pairing
(``psi(-x)`` with the ``+`` block) gives the identical value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceWarning, DomainError
from .gaussian import GaussianState, overlap
from .model import ModelParams

__all__ = [
    "ANSATZE",
    "VariationalParams",
    "GroundStateSolution",
    "OptimizerOptions",
    "beta_from_normalization",
    "make_params",
    "trial_state",
    "parity_overlap",
    "energy",
    "minimize_ground",
    "sweep",
    "squeezing_profile",
]

# full4: alpha, xi, zeta_alpha, zeta_beta free
# eq19:  shared displacement factor (zeta_beta = zeta_alpha)
# eq15:  single unsqueezed polaron (alpha = 1, xi = 1), zeta_alpha only
ANSATZE = ("full4", "eq19", "eq15")
_ANSATZ_ALIASES = {
    "full4": "full4",
    "full-4": "full4",
    "eq19": "eq19",
    "equal-displacement": "eq19",
    "equal-displacement-3": "eq19",
    "eq15": "eq15",
    "single-polaron": "eq15",
}


def _ansatz(name: str) -> str:
    try:
        return _ANSATZ_ALIASES[name]
    except KeyError:
        raise DomainError(f"unknown ansatz {name!r}; expected one of {ANSATZE}") from None


def beta_from_normalization(alpha: float, t: float) -> float:
    """Antipolaron weight solving ``alpha^2 + beta^2 + 2 alpha beta t = 1``.

    The root taken is the one continuous with ``beta = 0`` at ``alpha = 1``.
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"overlap must lie in [0, 1], got {t!r}")
    # (1 - alpha)(1 + alpha) avoids cancellation in 1 - alpha^2
    disc = alpha * alpha * t * t + (1.0 - alpha) * (1.0 + alpha)
    # non-negative in exact arithmetic; rounding can leave -1e-17
    return max(-alpha * t + math.sqrt(disc), 0.0)


@dataclass(frozen=True)
class VariationalParams:
    alpha: float
    beta: float
    xi: float
    zeta_alpha: float
    zeta_beta: float
    d_alpha: float
    d_beta: float
    gamma: float

    def normalization_residual(self) -> float:
        t = overlap(self.d_alpha, -self.d_beta, self.xi)
        return abs(self.alpha**2 + self.beta**2 + 2 * self.alpha * self.beta * t - 1.0)

    def canonical(self) -> "VariationalParams":
        """Relabel so the polaron carries the non-negative displacement.

        ``(alpha, +D_alpha; beta, -D_beta)`` and ``(beta, -D_beta; alpha, +D_alpha)``
        describe the same wavefunction; the representative with
        ``D_alpha >= 0`` is returned.
        """
        if self.d_alpha >= 0.0 or self.beta <= 0.0:
            return self
        return VariationalParams(
            alpha=self.beta,
            beta=self.alpha,
            xi=self.xi,
            zeta_alpha=-self.zeta_beta,
            zeta_beta=-self.zeta_alpha,
            d_alpha=-self.d_beta,
            d_beta=-self.d_alpha,
            gamma=self.gamma,
        )


def make_params(alpha: float, xi: float, zeta_alpha: float, zeta_beta: float, g_prime: float):
    """Complete a parameter set, solving the normalisation for ``beta``."""
    if not (xi > 0.0):
        raise DomainError(f"xi must be positive, got {xi!r}")
    d_alpha = zeta_alpha * g_prime
    d_beta = zeta_beta * g_prime
    t = float(overlap(d_alpha, -d_beta, xi))
    beta = beta_from_normalization(alpha, t)
    return VariationalParams(
        alpha=float(alpha),
        beta=float(beta),
        xi=float(xi),
        zeta_alpha=float(zeta_alpha),
        zeta_beta=float(zeta_beta),
        d_alpha=float(d_alpha),
        d_beta=float(d_beta),
        gamma=math.sqrt(max(alpha * beta, 0.0)),
    )


def trial_state(vp: VariationalParams, branch: str) -> GaussianState:
    """Component list of one piece of the trial state.

    ``branch`` is ``psi_plus`` (psi(x)), ``psi_minus`` (psi(-x)),
    ``psi_even`` / ``psi_odd`` (their sum / difference), ``phi_alpha`` or
    ``phi_beta`` (the bare unit-normalised polaron / antipolaron).
    """
    a, b, xi = vp.alpha, vp.beta, vp.xi
    da, db = vp.d_alpha, vp.d_beta
    if branch == "psi_plus":
        return GaussianState.from_arrays([a, b], [da, -db], xi)
    if branch == "psi_minus":
        return GaussianState.from_arrays([a, b], [-da, db], xi)
    if branch == "psi_even":
        return GaussianState.from_arrays([a, b, a, b], [da, -db, -da, db], xi)
    if branch == "psi_odd":
        return GaussianState.from_arrays([a, b, -a, -b], [da, -db, -da, db], xi)
    if branch == "phi_alpha":
        return GaussianState.from_arrays([1.0], [da], xi)
    if branch == "phi_beta":
        return GaussianState.from_arrays([1.0], [-db], xi)
    raise DomainError(f"unknown branch {branch!r}")


def parity_overlap(vp: VariationalParams) -> float:
    """``<psi(x)|psi(-x)>``, the overlap of the two spin branches."""
    a, b, xi = vp.alpha, vp.beta, vp.xi
    da, db = vp.d_alpha, vp.d_beta
    return float(
        a * a * overlap(da, -da, xi)
        + b * b * overlap(-db, db, xi)
        + 2.0 * a * b * overlap(da, db, xi)
    )


def _h_element(c1, c2, xi, w):
    # scalar twin of gaussian.h_matrix_element, used on the optimizer's hot path
    d = c1 - c2
    mid = 0.5 * (c1 + c2) - w
    return math.exp(-0.25 * xi * d * d) * 0.5 * (0.5 * xi - 0.25 * xi * xi * d * d + mid * mid + 0.5 / xi)


def _energy(a, b, xi, da, db, g_prime, delta, eps0):
    h = (
        a * a * _h_element(da, da, xi, g_prime)
        + b * b * _h_element(-db, -db, xi, g_prime)
        + 2.0 * a * b * _h_element(da, -db, xi, g_prime)
    )
    s = (
        a * a * math.exp(-xi * da * da)
        + b * b * math.exp(-xi * db * db)
        + 2.0 * a * b * math.exp(-0.25 * xi * (da - db) ** 2)
    )
    return h - 0.5 * delta * s + eps0


def energy(vp: VariationalParams, model: ModelParams) -> float:
    """``<psi|h|psi> - (delta/2) <psi(x)|psi(-x)> + eps0`` with the well at ``+g'``."""
    return _energy(vp.alpha, vp.beta, vp.xi, vp.d_alpha, vp.d_beta, model.g_prime, model.delta, model.eps0)


@dataclass
class OptimizerOptions:
    xatol: float = 1e-8
    fatol: float = 1e-10
    restarts: int = 2
    simplex_step: float = 0.25
    max_evaluations: int = 20000
    extra_seeds: Sequence[Sequence[float]] = ()


@dataclass
class GroundStateSolution:
    params: VariationalParams
    energy: float
    model: ModelParams
    ansatz: str
    optimizer_trace: list = field(default_factory=list)
    energy_error: float | None = None
    ed_energy: float | None = None
    status: str = "converged"


# Coordinates: alpha = 1/sqrt(1 + u^2) keeps alpha in (0, 1] with alpha = 1 at
# u = 0; xi = exp(s).
def _alpha_to_u(alpha):
    return math.sqrt(max(1.0 / (alpha * alpha) - 1.0, 0.0))


def _decode(z, ansatz, g_prime):
    if ansatz == "full4":
        u, s, za, zb = z
    elif ansatz == "eq19":
        u, s, za = z
        zb = za
    else:
        (za,) = z
        return make_params(1.0, 1.0, za, 0.0, g_prime)
    return make_params(1.0 / math.sqrt(1.0 + u * u), math.exp(s), za, zb, g_prime)


def _coordinates(z, ansatz):
    """``(alpha, xi, zeta_alpha, zeta_beta)`` for an optimizer point."""
    if ansatz == "full4":
        u, s, za, zb = z
    elif ansatz == "eq19":
        u, s, za = z
        zb = za
    else:
        return 1.0, 1.0, z[0], 0.0
    return 1.0 / math.sqrt(1.0 + u * u), math.exp(s), za, zb


def _objective(z, ansatz, model):
    a, xi, za, zb = _coordinates(z, ansatz)
    da, db = za * model.g_prime, zb * model.g_prime
    b = beta_from_normalization(a, math.exp(-0.25 * xi * (da + db) ** 2))
    return _energy(a, b, xi, da, db, model.g_prime, model.delta, model.eps0)


def _encode(vp: VariationalParams, ansatz):
    if ansatz == "full4":
        return np.array([_alpha_to_u(vp.alpha), math.log(vp.xi), vp.zeta_alpha, vp.zeta_beta])
    if ansatz == "eq19":
        return np.array([_alpha_to_u(vp.alpha), math.log(vp.xi), vp.zeta_alpha])
    return np.array([vp.zeta_alpha])


def _seeds(model: ModelParams, ansatz, warm_start):
    zeta_sr = math.sqrt(max(0.0, 1.0 - (model.g_c / model.g) ** 4)) if model.g > 0 else 0.0
    named = [
        ("normal", dict(alpha=0.7, xi=1.0, za=0.0, zb=0.0)),
        ("superradiant", dict(alpha=0.95, xi=1.0, za=zeta_sr, zb=zeta_sr)),
    ]
    seeds = []
    for name, p in named:
        vp = make_params(p["alpha"], p["xi"], p["za"], p["zb"], model.g_prime)
        seeds.append((name, _encode(vp, ansatz)))
    if warm_start is not None:
        if ansatz == "eq15":
            seeds.append(("warm", np.array([warm_start.zeta_alpha])))
        else:
            seeds.append(("warm", _encode(warm_start, ansatz)))
    return seeds


def _simplex(z0, step):
    dim = z0.shape[0]
    simplex = np.repeat(z0[None, :], dim + 1, axis=0)
    for i in range(dim):
        simplex[i + 1, i] += step
    return simplex


def _run_start(objective, z0, opts):
    evaluations = 0
    best = None
    z = np.asarray(z0, dtype=float)
    converged = False
    for attempt in range(opts.restarts + 1):
        res = minimize(
            objective,
            z,
            method="Nelder-Mead",
            options=dict(
                xatol=opts.xatol,
                fatol=opts.fatol,
                maxfev=opts.max_evaluations,
                maxiter=opts.max_evaluations,
                initial_simplex=_simplex(z, opts.simplex_step if attempt == 0 else 0.05),
            ),
        )
        evaluations += int(res.nfev)
        improved = best is None or res.fun < best.fun - opts.fatol
        if best is None or res.fun < best.fun:
            best = res
        z = best.x
        if attempt > 0 and not improved:
            converged = bool(res.success)
            break
    else:
        converged = bool(best.success)
    return best, evaluations, converged


def minimize_ground(
    model: ModelParams,
    ansatz: str = "full4",
    opts: OptimizerOptions | None = None,
    *,
    warm_start: VariationalParams | None = None,
    compute_error: bool = True,
    ed_energy: float | None = None,
) -> GroundStateSolution:
    """Minimise the energy functional over the chosen ansatz.

    Starts from a normal-phase seed (``zeta = 0``), a superradiant seed
    (``zeta = sqrt(1 - (g_c/g)^4)``) and optionally ``warm_start``; each start
    is polished by Nelder-Mead restarts from the incumbent.  The best result
    is returned in canonical form (``D_alpha >= 0``).  With ``compute_error``
    the relative error against the exact ground energy is attached.
    """
    ansatz = _ansatz(ansatz)
    opts = opts or OptimizerOptions()
    gp = model.g_prime

    def objective(z):
        return _objective(z, ansatz, model)

    trace = []
    best_vp, best_e = None, math.inf
    seeds = _seeds(model, ansatz, warm_start)
    seeds += [(f"extra{i}", np.asarray(s, dtype=float)) for i, s in enumerate(opts.extra_seeds)]
    all_converged = True
    for name, z0 in seeds:
        res, nfev, converged = _run_start(objective, z0, opts)
        all_converged &= converged
        trace.append({"seed": name, "energy": float(res.fun), "nfev": nfev, "converged": converged})
        if res.fun < best_e:
            best_e = float(res.fun)
            best_vp = _decode(res.x, ansatz, gp)
    best_vp = best_vp.canonical()
    status = "converged"
    if not any(t["converged"] for t in trace):
        status = "converged-with-warning"
        warnings.warn(ConvergenceWarning(f"optimizer stagnated at g/g_c={model.g_over_gc:.4g}"), stacklevel=2)
    sol = GroundStateSolution(
        params=best_vp,
        energy=energy(best_vp, model),
        model=model,
        ansatz=ansatz,
        optimizer_trace=trace,
        status=status,
    )
    if compute_error or ed_energy is not None:
        if ed_energy is None:
            from .exact_diag import solve_exact

            ed_energy = solve_exact(model).energy
        sol.ed_energy = float(ed_energy)
        sol.energy_error = abs((sol.energy - ed_energy) / ed_energy) if ed_energy != 0 else abs(sol.energy)
    return sol


def sweep(
    models: Sequence[ModelParams],
    ansatz: str = "full4",
    opts: OptimizerOptions | None = None,
    *,
    continuation: bool = True,
    compute_error: bool = True,
) -> list[GroundStateSolution]:
    """Solve a monotone coupling sweep.

    With ``continuation`` the sweep runs upward and downward, each point
    warm-started from its predecessor, and keeps the lower energy per point.
    """
    models = list(models)
    if not continuation:
        return [minimize_ground(m, ansatz, opts, compute_error=compute_error) for m in models]

    def one_pass(order):
        out = {}
        previous = None
        for i in order:
            sol = minimize_ground(models[i], ansatz, opts, warm_start=previous, compute_error=False)
            out[i] = sol
            previous = sol.params
        return out

    up = one_pass(range(len(models)))
    down = one_pass(range(len(models) - 1, -1, -1))
    results = []
    for i, m in enumerate(models):
        sol = up[i] if up[i].energy <= down[i].energy else down[i]
        sol.optimizer_trace = up[i].optimizer_trace + down[i].optimizer_trace
        if compute_error:
            from .exact_diag import solve_exact

            e_ed = solve_exact(m).energy
            sol.ed_energy = e_ed
            sol.energy_error = abs((sol.energy - e_ed) / e_ed) if e_ed != 0 else abs(sol.energy)
        results.append(sol)
    return results


def squeezing_profile(ratio: float, g_over_gc: Iterable[float], opts: OptimizerOptions | None = None):
    """Optimal squeeze along a coupling grid: list of ``(g/g_c, xi)``."""
    from .model import from_ratio

    grid = [float(x) for x in g_over_gc]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise DomainError("coupling grid must be non-decreasing")
    sols = sweep([from_ratio(ratio, x) for x in grid], "full4", opts, compute_error=False)
    return [(x, s.params.xi) for x, s in zip(grid, sols)]
