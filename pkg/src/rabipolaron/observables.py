"""Scalar diagnostics of the ground state and the nonclassical-state regions.

Spin populations refer to the sigma_z basis.  In the variational state the
oscillator is entangled as ``(psi_O |up> + psi_E |down>) / 2`` with
``psi_E/O = psi(x) +- psi(-x)``, so ``P_+ = <psi_O|psi_O>/4 = (1 - S)/2`` where
``S = <psi(x)|psi(-x)>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .exact_diag import EDResult, entropy_from_probability, solve_exact
from .gaussian import fock_amplitudes
from .model import ModelParams
from .variational import GroundStateSolution, VariationalParams, minimize_ground, parity_overlap, trial_state

__all__ = [
    "REGIONS",
    "REGION_BOUNDARIES",
    "Classification",
    "PhotonDistribution",
    "PhasePoint",
    "mean_photon_m",
    "displacement_gap",
    "spin_probabilities",
    "entanglement_entropy",
    "classify",
    "photon_statistics",
    "default_fock_cutoff",
    "analyze_point",
]

REGIONS = ("VS", "SVS", "SCS", "CSWS")
# heuristic g/g_c boundaries between VS | SVS | SCS | CSWS
REGION_BOUNDARIES = (0.5, 1.0, 1.5)


def mean_photon_m(vp: VariationalParams) -> float:
    """Displacement estimate ``(alpha^2 D_alpha^2 + beta^2 D_beta^2) / 2``."""
    return 0.5 * (vp.alpha**2 * vp.d_alpha**2 + vp.beta**2 * vp.d_beta**2)


def displacement_gap(vp: VariationalParams) -> float:
    return abs(vp.d_alpha - vp.d_beta)


def spin_probabilities(vp: VariationalParams) -> tuple[float, float]:
    """``(P_up, P_down)`` in the sigma_z basis."""
    s = min(max(parity_overlap(vp), -1.0), 1.0)
    return 0.5 * (1.0 - s), 0.5 * (1.0 + s)


def entanglement_entropy(p_up: float, base: float | str = "e") -> float:
    """Von Neumann entropy of the reduced qubit state.

    ``base`` is ``"e"`` (nats, default) or ``2`` (bits).
    """
    if not (0.0 <= p_up <= 1.0):
        raise DomainError(f"p_up must lie in [0, 1], got {p_up!r}")
    if base in ("e", math.e):
        b = math.e
    elif base in (2, "2"):
        b = 2.0
    else:
        raise DomainError(f"unsupported entropy base {base!r}")
    return entropy_from_probability(p_up, b)


@dataclass(frozen=True)
class Classification:
    region: str
    g_over_gc: float
    xi: float
    m: float
    heuristic: bool = True
    boundaries: tuple = REGION_BOUNDARIES


def classify(model: ModelParams, solution: GroundStateSolution | None = None) -> Classification:
    """Nonclassical-state region from ``g/g_c`` alone.

    The measured squeeze and mean photon number are attached only as
    annotation; they do not influence the label.
    """
    x = model.g_over_gc
    lo, mid, hi = REGION_BOUNDARIES
    if x < lo:
        region = "VS"
    elif x < mid:
        region = "SVS"
    elif x < hi:
        region = "SCS"
    else:
        region = "CSWS"
    if solution is None:
        return Classification(region, x, float("nan"), float("nan"))
    return Classification(region, x, solution.params.xi, mean_photon_m(solution.params))


@dataclass
class PhotonDistribution:
    n: np.ndarray
    population: np.ndarray

    @property
    def parity(self) -> np.ndarray:
        return np.where(self.n % 2 == 0, 1, -1)

    @property
    def even(self) -> np.ndarray:
        return np.where(self.n % 2 == 0, self.population, 0.0)

    @property
    def odd(self) -> np.ndarray:
        return np.where(self.n % 2 == 1, self.population, 0.0)

    @property
    def odd_total(self) -> float:
        return float(self.population[1::2].sum())

    @property
    def even_total(self) -> float:
        return float(self.population[0::2].sum())

    def records(self):
        return [(int(k), float(v), int(s)) for k, v, s in zip(self.n, self.population, self.parity)]


def default_fock_cutoff(vp: VariationalParams) -> int:
    """Cutoff ``mean + 6 sigma`` (plus a floor) for the trial state."""
    sq = 0.25 * (vp.xi + 1.0 / vp.xi - 2.0)
    mean = mean_photon_m(vp) + sq
    d = max(abs(vp.d_alpha), abs(vp.d_beta))
    var = 0.5 * d * d * max(vp.xi, 1.0 / vp.xi) + 2 * sq * (sq + 1) + 1.0
    return int(math.ceil(mean + 6.0 * math.sqrt(var) + 20))


def photon_statistics(source, n_max: int | None = None) -> PhotonDistribution:
    """Parity-resolved Fock populations of a variational solution or an ED result."""
    if isinstance(source, EDResult):
        pop = source.vector**2
        if n_max is not None:
            pop = pop[: n_max + 1]
        return PhotonDistribution(np.arange(pop.shape[0]), pop)
    vp = getattr(source, "params", source)
    if not isinstance(vp, VariationalParams):
        raise DomainError("source must be a GroundStateSolution, VariationalParams or EDResult")
    n_max = n_max if n_max is not None else default_fock_cutoff(vp)
    even = fock_amplitudes(trial_state(vp, "psi_even"), n_max)
    odd = fock_amplitudes(trial_state(vp, "psi_odd"), n_max)
    pop = 0.25 * (even**2 + odd**2)
    return PhotonDistribution(np.arange(n_max + 1), pop)


@dataclass
class PhasePoint:
    model: ModelParams
    solution: GroundStateSolution
    m: float
    delta_d: float
    p_up: float
    p_down: float
    entropy: float
    region: str
    ed: EDResult | None = None
    negativities: dict = field(default_factory=dict)


def analyze_point(
    model: ModelParams,
    ansatz: str = "full4",
    *,
    with_ed: bool = True,
    with_negativity: bool = False,
    entropy_base="e",
    solution: GroundStateSolution | None = None,
) -> PhasePoint:
    """Solve one coupling and collect every scalar diagnostic."""
    ed = solve_exact(model) if with_ed else None
    if solution is None:
        solution = minimize_ground(
            model, ansatz, compute_error=with_ed, ed_energy=ed.energy if ed is not None else None
        )
    vp = solution.params
    p_up, p_down = spin_probabilities(vp)
    point = PhasePoint(
        model=model,
        solution=solution,
        m=mean_photon_m(vp),
        delta_d=displacement_gap(vp),
        p_up=p_up,
        p_down=p_down,
        entropy=entanglement_entropy(p_up, entropy_base),
        region=classify(model, solution).region,
        ed=ed,
    )
    if with_negativity:
        from .wigner import field_negativities

        neg = field_negativities(vp)
        point.negativities = {"total": neg["W_T"], "even": neg["W_E"], "odd": neg["W_O"]}
    return point
