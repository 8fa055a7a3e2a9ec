"""Quantum Rabi model parameters and the displaced-oscillator form.

All energies are in units of the cavity frequency (hbar * omega = 1), so the
qubit splitting ``delta`` coincides with the frequency ratio ``R``.

    H = a^dag a + (delta / 2) sigma_z + g sigma_x (a^dag + a)

With x = (a + a^dag)/sqrt(2) and p = (a - a^dag)/(i sqrt(2)) this becomes, in
the sigma_x eigenbasis,

    H = sum_s h^s |s><s| + (delta / 2) (|+><-| + |-><+|) + eps0,
    h^s = [p^2 + (x + s g')^2] / 2,   g' = sqrt(2) g,   eps0 = -(g'^2 + 1) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "ModelParams",
    "OscillatorBranch",
    "derive_scales",
    "critical_couplings",
    "from_ratio",
    "hamiltonian_sigma_x",
]


def critical_couplings(delta: float) -> tuple[float, float]:
    """Return ``(g_c0, g_c)`` for a qubit splitting ``delta``.

    ``g_c0 = sqrt(delta)/2`` is the bare critical coupling and
    ``g_c = sqrt(1 + sqrt(1 + g_c0**4))`` the squeezing-corrected scale.
    """
    g_c0 = math.sqrt(delta) / 2.0
    g_c = math.sqrt(1.0 + math.sqrt(1.0 + g_c0**4))
    return g_c0, g_c


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters and derived coupling scales (hbar*omega = 1)."""

    delta: float
    g: float
    ratio: float
    g_prime: float
    g_c0: float
    g_c: float
    eps0: float

    @property
    def g_over_gc(self) -> float:
        return self.g / self.g_c


def derive_scales(delta: float, g: float) -> ModelParams:
    """Build a :class:`ModelParams` from the splitting and the absolute coupling."""
    delta = float(delta)
    g = float(g)
    if not (delta > 0.0) or not math.isfinite(delta):
        raise DomainError(f"delta must be positive and finite, got {delta!r}")
    if not (g >= 0.0) or not math.isfinite(g):
        raise DomainError(f"g must be non-negative and finite, got {g!r}")
    g_prime = math.sqrt(2.0) * g
    g_c0, g_c = critical_couplings(delta)
    return ModelParams(
        delta=delta,
        g=g,
        ratio=delta,
        g_prime=g_prime,
        g_c0=g_c0,
        g_c=g_c,
        eps0=-(g_prime**2 + 1.0) / 2.0,
    )


def from_ratio(ratio: float, g_over_gc: float) -> ModelParams:
    """Resolve a ``(R, g/g_c)`` pair into absolute model parameters."""
    if not (ratio > 0.0):
        raise DomainError(f"ratio must be positive, got {ratio!r}")
    if not (g_over_gc >= 0.0):
        raise DomainError(f"g/g_c must be non-negative, got {g_over_gc!r}")
    _, g_c = critical_couplings(float(ratio))
    return derive_scales(ratio, g_over_gc * g_c)


@dataclass(frozen=True)
class OscillatorBranch:
    """One sigma_x block ``kinetic * p^2 + stiffness/2 * (x - center)^2``.

    ``tunneling`` is the off-diagonal sigma_x-flip amplitude and ``offset``
    the constant eps0 shared by both branches.
    """

    spin: int
    kinetic: float
    stiffness: float
    center: float
    tunneling: float
    offset: float


def hamiltonian_sigma_x(params: ModelParams, branch: int) -> OscillatorBranch:
    """Displaced-oscillator description of the ``sigma_x = branch`` block.

    The ``+`` branch is centred at ``-g'`` and the ``-`` branch at ``+g'``.
    """
    if branch not in (1, -1):
        raise DomainError(f"branch must be +1 or -1, got {branch!r}")
    return OscillatorBranch(
        spin=branch,
        kinetic=0.5,
        stiffness=1.0,
        center=-branch * params.g_prime,
        tunneling=params.delta / 2.0,
        offset=params.eps0,
    )
