"""Matrix elements of displaced, equally squeezed Gaussians.

A component centred at ``c`` with squeeze ``xi`` is the unit-normalised

    phi_c(x) = (xi / pi)**0.25 * exp(-xi * (x - c)**2 / 2).

The closed forms below are the first-principles Gaussian integrals.  The
quadrature routines integrate the same quantities numerically and serve as an
independent check on them.  Fock projections use the position representation
``<x|n> = pi**-0.25 * exp(-x**2/2) * H_n(x) / sqrt(2**n n!)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import roots_hermite

from .errors import DomainError, NumericalError, TruncationWarning

__all__ = [
    "GaussianComponent",
    "GaussianState",
    "overlap",
    "kinetic_element",
    "potential_element",
    "h_matrix_element",
    "quadrature_expectation",
    "hermite_functions",
    "fock_amplitudes",
]

_GL_ORDER = 20
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


@dataclass(frozen=True)
class GaussianComponent:
    weight: float
    center: float
    squeeze: float

    def __post_init__(self):
        if not (self.squeeze > 0.0):
            raise DomainError(f"squeeze must be positive, got {self.squeeze!r}")


@dataclass(frozen=True)
class GaussianState:
    """Real superposition of Gaussians sharing one squeeze parameter."""

    components: tuple[GaussianComponent, ...]

    def __post_init__(self):
        if len(self.components) == 0:
            raise DomainError("a GaussianState needs at least one component")
        xi = self.components[0].squeeze
        if any(c.squeeze != xi for c in self.components):
            raise DomainError("all components must share the same squeeze")

    @classmethod
    def from_arrays(cls, weights: Sequence[float], centers: Sequence[float], xi: float):
        return cls(
            tuple(GaussianComponent(float(w), float(c), float(xi)) for w, c in zip(weights, centers))
        )

    @property
    def xi(self) -> float:
        return self.components[0].squeeze

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.components])

    def mirrored(self) -> "GaussianState":
        """The state ``psi(-x)``."""
        return GaussianState.from_arrays(self.weights, -self.centers, self.xi)

    def __call__(self, x):
        """Evaluate the wavefunction on ``x``."""
        x = np.asarray(x, dtype=float)
        xi = self.xi
        out = np.zeros_like(x)
        norm = (xi / math.pi) ** 0.25
        for c in self.components:
            out += c.weight * norm * np.exp(-0.5 * xi * (x - c.center) ** 2)
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        xi = self.xi
        out = np.zeros_like(x)
        norm = (xi / math.pi) ** 0.25
        for c in self.components:
            out -= c.weight * norm * xi * (x - c.center) * np.exp(-0.5 * xi * (x - c.center) ** 2)
        return out

    def norm_squared(self) -> float:
        w, c = self.weights, self.centers
        return float(w @ overlap(c[:, None], c[None, :], self.xi) @ w)

    def support(self, width: float = 8.0) -> tuple[float, float]:
        """Interval outside which every component is below ``exp(-width**2/2)``."""
        half = width / math.sqrt(self.xi)
        return float(self.centers.min() - half), float(self.centers.max() + half)


def _check_xi(xi):
    if np.any(np.asarray(xi) <= 0.0):
        raise DomainError(f"squeeze must be positive, got {xi!r}")


def overlap(c1, c2, xi):
    """``<phi_c1|phi_c2> = exp(-xi (c1 - c2)^2 / 4)``."""
    _check_xi(xi)
    return np.exp(-0.25 * xi * (np.asarray(c1) - np.asarray(c2)) ** 2)


def kinetic_element(c1, c2, xi):
    """``<phi_c1| p^2/2 |phi_c2>``."""
    _check_xi(xi)
    d = np.asarray(c1) - np.asarray(c2)
    return overlap(c1, c2, xi) * 0.5 * (0.5 * xi - 0.25 * xi**2 * d**2)


def potential_element(c1, c2, xi, well_center):
    """``<phi_c1| (x - well_center)^2/2 |phi_c2>``."""
    _check_xi(xi)
    mid = 0.5 * (np.asarray(c1) + np.asarray(c2))
    return overlap(c1, c2, xi) * 0.5 * ((mid - well_center) ** 2 + 0.5 / xi)


def h_matrix_element(c1, c2, xi, well_center):
    """``<phi_c1| [p^2 + (x - well_center)^2]/2 |phi_c2>``."""
    return kinetic_element(c1, c2, xi) + potential_element(c1, c2, xi, well_center)


def _composite_gauss_legendre(f, a, b, panels):
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.dot(w, f(x)))


def _kernel_integrand(state, kernel, well_center, moment):
    if kernel == "overlap":
        return lambda x: state(x) ** 2
    if kernel == "kinetic":
        return lambda x: 0.5 * state.derivative(x) ** 2
    if kernel == "potential":
        return lambda x: 0.5 * (x - well_center) ** 2 * state(x) ** 2
    if kernel == "hamiltonian":
        return lambda x: 0.5 * state.derivative(x) ** 2 + 0.5 * (x - well_center) ** 2 * state(x) ** 2
    if kernel == "moment":
        return lambda x: x**moment * state(x) ** 2
    if kernel == "parity":
        return lambda x: state(x) * state(-x)
    raise DomainError(f"unknown kernel {kernel!r}")


def quadrature_expectation(
    state: GaussianState,
    kernel: str,
    *,
    well_center: float = 0.0,
    moment: int = 1,
    panels: int = 20,
    rtol: float = 1e-12,
    max_doublings: int = 8,
) -> float:
    """Numerical ``<state|K|state>`` by composite Gauss-Legendre quadrature.

    ``kernel`` is one of ``overlap``, ``kinetic`` (p^2/2), ``potential``
    ((x - well_center)^2/2), ``hamiltonian`` (their sum), ``moment``
    (x**moment) or ``parity`` (``<psi(x)|psi(-x)>``).  The interval is clipped to
    8 standard widths around the outermost centres (symmetrised for
    ``parity``) and the panel count doubles until successive results agree.
    """
    f = _kernel_integrand(state, kernel, well_center, moment)
    a, b = state.support(8.0)
    if kernel == "parity":
        half = max(abs(a), abs(b))
        a, b = -half, half
    panels = max(int(panels), 20)
    value = _composite_gauss_legendre(f, a, b, panels)
    for _ in range(max_doublings):
        panels *= 2
        refined = _composite_gauss_legendre(f, a, b, panels)
        if abs(refined - value) <= rtol * max(1.0, abs(refined)):
            return refined
        value = refined
    raise NumericalError(
        "quadrature did not converge", kernel=kernel, panels=panels, last=value
    )


def hermite_functions(n_max: int, x) -> tuple[np.ndarray, np.ndarray]:
    """Scaled Hermite functions ``<x|n>`` for ``n = 0..n_max``.

    Returns ``(h, log_scale)`` with ``<x|n> = h[n] * exp(log_scale)`` where
    ``log_scale`` is per node.  The normalised three-term recursion is
    rescaled whenever values exceed 1e100 so large ``|x|`` never under- or
    overflows.  Use :func:`_unscale` to obtain plain values.
    """
    x = np.asarray(x, dtype=float)
    h = np.empty((n_max + 1,) + x.shape)
    log_scale = -0.5 * x**2 - 0.25 * math.log(math.pi)
    h[0] = 1.0
    if n_max >= 1:
        h[1] = math.sqrt(2.0) * x
    big = 1e100
    for n in range(1, n_max):
        h[n + 1] = math.sqrt(2.0 / (n + 1)) * x * h[n] - math.sqrt(n / (n + 1)) * h[n - 1]
        over = np.abs(h[n + 1]) > big
        if np.any(over):
            # earlier rows at these nodes are rescaled too so one log_scale applies
            h[: n + 2, over] /= big
            log_scale = np.where(over, log_scale + math.log(big), log_scale)
    return h, log_scale


def _unscale(h, log_scale):
    with np.errstate(under="ignore"):
        return h * np.exp(log_scale)


def _component_fock(center, xi, n_max, nodes):
    t, w = roots_hermite(nodes)
    scale = math.sqrt(2.0 / xi)
    x = center + scale * t
    h, log_scale = hermite_functions(n_max, x)
    psi_n = _unscale(h, log_scale)
    prefactor = (xi / math.pi) ** 0.25 * scale
    return prefactor * (psi_n @ w)


def fock_amplitudes(
    state: GaussianState,
    n_max: int,
    *,
    nodes: int | None = None,
    atol: float = 1e-12,
    tail_tol: float = 1e-6,
) -> np.ndarray:
    """Amplitudes ``<n|state>`` for ``n = 0..n_max``.

    Each component is integrated by Gauss-Hermite quadrature on its own
    Gaussian envelope, with the Hermite functions generated by the stable
    recursion.  The node count doubles until the amplitudes stop changing.
    A :class:`TruncationWarning` is issued when more than ``tail_tol`` of the
    state's norm lies above ``n_max``.
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    xi = state.xi
    k = nodes or max(64, n_max + 32 + int(4 * np.abs(state.centers).max() * math.sqrt(max(xi, 1.0))))
    amps = np.zeros(n_max + 1)
    for comp in state.components:
        if comp.weight == 0.0:
            continue
        kk = k
        a = _component_fock(comp.center, xi, n_max, kk)
        for _ in range(4):
            kk *= 2
            b = _component_fock(comp.center, xi, n_max, kk)
            if np.max(np.abs(b - a)) <= atol:
                a = b
                break
            a = b
        else:
            raise NumericalError("Fock projection did not converge", center=comp.center, nodes=kk)
        amps += comp.weight * a
    norm = state.norm_squared()
    tail = norm - float(np.sum(amps**2))
    if norm > 0 and tail > tail_tol * norm:
        warnings.warn(
            TruncationWarning(f"n_max={n_max} leaves {tail:.3e} of the norm untruncated", tail=tail),
            stacklevel=2,
        )
    return amps
