"""Exact ground state of the Rabi model on a parity chain.

The Hamiltonian conserves the parity ``P = sigma_z * (-1)**(a^dag a)``.  On the
even (``P = +1``... ground) chain the basis is

    |down,0> <-> |up,1> <-> |down,2> <-> |up,3> <-> ...

so chain site ``n`` holds Fock level ``n`` with the spin fixed by the parity of
``n``.  The Hamiltonian is then symmetric tridiagonal with

    diag[n]    = n - parity * (-1)**n * delta / 2
    offdiag[n] = g * sqrt(n + 1)

The ground pair is found by Sturm-sequence bisection and inverse iteration.
A dense two-level x Fock diagonalisation is provided as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import DomainError, NumericalError, ResourceError
from .model import ModelParams

__all__ = [
    "ParityChain",
    "EDResult",
    "build_parity_chain",
    "ground_eigenpair",
    "dense_oracle",
    "dense_hamiltonian",
    "dense_sigma_x_hamiltonian",
    "converge_truncation",
    "tail_mass",
    "ed_observables",
    "solve_exact",
]

N_MAX_CAP = 200_000
TAIL_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ParityChain:
    parity: int
    n_max: int
    diag: np.ndarray
    offdiag: np.ndarray


@dataclass
class EDResult:
    energy: float
    vector: np.ndarray
    n_max: int
    tail_mass: float
    observables: dict = field(default_factory=dict)


def build_parity_chain(params: ModelParams, parity: int, n_max: int) -> ParityChain:
    if parity not in (1, -1):
        raise DomainError(f"parity must be +1 or -1, got {parity!r}")
    if n_max < 4:
        raise DomainError(f"n_max must be at least 4, got {n_max}")
    n = np.arange(n_max + 1, dtype=float)
    sign = np.where(np.arange(n_max + 1) % 2 == 0, 1.0, -1.0)
    diag = n - parity * sign * params.delta / 2.0
    offdiag = params.g * np.sqrt(n[1:])
    return ParityChain(parity=parity, n_max=n_max, diag=diag, offdiag=offdiag)


@numba.njit(cache=True)
def _sturm_count(d, e2, shift, pivmin):
    """Number of eigenvalues strictly below ``shift``."""
    count = 0
    q = d[0] - shift
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, d.shape[0]):
        q = d[i] - shift - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect_lowest(d, e2, lo, hi, tol, pivmin):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _sturm_count(d, e2, mid, pivmin) >= 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


@numba.njit(cache=True)
def _spd_solve(d, e, shift, rhs):
    """Solve ``(T - shift) y = rhs`` by LDL^T; returns (y, ok)."""
    n = d.shape[0]
    piv = np.empty(n)
    y = np.empty(n)
    piv[0] = d[0] - shift
    if not piv[0] > 0.0:
        return y, False
    y[0] = rhs[0]
    for i in range(1, n):
        l = e[i - 1] / piv[i - 1]
        piv[i] = d[i] - shift - l * e[i - 1]
        if not piv[i] > 0.0:
            return y, False
        y[i] = rhs[i] - l * y[i - 1]
    y[n - 1] = y[n - 1] / piv[n - 1]
    for i in range(n - 2, -1, -1):
        y[i] = (y[i] - e[i] * y[i + 1]) / piv[i]
    return y, True


def _gershgorin(d, e):
    r = np.zeros_like(d)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    return float(np.min(d - r)), float(np.max(d + r))


def ground_eigenpair(chain: ParityChain, tol: float = 1e-12, sweeps: int = 3):
    """Lowest eigenpair of a parity chain.

    Returns ``(energy, vector)``.  The eigenvalue is bracketed by bisection to
    width ``tol`` (floored at a few ulps of the spectral scale); the vector
    comes from inverse iteration with a shift just below the bracket, where
    ``T - shift`` is positive definite and the LDL^T sweep is stable.
    """
    if not (0.0 < tol <= 1e-6):
        raise DomainError(f"tol must lie in (0, 1e-6], got {tol!r}")
    d = np.ascontiguousarray(chain.diag, dtype=float)
    e = np.ascontiguousarray(chain.offdiag, dtype=float)
    e2 = e * e
    lo, hi = _gershgorin(d, e)
    scale = max(abs(lo), abs(hi), 1.0)
    eps = np.finfo(float).eps
    pivmin = eps * max(1.0, float(np.max(e2)) if e2.size else 1.0) * 1e-3
    width = max(tol, 4.0 * eps * scale)
    lo, hi = _bisect_lowest(d, e2, lo, hi, width, pivmin)
    energy = 0.5 * (lo + hi)

    rng = np.random.default_rng(12345)
    start = rng.uniform(0.5, 1.5, d.shape[0])
    gap = max(width, 8.0 * eps * scale)
    for attempt in range(6):
        shift = lo - gap
        v = start / np.linalg.norm(start)
        ok = True
        for _ in range(sweeps):
            v, ok = _spd_solve(d, e, shift, v)
            if not ok:
                break
            v /= np.linalg.norm(v)
        if ok:
            break
        gap *= 10.0
    else:
        raise NumericalError("inverse iteration broke down", energy=energy, shift=shift)

    # fix the overall sign: the |down,0> head carries a non-negative amplitude
    idx = int(np.argmax(np.abs(v)))
    if v[0] < 0 or (v[0] == 0 and v[idx] < 0):
        v = -v
    tv = d * v
    tv[:-1] += e * v[1:]
    tv[1:] += e * v[:-1]
    residual = float(np.linalg.norm(tv - energy * v))
    if residual > 10.0 * max(width, 8.0 * eps * scale) * max(1.0, math.sqrt(d.shape[0]) / 10.0):
        raise NumericalError("eigenvector residual too large", residual=residual, energy=energy)
    return energy, v


def dense_hamiltonian(params: ModelParams, n_max: int) -> np.ndarray:
    """Rabi Hamiltonian in the ``|spin_z> x |n>`` basis, spin-major (up first)."""
    n = np.arange(n_max + 1, dtype=float)
    a = np.diag(np.sqrt(n[1:]), 1)
    num = np.diag(n)
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    eye_s = np.eye(2)
    return (
        np.kron(eye_s, num)
        + 0.5 * params.delta * np.kron(sz, np.eye(n_max + 1))
        + params.g * np.kron(sx, a + a.T)
    )


def dense_sigma_x_hamiltonian(params: ModelParams, n_max: int) -> np.ndarray:
    """The displaced-oscillator form in the ``|spin_x> x |n>`` basis (``+`` first).

    ``h^s = [p^2 + (x + s g')^2]/2`` is expanded as
    ``a^dag a + 1/2 + s g' x + g'^2/2`` so the truncated matrix carries no
    artefact from squaring a truncated ``x``.
    """
    n = np.arange(n_max + 1, dtype=float)
    a = np.diag(np.sqrt(n[1:]), 1)
    x = (a + a.T) / math.sqrt(2.0)
    gp = params.g_prime
    blocks = []
    for s in (1.0, -1.0):
        blocks.append(np.diag(n + 0.5) + s * gp * x + 0.5 * gp**2 * np.eye(n_max + 1))
    flip = 0.5 * params.delta * np.eye(n_max + 1)
    h = np.block([[blocks[0], flip], [flip, blocks[1]]])
    return h + params.eps0 * np.eye(2 * (n_max + 1))


def dense_oracle(params: ModelParams, n_max: int, vectors: bool = False):
    """Full spectrum of the truncated two-level x Fock matrix."""
    if n_max > 200:
        raise DomainError("dense_oracle is limited to n_max <= 200")
    h = dense_hamiltonian(params, n_max)
    if vectors:
        return np.linalg.eigh(h)
    return np.linalg.eigvalsh(h)


def tail_mass(vector: np.ndarray) -> float:
    """Population of the top 5% of chain sites."""
    start = int(math.ceil(0.95 * vector.shape[0]))
    start = min(start, vector.shape[0] - 1)
    return float(np.sum(vector[start:] ** 2))


def _initial_n_max(params: ModelParams) -> int:
    return int(math.ceil(4.0 * params.g_prime**2 + 20.0))


def converge_truncation(params: ModelParams, energy_tol: float = 1e-10, tol: float = 1e-12):
    """Smallest doubling of ``ceil(4 g'^2 + 20)`` with a converged ground state.

    Returns ``(n_max, energy, vector)``.
    """
    if not (energy_tol > 0.0):
        raise DomainError("energy_tol must be positive")
    n_max = _initial_n_max(params)
    previous = None
    while True:
        if n_max > N_MAX_CAP:
            raise ResourceError(f"truncation exceeded the cap of {N_MAX_CAP} levels")
        energy, vector = ground_eigenpair(build_parity_chain(params, 1, n_max), tol)
        tail = tail_mass(vector)
        if tail < TAIL_THRESHOLD and (
            previous is None and params.g == 0.0
            or previous is not None and abs(energy - previous) < energy_tol
        ):
            return n_max, energy, vector
        previous = energy
        n_max *= 2


def entropy_from_probability(p_up: float, base: float = math.e) -> float:
    s = 0.0
    for p in (p_up, 1.0 - p_up):
        if p > 0.0:
            s -= p * math.log(p)
    return s / math.log(base)


def ed_observables(result: EDResult, params: ModelParams | None = None) -> dict:
    """Photon number, spin populations, entropy and parity-split Fock weights."""
    pop = result.vector**2
    n = np.arange(pop.shape[0])
    odd = (n % 2) == 1
    p_up = float(pop[odd].sum())
    p_down = float(pop[~odd].sum())
    return {
        "mean_photon": float(n @ pop),
        "p_up": p_up,
        "p_down": p_down,
        "entropy": entropy_from_probability(min(max(p_up, 0.0), 1.0)),
        "fock_even": np.where(~odd, pop, 0.0),
        "fock_odd": np.where(odd, pop, 0.0),
    }


def solve_exact(params: ModelParams, energy_tol: float = 1e-10) -> EDResult:
    """Converged even-chain ground state with observables attached."""
    n_max, energy, vector = converge_truncation(params, energy_tol)
    result = EDResult(energy=energy, vector=vector, n_max=n_max, tail_mass=tail_mass(vector))
    result.observables = ed_observables(result, params)
    return result
