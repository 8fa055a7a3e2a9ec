import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabipolaron.errors import DomainError
from rabipolaron.gaussian import quadrature_expectation
from rabipolaron.model import derive_scales, from_ratio
from rabipolaron.variational import (
    beta_from_normalization,
    energy,
    make_params,
    minimize_ground,
    parity_overlap,
    squeezing_profile,
    sweep,
    trial_state,
)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1.0), st.floats(0.0, 1.0))
def test_normalisation_root(alpha, t):
    beta = beta_from_normalization(alpha, t)
    assert beta >= -1e-15
    assert alpha**2 + beta**2 + 2 * alpha * beta * t == pytest.approx(1.0, abs=1e-12)


def test_normalisation_domain():
    with pytest.raises(DomainError):
        beta_from_normalization(0.0, 0.5)
    with pytest.raises(DomainError):
        beta_from_normalization(0.5, 1.5)


params = st.tuples(st.floats(0.05, 1.0), st.floats(0.2, 4.0), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))


@settings(max_examples=30, deadline=None)
@given(params, st.floats(0.1, 20.0), st.floats(0.0, 4.0))
def test_energy_matches_quadrature(p, delta, g):
    model = derive_scales(delta, g)
    vp = make_params(*p, model.g_prime)
    assert vp.normalization_residual() < 1e-12
    psi = trial_state(vp, "psi_plus")
    assert quadrature_expectation(psi, "overlap") == pytest.approx(1.0, abs=1e-10)
    s = quadrature_expectation(psi, "parity")
    assert parity_overlap(vp) == pytest.approx(s, abs=1e-10)
    h = quadrature_expectation(psi, "hamiltonian", well_center=model.g_prime)
    expected = h - 0.5 * delta * s + model.eps0
    assert energy(vp, model) == pytest.approx(expected, abs=1e-9 * max(1.0, abs(expected)))


@settings(max_examples=30, deadline=None)
@given(params, st.floats(0.1, 20.0), st.floats(0.0, 4.0))
def test_energy_is_variational_upper_bound(p, delta, g):
    from rabipolaron.exact_diag import converge_truncation

    model = derive_scales(delta, g)
    vp = make_params(*p, model.g_prime)
    _, e0, _ = converge_truncation(model)
    assert energy(vp, model) >= e0 - 1e-9


def test_relabelling_symmetry():
    model = derive_scales(5.0, 2.0)
    vp = make_params(0.3, 0.8, -0.7, -0.2, model.g_prime)
    c = vp.canonical()
    assert c.d_alpha >= 0
    assert energy(c, model) == pytest.approx(energy(vp, model), abs=1e-12)
    x = np.linspace(-5, 5, 11)
    assert np.allclose(trial_state(c, "psi_plus")(x), trial_state(vp, "psi_plus")(x))


def test_decoupled_limit():
    sol = minimize_ground(from_ratio(10.0, 0.0), compute_error=True)
    assert sol.energy == pytest.approx(-5.0, abs=1e-10)
    assert sol.params.xi == pytest.approx(1.0, abs=1e-4)
    assert abs(sol.params.d_alpha) < 1e-4 and abs(sol.params.d_beta) < 1e-4


def test_zero_splitting_limit():
    g = 1.7
    sol = minimize_ground(derive_scales(1e-12, g), compute_error=False)
    assert sol.energy == pytest.approx(-g * g, abs=1e-8)


def test_reference_weights(solve):
    vp = solve(10.0, 2.0).params
    assert vp.alpha == pytest.approx(0.996, abs=0.01)
    assert vp.beta == pytest.approx(0.087, abs=0.01)


@pytest.mark.parametrize("ansatz", ["eq15", "eq19"])
def test_reduced_ansatze_bound_the_full_one(ansatz):
    model = from_ratio(10.0, 1.2)
    full = minimize_ground(model, "full4", compute_error=False)
    reduced = minimize_ground(model, ansatz, compute_error=False)
    assert reduced.energy >= full.energy - 1e-10
    if ansatz == "eq15":
        assert reduced.params.alpha == 1.0 and reduced.params.xi == 1.0


def test_unknown_ansatz():
    with pytest.raises(DomainError):
        minimize_ground(from_ratio(1.0, 1.0), "eq7")


def test_sweep_continuation_is_never_worse():
    models = [from_ratio(10.0, x) for x in (0.8, 1.0, 1.2)]
    cont = sweep(models, compute_error=False)
    for m, s in zip(models, cont):
        single = minimize_ground(m, compute_error=False)
        assert s.energy <= single.energy + 1e-9


def test_solution_is_deterministic():
    a = minimize_ground(from_ratio(10.0, 1.3), compute_error=False)
    b = minimize_ground(from_ratio(10.0, 1.3), compute_error=False)
    assert a.energy == b.energy and a.params == b.params


def test_squeezing_profile_rejects_unsorted_grid():
    with pytest.raises(DomainError):
        squeezing_profile(10.0, [1.0, 0.5])


def test_energy_error_attached(solve, exact):
    sol = minimize_ground(from_ratio(1.0, 1.0), ed_energy=exact(1.0, 1.0).energy)
    assert sol.energy_error == pytest.approx(abs((sol.energy - sol.ed_energy) / sol.ed_energy))
    assert sol.energy_error < 5e-4
    assert math.isfinite(sol.energy)


@settings(max_examples=30, deadline=None)
@given(params, st.floats(0.1, 20.0), st.floats(0.0, 4.0))
def test_energy_matches_matrix_element_assembly(p, delta, g):
    from rabipolaron.gaussian import h_matrix_element

    model = derive_scales(delta, g)
    vp = make_params(*p, model.g_prime)
    w = np.array([vp.alpha, vp.beta])
    c = np.array([vp.d_alpha, -vp.d_beta])
    h = h_matrix_element(c[:, None], c[None, :], vp.xi, model.g_prime)
    expected = float(w @ h @ w) - 0.5 * delta * parity_overlap(vp) + model.eps0
    assert energy(vp, model) == pytest.approx(expected, abs=1e-12 * max(1.0, abs(expected)))
