import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisenberg_otto.oracle import gibbs_from_eigensystem, hamiltonian_matrix, jacobi_eigensystem
from heisenberg_otto.spin_system import SpinPairParams, build_hamiltonian, commutator_norm, spectral_decomposition
from heisenberg_otto.thermal import (
    boltzmann_populations,
    InvalidTemperatureError,
    InvariantViolationError,
    energy_entropy,
    gibbs_state,
    project_populations,
    shannon_entropy,
    von_neumann_entropy,
)

from conftest import random_density_matrix

KET00 = np.array([1, 0, 0, 0], dtype=complex)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)


def eq3_populations_mp(energies, temperature):
    mpmath.mp.dps = 40
    w = [mpmath.e ** (-mpmath.mpf(e) / temperature) for e in energies]
    z = sum(w)
    return np.array([float(x / z) for x in w])


def test_high_temperature_limit(homogeneous):
    rho = gibbs_state(homogeneous, 1e9)
    np.testing.assert_allclose(np.diag(rho).real, 0.25, atol=1e-8)
    np.testing.assert_allclose(rho, np.eye(4) / 4, atol=1e-8)


def test_homogeneous_populations_at_unit_temperature(homogeneous):
    rho = gibbs_state(homogeneous, 1.0)
    expected = eq3_populations_mp(["-0.6", "-5.8", "0.2", "6.2"], 1)
    p = project_populations(rho, homogeneous)
    np.testing.assert_allclose(p, expected, rtol=1e-13, atol=1e-16)
    assert np.argmax(p) == 1  # |00> is the ground level here


def test_inhomogeneous_gibbs_against_oracle(inhomogeneous):
    rho = gibbs_state(inhomogeneous, 2.0)
    h = build_hamiltonian(inhomogeneous)
    assert commutator_norm(h, rho) < 1e-10
    ref, _ = gibbs_from_eigensystem(jacobi_eigensystem(hamiltonian_matrix(0.1, 3.0, 4.0)), 2.0)
    np.testing.assert_allclose(rho, ref, atol=1e-13)
    e = spectral_decomposition(inhomogeneous).eigenvalues
    p = project_populations(rho, inhomogeneous)
    order = np.argsort(e)
    assert np.all(np.diff(p[order]) < 0)


@pytest.mark.parametrize("t", [0.0, -1.0, math.inf, math.nan])
def test_bad_temperature(homogeneous, t):
    with pytest.raises(InvalidTemperatureError):
        gibbs_state(homogeneous, t)


def test_low_temperature_does_not_overflow(homogeneous):
    rho = gibbs_state(homogeneous, 1e-3)
    p = project_populations(rho, homogeneous)
    np.testing.assert_allclose(p, [0, 1, 0, 0], atol=1e-300)


def test_ket00_projects_onto_itself(inhomogeneous):
    rho = np.outer(KET00, KET00.conj())
    np.testing.assert_array_equal(project_populations(rho, inhomogeneous), [0, 1, 0, 0])


def test_singlet_projected_on_inhomogeneous_basis(inhomogeneous):
    rho = np.outer(SINGLET, SINGLET.conj())
    p = project_populations(rho, inhomogeneous)
    # a*b from the oracle eigenvector of the upper central level
    es = jacobi_eigensystem(hamiltonian_matrix(0.1, 3.0, 4.0))
    central = [i for i in range(4) if abs(es.eigenvectors[0, i]) < 1e-12 and abs(es.eigenvectors[3, i]) < 1e-12]
    upper = max(central, key=lambda i: es.eigenvalues[i])
    ab = abs(es.eigenvectors[1, upper] * es.eigenvectors[2, upper])
    np.testing.assert_allclose(p, [0.5 + ab, 0, 0.5 - ab, 0], atol=1e-12)
    assert ab == pytest.approx(1 / (2 * math.sqrt(7.25)), rel=1e-12)


def test_entropy_values():
    rho = np.outer(KET00, KET00.conj())
    assert von_neumann_entropy(rho) == 0.0
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(math.log(4), abs=1e-15)
    assert shannon_entropy([0.25] * 4) == pytest.approx(math.log(4), abs=1e-15)


def test_entropy_rejects_negative_probabilities():
    assert shannon_entropy([1 + 5e-11, -5e-11, 0, 0]) == pytest.approx(0, abs=1e-9)
    with pytest.raises(InvariantViolationError):
        shannon_entropy([1.1, -0.1, 0, 0])


def test_gibbs_entropies_coincide(homogeneous):
    rho = gibbs_state(homogeneous, 1.0)
    _, p = gibbs_from_eigensystem(jacobi_eigensystem(hamiltonian_matrix(0.1, 3.0, 3.0)), 1.0)
    shannon = -np.sum(p * np.log(p))
    assert von_neumann_entropy(rho) == pytest.approx(shannon, abs=1e-12)
    assert energy_entropy(rho, homogeneous) == pytest.approx(von_neumann_entropy(rho), abs=1e-10)


params_st = st.builds(SpinPairParams, st.floats(0.01, 2.0), st.floats(-5, 5), st.floats(-5, 5))


@settings(max_examples=100, deadline=None)
@given(params_st, st.floats(0.05, 50.0))
def test_gibbs_properties(params, t):
    rho = gibbs_state(params, t)
    e = spectral_decomposition(params).eigenvalues
    p = boltzmann_populations(e, t)
    assert abs(p.sum() - 1) < 1e-12
    assert p[0] > p[2]
    np.testing.assert_allclose(project_populations(rho, params), p, atol=1e-14)
    for i in range(4):
        for j in range(4):
            if e[i] < e[j] - 1e-9:
                assert p[i] >= p[j]
    assert energy_entropy(rho, params) == pytest.approx(von_neumann_entropy(rho), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(params_st, st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_measurement_never_lowers_entropy(params, seed, rank):
    rho = random_density_matrix(np.random.default_rng(seed), rank)
    p = project_populations(rho, params)
    assert abs(p.sum() - np.trace(rho).real) < 1e-12
    assert energy_entropy(rho, params) >= von_neumann_entropy(rho) - 1e-10
