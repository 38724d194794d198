"""
Gibbs states and the two entropy functionals used to diagnose friction.

The von Neumann entropy is invariant under the unitary strokes. The energy
entropy, the Shannon entropy of the populations in the instantaneous energy
eigenbasis, grows whenever driving leaves coherences between energy levels.
"""

from __future__ import annotations

import math

import numpy as np

from .spin_system import SpinPairParams, spectral_decomposition

__all__ = [
    "InvalidTemperatureError",
    "InvariantViolationError",
    "DensityMatrix",
    "validate_density_matrix",
    "boltzmann_populations",
    "gibbs_state",
    "project_populations",
    "shannon_entropy",
    "von_neumann_entropy",
    "energy_entropy",
    "purity",
]

DensityMatrix = np.ndarray

_CLIP = 1e-10


class InvalidTemperatureError(ValueError):
    pass


class InvariantViolationError(ValueError):
    """A density matrix or population vector is outside its allowed set."""


def validate_density_matrix(rho, tol: float = 1e-10) -> np.ndarray:
    """Return ``rho`` as an array after checking shape, Hermiticity, trace and positivity."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvariantViolationError(f"density matrix must be 4x4, got {rho.shape}")
    if np.linalg.norm(rho - rho.conj().T) > tol:
        raise InvariantViolationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvariantViolationError(f"density matrix trace is {np.trace(rho).real:.3e}, not 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise InvariantViolationError("density matrix has a negative eigenvalue")
    return rho


def boltzmann_populations(energies, temperature: float) -> np.ndarray:
    """softmax(-E/T), shifted by the minimum energy so low T cannot overflow."""
    if not math.isfinite(temperature) or temperature <= 0:
        raise InvalidTemperatureError(f"temperature must be finite and > 0, got {temperature!r}")
    e = np.asarray(energies, dtype=float)
    w = np.exp(-(e - e.min()) / temperature)
    return w / w.sum()


def gibbs_state(params: SpinPairParams, temperature: float) -> DensityMatrix:
    """exp(-H/T)/Z assembled from the closed-form eigensystem."""
    sd = spectral_decomposition(params)
    p = boltzmann_populations(sd.eigenvalues, temperature)
    v = sd.eigenvectors
    return (v * p) @ v.conj().T


def project_populations(rho, params: SpinPairParams) -> np.ndarray:
    """Populations <e_i|rho|e_i> in the fixed order (psi1, 00, psi3, 11)."""
    rho = np.asarray(rho)
    v = spectral_decomposition(params).eigenvectors
    p = np.einsum("ji,jk,ki->i", v.conj(), rho, v).real
    if p.min() < -1e-12 or p.max() > 1 + 1e-12:
        raise InvariantViolationError(f"populations out of [0, 1]: {p}")
    return p


def shannon_entropy(p) -> float:
    """-sum p ln p with 0 ln 0 = 0; tiny negative roundoff is clipped."""
    p = np.asarray(p, dtype=float)
    if p.min() < -_CLIP:
        raise InvariantViolationError(f"negative probability {p.min():.3e}")
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho) -> float:
    lam = np.linalg.eigvalsh(np.asarray(rho))
    return shannon_entropy(lam)


def energy_entropy(rho, params: SpinPairParams) -> float:
    return shannon_entropy(project_populations(rho, params))


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.einsum("ij,ji->", rho, rho).real)
