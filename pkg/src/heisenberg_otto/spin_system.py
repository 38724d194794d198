"""
Two spin-1/2 particles with isotropic Heisenberg exchange in z-directed fields.

Basis order throughout the package is (|00>, |10>, |01>, |11>), where the
first label is spin 1 and the second is spin 2. The single-spin z operator
acts as sigma_z|0> = -|0>, sigma_z|1> = +|1>, which puts the |00> level at
2J - B1 - B2 and the |11> level at 2J + B1 + B2.

Eigenstates are always listed in the fixed order (psi1, 00, psi3, 11), not
sorted by energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "InvalidParameterError",
    "SpinPairParams",
    "HamiltonianMatrix",
    "SpectralDecomposition",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "spin_operator",
    "exchange_hamiltonian",
    "field_hamiltonian",
    "build_hamiltonian",
    "spectral_decomposition",
    "commutator",
    "commutator_norm",
]


class InvalidParameterError(ValueError):
    """Raised for unphysical or non-finite model parameters."""


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
# negated relative to the textbook Pauli-z, see module docstring
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)

_I2 = np.eye(2, dtype=complex)


def spin_operator(pauli: np.ndarray, site: int) -> np.ndarray:
    """Embed a single-spin operator on ``site`` (1 or 2) into the 4-dim space.

    The basis index is ``s1 + 2*s2``, so spin 1 is the fast index.
    """
    if site == 1:
        return np.kron(_I2, pauli)
    if site == 2:
        return np.kron(pauli, _I2)
    raise ValueError(f"site must be 1 or 2, got {site}")


_SIGMA_DOT = sum(spin_operator(p, 1) @ spin_operator(p, 2) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z))
_Z1 = spin_operator(SIGMA_Z, 1)
_Z2 = spin_operator(SIGMA_Z, 2)


@dataclass(frozen=True)
class SpinPairParams:
    """Exchange constant and the two z-fields (units with hbar = k_B = 1)."""

    j_coupling: float
    b1: float
    b2: float

    def __post_init__(self):
        for name in ("j_coupling", "b1", "b2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be a finite real number, got {value!r}")
        if self.j_coupling <= 0:
            raise InvalidParameterError(f"j_coupling must be > 0, got {self.j_coupling}")

    @property
    def delta_b(self) -> float:
        return self.b1 - self.b2

    def with_fields(self, b1: float, b2: float) -> "SpinPairParams":
        return SpinPairParams(self.j_coupling, b1, b2)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    entries: np.ndarray
    params: SpinPairParams

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Closed-form eigensystem; eigenvectors are the columns of ``eigenvectors``."""

    y: float
    k_gap: float
    a_coeff: float
    b_coeff: float
    n_norm: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def ket(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]


def exchange_hamiltonian(j_coupling: float) -> np.ndarray:
    """Symmetrized exchange term J(s1.s2 + s2.s1) = 2J s1.s2."""
    return 2.0 * j_coupling * _SIGMA_DOT


def field_hamiltonian(b1: float, b2: float) -> np.ndarray:
    return b1 * _Z1 + b2 * _Z2


def build_hamiltonian(params: SpinPairParams) -> HamiltonianMatrix:
    h = exchange_hamiltonian(params.j_coupling) + field_hamiltonian(params.b1, params.b2)
    return HamiltonianMatrix(h, params)


def spectral_decomposition(params: SpinPairParams) -> SpectralDecomposition:
    """Exact eigensystem of the two-spin Hamiltonian.

    With y = (B1 - B2)/4J, s = sqrt(1 + y^2), N = sqrt(1 + (y + s)^2):
    a = (y + s)/N, b = 1/N, K = 4 J s and

        psi1 = b|10> - a|01>,  E = -2J - K
        00,                    E =  2J - B1 - B2
        psi3 = a|10> + b|01>,  E = -2J + K
        11,                    E =  2J + B1 + B2
    """
    j, b1, b2 = params.j_coupling, params.b1, params.b2
    y = (b1 - b2) / (4.0 * j)
    s = math.hypot(1.0, y)
    # y + s loses precision for large negative y; use 1/(s - y) there
    ys = y + s if y >= 0 else 1.0 / (s - y)
    n = math.hypot(1.0, ys)
    a = ys / n
    b = 1.0 / n
    k = 4.0 * j * s

    energies = np.array([-2 * j - k, 2 * j - b1 - b2, -2 * j + k, 2 * j + b1 + b2])
    vecs = np.zeros((4, 4), dtype=complex)
    vecs[1, 0], vecs[2, 0] = b, -a
    vecs[0, 1] = 1.0
    vecs[1, 2], vecs[2, 2] = a, b
    vecs[3, 3] = 1.0
    return SpectralDecomposition(y, k, a, b, n, energies, vecs)


def _as_matrix(h) -> np.ndarray:
    m = np.asarray(h.entries if isinstance(h, HamiltonianMatrix) else h)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    return m


def commutator(h_a, h_b) -> np.ndarray:
    a, b = _as_matrix(h_a), _as_matrix(h_b)
    return a @ b - b @ a


def commutator_norm(h_a, h_b) -> float:
    """Frobenius norm of [h_a, h_b]."""
    return float(np.linalg.norm(commutator(h_a, h_b)))
