"""
Brute-force reference implementations for cross-validation.

Nothing here touches the closed-form eigensystem or the RK4 stepper: the
Hamiltonian is written out element by element, eigenpairs come from cyclic
complex Jacobi rotations, and time evolution multiplies exact propagators of
piecewise-constant Hamiltonians.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "OracleEigensystem",
    "JacobiConvergenceError",
    "hamiltonian_matrix",
    "jacobi_eigensystem",
    "propagator",
    "reference_evolve",
    "projector_populations",
    "gibbs_from_eigensystem",
]

MAX_SWEEPS = 100
OFF_DIAGONAL_TOL = 1e-14


class JacobiConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class OracleEigensystem:
    """Ascending eigenvalues; eigenvectors are the columns of ``eigenvectors``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int


def hamiltonian_matrix(j_coupling: float, b1: float, b2: float) -> np.ndarray:
    """Two-spin Hamiltonian written out directly in the (00, 10, 01, 11) basis.

    2J s1.s2 is +2J on the aligned states, -2J on the diagonal of the
    {10, 01} block and 4J between 10 and 01 (the flip-flop term). The
    fields contribute B_i for spin up ('1') and -B_i for spin down ('0').
    """
    j = j_coupling
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = 2 * j - b1 - b2
    h[1, 1] = -2 * j + b1 - b2
    h[2, 2] = -2 * j - b1 + b2
    h[3, 3] = 2 * j + b1 + b2
    h[1, 2] = h[2, 1] = 4 * j
    return h


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigensystem(h, tol: float = OFF_DIAGONAL_TOL) -> OracleEigensystem:
    """Cyclic complex Jacobi diagonalization of a small Hermitian matrix.

    Pairs (p, q) are visited in row order every sweep. Each rotation first
    removes the phase of a[p, q], then applies a real Givens rotation that
    zeroes it. Stops once the off-diagonal Frobenius mass is below
    ``tol * max(1, ||h||_F)``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    v = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    for sweep in range(MAX_SWEEPS + 1):
        if _off_norm(a) < threshold:
            order = np.argsort(np.diag(a).real, kind="stable")
            return OracleEigensystem(np.diag(a).real[order], v[:, order], sweep)
        if sweep == MAX_SWEEPS:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[q, q] = c
                g[p, q] = s * phase
                g[q, p] = -s * np.conj(phase)
                a = g.conj().T @ a @ g
                # a[q, p] left as computed: non-Hermitian input never converges
                a[p, q] = 0.0
                v = v @ g
    raise JacobiConvergenceError(f"no convergence after {MAX_SWEEPS} sweeps; is the input Hermitian?")


def propagator(h, dt: float) -> np.ndarray:
    """exp(-i h dt) from the Jacobi eigensystem."""
    es = jacobi_eigensystem(h)
    u = es.eigenvectors
    return (u * np.exp(-1j * es.eigenvalues * dt)) @ u.conj().T


def reference_evolve(rho0, j_coupling: float, protocol, n_slices: int) -> np.ndarray:
    """Midpoint-frozen piecewise propagation: exactly unitary on every slice."""
    if n_slices < 1:
        raise ValueError("n_slices must be >= 1")
    rho = np.array(rho0, dtype=complex)
    if protocol.duration == 0:
        return rho
    dt = protocol.duration / n_slices
    mids = (np.arange(n_slices) + 0.5) * dt
    b1s, b2s = protocol._fields(mids)
    total = np.eye(4, dtype=complex)
    for b1, b2 in zip(b1s, b2s):
        total = propagator(hamiltonian_matrix(j_coupling, b1, b2), dt) @ total
    return total @ rho @ total.conj().T


def projector_populations(rho, basis) -> np.ndarray:
    """<v|rho|v> for each column v of ``basis``, via explicit projectors."""
    rho = np.asarray(rho)
    basis = np.asarray(basis)
    out = np.empty(basis.shape[1])
    for i in range(basis.shape[1]):
        ket = basis[:, i : i + 1]
        projector = ket @ ket.conj().T
        out[i] = np.trace(projector @ rho).real
    return out


def gibbs_from_eigensystem(es: OracleEigensystem, temperature: float) -> tuple[np.ndarray, np.ndarray]:
    """(rho, populations) of the thermal state built from a numeric eigensystem."""
    w = np.exp(-(es.eigenvalues - es.eigenvalues.min()) / temperature)
    p = w / w.sum()
    u = es.eigenvectors
    return (u * p) @ u.conj().T, p
