"""
Finite-time field driving of the spin pair.

The Liouville-von Neumann equation d(rho)/dt = -i[H(t), rho] is integrated
with classical fixed-step RK4 on the full 4x4 complex matrix. Nothing is
renormalized during integration; trace, Hermiticity and purity drift are
measured at the end and reported (or raised) instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .spin_system import (
    SIGMA_Z,
    InvalidParameterError,
    SpinPairParams,
    exchange_hamiltonian,
    spectral_decomposition,
    spin_operator,
)
from .thermal import purity, validate_density_matrix

__all__ = [
    "SINE_PULSE",
    "CONSTANT_DELTA_B_RAMP",
    "CUSTOM_TABULATED",
    "DriftExceededError",
    "TimeRangeError",
    "DegenerateBlockError",
    "NonRealTraceError",
    "FieldProtocol",
    "EvolutionResult",
    "field_at",
    "field_rate",
    "hamiltonian_at",
    "hamiltonian_rate",
    "default_step",
    "time_grid",
    "evolve",
    "instantaneous_power",
    "power_samples",
    "heat_rate_check",
    "mixing_angle",
]

SINE_PULSE = "sine_pulse"
CONSTANT_DELTA_B_RAMP = "constant_delta_b_ramp"
CUSTOM_TABULATED = "custom_tabulated"

DEFAULT_STEPS_PER_BRANCH = 2000
MAX_STEP_TIMES_NORM = 0.05
DEFAULT_DRIFT_TOLERANCE = 1e-8

_Z1 = spin_operator(SIGMA_Z, 1)
_Z2 = spin_operator(SIGMA_Z, 2)
_CENTER = [1, 2]


class DriftExceededError(RuntimeError):
    """Integration drifted beyond tolerance; the step is too large."""


class TimeRangeError(ValueError):
    pass


class DegenerateBlockError(ValueError):
    """The central-block populations are equal, so the mixing angle is undefined."""


class NonRealTraceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FieldProtocol:
    """Field schedule (B1(t), B2(t)) for one unitary branch on t in [0, duration].

    Use the ``sine_pulse``, ``constant_delta_b_ramp`` and ``tabulated``
    constructors rather than building instances by hand.
    """

    kind: str
    b1_start: float
    b1_end: float
    b2_start: float
    b2_end: float
    duration: float
    sample_times: Optional[np.ndarray] = None
    sample_b1: Optional[np.ndarray] = None
    sample_b2: Optional[np.ndarray] = None
    _interp: tuple = field(default=(), repr=False)

    def __post_init__(self):
        for name in ("b1_start", "b1_end", "b2_start", "b2_end", "duration"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        # zero duration is the sudden limit: no steps, identity propagator
        if self.duration < 0:
            raise InvalidParameterError(f"duration must be >= 0, got {self.duration}")
        if self.kind == SINE_PULSE:
            if self.b1_start != self.b1_end:
                raise InvalidParameterError("sine_pulse keeps B1 constant")
        elif self.kind == CONSTANT_DELTA_B_RAMP:
            gap0 = self.b1_start - self.b2_start
            gap1 = self.b1_end - self.b2_end
            if abs(gap0 - gap1) > 1e-12 * max(1.0, abs(gap0)):
                raise InvalidParameterError(f"field difference not preserved: {gap0} -> {gap1}")
        elif self.kind == CUSTOM_TABULATED:
            t = self.sample_times
            if t is None or len(t) < 2 or t[0] != 0 or not np.all(np.diff(t) > 0):
                raise InvalidParameterError("tabulated samples need strictly increasing times from 0")
            object.__setattr__(
                self, "_interp", (PchipInterpolator(t, self.sample_b1), PchipInterpolator(t, self.sample_b2))
            )
        else:
            raise InvalidParameterError(f"unknown protocol kind {self.kind!r}")

    @classmethod
    def sine_pulse(cls, b2_start: float, b2_end: float, duration: float, b1: float) -> "FieldProtocol":
        return cls(SINE_PULSE, b1, b1, b2_start, b2_end, duration)

    @classmethod
    def constant_delta_b_ramp(
        cls, b1_start: float, b2_start: float, b2_end: float, duration: float
    ) -> "FieldProtocol":
        """Both fields follow the same sine ramp, so B1 - B2 never changes."""
        b1_end = b1_start + (b2_end - b2_start)
        return cls(CONSTANT_DELTA_B_RAMP, b1_start, b1_end, b2_start, b2_end, duration)

    @classmethod
    def tabulated(cls, times: Sequence[float], b1: Sequence[float], b2: Sequence[float]) -> "FieldProtocol":
        """Monotone-cubic (PCHIP) interpolation through the given samples."""
        t = np.asarray(times, dtype=float)
        b1 = np.asarray(b1, dtype=float)
        b2 = np.asarray(b2, dtype=float)
        if not (t.shape == b1.shape == b2.shape) or t.ndim != 1:
            raise InvalidParameterError("times, b1 and b2 must be 1-d arrays of equal length")
        return cls(CUSTOM_TABULATED, b1[0], b1[-1], b2[0], b2[-1], float(t[-1]), t, b1, b2)

    def reversed_sine(self) -> "FieldProtocol":
        """The return stroke: same shape, start and end swapped."""
        if self.kind == SINE_PULSE:
            return FieldProtocol.sine_pulse(self.b2_end, self.b2_start, self.duration, self.b1_start)
        if self.kind == CONSTANT_DELTA_B_RAMP:
            return FieldProtocol.constant_delta_b_ramp(self.b1_end, self.b2_end, self.b2_start, self.duration)
        raise ValueError("only analytic protocols can be reversed")

    # vectorized evaluation, no range checks
    def _fields(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == CUSTOM_TABULATED:
            f1, f2 = self._interp
            return f1(t), f2(t)
        if self.duration == 0:
            shape = np.ones_like(t)
        else:
            shape = np.sin(np.pi * t / (2.0 * self.duration))
        b1 = self.b1_start + (self.b1_end - self.b1_start) * shape
        b2 = self.b2_start + (self.b2_end - self.b2_start) * shape
        return b1, b2

    def _rates(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == CUSTOM_TABULATED:
            f1, f2 = self._interp
            return f1(t, 1), f2(t, 1)
        if self.duration == 0:
            return np.zeros_like(t), np.zeros_like(t)
        w = np.pi / (2.0 * self.duration)
        dshape = w * np.cos(w * t)
        return (self.b1_end - self.b1_start) * dshape, (self.b2_end - self.b2_start) * dshape


def _check_time(protocol: FieldProtocol, t: float) -> None:
    if not (0.0 <= t <= protocol.duration):
        raise TimeRangeError(f"t={t} outside [0, {protocol.duration}]")


def field_at(protocol: FieldProtocol, t: float) -> tuple[float, float]:
    """(B1, B2) at time t; the endpoints are returned exactly."""
    _check_time(protocol, t)
    if t == 0.0:
        return protocol.b1_start, protocol.b2_start
    if t == protocol.duration:
        return protocol.b1_end, protocol.b2_end
    b1, b2 = protocol._fields(t)
    return float(b1), float(b2)


def field_rate(protocol: FieldProtocol, t: float) -> tuple[float, float]:
    """Analytic time derivative (dB1/dt, dB2/dt)."""
    _check_time(protocol, t)
    d1, d2 = protocol._rates(t)
    return float(d1), float(d2)


def _hamiltonians(j_coupling: float, b1, b2) -> np.ndarray:
    b1 = np.asarray(b1, dtype=float)[..., None, None]
    b2 = np.asarray(b2, dtype=float)[..., None, None]
    return exchange_hamiltonian(j_coupling) + b1 * _Z1 + b2 * _Z2


def hamiltonian_at(j_coupling: float, protocol: FieldProtocol, t: float) -> np.ndarray:
    return _hamiltonians(j_coupling, *field_at(protocol, t))


def hamiltonian_rate(protocol: FieldProtocol, t: float) -> np.ndarray:
    """dH/dt; only the field term depends on time."""
    d1, d2 = field_rate(protocol, t)
    return d1 * _Z1 + d2 * _Z2


def default_step(j_coupling: float, protocol: FieldProtocol) -> float:
    """duration/2000, capped so that step * ||H|| <= 0.05 along the protocol."""
    if protocol.duration == 0:
        return 0.0
    t = np.linspace(0.0, protocol.duration, 65)
    if protocol.sample_times is not None:
        t = np.union1d(t, protocol.sample_times)
    b1, b2 = protocol._fields(t)
    norm = 0.0
    for x1, x2 in zip(b1, b2):
        e = spectral_decomposition(SpinPairParams(j_coupling, float(x1), float(x2))).eigenvalues
        norm = max(norm, float(np.abs(e).max()))
    return min(protocol.duration / DEFAULT_STEPS_PER_BRANCH, MAX_STEP_TIMES_NORM / norm)


def time_grid(duration: float, step: float) -> np.ndarray:
    """Uniform grid with spacing ``step``; a shortened final step lands exactly on ``duration``."""
    if duration == 0:
        return np.zeros(1)
    if not step > 0:
        raise InvalidParameterError(f"step must be > 0, got {step}")
    n = math.floor(duration / step)
    grid = np.arange(n + 1) * step
    if duration - grid[-1] > 1e-12 * duration:
        grid = np.append(grid, duration)
    else:
        grid[-1] = duration
    return grid


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    final_state: np.ndarray
    trace_drift: float
    hermiticity_drift: float
    purity_initial: float
    purity_final: float
    steps_taken: int
    j_coupling: float
    protocol: FieldProtocol
    times: Optional[np.ndarray] = None
    states: Optional[np.ndarray] = None

    @property
    def purity_drift(self) -> float:
        return abs(self.purity_final - self.purity_initial)


def evolve(
    rho0,
    params0: SpinPairParams,
    protocol: FieldProtocol,
    step: Optional[float] = None,
    *,
    tolerance: float = DEFAULT_DRIFT_TOLERANCE,
    record: bool = False,
) -> EvolutionResult:
    """Propagate ``rho0`` through ``protocol`` with classical RK4.

    H is evaluated at t, t + h/2 and t + h for every step. ``params0``
    supplies J and must carry the protocol's starting fields. With
    ``record=True`` the state at every grid time is kept on the result.

    Raises DriftExceededError if the trace, Hermiticity or purity drift
    exceeds ``tolerance``.
    """
    rho0 = validate_density_matrix(rho0)
    if abs(params0.b1 - protocol.b1_start) > 1e-12 or abs(params0.b2 - protocol.b2_start) > 1e-12:
        raise InvalidParameterError(
            f"initial fields ({params0.b1}, {params0.b2}) do not match protocol start "
            f"({protocol.b1_start}, {protocol.b2_start})"
        )
    j = params0.j_coupling
    if step is None:
        step = default_step(j, protocol)
    grid = time_grid(protocol.duration, step)
    n = len(grid) - 1

    h = np.diff(grid)
    b1, b2 = protocol._fields(np.concatenate([grid, grid[:-1] + h / 2]))
    b1[0], b2[0] = protocol.b1_start, protocol.b2_start
    b1[n], b2[n] = protocol.b1_end, protocol.b2_end
    ham = _hamiltonians(j, b1, b2)
    h_node, h_mid = ham[: n + 1], ham[n + 1 :]

    rho = rho0.copy()
    states = np.empty((n + 1, 4, 4), dtype=complex) if record else None
    if record:
        states[0] = rho
    for k in range(n):
        dt = h[k]
        ha, hm, hb = h_node[k], h_mid[k], h_node[k + 1]
        k1 = -1j * (ha @ rho - rho @ ha)
        r = rho + (0.5 * dt) * k1
        k2 = -1j * (hm @ r - r @ hm)
        r = rho + (0.5 * dt) * k2
        k3 = -1j * (hm @ r - r @ hm)
        r = rho + dt * k3
        k4 = -1j * (hb @ r - r @ hb)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if record:
            states[k + 1] = rho

    result = EvolutionResult(
        final_state=rho,
        trace_drift=float(abs(np.trace(rho) - np.trace(rho0))),
        hermiticity_drift=float(np.linalg.norm(rho - rho.conj().T)),
        purity_initial=purity(rho0),
        purity_final=purity(rho),
        steps_taken=n,
        j_coupling=j,
        protocol=protocol,
        times=grid if record else None,
        states=states,
    )
    worst = max(result.trace_drift, result.hermiticity_drift, result.purity_drift)
    if not worst <= tolerance:
        raise DriftExceededError(
            f"drift {worst:.3e} exceeds {tolerance:.1e} after {n} steps of {step:.4g}; reduce the step"
        )
    return result


def instantaneous_power(rho, dh_dt) -> float:
    """Tr(dH/dt rho), the power delivered by the field drive."""
    value = np.einsum("ij,ji->", np.asarray(dh_dt), np.asarray(rho))
    if abs(value.imag) > 1e-10:
        raise NonRealTraceError(f"power has imaginary part {value.imag:.3e}")
    return float(value.real)


def _require_trajectory(result: EvolutionResult) -> None:
    if result.states is None:
        raise ValueError("evolve(..., record=True) is needed for trajectory diagnostics")


def power_samples(result: EvolutionResult) -> tuple[np.ndarray, np.ndarray]:
    """(times, power) along a recorded trajectory."""
    _require_trajectory(result)
    d1, d2 = result.protocol._rates(result.times)
    dh = d1[:, None, None] * _Z1 + d2[:, None, None] * _Z2
    power = np.einsum("nij,nji->n", dh, result.states)
    if np.abs(power.imag).max() > 1e-10:
        raise NonRealTraceError("power has a non-negligible imaginary part")
    return result.times, power.real


def heat_rate_check(trajectory) -> float:
    """max |Tr(H drho/dt)| along a unitary trajectory.

    ``trajectory`` is either a recorded EvolutionResult or an iterable of
    (hamiltonian, rho) pairs.
    """
    if isinstance(trajectory, EvolutionResult):
        _require_trajectory(trajectory)
        b1, b2 = trajectory.protocol._fields(trajectory.times)
        pairs = zip(_hamiltonians(trajectory.j_coupling, b1, b2), trajectory.states)
    else:
        pairs = trajectory
    worst = 0.0
    for ham, rho in pairs:
        ham, rho = np.asarray(ham), np.asarray(rho)
        drho = -1j * (ham @ rho - rho @ ham)
        worst = max(worst, abs(np.einsum("ij,ji->", ham, drho)))
    return float(worst)


def mixing_angle(rho_final, params_final: SpinPairParams) -> float:
    """Angle delta in [0, pi] between the state's and the Hamiltonian's central eigenvectors.

    phi1' is the central-block eigenvector of rho with the larger
    eigenvalue; cos^2(delta/2) = |<psi1'|phi1'>|^2.
    """
    block = np.asarray(rho_final)[np.ix_(_CENTER, _CENTER)]
    lam, vecs = np.linalg.eigh(block)
    if abs(lam[1] - lam[0]) <= 1e-12:
        raise DegenerateBlockError("central-block populations are degenerate")
    phi1 = vecs[:, 1]
    v = spectral_decomposition(params_final).eigenvectors[_CENTER]
    # atan2 keeps small angles accurate where acos(1 - eps) would not
    return 2.0 * math.atan2(abs(np.vdot(v[:, 2], phi1)), abs(np.vdot(v[:, 0], phi1)))
