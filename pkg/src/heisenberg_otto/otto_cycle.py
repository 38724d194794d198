"""
The four-stroke Otto cycle of the spin pair.

Stage 1  Gibbs state at (B1, B2(0)) and the cold temperature.
Stage 2  unitary drive B2: B2(0) -> B3 over tau_total/2 (work W_I).
Stage 3  replaced by the Gibbs state at (B1, B3) and the hot temperature.
Stage 4  unitary drive B2: B3 -> B2(0) over tau_total/2 (work W_II).

Positive work means work extracted by the engine. Populations are always
indexed in the fixed eigenstate order (psi1, 00, psi3, 11), so p[0] is p1,
p[1] is p2 and so on.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .dynamics import (
    DEFAULT_DRIFT_TOLERANCE,
    DegenerateBlockError,
    FieldProtocol,
    evolve,
    mixing_angle,
)
from .spin_system import InvalidParameterError, SpinPairParams, spectral_decomposition
from .thermal import (
    InvalidTemperatureError,
    boltzmann_populations,
    gibbs_state,
    project_populations,
    shannon_entropy,
)

__all__ = [
    "PreconditionError",
    "CycleConfig",
    "CycleReport",
    "SweepPoint",
    "run_cycle",
    "run_constant_delta_b_cycle",
    "work_from_populations",
    "sudden_populations",
    "sudden_work_bound",
    "adiabatic_work_bound",
    "entropy_production",
    "sweep_tau",
    "monotonicity_violations",
]

log = logging.getLogger(__name__)


class PreconditionError(ValueError):
    """The closed-form bounds need a homogeneous stage-1 field (B2(0) = B1)."""


@dataclass(frozen=True)
class CycleConfig:
    """Engine configuration. Defaults are the reference parameters J=0.1, B1=B2(0)=3, B3=4, T1=1, T2=2.

    ``step`` is a fixed integrator step; ``None`` picks the automatic policy
    per branch.
    """

    j_coupling: float = 0.1
    b1: float = 3.0
    b2_start: float = 3.0
    b3: float = 4.0
    t_cold: float = 1.0
    t_hot: float = 2.0
    tau_total: float = 0.0
    step: Optional[float] = None
    drift_tolerance: float = DEFAULT_DRIFT_TOLERANCE

    def __post_init__(self):
        SpinPairParams(self.j_coupling, self.b1, self.b2_start)
        SpinPairParams(self.j_coupling, self.b1, self.b3)
        for name in ("t_cold", "t_hot"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise InvalidTemperatureError(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.tau_total) or self.tau_total < 0:
            raise InvalidParameterError(f"tau_total must be >= 0, got {self.tau_total!r}")
        if self.step is not None and not (math.isfinite(self.step) and self.step > 0):
            raise InvalidParameterError(f"step must be > 0, got {self.step!r}")

    @property
    def homogeneous_start(self) -> bool:
        return self.b2_start == self.b1


@dataclass(frozen=True, eq=False)
class CycleReport:
    w_branch1: float
    w_branch2: float
    w_total: float
    q_hot: float
    q_cold: float
    w_lower_bound: float
    w_upper_bound: float
    entropy_branch1: float
    entropy_branch2: float
    entropy_production_total: float
    delta_branch1: float
    delta_branch2: float
    p: np.ndarray
    p_prime: np.ndarray
    q: np.ndarray
    q_prime: np.ndarray
    energies_cold: np.ndarray
    energies_hot: np.ndarray
    trace_drift_max: float
    hermiticity_drift_max: float
    purity_drift_max: float
    steps: int
    config: CycleConfig = field(repr=False)
    state_after_branch1: np.ndarray = field(repr=False, default=None)
    state_after_branch2: np.ndarray = field(repr=False, default=None)

    @property
    def feasible(self) -> bool:
        """True when the cycle runs as an engine (net work extracted)."""
        return self.w_total > 0

    def as_dict(self) -> dict:
        """Flat scalar view, one key per value."""
        out = {
            "tau": self.config.tau_total,
            "w_branch1": self.w_branch1,
            "w_branch2": self.w_branch2,
            "w_total": self.w_total,
            "w_lb": self.w_lower_bound,
            "w_ub": self.w_upper_bound,
            "q_hot": self.q_hot,
            "q_cold": self.q_cold,
            "entropy_branch1": self.entropy_branch1,
            "entropy_branch2": self.entropy_branch2,
            "entropy_production": self.entropy_production_total,
            "delta1": self.delta_branch1,
            "delta2": self.delta_branch2,
            "trace_drift_max": self.trace_drift_max,
            "hermiticity_drift_max": self.hermiticity_drift_max,
            "purity_drift_max": self.purity_drift_max,
            "steps": self.steps,
            "feasible": self.feasible,
        }
        for name in ("p", "p_prime", "q", "q_prime"):
            for i, value in enumerate(getattr(self, name), start=1):
                out[f"{name}{i}"] = float(value)
        return out


def work_from_populations(e_cold, e_hot, p, p_prime, q, q_prime) -> float:
    """W = sum p e - sum p' e' + sum q e' - sum q' e for a full cycle."""
    e_cold, e_hot = np.asarray(e_cold), np.asarray(e_hot)
    return float(
        np.dot(p, e_cold) - np.dot(p_prime, e_hot) + np.dot(q, e_hot) - np.dot(q_prime, e_cold)
    )


def sudden_populations(p, a_coeff: float, b_coeff: float) -> np.ndarray:
    """Populations after an instantaneous quench out of the homogeneous-field basis.

    The Bell-state populations (p1, p3) are redistributed over the new
    central eigenstates; p2 and p4 are untouched. The same map sends the
    hot-bath populations q back to q'.
    """
    p = np.asarray(p, dtype=float)
    mean = 0.5 * (p[0] + p[2])
    ab = a_coeff * b_coeff
    return np.array([mean - ab * (p[2] - p[0]), p[1], mean + ab * (p[2] - p[0]), p[3]])


def _bound_inputs(config: CycleConfig):
    if not config.homogeneous_start:
        raise PreconditionError(
            f"closed-form bounds need B2(0) = B1, got B2(0)={config.b2_start}, B1={config.b1}"
        )
    cold = SpinPairParams(config.j_coupling, config.b1, config.b1)
    hot = SpinPairParams(config.j_coupling, config.b1, config.b3)
    p = boltzmann_populations(spectral_decomposition(cold).eigenvalues, config.t_cold)
    sd_hot = spectral_decomposition(hot)
    q = boltzmann_populations(sd_hot.eigenvalues, config.t_hot)
    return p, q, sd_hot


def sudden_work_bound(config: CycleConfig) -> float:
    """Lower bound on cycle work, reached in the sudden limit.

    W_lb = (B3 - B1)(q4 - q2 + p2 - p4) + (q3 - q1)(K - 8 J a b),
    with a, b and K taken at the hot-stage fields.
    """
    p, q, sd = _bound_inputs(config)
    j = config.j_coupling
    return float(
        (config.b3 - config.b1) * (q[3] - q[1] + p[1] - p[3])
        + (q[2] - q[0]) * (sd.k_gap - 8 * j * sd.a_coeff * sd.b_coeff)
    )


def adiabatic_work_bound(config: CycleConfig) -> float:
    """Upper bound on cycle work, reached for infinitely slow driving.

    W_ub = (B3 - B1)(q4 - q2 + p2 - p4) + (q3 - q1 + p1 - p3)(K - 4J).
    """
    p, q, sd = _bound_inputs(config)
    j = config.j_coupling
    return float(
        (config.b3 - config.b1) * (q[3] - q[1] + p[1] - p[3])
        + (q[2] - q[0] + p[0] - p[2]) * (sd.k_gap - 4 * j)
    )


def entropy_production(config: CycleConfig, report: CycleReport) -> float:
    """Energy-entropy gain summed over both unitary branches."""
    return (shannon_entropy(report.p_prime) - shannon_entropy(report.p)) + (
        shannon_entropy(report.q_prime) - shannon_entropy(report.q)
    )


def _safe_mixing_angle(rho, params) -> float:
    try:
        return mixing_angle(rho, params)
    except DegenerateBlockError:
        return float("nan")


def _run(config: CycleConfig, stroke: FieldProtocol) -> CycleReport:
    j = config.j_coupling
    cold = SpinPairParams(j, stroke.b1_start, stroke.b2_start)
    hot = SpinPairParams(j, stroke.b1_end, stroke.b2_end)
    e_cold = spectral_decomposition(cold).eigenvalues
    e_hot = spectral_decomposition(hot).eigenvalues

    rho1 = gibbs_state(cold, config.t_cold)
    p = project_populations(rho1, cold)
    out1 = evolve(rho1, cold, stroke, config.step, tolerance=config.drift_tolerance)
    p_prime = project_populations(out1.final_state, hot)

    rho3 = gibbs_state(hot, config.t_hot)
    q = project_populations(rho3, hot)
    out2 = evolve(rho3, hot, stroke.reversed_sine(), config.step, tolerance=config.drift_tolerance)
    q_prime = project_populations(out2.final_state, cold)

    w1 = float(np.dot(p, e_cold) - np.dot(p_prime, e_hot))
    w2 = float(np.dot(q, e_hot) - np.dot(q_prime, e_cold))
    q_hot = float(np.dot(e_hot, q - p_prime))
    q_cold = float(np.dot(e_cold, p - q_prime))
    ds1 = shannon_entropy(p_prime) - shannon_entropy(p)
    ds2 = shannon_entropy(q_prime) - shannon_entropy(q)

    if stroke.kind == "sine_pulse" and config.homogeneous_start:
        w_lb, w_ub = sudden_work_bound(config), adiabatic_work_bound(config)
    else:
        # no closed form: sudden = populations frozen in the old basis,
        # slow = populations carried along unchanged
        w_lb = work_from_populations(
            e_cold, e_hot, p, project_populations(rho1, hot), q, project_populations(rho3, cold)
        )
        w_ub = work_from_populations(e_cold, e_hot, p, p, q, q)

    return CycleReport(
        w_branch1=w1,
        w_branch2=w2,
        w_total=w1 + w2,
        q_hot=q_hot,
        q_cold=q_cold,
        w_lower_bound=w_lb,
        w_upper_bound=w_ub,
        entropy_branch1=ds1,
        entropy_branch2=ds2,
        entropy_production_total=ds1 + ds2,
        delta_branch1=_safe_mixing_angle(out1.final_state, hot),
        delta_branch2=_safe_mixing_angle(out2.final_state, cold),
        p=p,
        p_prime=p_prime,
        q=q,
        q_prime=q_prime,
        energies_cold=e_cold,
        energies_hot=e_hot,
        trace_drift_max=max(out1.trace_drift, out2.trace_drift),
        hermiticity_drift_max=max(out1.hermiticity_drift, out2.hermiticity_drift),
        purity_drift_max=max(out1.purity_drift, out2.purity_drift),
        steps=out1.steps_taken + out2.steps_taken,
        config=config,
        state_after_branch1=out1.final_state,
        state_after_branch2=out2.final_state,
    )


def run_cycle(config: CycleConfig) -> CycleReport:
    """One full cycle with sine pulses on B2 and B1 held fixed."""
    stroke = FieldProtocol.sine_pulse(config.b2_start, config.b3, config.tau_total / 2, config.b1)
    return _run(config, stroke)


def run_constant_delta_b_cycle(config: CycleConfig, b1_end: Optional[float] = None) -> CycleReport:
    """Cycle in which B1 follows B2 so that B1 - B2 never changes.

    B1 is ramped from ``config.b1`` to ``b1_end``; by default ``b1_end`` is
    whatever keeps the field difference fixed while B2 goes to ``config.b3``.
    Both reported bounds equal the adiabatic work of this field family.
    """
    expected = config.b1 + (config.b3 - config.b2_start)
    if b1_end is not None and abs(b1_end - expected) > 1e-12 * max(1.0, abs(expected)):
        raise InvalidParameterError(
            f"b1_end={b1_end} changes B1 - B2; the constant-difference end value is {expected}"
        )
    stroke = FieldProtocol.constant_delta_b_ramp(config.b1, config.b2_start, config.b3, config.tau_total / 2)
    return _run(config, stroke)


@dataclass(frozen=True, eq=False)
class SweepPoint:
    tau: float
    report: Optional[CycleReport]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.report is not None


def _sweep_one(args) -> SweepPoint:
    config, constant_delta_b = args
    runner = run_constant_delta_b_cycle if constant_delta_b else run_cycle
    try:
        return SweepPoint(config.tau_total, runner(config))
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        log.warning("tau=%g failed: %s", config.tau_total, exc)
        return SweepPoint(config.tau_total, None, f"{type(exc).__name__}: {exc}")


def sweep_tau(
    config: CycleConfig,
    taus: Sequence[float],
    *,
    constant_delta_b: bool = False,
    workers: Optional[int] = None,
) -> list[SweepPoint]:
    """Run one cycle per total time in ``taus``; results come back in input order.

    A failing point is returned with its error message instead of stopping
    the sweep. ``workers`` > 1 spreads points over a process pool
    (default: available processors).
    """
    jobs = [(replace(config, tau_total=float(t)), constant_delta_b) for t in taus]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        return [_sweep_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_one, jobs))


def monotonicity_violations(taus, works) -> list[tuple[float, float]]:
    """(tau_i, tau_{i+1}) pairs where cycle work drops as the drive slows down."""
    taus, works = np.asarray(taus), np.asarray(works)
    bad = np.nonzero(np.diff(works) < 0)[0]
    return [(float(taus[i]), float(taus[i + 1])) for i in bad]
