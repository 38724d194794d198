"""
Command-line front end.

    heisenberg-otto cycle    [--tau X] ...
    heisenberg-otto sweep    [--tau-range MIN:MAX:N[:log]] [--out PATH] [--format csv|json] ...
    heisenberg-otto validate [--step-policy fixed:H] ...

Configuration files are flat ``key = value`` text; ``#`` starts a comment.
Flags override file values, file values override the built-in defaults
(the reference engine). Exit codes: 0 ok, 1 validation failure, 2 config
error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dynamics import DriftExceededError, FieldProtocol, evolve
from .oracle import hamiltonian_matrix, jacobi_eigensystem, projector_populations, reference_evolve
from .otto_cycle import (
    CycleConfig,
    adiabatic_work_bound,
    run_constant_delta_b_cycle,
    run_cycle,
    sudden_populations,
    sudden_work_bound,
    sweep_tau,
)
from .spin_system import SpinPairParams, spectral_decomposition
from .thermal import boltzmann_populations, gibbs_state

log = logging.getLogger("heisenberg_otto")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SWEEP_COLUMNS = (
    "tau",
    "w_total",
    "w_lb",
    "w_ub",
    "q_hot",
    "q_cold",
    "entropy_production",
    "delta1",
    "delta2",
    "trace_drift_max",
)

PHYSICAL_KEYS = ("j", "b1", "b2_start", "b3", "t_cold", "t_hot")
_SWEEP_KEYS = ("tau_min", "tau_max", "n_points", "spacing", "tau_values", "out", "format")
KNOWN_KEYS = set(PHYSICAL_KEYS) | {"tau", "step_policy", "protocol", "workers"} | {
    f"sweep.{k}" for k in _SWEEP_KEYS
}

DEFAULTS = {
    "j": "0.1",
    "b1": "3",
    "b2_start": "3",
    "b3": "4",
    "t_cold": "1",
    "t_hot": "2",
    "tau": "20",
    "step_policy": "auto",
    "protocol": "sine",
    "workers": "auto",
    "sweep.tau_min": "0.5",
    "sweep.tau_max": "50",
    "sweep.n_points": "100",
    "sweep.spacing": "linear",
    "sweep.out": "-",
    "sweep.format": "csv",
}


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """17 significant digits, fixed so that output is byte-stable."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def load_config_file(path: str) -> dict[str, str]:
    """Read a config file; it must define every physical key."""
    try:
        with open(path, encoding="utf-8") as fh:
            values = parse_config_text(fh.read(), path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    missing = [k for k in PHYSICAL_KEYS if k not in values]
    if missing:
        raise ConfigError(f"{path}: missing required key(s): {', '.join(missing)}")
    return values


def _number(values: dict, key: str) -> float:
    try:
        x = float(values[key])
    except ValueError:
        raise ConfigError(f"{key}: not a number: {values[key]!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: must be finite, got {values[key]!r}")
    return x


def parse_step_policy(text: str) -> Optional[float]:
    if text == "auto":
        return None
    if text.startswith("fixed:"):
        try:
            h = float(text[len("fixed:"):])
        except ValueError:
            h = float("nan")
        if h > 0 and math.isfinite(h):
            return h
    raise ConfigError(f"step_policy must be 'auto' or 'fixed:H' with H > 0, got {text!r}")


def parse_tau_range(text: str) -> dict[str, str]:
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "linear")):
        raise ConfigError(f"--tau-range must be MIN:MAX:N[:log], got {text!r}")
    out = {"sweep.tau_min": parts[0], "sweep.tau_max": parts[1], "sweep.n_points": parts[2]}
    out["sweep.spacing"] = parts[3] if len(parts) == 4 else "linear"
    return out


@dataclass
class Resolved:
    values: dict
    config: CycleConfig
    constant_delta_b: bool
    workers: Optional[int]


def resolve(args: argparse.Namespace) -> Resolved:
    values = dict(DEFAULTS)
    if args.config:
        values.update(load_config_file(args.config))
    flag_map = {
        "j": args.j,
        "b1": args.b1,
        "b2_start": args.b2_start,
        "b3": args.b3,
        "t_cold": args.t_cold,
        "t_hot": args.t_hot,
        "tau": getattr(args, "tau", None),
        "step_policy": args.step_policy,
        "workers": args.workers,
        "sweep.out": getattr(args, "out", None),
        "sweep.format": getattr(args, "format", None),
    }
    for key, value in flag_map.items():
        if value is not None:
            values[key] = str(value)
    if getattr(args, "tau_range", None):
        values.update(parse_tau_range(args.tau_range))
        values.pop("sweep.tau_values", None)
    if args.constant_delta_b:
        values["protocol"] = "constant_delta_b"

    if values["protocol"] not in ("sine", "constant_delta_b"):
        raise ConfigError(f"protocol must be 'sine' or 'constant_delta_b', got {values['protocol']!r}")
    try:
        config = CycleConfig(
            j_coupling=_number(values, "j"),
            b1=_number(values, "b1"),
            b2_start=_number(values, "b2_start"),
            b3=_number(values, "b3"),
            t_cold=_number(values, "t_cold"),
            t_hot=_number(values, "t_hot"),
            tau_total=_number(values, "tau"),
            step=parse_step_policy(values["step_policy"]),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    workers = None
    if values["workers"] != "auto":
        try:
            workers = int(values["workers"])
        except ValueError:
            raise ConfigError(f"workers must be an integer, got {values['workers']!r}") from None
        if workers < 1:
            raise ConfigError("workers must be >= 1")
    return Resolved(values, config, values["protocol"] == "constant_delta_b", workers)


def sweep_taus(values: dict) -> list[float]:
    if values.get("sweep.tau_values"):
        try:
            taus = [float(x) for x in values["sweep.tau_values"].split(",")]
        except ValueError:
            raise ConfigError(f"sweep.tau_values: bad list {values['sweep.tau_values']!r}") from None
    else:
        lo, hi = _number(values, "sweep.tau_min"), _number(values, "sweep.tau_max")
        try:
            n = int(values["sweep.n_points"])
        except ValueError:
            raise ConfigError(f"sweep.n_points must be an integer, got {values['sweep.n_points']!r}") from None
        if n < 1:
            raise ConfigError("sweep.n_points must be >= 1")
        spacing = values.get("sweep.spacing", "linear")
        if spacing == "linear":
            taus = list(np.linspace(lo, hi, n)) if n > 1 else [lo]
        elif spacing == "log":
            if lo <= 0:
                raise ConfigError("log spacing needs tau_min > 0")
            taus = list(np.geomspace(lo, hi, n)) if n > 1 else [lo]
        else:
            raise ConfigError(f"sweep.spacing must be 'linear' or 'log', got {spacing!r}")
    taus = [float(t) for t in taus]
    if any(not math.isfinite(t) or t < 0 for t in taus):
        raise ConfigError("tau values must be finite and >= 0")
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ConfigError("tau values must be strictly increasing")
    return taus


def _log_resolved(values: dict) -> None:
    log.info("resolved configuration: %s", " ".join(f"{k}={values[k]}" for k in sorted(values)))


def _runner(resolved: Resolved):
    return run_constant_delta_b_cycle if resolved.constant_delta_b else run_cycle


# -- cycle ---------------------------------------------------------------


def cmd_cycle(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    resolved = resolve(args)
    _log_resolved(resolved.values)
    try:
        report = _runner(resolved)(resolved.config)
    except (DriftExceededError, ArithmeticError) as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for key, value in report.as_dict().items():
        out.write(f"{key} = {fmt(value)}\n")
    return EXIT_OK


# -- sweep ---------------------------------------------------------------


def sweep_rows(points) -> list[dict]:
    rows = []
    for point in points:
        if point.ok:
            d = point.report.as_dict()
            row = {col: d[col] for col in SWEEP_COLUMNS}
            row["status"] = "ok"
        else:
            row = {col: float("nan") for col in SWEEP_COLUMNS}
            row["tau"] = point.tau
            row["status"] = "error: " + point.error.replace("\n", " ")
        rows.append(row)
    return rows


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS + ("status",))
    for row in rows:
        writer.writerow([fmt(row[c]) for c in SWEEP_COLUMNS] + [row["status"]])
    return buf.getvalue()


def render_json(rows: list[dict], values: dict) -> str:
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        return x

    doc = {
        "config": {k: values[k] for k in sorted(values)},
        "columns": list(SWEEP_COLUMNS) + ["status"],
        "rows": [{k: clean(v) for k, v in row.items()} for row in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_sweep(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    resolved = resolve(args)
    taus = sweep_taus(resolved.values)
    fmt_name = resolved.values["sweep.format"]
    if fmt_name not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt_name!r}")
    _log_resolved(resolved.values)
    start = time.perf_counter()
    points = sweep_tau(
        resolved.config, taus, constant_delta_b=resolved.constant_delta_b, workers=resolved.workers
    )
    rows = sweep_rows(points)
    text = render_csv(rows) if fmt_name == "csv" else render_json(rows, resolved.values)
    path = resolved.values["sweep.out"]
    if path == "-":
        out.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    n_bad = sum(not p.ok for p in points)
    log.info("sweep: %d points, %d failed, %.1f s", len(points), n_bad, time.perf_counter() - start)
    return EXIT_OK if n_bad == 0 else EXIT_NUMERIC


# -- validate ------------------------------------------------------------


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    note: str = ""


def _check(name, value, tolerance, note="") -> Check:
    return Check(name, value, tolerance, bool(value <= tolerance), note)


def _closed_form_check(config: CycleConfig, n: int = 200, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        j = rng.uniform(0.01, 2.0)
        b1, b2 = rng.uniform(-5, 5, size=2)
        sd = spectral_decomposition(SpinPairParams(j, b1, b2))
        es = jacobi_eigensystem(hamiltonian_matrix(j, b1, b2))
        worst = max(worst, float(np.abs(np.sort(sd.eigenvalues) - es.eigenvalues).max()))
        overlap = np.abs(sd.eigenvectors.conj().T @ es.eigenvectors) ** 2
        worst = max(worst, float(1.0 - overlap.max(axis=1).min()))
    return _check("closed form vs Jacobi", worst, 1e-10, f"{n} random parameter sets")


def _rk4_check(config: CycleConfig) -> Check:
    j = config.j_coupling
    cold = SpinPairParams(j, config.b1, config.b2_start)
    rho0 = gibbs_state(cold, config.t_cold)
    protocol = FieldProtocol.sine_pulse(config.b2_start, config.b3, 10.0, config.b1)
    try:
        rk4 = evolve(rho0, cold, protocol, config.step, tolerance=config.drift_tolerance).final_state
    except DriftExceededError as exc:
        return Check("RK4 vs reference propagator", float("inf"), 1e-7, False, str(exc))
    ref = reference_evolve(rho0, j, protocol, 10_000)
    return _check("RK4 vs reference propagator", float(np.linalg.norm(rk4 - ref)), 1e-7, "tau=20 branch")


def _sudden_algebra_check(config: CycleConfig) -> Check:
    if not config.homogeneous_start:
        return Check("sudden populations vs projectors", float("nan"), 1e-10, True, "skipped: B2(0) != B1")
    j = config.j_coupling
    cold = SpinPairParams(j, config.b1, config.b1)
    sd_hot = spectral_decomposition(SpinPairParams(j, config.b1, config.b3))
    p = boltzmann_populations(spectral_decomposition(cold).eigenvalues, config.t_cold)
    raw = projector_populations(gibbs_state(cold, config.t_cold), sd_hot.eigenvectors)
    closed = sudden_populations(p, sd_hot.a_coeff, sd_hot.b_coeff)
    return _check("sudden populations vs projectors", float(np.abs(raw - closed).max()), 1e-10)


def _bound_checks(config: CycleConfig) -> list[Check]:
    if not config.homogeneous_start:
        return [Check("bounds", float("nan"), 0.0, True, "skipped: B2(0) != B1")]
    w_lb, w_ub = sudden_work_bound(config), adiabatic_work_bound(config)
    out = []
    for tau, target, tol, name in (
        (0.0, w_lb, 1e-8, "W(tau=0) vs lower bound"),
        (1e-3, w_lb, 1e-6, "W(tau=1e-3) vs lower bound"),
        (500.0, w_ub, 1e-3, "W(tau=500) vs upper bound"),
    ):
        try:
            report = run_cycle(replace(config, tau_total=tau))
        except DriftExceededError as exc:
            out.append(Check(name, float("inf"), tol, False, str(exc)))
            continue
        out.append(_check(name, abs(report.w_total - target), tol))
    return out


def _frictionless_check(config: CycleConfig) -> Check:
    base = replace(config, b2_start=config.b1 + 0.5, b3=config.b1 + 1.0)
    try:
        reports = [run_constant_delta_b_cycle(replace(base, tau_total=t)) for t in (1.0, 10.0)]
    except DriftExceededError as exc:
        return Check("constant field difference is frictionless", float("inf"), 1e-8, False, str(exc))
    spread = abs(reports[0].w_total - reports[1].w_total)
    worst = max([spread] + [abs(r.entropy_production_total) for r in reports])
    return _check("constant field difference is frictionless", worst, 1e-8)


def run_validation(resolved: Resolved) -> list[Check]:
    config = resolved.config
    checks = [
        _closed_form_check(config),
        _rk4_check(config),
        _sudden_algebra_check(config),
        *_bound_checks(config),
        _frictionless_check(config),
    ]
    return checks


def cmd_validate(args: argparse.Namespace, out=None) -> int:
    out = out or sys.stdout
    resolved = resolve(args)
    _log_resolved(resolved.values)
    checks = run_validation(resolved)
    width = max(len(c.name) for c in checks)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        out.write(f"{status}  {c.name:<{width}}  value={fmt(c.value)}  tol={c.tolerance:g}  {c.note}".rstrip() + "\n")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


# -- entry point ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("--j", type=float, help="exchange constant J (> 0)")
    common.add_argument("--b1", type=float, help="field on spin 1")
    common.add_argument("--b2-start", type=float, dest="b2_start", help="stage-1 field on spin 2")
    common.add_argument("--b3", type=float, help="stage-3 field on spin 2")
    common.add_argument("--t-cold", type=float, dest="t_cold", help="cold bath temperature")
    common.add_argument("--t-hot", type=float, dest="t_hot", help="hot bath temperature")
    common.add_argument("--step-policy", dest="step_policy", metavar="auto|fixed:H")
    common.add_argument("--constant-delta-b", action="store_true", dest="constant_delta_b",
                        help="drive B1 along with B2 so B1 - B2 stays fixed")
    common.add_argument("--workers", type=int, help="sweep worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="heisenberg-otto", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    p_cycle = sub.add_parser("cycle", parents=[common], help="run one cycle and print its report")
    p_cycle.add_argument("--tau", type=float, help="total time of both unitary strokes")
    p_cycle.set_defaults(func=cmd_cycle)

    p_sweep = sub.add_parser("sweep", parents=[common], help="tau sweep to CSV or JSON")
    p_sweep.add_argument("--tau-range", dest="tau_range", metavar="MIN:MAX:N[:log]")
    p_sweep.add_argument("--out", metavar="PATH", help="output file ('-' for stdout)")
    p_sweep.add_argument("--format", choices=("csv", "json"))
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", parents=[common], help="run the oracle cross-check battery")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
