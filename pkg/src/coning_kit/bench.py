"""Convergence-study engine: propagate, measure, and fit observed orders.

Each (method, step size) cell propagates the attitude over the full horizon,
starting from the identity, and records the principal angle between the
final attitude and a step-doubled reference.  Methods driven by
instantaneous rate samples run the generic solver on the rotation-vector
ODE; methods driven by integrated increments synthesize exact measurements
from the signal and apply the coning corrections.  Cells are independent
and may run in parallel; the assembled report is keyed by (method, dt) and
is bitwise identical regardless of scheduling (wall times excepted).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .coning import (miller_single_speed, rk4_theta2, rk4_theta3,
                     two_speed_classic)
from .errors import ConfigError, InsufficientData
from .kinematics import JacobianMode
from .rate_model import MeasurementWindow
from .rk import (integrate_attitude_step, tableau_explicit_midpoint,
                 tableau_forward_euler, tableau_rk3, tableau_rk4)
from .so3 import (attitude_error_angle, compose, dcm_from_rotation_vector,
                  orthonormalize)
from .trajectory import (AnalyticAttitudeSignal, omega_at, preset,
                         reference_attitude, synth_delta_theta, PRESET_NAMES)

#: Errors at or below this value sit in the roundoff floor and are excluded
#: from order fits.
ERROR_FLOOR = 1e-14

_ORTHO_EVERY = 1000


class MethodKind(Enum):
    """Propagation methods available to the sweep."""

    FWD_EULER_OMEGA = "fwdeuler"
    EXPLICIT_MIDPOINT_OMEGA = "exmid"
    RK3_OMEGA = "rk3omega"
    RK4_OMEGA = "rk4omega"
    SINGLE_SPEED_THETA2 = "theta2"
    SINGLE_SPEED_THETA3 = "theta3"
    TWO_SPEED_CLASSIC = "twospeed"
    RK4_THETA2 = "rk4theta2"


_OMEGA_TABLEAUX = {
    MethodKind.FWD_EULER_OMEGA: tableau_forward_euler,
    MethodKind.EXPLICIT_MIDPOINT_OMEGA: tableau_explicit_midpoint,
    MethodKind.RK3_OMEGA: tableau_rk3,
    MethodKind.RK4_OMEGA: tableau_rk4,
}


@dataclass(frozen=True)
class MethodId:
    """A method selection; two-speed additionally carries its sub-step count."""

    kind: MethodKind
    minor_steps: int | None = None

    def __post_init__(self):
        if self.kind is MethodKind.TWO_SPEED_CLASSIC:
            if self.minor_steps is None or self.minor_steps < 1:
                raise ConfigError(
                    "two-speed method needs minor_steps >= 1, got "
                    f"{self.minor_steps!r}")
        elif self.minor_steps is not None:
            raise ConfigError(
                "minor_steps only applies to the two-speed method")

    @property
    def uses_rate_samples(self) -> bool:
        return self.kind in _OMEGA_TABLEAUX

    def label(self) -> str:
        if self.kind is MethodKind.TWO_SPEED_CLASSIC:
            return f"{self.kind.value}{self.minor_steps}"
        return self.kind.value


@dataclass(frozen=True)
class SweepConfig:
    """Everything that defines one convergence sweep."""

    signal: str
    methods: tuple
    step_sizes: tuple
    horizon: float
    tolerance: float = 1e-12
    jacobian_mode: JacobianMode = JacobianMode.EXACT_CLOSED_FORM


@dataclass(frozen=True)
class ErrorRecord:
    """One sweep cell: final attitude error of a method at one step size."""

    method: MethodId
    dt: float
    final_error_angle: float
    steps: int
    wall_time: float


@dataclass(frozen=True)
class MethodSummary:
    """All records of one method plus its fitted order (None if unfittable)."""

    method: MethodId
    records: tuple
    order: float | None
    fit_residual: float | None


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-method summaries, method-major and dt-descending."""

    summaries: tuple

    def records(self):
        return [r for s in self.summaries for r in s.records]


def _step_count(dt: float, horizon: float) -> int:
    n = round(horizon / dt)
    if n < 1 or abs(horizon / dt - n) > 1e-9:
        raise ConfigError(
            f"step size {dt!r} does not divide horizon {horizon!r}")
    return n


def propagate(method: MethodId, signal: AnalyticAttitudeSignal, dt: float,
              horizon: float,
              jacobian_mode: JacobianMode = JacobianMode.EXACT_CLOSED_FORM
              ) -> np.ndarray:
    """Propagate the attitude from identity over ``[0, horizon]``.

    Rate-sample methods integrate the rotation-vector ODE per step;
    increment methods consume exact synthetic measurements, including the
    warm-up increment before t = 0 (and, for the three-increment method,
    one increment past the horizon).  Per-step rotations compose right to
    left; the attitude is re-orthonormalized every 1000 steps.
    """
    n = _step_count(dt, horizon)
    t_mat = np.eye(3)

    def push(t_mat, delta_phi):
        return compose(dcm_from_rotation_vector(delta_phi), t_mat)

    if method.uses_rate_samples:
        tab = _OMEGA_TABLEAUX[method.kind]()

        def sampler(t):
            return omega_at(signal, t)

        for k in range(n):
            dphi = integrate_attitude_step(sampler, k * dt, dt, tab,
                                           jacobian_mode)
            t_mat = push(t_mat, dphi)
            if (k + 1) % _ORTHO_EVERY == 0:
                t_mat = orthonormalize(t_mat)
        return t_mat

    if method.kind in (MethodKind.SINGLE_SPEED_THETA2, MethodKind.RK4_THETA2):
        prev = synth_delta_theta(signal, -dt, 0.0)
        for k in range(n):
            curr = synth_delta_theta(signal, k * dt, (k + 1) * dt)
            if method.kind is MethodKind.SINGLE_SPEED_THETA2:
                result = miller_single_speed(prev, curr)
            else:
                result = rk4_theta2(
                    MeasurementWindow(np.stack([prev, curr]), dt))
            t_mat = push(t_mat, result.delta_phi)
            prev = curr
            if (k + 1) % _ORTHO_EVERY == 0:
                t_mat = orthonormalize(t_mat)
        return t_mat

    if method.kind is MethodKind.SINGLE_SPEED_THETA3:
        prev = synth_delta_theta(signal, -dt, 0.0)
        curr = synth_delta_theta(signal, 0.0, dt)
        for k in range(n):
            nxt = synth_delta_theta(signal, (k + 1) * dt, (k + 2) * dt)
            result = rk4_theta3(
                MeasurementWindow(np.stack([prev, curr, nxt]), dt))
            t_mat = push(t_mat, result.delta_phi)
            prev, curr = curr, nxt
            if (k + 1) % _ORTHO_EVERY == 0:
                t_mat = orthonormalize(t_mat)
        return t_mat

    if method.kind is MethodKind.TWO_SPEED_CLASSIC:
        m = method.minor_steps
        sub = dt / m
        before = synth_delta_theta(signal, -sub, 0.0)
        for k in range(n):
            start = k * dt
            incs = [synth_delta_theta(signal, start + j * sub,
                                      start + (j + 1) * sub)
                    for j in range(m)]
            t_mat = push(t_mat, two_speed_classic(incs, before))
            before = incs[-1]
            if (k + 1) % _ORTHO_EVERY == 0:
                t_mat = orthonormalize(t_mat)
        return t_mat

    raise ConfigError(f"unhandled method kind {method.kind!r}")


def estimate_order(records) -> tuple[float, float]:
    """Least-squares slope of log(error) against log(dt).

    Records at or below the roundoff floor are excluded before fitting;
    at least 3 usable records with distinct step sizes are required
    (``InsufficientData`` otherwise).  Returns (slope, RMS fit residual).
    """
    usable = [r for r in records if r.final_error_angle > ERROR_FLOOR]
    dts = sorted({r.dt for r in usable})
    if len(usable) < 3 or len(dts) < 3:
        raise InsufficientData(
            f"order fit needs >= 3 records above the {ERROR_FLOOR:.0e} "
            f"floor with distinct step sizes, have {len(usable)}")
    x = np.log([r.dt for r in usable])
    y = np.log([r.final_error_angle for r in usable])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    residual = math.sqrt(float(np.mean((y - fitted) ** 2)))
    return float(slope), residual


def validate_config(cfg: SweepConfig) -> None:
    """Raise ``ConfigError`` on any invalid sweep setting."""
    if cfg.signal not in PRESET_NAMES:
        raise ConfigError(
            f"unknown signal preset {cfg.signal!r}; valid presets: "
            f"{', '.join(PRESET_NAMES)}")
    if not cfg.methods:
        raise ConfigError("method list is empty")
    if not cfg.step_sizes:
        raise ConfigError("step-size list is empty")
    if any(dt <= 0 for dt in cfg.step_sizes):
        raise ConfigError(f"step sizes must be positive: {cfg.step_sizes}")
    if list(cfg.step_sizes) != sorted(set(cfg.step_sizes), reverse=True):
        raise ConfigError(
            f"step sizes must be strictly decreasing: {cfg.step_sizes}")
    for dt in cfg.step_sizes:
        _step_count(dt, cfg.horizon)
    if cfg.tolerance < 1e-13:
        raise ConfigError(
            f"reference tolerance must be >= 1e-13, got {cfg.tolerance!r}")


def run_sweep(cfg: SweepConfig, max_workers: int | None = None
              ) -> ConvergenceReport:
    """Run every (method, dt) cell of the sweep and fit per-method orders.

    The reference attitude is computed once for the signal/horizon.  With
    ``max_workers`` > 1 the cells run on a thread pool; record values are
    independent of the schedule.
    """
    validate_config(cfg)
    signal = preset(cfg.signal)
    ref = reference_attitude(signal, 0.0, cfg.horizon, cfg.tolerance)

    def run_cell(method: MethodId, dt: float) -> ErrorRecord:
        start = time.perf_counter()
        final = propagate(method, signal, dt, cfg.horizon, cfg.jacobian_mode)
        err = attitude_error_angle(final, ref)
        return ErrorRecord(method=method, dt=dt, final_error_angle=err,
                           steps=_step_count(dt, cfg.horizon),
                           wall_time=time.perf_counter() - start)

    cells = [(method, dt) for method in cfg.methods
             for dt in cfg.step_sizes]
    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(lambda c: run_cell(*c), cells))
    else:
        results = [run_cell(method, dt) for method, dt in cells]

    by_method = {}
    for record in results:
        by_method.setdefault(record.method, []).append(record)
    summaries = []
    for method in cfg.methods:
        records = tuple(sorted(by_method[method], key=lambda r: -r.dt))
        try:
            order, residual = estimate_order(records)
        except InsufficientData:
            order, residual = None, None
        summaries.append(MethodSummary(method=method, records=records,
                                       order=order, fit_residual=residual))
    return ConvergenceReport(summaries=tuple(summaries))
