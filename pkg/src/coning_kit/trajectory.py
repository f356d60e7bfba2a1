"""Analytic angular-velocity signals and synthetic gyro measurement truth.

Three signal families are available, each evaluable at arbitrary time:

- ``PolynomialRate``: the rate is a fixed polynomial (degree <= 5).
- ``FourierRate``: a sum of per-axis sinusoids with positive frequencies.
- ``ConingRotationVector``: the rotation vector itself traces a cone,
  ``phi(t) = alpha (cos Wt, sin Wt, 0)``; the rate follows from the forward
  Jacobian, ``omega = J(phi) @ phi_dot``, which gives this signal a closed
  form truth attitude ``T(phi(t))`` that no integrator had to produce.

Reference attitudes and synthetic increments are deterministic: repeated
calls with equal inputs return bitwise-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence
from .kinematics import JacobianMode, forward_jacobian
from .rate_model import RatePolynomial, eval_rate
from .rk import integrate_attitude_step, tableau_rk4
from .so3 import attitude_error_angle, dcm_from_rotation_vector, orthonormalize

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)

#: Names accepted by ``preset``.
PRESET_NAMES = ("poly3", "fourier3", "coning")


@dataclass(frozen=True, eq=False)
class PolynomialRate:
    """Rate signal defined by a polynomial model (degree <= 5)."""

    model: RatePolynomial

    def __post_init__(self):
        if self.model.q > 6:
            raise ValueError(
                f"polynomial rate limited to degree 5, got degree "
                f"{self.model.q - 1}")


@dataclass(frozen=True, eq=False)
class FourierRate:
    """Rate signal ``omega(t) = sum_i amp_i * sin(freq_i t + phase_i)``.

    ``terms`` is a sequence of (amplitude 3-vector, frequency rad/s > 0,
    phase rad) triples; the amplitude multiplies the sine componentwise.
    """

    terms: tuple

    def __post_init__(self):
        norm = []
        for amp, freq, phase in self.terms:
            if not float(freq) > 0.0:
                raise ValueError(f"frequencies must be positive, got {freq!r}")
            norm.append((np.asarray(amp, dtype=float), float(freq),
                         float(phase)))
        object.__setattr__(self, "terms", tuple(norm))


@dataclass(frozen=True)
class ConingRotationVector:
    """Rotation-vector cone ``phi(t) = alpha (cos Wt, sin Wt, 0)``."""

    cone_angle: float
    precession_rate: float

    def __post_init__(self):
        if not 0.0 < self.cone_angle < math.pi / 2.0:
            raise ValueError(
                f"cone angle must be in (0, pi/2), got {self.cone_angle!r}")
        if not self.precession_rate > 0.0:
            raise ValueError(
                f"precession rate must be positive, got "
                f"{self.precession_rate!r}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Panel count for the composite 5-point Gauss-Legendre rule."""

    panels_per_interval: int
    POINTS_PER_PANEL = 5

    def __post_init__(self):
        if self.panels_per_interval < 1:
            raise ValueError(
                f"panel count must be >= 1, got {self.panels_per_interval}")


AnalyticAttitudeSignal = PolynomialRate | FourierRate | ConingRotationVector


def preset(name: str) -> AnalyticAttitudeSignal:
    """Return one of the named benchmark signals.

    ``poly3``: a degree-3 polynomial rate.  ``fourier3``: three sinusoid
    terms with incommensurate frequencies.  ``coning``: the rotation-vector
    cone with a 0.05 rad half-angle precessing at 10 rad/s.
    """
    if name == "poly3":
        coeffs = np.array([[0.30, -0.20, 0.15],
                           [0.08, 0.12, -0.10],
                           [-0.030, 0.024, 0.018],
                           [0.004, -0.006, 0.005]])
        return PolynomialRate(RatePolynomial(coeffs))
    if name == "fourier3":
        return FourierRate((
            ((0.50, 0.20, -0.30), 1.0, 0.0),
            ((-0.20, 0.40, 0.10), math.sqrt(2.0), 0.7),
            ((0.10, -0.15, 0.25), math.sqrt(5.0), -1.1),
        ))
    if name == "coning":
        return ConingRotationVector(cone_angle=0.05, precession_rate=10.0)
    raise KeyError(
        f"unknown signal preset {name!r}; valid presets: "
        f"{', '.join(PRESET_NAMES)}")


def _coning_phi_and_rate(signal: ConingRotationVector, t: float):
    a = signal.cone_angle
    w = signal.precession_rate
    cw, sw = math.cos(w * t), math.sin(w * t)
    phi = np.array([a * cw, a * sw, 0.0])
    phi_dot = np.array([-a * w * sw, a * w * cw, 0.0])
    return phi, phi_dot


def omega_at(signal: AnalyticAttitudeSignal, t: float) -> np.ndarray:
    """Angular velocity of the signal at time ``t`` (exact closed form)."""
    if isinstance(signal, PolynomialRate):
        return eval_rate(signal.model, t)
    if isinstance(signal, FourierRate):
        wx = wy = wz = 0.0
        for amp, freq, phase in signal.terms:
            s = math.sin(freq * t + phase)
            wx += amp[0] * s
            wy += amp[1] * s
            wz += amp[2] * s
        return np.array([wx, wy, wz])
    if isinstance(signal, ConingRotationVector):
        phi, phi_dot = _coning_phi_and_rate(signal, t)
        return forward_jacobian(phi) @ phi_dot
    raise TypeError(f"unknown signal type {type(signal).__name__}")


def exact_attitude(signal: AnalyticAttitudeSignal, t: float):
    """Closed-form attitude ``T(phi(t))`` where the signal defines one.

    Only the coning signal carries an exact attitude; other variants return
    ``None`` (use ``reference_attitude`` for those).
    """
    if isinstance(signal, ConingRotationVector):
        phi, _ = _coning_phi_and_rate(signal, t)
        return dcm_from_rotation_vector(phi)
    return None


def _rate_scale(signal: AnalyticAttitudeSignal) -> float:
    """Characteristic angular frequency content, for quadrature sizing."""
    if isinstance(signal, FourierRate):
        return max(freq for _, freq, _ in signal.terms)
    if isinstance(signal, ConingRotationVector):
        return signal.precession_rate
    return 0.0


def synth_delta_theta(signal: AnalyticAttitudeSignal, t0: float, t1: float,
                      quadrature: QuadratureSpec | None = None) -> np.ndarray:
    """Integrated-rate increment ``int omega dt`` over ``[t0, t1]``.

    Composite 5-point Gauss-Legendre; exact up to roundoff for polynomial
    rates (degree <= 9 per panel).  When ``quadrature`` is omitted the panel
    count defaults to ``ceil((t1 - t0) * max_frequency / pi) + 2``, sized so
    synthesis error sits far below any integrator error under test.
    Increments are additive across adjacent intervals.
    """
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got [{t0!r}, {t1!r}]")
    if quadrature is None:
        panels = math.ceil((t1 - t0) * _rate_scale(signal) / math.pi) + 2
    else:
        panels = quadrature.panels_per_interval
    h = (t1 - t0) / panels
    half = 0.5 * h
    acc = np.zeros(3)
    for j in range(panels):
        mid = t0 + j * h + half
        for x, w in zip(_GL_NODES, _GL_WEIGHTS):
            acc = acc + w * omega_at(signal, mid + half * x)
    # common panel width: one scaling of the accumulated weighted sum
    return acc * half


def _rk4_attitude(signal: AnalyticAttitudeSignal, t0: float, t1: float,
                  substeps: int) -> np.ndarray:
    tab = tableau_rk4()
    h = (t1 - t0) / substeps

    def sampler(t):
        return omega_at(signal, t)

    t_mat = np.eye(3)
    for k in range(substeps):
        dphi = integrate_attitude_step(sampler, t0 + k * h, h, tab,
                                       JacobianMode.EXACT_CLOSED_FORM)
        t_mat = dcm_from_rotation_vector(dphi) @ t_mat
        if (k + 1) % 1000 == 0:
            t_mat = orthonormalize(t_mat)
    return orthonormalize(t_mat)


def reference_attitude(signal: AnalyticAttitudeSignal, t0: float, t1: float,
                       tol: float) -> np.ndarray:
    """Attitude accumulated over ``[t0, t1]``, refined to tolerance ``tol``.

    Integrates the rotation-vector ODE with the four-stage scheme and the
    exact Jacobian, re-zeroing the rotation vector each substep and
    composing the per-substep DCMs.  The substep is halved until successive
    refinements agree to within ``tol`` (rad); raises ``NoConvergence``
    after 24 halvings.  The returned matrix is the rotation relative to the
    attitude at ``t0`` (identity initial condition).
    """
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got [{t0!r}, {t1!r}]")
    if tol < 1e-13:
        raise ValueError(f"tolerance must be >= 1e-13 rad, got {tol!r}")
    n = max(8, math.ceil((t1 - t0) * max(_rate_scale(signal), 1.0)))
    prev = _rk4_attitude(signal, t0, t1, n)
    for _ in range(24):
        n *= 2
        curr = _rk4_attitude(signal, t0, t1, n)
        if attitude_error_angle(curr, prev) <= tol:
            return curr
        prev = curr
    raise NoConvergence(
        f"reference refinement did not reach {tol!r} rad within 24 halvings")
