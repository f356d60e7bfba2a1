"""Explicit Runge-Kutta engine over Butcher tableaux.

The step routine implements the standard explicit scheme

    psi_nu = y_k + sum_{l < nu} A[nu, l] f_l
    f_nu   = dt * f(t_k + dt * c[nu], psi_nu)
    y_k+1  = y_k + sum_l b[l] f_l

for any state dimension.  ``integrate_attitude_step`` specializes it to the
rotation-vector ODE over one sensor interval with the zero initial condition
(which makes the inverse Jacobian the identity at the first stage), and the
``delta_phi_*_closed`` functions are the corresponding second-order closed
forms in angular-rate samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import StageEvaluationError
from .kinematics import JacobianMode, bortz_rhs
from .so3 import cross

OdeFunction = Callable[[float, np.ndarray], np.ndarray]
OmegaSampler = Callable[[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Coefficients (A, b, c) of an explicit Runge-Kutta scheme.

    ``a`` must be strictly lower triangular for the scheme to be explicit;
    ``b`` must sum to 1 and each ``c[nu]`` must equal the row sum of
    ``a[nu]``.  Those coefficient invariants are checked by
    ``validate_tableau``, not at construction, so defective tableaux can be
    built for testing.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        n = b.shape[0]
        if a.shape != (n, n) or c.shape != (n,):
            raise ValueError(
                f"inconsistent tableau shapes: A {a.shape}, b {b.shape}, "
                f"c {c.shape}")
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        """Stage count."""
        return self.b.shape[0]


def tableau_forward_euler() -> ButcherTableau:
    """One-stage forward Euler (first order)."""
    return ButcherTableau(a=[[0.0]], b=[1.0], c=[0.0])


def tableau_explicit_midpoint() -> ButcherTableau:
    """Two-stage explicit midpoint (second order)."""
    return ButcherTableau(a=[[0.0, 0.0], [0.5, 0.0]],
                          b=[0.0, 1.0],
                          c=[0.0, 0.5])


def tableau_rk3() -> ButcherTableau:
    """Kutta's original third-order scheme."""
    return ButcherTableau(a=[[0.0, 0.0, 0.0],
                             [0.5, 0.0, 0.0],
                             [-1.0, 2.0, 0.0]],
                          b=[1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                          c=[0.0, 0.5, 1.0])


def tableau_rk4() -> ButcherTableau:
    """The classical fourth-order scheme."""
    return ButcherTableau(a=[[0.0, 0.0, 0.0, 0.0],
                             [0.5, 0.0, 0.0, 0.0],
                             [0.0, 0.5, 0.0, 0.0],
                             [0.0, 0.0, 1.0, 0.0]],
                          b=[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
                          c=[0.0, 0.5, 0.5, 1.0])


def validate_tableau(tab: ButcherTableau) -> list[str]:
    """Check tableau invariants; return every violation (empty list = ok)."""
    violations = []
    n = tab.n
    for nu in range(n):
        for l in range(nu, n):
            if tab.a[nu, l] != 0.0:
                violations.append(
                    f"A[{nu}][{l}] = {tab.a[nu, l]!r} must be 0 for an "
                    "explicit scheme")
    bsum = float(tab.b.sum())
    if abs(bsum - 1.0) > 1e-14:
        violations.append(f"sum(b) = {bsum!r} differs from 1 by more "
                          "than 1e-14")
    for nu in range(n):
        rowsum = float(tab.a[nu, :nu].sum()) if nu else 0.0
        if abs(float(tab.c[nu]) - rowsum) > 1e-14:
            violations.append(
                f"c[{nu}] = {float(tab.c[nu])!r} does not match row sum "
                f"{rowsum!r}")
    if n and tab.c[0] != 0.0:
        violations.append(f"c[0] = {float(tab.c[0])!r} must be 0")
    return violations


def rk_step(f: OdeFunction, t_k: float, y_k: np.ndarray, dt: float,
            tab: ButcherTableau) -> np.ndarray:
    """Advance ``y_k`` by one explicit Runge-Kutta step of size ``dt``.

    ``f`` is evaluated only at times ``t_k + dt * c[nu]``, never outside
    ``[t_k, t_k + dt * max(c)]``.  Exceptions raised by ``f`` are re-raised
    as ``StageEvaluationError`` carrying the stage index, with the original
    exception chained.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    y = np.asarray(y_k, dtype=float)
    a, b, c = tab.a, tab.b, tab.c
    stages = []
    for nu in range(tab.n):
        psi = y
        for l in range(nu):
            a_nl = a[nu, l]
            if a_nl != 0.0:
                psi = psi + a_nl * stages[l]
        t_nu = t_k + dt * c[nu]
        try:
            f_nu = f(t_nu, psi)
        except Exception as exc:
            raise StageEvaluationError(nu, t_nu, str(exc)) from exc
        stages.append(dt * np.asarray(f_nu, dtype=float))
    out = y
    for l in range(tab.n):
        b_l = b[l]
        if b_l != 0.0:
            out = out + b_l * stages[l]
    return out


def integrate_attitude_step(sampler: OmegaSampler, t_k: float, dt: float,
                            tab: ButcherTableau,
                            mode: JacobianMode = JacobianMode.EXACT_CLOSED_FORM
                            ) -> np.ndarray:
    """Rotation-vector increment over ``[t_k, t_k + dt]``.

    Runs one ``rk_step`` on ``phi_dot = jinv(phi, mode) @ sampler(t)`` from
    the zero initial condition, so the returned vector is the incremental
    rotation of the step.  For a constant angular rate every tableau is
    exact: the increment is ``dt * omega``.
    """

    def f(t, phi):
        return bortz_rhs(phi, sampler(t), mode)

    return rk_step(f, t_k, np.zeros(3), dt, tab)


def delta_phi_rk3_closed(omega0: np.ndarray, omega_mid: np.ndarray,
                         omega1: np.ndarray, dt: float) -> np.ndarray:
    """Quadratic-order closed form of the three-stage rotation increment.

    ``(dt/6)(w0 + 4 wm + w1) + (dt^2/6)(w0 - w1) x wm + (dt^2/12) w1 x wm``.
    Agrees with the three-stage solver to O(dt^3) when the samples come
    from a smooth rate signal; the trailing ``w1 x wm`` term makes the
    form asymmetric relative to the four-stage one.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    w0 = np.asarray(omega0, dtype=float)
    wm = np.asarray(omega_mid, dtype=float)
    w1 = np.asarray(omega1, dtype=float)
    simpson = (dt / 6.0) * (w0 + 4.0 * wm + w1)
    return (simpson
            + (dt * dt / 6.0) * cross(w0 - w1, wm)
            + (dt * dt / 12.0) * cross(w1, wm))


def delta_phi_rk4_closed(omega0: np.ndarray, omega_mid: np.ndarray,
                         omega1: np.ndarray, dt: float) -> np.ndarray:
    """Quadratic-order closed form of the four-stage rotation increment.

    ``(dt/6)(w0 + 4 wm + w1) + (dt^2/12)(w0 - w1) x wm``.  Agrees with the
    four-stage solver to O(dt^3) for any samples.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    w0 = np.asarray(omega0, dtype=float)
    wm = np.asarray(omega_mid, dtype=float)
    w1 = np.asarray(omega1, dtype=float)
    simpson = (dt / 6.0) * (w0 + 4.0 * wm + w1)
    return simpson + (dt * dt / 12.0) * cross(w0 - w1, wm)
