"""Null geodesic integration in Hamiltonian form.

This is the empirical check on the classifier: integrate from covariant
initial data, watch for the horizon shell or the escape radius, and report
how well ``E``, ``L``, ``Qc`` and the norm ``q`` were conserved.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _kernels as K
from .classifier import Fate, OrbitClass
from .errors import DomainError, IntegrationError
from .kerr import (
    AxisPoint,
    BLPoint,
    ConservedQuotients,
    Covec4,
    KerrParams,
    MotionConstants,
    constants_from_covector,
    horizon_radius,
)

TRAPPED_SPREAD = 1e-4  # max r - min r over the final half, in units of M
NULL_TOL = 1e-12
CSV_COLUMNS = ("affine", "t", "r", "theta", "phi", "p0", "p1", "p2", "p3",
               "E", "L", "Qc", "q_drift")


class Termination(enum.Enum):
    HIT_HORIZON_SHELL = "HitHorizonShell"
    REACHED_ESCAPE_RADIUS = "ReachedEscapeRadius"
    AFFINE_BUDGET_EXHAUSTED = "AffineBudgetExhausted"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PhaseState:
    """Spacetime point, covariant momentum in the same chart, affine parameter."""

    point: Union[BLPoint, AxisPoint]
    p: Covec4
    affine: float = 0.0

    def __post_init__(self):
        if self.point.chart != self.p.chart:
            raise DomainError(f"momentum chart {self.p.chart} does not match point chart "
                              f"{self.point.chart}")

    def packed(self) -> tuple:
        pt = self.point
        if isinstance(pt, BLPoint):
            return K.BL, np.array([pt.t, pt.r, pt.theta, pt.phi, *self.p.comps])
        return int(pt.hemisphere), np.array([pt.t, pt.r, pt.x, pt.y, *self.p.comps])

    @classmethod
    def unpack(cls, chart: int, y, affine: float = 0.0) -> "PhaseState":
        y = [float(v) for v in y]
        if chart == K.BL:
            return cls(BLPoint(*y[:4]), Covec4(y[4:], "bl"), affine)
        point = AxisPoint(*y[:4], hemisphere=int(chart))
        return cls(point, Covec4(y[4:], point.chart), affine)


@dataclass(frozen=True)
class DriftRecord:
    """Worst deviation from the initial constants along the trajectory.

    ``E``, ``L`` and ``Qc`` are relative drifts (normalised by ``|E0|``,
    ``max(|L0|, |E0| M)`` and ``max(|Qc0|, E0^2 M^2)``); ``q`` is
    ``max |q| / E0^2``.
    """

    E: float
    L: float
    Qc: float
    q: float


@dataclass
class IntegrationResult:
    affine: np.ndarray
    states: np.ndarray          # Boyer-Lindquist rows [t, r, theta, phi, p_t, p_r, p_theta, p_phi]
    charts: np.ndarray          # chart used by the integrator at each sample
    termination: Termination
    initial_constants: MotionConstants
    drift: DriftRecord
    constants: np.ndarray = field(repr=False)   # rows (q, E, L, Qc)
    steps: int = 0

    @property
    def final(self) -> PhaseState:
        return PhaseState.unpack(K.BL, self.states[-1], float(self.affine[-1]))


def _validate_params(params: KerrParams) -> tuple:
    return float(params.a), float(params.M)


def _to_bl_rows(y: np.ndarray, charts: np.ndarray) -> np.ndarray:
    out = np.array(y, dtype=float, copy=True)
    buf = np.empty(8)
    for i in np.nonzero(charts != K.BL)[0]:
        K.axis_to_bl(y[i], int(charts[i]), buf)
        out[i] = buf
    return out


def _row_constants(a: float, M: float, y: np.ndarray, charts: np.ndarray) -> np.ndarray:
    """``(q, E, L, Qc)`` per sample, evaluated in the sample's own chart."""
    y = np.atleast_2d(y)
    charts = np.atleast_1d(charts)
    out = np.empty((len(y), 4))
    bl = charts == K.BL
    if bl.any():
        r, th, pt, pr, pth, pph = (y[bl, i] for i in (1, 2, 4, 5, 6, 7))
        S = np.sin(th)
        E = -pt
        theta_part = pth ** 2 + (pph / S - a * E * S) ** 2
        out[bl] = np.column_stack(constants_from_covector(a, M, r, S * S, pt, pr, pph, theta_part))
    ax = ~bl
    if ax.any():
        r, x, yy, pt, pr, px, py = (y[ax, i] for i in (1, 2, 3, 4, 5, 6, 7))
        S2 = (x * x + yy * yy) / (r * r)
        E = -pt
        L = x * py - yy * px
        rd = x * px + yy * py
        theta_part = r * r * (px * px + py * py) - rd * rd - 2.0 * a * E * L + a * a * E * E * S2
        out[ax] = np.column_stack(constants_from_covector(a, M, r, S2, pt, pr + rd / r, L,
                                                          theta_part))
    return out


def _null_residual(a: float, M: float, chart: int, y: np.ndarray) -> tuple:
    """``(N, scale)`` with ``N = rho^2 g^{-1}(p, p)`` and a magnitude for comparison."""
    if chart == K.BL:
        N = K.bl_N(a, M, y)
        D = y[1] ** 2 - 2.0 * M * y[1] + a * a
        Kc = (y[1] ** 2 + a * a) * (-y[4]) - a * y[7]
        S = math.sin(y[2])
        scale = D * y[5] ** 2 + y[6] ** 2 + (y[7] / S + a * y[4] * S) ** 2 + Kc * Kc / D
    else:
        N = K.axis_N(a, M, *y[1:])
        scale = abs(N) + (y[1] ** 2 + a * a) ** 2 * y[4] ** 2 + y[1] ** 4 * float(
            np.dot(y[5:], y[5:]))
    return N, max(scale, 1e-300)


def rhs(params: KerrParams, state: PhaseState) -> np.ndarray:
    """Derivative of the packed state ``[coords, momenta]`` in the state's own chart.

    This is the flow of ``N = rho^2 g^{-1}(p, p)`` scaled by ``1/(2 rho^2)``,
    which equals the canonical geodesic flow on the null cone.
    """
    a, M = _validate_params(params)
    chart, y = state.packed()
    if chart == K.BL and math.sin(y[2]) ** 2 < 1e-24:
        raise DomainError("Boyer-Lindquist equations are singular on the axis; "
                          "use the axis chart")
    out = np.empty(8)
    K.state_rhs(a, M, chart, y, out)
    return out


def state_from_constants(params: KerrParams, cq: Union[ConservedQuotients, MotionConstants],
                         r: float, theta: float, phi: float = 0.0, sign_r: int = 1,
                         sign_theta: int = 1, t: float = 0.0, E: float = 1.0) -> PhaseState:
    """Null covariant state with given constants at ``(r, theta, phi)``.

    ``p_r = sign_r sqrt(R)/Delta`` and ``p_theta = sign_theta sqrt(Theta)``.
    Raises ``DomainError`` when no real momentum exists (R < 0 or Theta < 0).
    """
    a, Mm = _validate_params(params)
    if isinstance(cq, MotionConstants):
        E, L, Qc = cq.E, cq.L, cq.Qc
    else:
        L, Qc = cq.Phi * E, cq.Q * E * E
    if r <= horizon_radius(params):
        raise DomainError("r must lie outside the horizon")
    S, C = math.sin(theta), math.cos(theta)
    if S * S < 1e-24:
        raise DomainError("state_from_constants needs an off-axis latitude")
    D = r * r - 2.0 * Mm * r + a * a
    Kc = (r * r + a * a) * E - a * L
    R = Kc * Kc - D * (Qc + (L - a * E) ** 2)
    Th = Qc - (L * L / (S * S) - a * a * E * E) * C * C
    r_scale = max(Kc * Kc, D * abs(Qc), D * (L - a * E) ** 2, 1e-300)
    th_scale = max(abs(Qc), L * L / (S * S), a * a * E * E, 1e-300)
    if R < -1e-12 * r_scale:
        raise DomainError(f"radial potential is negative at r={r}: no real p_r")
    if Th < -1e-12 * th_scale:
        raise DomainError(f"polar potential is negative at theta={theta}: no real p_theta")
    pr = sign_r * math.sqrt(max(R, 0.0)) / D
    pth = sign_theta * math.sqrt(max(Th, 0.0))
    return PhaseState(BLPoint(t, r, theta, phi), Covec4((-E, pr, pth, L), "bl"))


def integrate(params: KerrParams, initial: PhaseState, affine_span: float,
              tol: float = 1e-12, escape_radius: Optional[float] = None,
              horizon_offset: Optional[float] = None, max_samples: int = 20000,
              max_steps: int = 10_000_000, h0: Optional[float] = None,
              null_tol: float = NULL_TOL) -> IntegrationResult:
    """Integrate a null geodesic for ``affine_span`` units of affine parameter.

    Dormand-Prince 5(4) with local error per step below ``tol`` (absolute
    and relative), dense event location for the horizon shell
    ``r_h + horizon_offset`` (default ``1e-6 M``) and the escape radius
    (default ``1e3 M``).  Near the axis the state moves to the axis chart.
    The initial momentum must be null to ``null_tol`` relative to the size
    of the terms in ``rho^2 g^{-1}(p, p)``.
    """
    a, M = _validate_params(params)
    if not affine_span > 0:
        raise ValueError("affine_span must be positive")
    esc = 1e3 * M if escape_radius is None else float(escape_radius)
    off = 1e-6 * M if horizon_offset is None else float(horizon_offset)
    r_shell = horizon_radius(params) + off
    chart, y0 = initial.packed()
    if y0[1] <= r_shell:
        raise DomainError("initial radius is inside the horizon shell")
    N, scale = _null_residual(a, M, chart, y0)
    if abs(N) > null_tol * scale:
        raise DomainError(f"initial momentum is not null (relative norm {abs(N) / scale:.3e})")
    if h0 is None:
        h0 = 1e-2 * M
    lam_s, y_s, chart_s, n, status, lam, y_end, chart_end, steps = K.integrate_kernel(
        a, M, y0, chart, float(affine_span), float(tol), r_shell, esc, float(h0),
        int(max_samples), int(max_steps))
    lam_s = lam_s[:n].copy()
    raw = y_s[:n].copy()
    charts = chart_s[:n].copy()
    if status in (K.ST_UNDERFLOW, K.ST_MAXSTEPS, K.ST_NONFINITE):
        reason = {K.ST_UNDERFLOW: "step size underflow", K.ST_MAXSTEPS: "step budget exhausted",
                  K.ST_NONFINITE: "non-finite state"}[status]
        last = PhaseState.unpack(int(charts[-1]), raw[-1], float(lam_s[-1]))
        raise IntegrationError(f"integration failed at affine {lam_s[-1]:.6g}: {reason}",
                               last_state=last, affine=float(lam_s[-1]))
    term = {K.ST_HORIZON: Termination.HIT_HORIZON_SHELL,
            K.ST_ESCAPE: Termination.REACHED_ESCAPE_RADIUS,
            K.ST_BUDGET: Termination.AFFINE_BUDGET_EXHAUSTED}[status]
    consts = _row_constants(a, M, raw, charts)
    q0, E0, L0, Qc0 = _row_constants(a, M, y0[None, :], np.array([chart]))[0]
    E2 = E0 * E0
    drift = DriftRecord(
        E=float(np.max(np.abs(consts[:, 1] - E0)) / max(abs(E0), 1e-300)),
        L=float(np.max(np.abs(consts[:, 2] - L0)) / max(abs(L0), abs(E0) * M, 1e-300)),
        Qc=float(np.max(np.abs(consts[:, 3] - Qc0)) / max(abs(Qc0), E2 * M * M, 1e-300)),
        q=float(np.max(np.abs(consts[:, 0])) / max(E2, 1e-300)),
    )
    return IntegrationResult(lam_s, _to_bl_rows(raw, charts), charts, term,
                             MotionConstants(q0, E0, L0, Qc0), drift, consts, int(steps))


def empirical_fate(result: IntegrationResult, spread: float = TRAPPED_SPREAD,
                   M: float = 1.0) -> Optional[OrbitClass]:
    """Fate read off an integration.

    A trajectory that used up its affine budget while its radius stayed in
    a band of width ``spread * M`` over the final half is reported as a
    trapped candidate.  Any other exhausted trajectory is undetermined and
    gives ``None``.
    """
    r = result.states[:, 1]
    pr = result.states[:, 5]
    flips = np.nonzero(np.sign(pr[1:]) * np.sign(pr[:-1]) < 0)[0]
    turning = tuple(float(0.5 * (r[i] + r[i + 1])) for i in flips)
    if result.termination is Termination.HIT_HORIZON_SHELL:
        return OrbitClass(Fate.FALLS_IN, turning)
    if result.termination is Termination.REACHED_ESCAPE_RADIUS:
        return OrbitClass(Fate.ESCAPES, turning)
    half = result.affine >= 0.5 * result.affine[-1]
    rr = r[half]
    if rr.max() - rr.min() <= spread * M:
        return OrbitClass(Fate.TRAPPED_SPHERICAL, (float(np.mean(rr)),))
    return None


def trajectory_table(result: IntegrationResult) -> np.ndarray:
    """Rows matching ``CSV_COLUMNS``; ``q_drift`` is ``q - q0``."""
    q0 = result.initial_constants.q
    c = result.constants
    return np.column_stack([result.affine, result.states, c[:, 1], c[:, 2], c[:, 3],
                            c[:, 0] - q0])


def write_trajectory_csv(result: IntegrationResult, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in trajectory_table(result):
        w.writerow(["%.17g" % v for v in row])


def mirror(state: PhaseState) -> PhaseState:
    """Time reversal composed with ``phi -> -phi`` (BL states only).

    Maps a solution to a solution traversed backwards: ``t, phi`` and the
    momenta ``p_r, p_theta`` change sign while ``p_t, p_phi`` are kept.
    """
    if not isinstance(state.point, BLPoint):
        raise DomainError("mirror is defined for Boyer-Lindquist states")
    pt = state.point
    p = state.p.comps
    return PhaseState(BLPoint(-pt.t, pt.r, pt.theta, -pt.phi),
                      Covec4((p[0], -p[1], -p[2], p[3]), "bl"), state.affine)


def warmup() -> None:
    """Compile the kernels (both charts) so later timings exclude JIT cost."""
    params = KerrParams(0.5)
    st = state_from_constants(params, ConservedQuotients(0.0, 20.0), 4.0, 0.3, sign_r=-1)
    integrate(params, st, 5.0, tol=1e-8, max_samples=16)
