"""Kerr metric in Boyer-Lindquist and axis-adapted charts.

Geometric units.  The axis-adapted chart replaces ``(theta, phi)`` by
``x = r sin(theta) cos(phi)``, ``y = r sin(theta) sin(phi)`` on one
hemisphere, which stays regular on the rotation axis.  Every point and
(co)vector carries a chart tag; mixing tags raises ``ChartMismatchError``.

Energy sign convention: ``E = -p_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    ChartDomainError,
    ChartMismatchError,
    DomainError,
    KerrError,
    ZeroEnergyError,
)
from .numerics import central_difference

AXIS_S2_MIN = 1e-24  # BL operations reject points closer to the axis than this

BL = "bl"
AXIS_NORTH = "axis+"
AXIS_SOUTH = "axis-"


@dataclass(frozen=True)
class KerrParams:
    a: float
    M: float = 1.0

    def __post_init__(self):
        if not self.M > 0:
            raise KerrError(f"mass must be positive, got M={self.M}")
        if not 0.0 <= self.a < self.M:
            raise KerrError(f"need 0 <= a < M (subcritical), got a={self.a}, M={self.M}")


@dataclass(frozen=True)
class BLPoint:
    t: float
    r: float
    theta: float
    phi: float

    @property
    def chart(self) -> str:
        return BL


@dataclass(frozen=True)
class AxisPoint:
    """Point in the axis-adapted chart; ``hemisphere`` is +1 (C > 0) or -1."""

    t: float
    r: float
    x: float
    y: float
    hemisphere: int = 1

    @property
    def chart(self) -> str:
        return AXIS_NORTH if self.hemisphere > 0 else AXIS_SOUTH

    @property
    def sin2(self) -> float:
        return (self.x * self.x + self.y * self.y) / (self.r * self.r)


Point = Union[BLPoint, AxisPoint]


@dataclass(frozen=True)
class Vec4:
    """Contravariant components in the chart named by ``chart``."""

    comps: tuple
    chart: str = BL

    def __post_init__(self):
        object.__setattr__(self, "comps", tuple(float(c) for c in self.comps))
        if len(self.comps) != 4:
            raise ValueError("Vec4 needs four components")

    def array(self) -> np.ndarray:
        return np.array(self.comps)


@dataclass(frozen=True)
class Covec4:
    """Covariant components in the chart named by ``chart``."""

    comps: tuple
    chart: str = BL

    def __post_init__(self):
        object.__setattr__(self, "comps", tuple(float(c) for c in self.comps))
        if len(self.comps) != 4:
            raise ValueError("Covec4 needs four components")

    def array(self) -> np.ndarray:
        return np.array(self.comps)


@dataclass(frozen=True)
class ScalarBundle:
    S: float
    C: float
    rho2: float
    Delta: float
    Acal: float


@dataclass(frozen=True)
class MotionConstants:
    q: float
    E: float
    L: float
    Qc: float


@dataclass(frozen=True)
class ConservedQuotients:
    Phi: float
    Q: float


def scalars(params: KerrParams, r: float, theta: float) -> ScalarBundle:
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    a, M = params.a, params.M
    S, C = math.sin(theta), math.cos(theta)
    rho2 = r * r + a * a * C * C
    Delta = r * r - 2.0 * M * r + a * a
    Acal = (r * r + a * a) ** 2 - Delta * a * a * S * S
    return ScalarBundle(S, C, rho2, Delta, Acal)


def horizon_radius(params: KerrParams) -> float:
    return params.M + math.sqrt(params.M ** 2 - params.a ** 2)


def _check_chart(point: Point, obj) -> None:
    if obj.chart != point.chart:
        raise ChartMismatchError(f"components tagged {obj.chart!r} used at a {point.chart!r} point")


# --- Boyer-Lindquist chart -------------------------------------------------

def _bl_metric(a: float, M: float, r: float, theta: float) -> np.ndarray:
    S, C = math.sin(theta), math.cos(theta)
    rho2 = r * r + a * a * C * C
    Delta = r * r - 2.0 * M * r + a * a
    Acal = (r * r + a * a) ** 2 - Delta * a * a * S * S
    g = np.zeros((4, 4))
    g[0, 0] = -(1.0 - 2.0 * M * r / rho2)
    g[1, 1] = rho2 / Delta
    g[2, 2] = rho2
    g[0, 3] = g[3, 0] = -2.0 * M * r * a * S * S / rho2
    g[3, 3] = Acal * S * S / rho2
    return g


def _bl_inverse_metric(a: float, M: float, r: float, theta: float) -> np.ndarray:
    S, C = math.sin(theta), math.cos(theta)
    rho2 = r * r + a * a * C * C
    Delta = r * r - 2.0 * M * r + a * a
    Acal = (r * r + a * a) ** 2 - Delta * a * a * S * S
    gi = np.zeros((4, 4))
    gi[0, 0] = -Acal / (rho2 * Delta)
    gi[1, 1] = Delta / rho2
    gi[2, 2] = 1.0 / rho2
    gi[0, 3] = gi[3, 0] = -2.0 * M * r * a / (rho2 * Delta)
    gi[3, 3] = (Delta - a * a * S * S) / (rho2 * Delta * S * S)
    return gi


def _require_off_axis(point: BLPoint) -> None:
    if math.sin(point.theta) ** 2 < AXIS_S2_MIN:
        raise ChartDomainError("Boyer-Lindquist chart is degenerate on the axis")


# --- axis-adapted chart ----------------------------------------------------

def axis_inverse_metric_components(a: float, M: float, r: float, x: float, y: float) -> np.ndarray:
    """Inverse metric in the ``(t, r, x, y)`` chart, regular on the axis.

    Built from the separated form
    ``rho^2 g^{-1}(p, p) = Delta p_r^2 + p_theta^2 + (L/S - a E S)^2 - K^2/Delta``
    rewritten in the chart's covariant components.
    """
    S2 = (x * x + y * y) / (r * r)
    Delta = r * r - 2.0 * M * r + a * a
    rho2 = r * r + a * a * (1.0 - S2)
    v = np.array([0.0, 1.0, x / r, y / r])
    w = np.array([0.0, 0.0, x, y])
    lv = np.array([0.0, 0.0, -y, x])
    et = np.array([1.0, 0.0, 0.0, 0.0])
    k = -(r * r + a * a) * et - a * lv
    A = Delta * np.outer(v, v) - np.outer(w, w) - np.outer(k, k) / Delta
    A[2, 2] += r * r
    A[3, 3] += r * r
    A += a * (np.outer(et, lv) + np.outer(lv, et))
    A[0, 0] += a * a * S2
    return A / rho2


def _axis_jacobian(r: float, theta: float, phi: float) -> np.ndarray:
    """d(t, r, x, y) / d(t, r, theta, phi)."""
    S, C = math.sin(theta), math.cos(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    J = np.eye(4)
    J[2, 1], J[2, 2], J[2, 3] = S * cp, r * C * cp, -r * S * sp
    J[3, 1], J[3, 2], J[3, 3] = S * sp, r * C * sp, r * S * cp
    return J


def _axis_inverse_jacobian(r: float, x: float, y: float, hemisphere: int) -> np.ndarray:
    """d(t, r, theta, phi) / d(t, r, x, y); needs x^2 + y^2 > 0."""
    rho = math.hypot(x, y)
    if rho == 0.0:
        raise ChartDomainError("theta and phi are undefined on the axis")
    z = hemisphere * math.sqrt(max(r * r - rho * rho, 0.0))
    if z == 0.0:
        raise ChartDomainError("axis chart is degenerate on the equator")
    Ji = np.eye(4)
    Ji[2, 1] = -rho / (z * r)
    Ji[2, 2] = x / (z * rho)
    Ji[2, 3] = y / (z * rho)
    Ji[3, 2] = -y / (rho * rho)
    Ji[3, 3] = x / (rho * rho)
    return Ji


def metric(params: KerrParams, point: Point) -> np.ndarray:
    """Covariant metric components at ``point`` in the point's chart."""
    if isinstance(point, BLPoint):
        _require_off_axis(point)
        return _bl_metric(params.a, params.M, point.r, point.theta)
    return np.linalg.inv(inverse_metric(params, point))


def inverse_metric(params: KerrParams, point: Point) -> np.ndarray:
    if isinstance(point, BLPoint):
        _require_off_axis(point)
        return _bl_inverse_metric(params.a, params.M, point.r, point.theta)
    return axis_inverse_metric_components(params.a, params.M, point.r, point.x, point.y)


def lower(params: KerrParams, point: Point, v: Vec4) -> Covec4:
    _check_chart(point, v)
    return Covec4(metric(params, point) @ v.array(), v.chart)


def raise_(params: KerrParams, point: Point, p: Covec4) -> Vec4:
    _check_chart(point, p)
    return Vec4(inverse_metric(params, point) @ p.array(), p.chart)


# --- chart changes ---------------------------------------------------------

def axis_chart(params: KerrParams, point: Point, direction: str = "forward") -> Point:
    """Move a point between the BL chart and the axis-adapted chart.

    ``forward`` takes a BLPoint to an AxisPoint on its hemisphere;
    ``backward`` takes an AxisPoint back (off-axis only, since phi is
    undefined on the axis).
    """
    if direction == "forward":
        if not isinstance(point, BLPoint):
            raise ChartMismatchError("forward transform expects a BLPoint")
        C = math.cos(point.theta)
        if C == 0.0:
            raise ChartDomainError("the equator is outside both hemisphere charts")
        S = math.sin(point.theta)
        return AxisPoint(point.t, point.r, point.r * S * math.cos(point.phi),
                         point.r * S * math.sin(point.phi), 1 if C > 0 else -1)
    if direction == "backward":
        if not isinstance(point, AxisPoint):
            raise ChartMismatchError("backward transform expects an AxisPoint")
        rho = math.hypot(point.x, point.y)
        if rho == 0.0:
            raise ChartDomainError("phi is undefined on the axis")
        if rho >= point.r:
            raise ChartDomainError("axis chart needs x^2 + y^2 < r^2")
        S = rho / point.r
        C = point.hemisphere * math.sqrt(1.0 - S * S)
        return BLPoint(point.t, point.r, math.atan2(S, C), math.atan2(point.y, point.x))
    raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")


def axis_transform_vec(params: KerrParams, point: Point, v, direction: str = "forward"):
    """Transform (co)vector components between the BL and axis charts.

    ``point`` is given in the source chart.  Contravariant components go
    through the Jacobian, covariant ones through its inverse transpose.
    """
    _check_chart(point, v)
    if direction == "forward":
        if not isinstance(point, BLPoint):
            raise ChartMismatchError("forward transform expects a BLPoint")
        target = axis_chart(params, point, "forward")
        J = _axis_jacobian(point.r, point.theta, point.phi)
        if isinstance(v, Vec4):
            return Vec4(J @ v.array(), target.chart)
        return Covec4(np.linalg.solve(J.T, v.array()), target.chart)
    if direction == "backward":
        if not isinstance(point, AxisPoint):
            raise ChartMismatchError("backward transform expects an AxisPoint")
        Ji = _axis_inverse_jacobian(point.r, point.x, point.y, point.hemisphere)
        if isinstance(v, Vec4):
            return Vec4(Ji @ v.array(), BL)
        return Covec4(np.linalg.solve(Ji.T, v.array()), BL)
    raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")


# --- constants of motion ---------------------------------------------------

def constants_from_covector(a: float, M: float, r, S2, p_t, p_r, p_L, theta_part):
    """Vectorisable core of the constants of motion.

    ``p_r`` is the BL radial covariant component, ``p_L = p_phi`` and
    ``theta_part = p_theta^2 + (L/S - a E S)^2`` (chart independent form).
    Returns ``(q, E, L, Qc)``.
    """
    E = -p_t
    L = p_L
    Delta = r * r - 2.0 * M * r + a * a
    rho2 = r * r + a * a * (1.0 - S2)
    K = (r * r + a * a) * E - a * L
    N = Delta * p_r * p_r - K * K / Delta + theta_part
    q = N / rho2
    # Carter's K-form r^2 q + K^2/Delta - Delta p_r^2, minus (L - aE)^2
    Qc = r * r * q + K * K / Delta - Delta * p_r * p_r - (L - a * E) ** 2
    return q, E, L, Qc


def covector_constants(params: KerrParams, point: Point, p: Covec4) -> MotionConstants:
    _check_chart(point, p)
    a, M = params.a, params.M
    if isinstance(point, BLPoint):
        _require_off_axis(point)
        S = math.sin(point.theta)
        S2 = S * S
        pt, pr, pth, pph = p.comps
        E = -pt
        theta_part = pth * pth + (pph / S - a * E * S) ** 2
        return MotionConstants(*constants_from_covector(a, M, point.r, S2, pt, pr, pph, theta_part))
    r, x, y = point.r, point.x, point.y
    pt, pr, px, py = p.comps
    S2 = (x * x + y * y) / (r * r)
    E = -pt
    L = x * py - y * px
    radial_dot = x * px + y * py
    pr_bl = pr + radial_dot / r
    # p_theta^2 + L^2/S^2 - 2aEL + a^2E^2S^2, written without 1/S
    theta_part = r * r * (px * px + py * py) - radial_dot ** 2 - 2.0 * a * E * L + a * a * E * E * S2
    return MotionConstants(*constants_from_covector(a, M, r, S2, pt, pr_bl, L, theta_part))


def motion_constants(params: KerrParams, point: Point, u: Vec4) -> MotionConstants:
    """``(q, E, L, Qc)`` of the geodesic through ``point`` with velocity ``u``."""
    return covector_constants(params, point, lower(params, point, u))


def conserved_quotients(mc: MotionConstants) -> ConservedQuotients:
    if mc.E == 0.0:
        raise ZeroEnergyError("conserved quotients need E != 0; use the zero-energy branch")
    return ConservedQuotients(mc.L / mc.E, mc.Qc / (mc.E * mc.E))


# --- umbilicity ------------------------------------------------------------

def umbilicity_defect(params: KerrParams, r: float, theta: float) -> float:
    """Size of the trace-free second fundamental form of ``{r = const}``.

    Returns the Frobenius norm of the trace-free part of the shape operator
    ``h^{-1} K`` on the ``(t, theta, phi)`` tangent space, with
    ``K = (1/2) n^r d_r h`` and ``n^r = 1/sqrt(g_rr)``.
    """
    if r <= horizon_radius(params):
        raise DomainError("r must lie in the domain of outer communication")
    if math.sin(theta) ** 2 < AXIS_S2_MIN:
        raise ChartDomainError("theta must be off-axis")
    a, M = params.a, params.M
    idx = np.ix_([0, 2, 3], [0, 2, 3])
    g = _bl_metric(a, M, r, theta)
    h = g[idx]
    step = 1e-6 * max(1.0, r)
    dh = central_difference(lambda rr: _bl_metric(a, M, rr, theta)[idx], r, step)
    K = 0.5 * dh / math.sqrt(g[1, 1])
    shape = np.linalg.solve(h, K)
    tf = shape - np.trace(shape) / 3.0 * np.eye(3)
    return float(np.linalg.norm(tf))
