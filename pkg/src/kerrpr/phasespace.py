"""Trapped photons as a submanifold of the tangent bundle.

Off the axis the trapped photons (with ``u^0 > 0``) are the zero set of
``f_map``; near the axis they are the zero set of ``h_map`` and of
``g_map``.  The rank reports measure how far each map is from being a
submersion.  ``Dh`` drops to rank 2 on the trapped set because ``h`` only
detects ``p_r = 0`` quadratically; ``g_map`` is the full-rank replacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ChartDomainError, KerrError, NotInPhotonRegion
from .kerr import (
    AxisPoint,
    BLPoint,
    Covec4,
    KerrParams,
    Vec4,
    axis_chart,
    axis_transform_vec,
    motion_constants,
    scalars,
)
from .numerics import jacobian as fd_jacobian
from .spherical import phi_trap, q_trap, r_m, region_slice

RANK_THRESHOLD = 1e-6
CLIP = 1e-14


@dataclass(frozen=True)
class TangentPoint:
    point: Union[BLPoint, AxisPoint]
    u: Vec4

    def __post_init__(self):
        if self.point.chart != self.u.chart:
            raise ChartDomainError("vector chart does not match the point chart")

    def packed(self) -> np.ndarray:
        pt = self.point
        coords = ((pt.t, pt.r, pt.theta, pt.phi) if isinstance(pt, BLPoint)
                  else (pt.t, pt.r, pt.x, pt.y))
        return np.array([*coords, *self.u.comps])

    def replace_packed(self, z) -> "TangentPoint":
        z = [float(v) for v in z]
        if isinstance(self.point, BLPoint):
            return TangentPoint(BLPoint(*z[:4]), Vec4(z[4:], self.u.chart))
        pt = AxisPoint(*z[:4], hemisphere=self.point.hemisphere)
        return TangentPoint(pt, Vec4(z[4:], self.u.chart))


@dataclass(frozen=True)
class RankReport:
    jacobian: np.ndarray
    singular_values: np.ndarray   # of the row-scaled Jacobian, descending
    row_norms: np.ndarray
    threshold: float

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[-1]) if self.singular_values.size else 0.0

    @property
    def rank(self) -> int:
        return int(np.sum(self.singular_values > self.threshold))

    @property
    def passed(self) -> bool:
        return bool(np.all(np.isfinite(self.jacobian))) and self.sigma_min > self.threshold


def _denominator(params: KerrParams, r: float, theta: float) -> tuple:
    sb = scalars(params, r, theta)
    den = sb.Acal - 2.0 * params.M * r * params.a * phi_trap(params, r)
    return den, sb


def e_of(params: KerrParams, r: float, theta: float, u0: float) -> float:
    """Energy ``u0 Delta rho^2 / (Acal - 2 M r a Phi_trap)`` of a trapped photon."""
    den, sb = _denominator(params, r, theta)
    if abs(den) <= 1e-300:
        raise KerrError("energy map is singular: Acal - 2 M r a Phi_trap vanishes")
    return u0 * sb.Delta * sb.rho2 / den


def trapped_sample(params: KerrParams, r: float, theta: float, sign_p2: int = 1,
                   E: float = 1.0, t: float = 0.0, phi: float = 0.0) -> TangentPoint:
    """Trapped photon with energy ``E`` at ``(r, theta)`` in Boyer-Lindquist components."""
    if sign_p2 not in (-1, 1):
        raise ValueError("sign_p2 must be +1 or -1")
    a, M = params.a, params.M
    S, C = math.sin(theta), math.cos(theta)
    if S * S < 1e-24:
        raise ChartDomainError("trapped_sample builds off-axis BL components")
    sl = region_slice(params, theta)
    slack = 1e-12 * max(1.0, r)
    if not sl.r_min - slack <= r <= sl.r_max + slack:
        raise NotInPhotonRegion(f"r={r} outside [{sl.r_min}, {sl.r_max}] at theta={theta}")
    Phi, Q = phi_trap(params, r), q_trap(params, r)
    den, sb = _denominator(params, r, theta)
    rho2, D = sb.rho2, sb.Delta
    u0 = E * den / (D * rho2)
    rad = Q - (Phi * Phi / (S * S) - a * a) * C * C
    scale = max(abs(Q), Phi * Phi / (S * S), a * a, 1.0)
    if rad < -CLIP * scale:
        raise NotInPhotonRegion(f"polar radicand {rad:.3e} < 0 at r={r}, theta={theta}")
    u2 = sign_p2 * E * math.sqrt(max(rad, 0.0)) / rho2
    u3 = E * (2.0 * M * r * a + (rho2 - 2.0 * M * r) * Phi / (S * S)) / (D * rho2)
    return TangentPoint(BLPoint(t, r, theta, phi), Vec4((u0, 0.0, u2, u3), "bl"))


def trapped_covector(params: KerrParams, tp: TangentPoint) -> Covec4:
    """Covariant momentum of an off-axis trapped sample via the family identities.

    ``p_t = -e``, ``p_r = 0``, ``p_theta = rho^2 u^2`` and
    ``p_phi = e Phi_trap(r)``.  This equals lowering with the metric but
    keeps ``E`` and ``L`` exact, which the unstable spherical orbits need.
    """
    pt = tp.point
    if not isinstance(pt, BLPoint):
        raise ChartDomainError("trapped_covector expects Boyer-Lindquist components")
    e = e_of(params, pt.r, pt.theta, tp.u.comps[0])
    rho2 = scalars(params, pt.r, pt.theta).rho2
    return Covec4((-e, 0.0, rho2 * tp.u.comps[2], e * phi_trap(params, pt.r)), "bl")


def f_map(params: KerrParams, tp: TangentPoint) -> np.ndarray:
    """``(f1, f2, f3)``; vanishes exactly on off-axis trapped photons with ``u^0 > 0``."""
    pt = tp.point
    if not isinstance(pt, BLPoint):
        raise ChartDomainError("f_map is defined in Boyer-Lindquist components")
    a, M = params.a, params.M
    r, th = pt.r, pt.theta
    S, C = math.sin(th), math.cos(th)
    if S * S < 1e-24:
        raise ChartDomainError("f_map is singular on the axis; use h_map")
    u0, u1, u2, u3 = tp.u.comps
    e = e_of(params, r, th, u0)
    sb = scalars(params, r, th)
    rho2, D = sb.rho2, sb.Delta
    Phi, Q = phi_trap(params, r), q_trap(params, r)
    f1 = u1
    f2 = u2 * u2 - e * e / (rho2 * rho2) * (Q - (Phi * Phi / (S * S) - a * a) * C * C)
    f3 = u3 - e / (D * rho2) * (2.0 * M * r * a + (rho2 - 2.0 * M * r) * Phi / (S * S))
    return np.array([f1, f2, f3])


def h_map(params: KerrParams, tp: TangentPoint) -> np.ndarray:
    """``(q, Qc - E^2 Q_trap(r), L - E Phi_trap(r))`` in either chart."""
    mc = motion_constants(params, tp.point, tp.u)
    r = tp.point.r
    return np.array([mc.q, mc.Qc - mc.E ** 2 * q_trap(params, r),
                     mc.L - mc.E * phi_trap(params, r)])


def g_map(params: KerrParams, tp: TangentPoint) -> np.ndarray:
    """``(q, u^r, L - E Phi_trap(r))``: same zero set as ``h_map`` near the axis.

    ``h_map`` only sees ``p_r = 0`` through ``R(r) = Delta^2 p_r^2``, which
    vanishes to second order; imposing ``u^r = 0`` directly gives a defining
    map of full rank.  The radial component agrees in both charts.
    """
    mc = motion_constants(params, tp.point, tp.u)
    return np.array([mc.q, tp.u.comps[1], mc.L - mc.E * phi_trap(params, tp.point.r)])


def to_axis(params: KerrParams, tp: TangentPoint) -> TangentPoint:
    """Re-express an off-equator BL tangent point in the axis chart."""
    return TangentPoint(axis_chart(params, tp.point, "forward"),
                        axis_transform_vec(params, tp.point, tp.u, "forward"))


def jacobian(fn: Callable, x, step: float = 1e-6,
             threshold: float = RANK_THRESHOLD) -> RankReport:
    """Rank report for ``fn: R^n -> R^m`` at ``x``.

    Richardson central differences; each row is divided by its norm before
    the singular values are taken.
    """
    try:
        J = fd_jacobian(fn, np.asarray(x, dtype=float), step)
    except (ArithmeticError, ValueError):
        J = np.full((1, np.size(x)), np.nan)
    if not np.all(np.isfinite(J)):
        return RankReport(J, np.zeros(0), np.zeros(J.shape[0]), threshold)
    norms = np.linalg.norm(J, axis=1)
    scaled = J / np.where(norms > 0.0, norms, 1.0)[:, None]
    sv = np.linalg.svd(scaled, compute_uv=False)
    return RankReport(J, sv, norms, threshold)


def rank_of_f(params: KerrParams, tp: TangentPoint, step: float = 1e-6) -> RankReport:
    return jacobian(lambda z: f_map(params, tp.replace_packed(z)), tp.packed(), step)


def rank_of_h(params: KerrParams, tp: TangentPoint, step: float = 1e-6) -> RankReport:
    return jacobian(lambda z: h_map(params, tp.replace_packed(z)), tp.packed(), step)


def rank_of_g(params: KerrParams, tp: TangentPoint, step: float = 1e-6) -> RankReport:
    return jacobian(lambda z: g_map(params, tp.replace_packed(z)), tp.packed(), step)


def axis_Q_value(params: KerrParams, r: float) -> float:
    """``Q`` of a trapped photon on the axis: ``(r^4 + a^2 r^2 + 2 M a^2 r)/Delta``."""
    a, M = params.a, params.M
    D = r * r - 2.0 * M * r + a * a
    return (r ** 4 + a * a * r * r + 2.0 * M * a * a * r) / D


def heart(params: KerrParams, r: float, u0: float) -> float:
    """``2 Delta u0 (1 - Q_trap(r) Delta / (r^2 + a^2)^2)``."""
    a, M = params.a, params.M
    D = r * r - 2.0 * M * r + a * a
    return 2.0 * D * u0 * (1.0 - q_trap(params, r) * D / (r * r + a * a) ** 2)


def heart_identity_residual(params: KerrParams) -> float:
    """``|1 - Q_trap D/(r^2+a^2)^2 - D a^2/(r^2+a^2)^2|`` at the axis-trapping radius ``r_m``."""
    a, M = params.a, params.M
    r = r_m(params)
    D = r * r - 2.0 * M * r + a * a
    w = (r * r + a * a) ** 2
    return abs((1.0 - q_trap(params, r) * D / w) - D * a * a / w)


def axis_radius_collapse(params: KerrParams, theta: float = 1e-6) -> float:
    """Width ``r_max - r_min`` of the photon region at a near-polar latitude."""
    sl = region_slice(params, theta)
    return sl.r_max - sl.r_min
