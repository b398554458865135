"""Topology of the slice ``P0 = {t = 0, E = 1}`` of the phase-space photon region.

``chart_H`` parametrises the off-axis part of ``P0`` by
``(theta, phi, s, varsigma)``; ``psi`` reads off a circle coordinate near
the poles from the axis-chart momenta.  The winding indices of the loops
``gamma1`` and ``gamma2`` under ``psi`` are the numerical facts behind the
fundamental-group computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, KerrError
from .kerr import (
    BLPoint,
    Covec4,
    KerrParams,
    Vec4,
    axis_chart,
    axis_transform_vec,
    lower,
    metric,
    raise_,
    scalars,
)
from .phasespace import TangentPoint, f_map
from .spherical import phi_trap, q_trap, r_hat_bounds, rbar, region_slice

CLIP = 1e-10  # relative; rbar endpoints carry root-finding error
MAX_JUMP = 0.5 * math.pi
EXPECTED_INDICES = {"gamma1_0": 1, "gamma1_1": -1, "gamma2_0": 1, "gamma2_1": -1}


class WindingResolutionError(KerrError):
    """Consecutive loop samples are too far apart to unwrap reliably."""


@dataclass(frozen=True)
class TorusCoord:
    theta: float
    phi: float
    s: float
    varsigma: int

    def __post_init__(self):
        if self.varsigma not in (-1, 1):
            raise ValueError("varsigma must be +1 or -1")
        if not -1.0 <= self.s <= 1.0:
            raise DomainError("s must lie in [-1, 1]")

    def canonical(self) -> "TorusCoord":
        """Representative under the gluing ``(+-1, +1) ~ (+-1, -1)``."""
        if abs(self.s) == 1.0:
            return TorusCoord(self.theta, self.phi, self.s, 1)
        return self


@dataclass(frozen=True)
class P0Point:
    point: BLPoint
    p: Covec4            # covariant, p_t = -1
    u: Vec4              # contravariant, u^r = 0
    torus: TorusCoord

    def tangent(self) -> TangentPoint:
        return TangentPoint(self.point, self.u)


@dataclass(frozen=True)
class PoleChartValue:
    theta: float
    phi: float
    angle: float         # representative in (-pi, pi]


def atan2(v: float, u: float) -> float:
    """Angle in ``(-pi, pi]``: ``arctan(v/u)`` for ``u > 0``, shifted by ``pi`` for ``u < 0``.

    On the negative ``u``-axis (``v = 0``) the value is ``pi``.
    """
    if u > 0.0:
        return math.atan(v / u)
    if u < 0.0:
        if v >= 0.0:
            return math.atan(v / u) + math.pi
        # tiny negative v can round onto -pi, which lies outside the range
        w = math.atan(v / u) - math.pi
        return w if w > -math.pi else math.pi
    if v == 0.0:
        raise DomainError("atan2 is undefined at the origin")
    return math.copysign(0.5 * math.pi, v)


def chart_H(params: KerrParams, tc: TorusCoord) -> P0Point:
    """Point of ``P0`` with torus coordinates ``tc``.

    ``r = rbar(theta, s)``; ``u^2 = varsigma sqrt(Theta)/rho^2`` and ``u^3``
    are the trapped-photon components at unit energy; ``u^0`` is the
    future-directed null root with ``u^1 = 0``.
    """
    a, M = params.a, params.M
    tc = tc.canonical()
    th = tc.theta
    if not 0.0 < th < math.pi:
        raise DomainError("chart_H needs theta in (0, pi)")
    S, C = math.sin(th), math.cos(th)
    if S * S < 1e-24:
        raise DomainError("chart_H is defined off the poles")
    r = rbar(params, th, tc.s)
    Phi, Q = phi_trap(params, r), q_trap(params, r)
    sb = scalars(params, r, th)
    rho2, D = sb.rho2, sb.Delta
    rad = Q - (Phi * Phi / (S * S) - a * a) * C * C
    if rad < -CLIP * max(abs(Q), Phi * Phi / (S * S), a * a, 1.0):
        raise DomainError(f"polar radicand {rad:.3e} < 0 at r={r}, theta={th}")
    u2 = tc.varsigma * math.sqrt(max(rad, 0.0)) / rho2
    u3 = (2.0 * M * r * a + (rho2 - 2.0 * M * r) * Phi / (S * S)) / (D * rho2)
    point = BLPoint(0.0, r, th, tc.phi)
    g = metric(params, point)
    c = g[2, 2] * u2 * u2 + g[3, 3] * u3 * u3
    b = g[0, 3] * u3
    disc = b * b - g[0, 0] * c
    # future-directed root of g00 u0^2 + 2 b u0 + c = 0, written without 1/g00
    u0 = c / (math.sqrt(max(disc, 0.0)) - b)
    u = Vec4((u0, 0.0, u2, u3), "bl")
    p = lower(params, point, u)
    E = -p.comps[0]
    u = Vec4(np.array(u.comps) / E, "bl")
    pc = np.array(p.comps) / E
    pc[0] = -1.0
    return P0Point(point, Covec4(pc, "bl"), u, tc)


def membership_residual(params: KerrParams, p0: P0Point) -> float:
    """``max |f_map(raise(p))|`` for the covariant momentum of ``p0``."""
    u = raise_(params, p0.point, p0.p)
    return float(np.max(np.abs(f_map(params, TangentPoint(p0.point, u)))))


def axis_momenta(params: KerrParams, p0: P0Point) -> tuple:
    """Covariant axis-chart components ``(p~_x, p~_y)`` of ``p0``."""
    pt = axis_transform_vec(params, p0.point, p0.p, "forward")
    return pt.comps[2], pt.comps[3]


def psi(params: KerrParams, p0: P0Point, eps: float = None) -> PoleChartValue:
    """``(theta, phi, [atan2(p~_2, p~_3)])`` with ``p~_2, p~_3`` the axis-chart momenta."""
    th = p0.point.theta
    if eps is not None and math.sin(th) ** 2 >= eps:
        raise DomainError(f"sin^2(theta)={math.sin(th) ** 2:.3g} is outside the pole cap {eps}")
    px, py = axis_momenta(params, p0)
    return PoleChartValue(th, p0.point.phi, atan2(px, py))


def psi_angle_from_bl(theta: float, phi: float, p2: float, p3: float) -> float:
    """Same angle as ``psi`` from the Boyer-Lindquist momenta.

    ``r sin(theta) (p~_x, p~_y) = (tan(theta)(cos(phi) p2) - sin(phi) p3,
    tan(theta)(sin(phi) p2) + cos(phi) p3)`` and ``r sin(theta) > 0``.
    """
    tn = math.tan(theta)
    c, s = math.cos(phi), math.sin(phi)
    return atan2(tn * c * p2 - s * p3, tn * s * p2 + c * p3)


# --- concavity of the fibre boundary -----------------------------------------

def interval_I(params: KerrParams, theta0: float) -> tuple:
    """``I_theta0``: the ``Phi_trap`` values over ``[r_min, r_max]``, ascending."""
    sl = region_slice(params, theta0)
    lo, hi = phi_trap(params, sl.r_max), phi_trap(params, sl.r_min)
    return lo, hi


def _radius_for_phi_vec(params: KerrParams, Phi: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Vectorised inverse of the decreasing ``phi_trap`` on ``[lo, hi]``."""
    a_ = np.full(Phi.shape, lo)
    b_ = np.full(Phi.shape, hi)
    for _ in range(200):
        m = 0.5 * (a_ + b_)
        go_right = phi_trap(params, m) > Phi
        a_ = np.where(go_right, m, a_)
        b_ = np.where(go_right, b_, m)
        if np.all(b_ - a_ <= 4e-16 * b_):
            break
    return 0.5 * (a_ + b_)


def pbar2_squared(params: KerrParams, theta0: float, p3):
    """``Q_trap(r(p3)) - (p3^2 - a^2) C^2/S^2 - a^2 C^4/S^2`` on ``I_theta0``."""
    a = params.a
    p3 = np.asarray(p3, dtype=float)
    lo, hi = interval_I(params, theta0)
    tol = 1e-12 * max(1.0, abs(lo), abs(hi))
    if np.any(p3 < lo - tol) or np.any(p3 > hi + tol):
        raise DomainError(f"p3 outside I_theta0 = ({lo}, {hi})")
    r1, r2 = r_hat_bounds(params)
    r = _radius_for_phi_vec(params, np.clip(p3, lo, hi), r1, r2)
    S2 = math.sin(theta0) ** 2
    C2 = 1.0 - S2
    return q_trap(params, r) - (p3 * p3 - a * a) * C2 / S2 - a * a * C2 * C2 / S2


def pbar2(params: KerrParams, theta0: float, p3):
    """Non-negative ``p_theta`` of the ``P0`` point with latitude ``theta0`` and ``p_phi = p3``."""
    v = pbar2_squared(params, theta0, p3)
    return np.sqrt(np.maximum(v, 0.0))


def concavity_margin(params: KerrParams, theta0: float, n: int = 1000) -> float:
    """Largest centred second difference of ``pbar2^2`` on an ``n``-point grid of ``I_theta0``.

    Negative means ``pbar2^2`` (hence ``pbar2``) is concave there.
    """
    lo, hi = interval_I(params, theta0)
    x = np.linspace(lo, hi, n)
    y = pbar2_squared(params, theta0, x)
    h = x[1] - x[0]
    return float(np.max((y[2:] - 2.0 * y[1:-1] + y[:-2]) / (h * h)))


def concavity_epsilon(params: KerrParams, n: int = 1000, iters: int = 40) -> float:
    """Bisection on ``sin^2(theta0)`` for the edge of the concave pole cap.

    Returns 1.0 when the margin is negative at the equator as well.
    """
    def margin(s2):
        return concavity_margin(params, math.asin(math.sqrt(s2)), n)

    lo, hi = 1e-6, 1.0
    if margin(lo) >= 0.0:
        return 0.0
    if margin(hi) < 0.0:
        return 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if margin(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return lo


# --- loops and winding ---------------------------------------------------------

def loop_theta(theta0: float, lam: float) -> float:
    return theta0 - lam * (2.0 * theta0 - math.pi)


def loops(params: KerrParams, lam: float, theta0: float, which: str, n: int = 512) -> list:
    """``n`` samples of ``gamma1`` (``phi`` loop at ``s = 0, varsigma = -1``) or
    ``gamma2`` (``(s, varsigma)`` loop at ``phi = 0``) at homotopy parameter ``lam``."""
    if n < 4:
        raise ValueError("need at least 4 samples per loop")
    th = loop_theta(theta0, lam)
    if which == "gamma1":
        phis = -math.pi + 2.0 * math.pi * np.arange(n) / n
        return [chart_H(params, TorusCoord(th, float(ph), 0.0, -1)) for ph in phis]
    if which == "gamma2":
        taus = 4.0 * np.arange(n) / n
        out = []
        for tau in taus:
            if tau < 2.0:
                tc = TorusCoord(th, 0.0, -1.0 + tau, 1)
            else:
                tc = TorusCoord(th, 0.0, min(1.0, 3.0 - tau), -1)
            out.append(chart_H(params, tc))
        return out
    raise ValueError("which must be 'gamma1' or 'gamma2'")


def winding_index(angles, closed: bool = True) -> int:
    """Degree of a sampled circle map.

    Consecutive differences are taken modulo ``2 pi``; any jump of
    ``pi/2`` or more means the sampling is too coarse.
    """
    a = np.asarray(angles, dtype=float)
    if closed:
        a = np.append(a, a[0])
    d = np.diff(a)
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    worst = float(np.max(np.abs(d))) if d.size else 0.0
    if worst >= MAX_JUMP:
        raise WindingResolutionError(f"largest angle jump {worst:.3f} >= pi/2; resample denser")
    total = float(np.sum(d)) / (2.0 * math.pi)
    k = int(round(total))
    if abs(total - k) > 1e-6:
        raise WindingResolutionError(f"total turning {total} is not an integer")
    return k


def loop_index(params: KerrParams, lam: float, theta0: float, which: str,
               n: int = 512, max_n: int = 8192) -> int:
    """Winding of ``P3 o psi o gamma``; doubles the sampling until unwrapping is safe."""
    while True:
        try:
            pts = loops(params, lam, theta0, which, n)
            return winding_index([psi(params, p).angle for p in pts])
        except WindingResolutionError:
            if n >= max_n:
                raise
            n *= 2


@dataclass
class TopologyReport:
    theta0: float
    n: int
    indices: dict
    orientation: int
    expected: dict
    epsilon_concavity: float
    cap_sin2: float
    in_cap: bool
    mismatches: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict:
        return {
            "theta0": self.theta0,
            "samples": self.n,
            "indices": dict(self.indices),
            "expected": dict(self.expected),
            "orientation": self.orientation,
            "epsilon_concavity": self.epsilon_concavity,
            "cap_sin2": self.cap_sin2,
            "in_cap": self.in_cap,
            "mismatches": list(self.mismatches),
            "passed": self.passed,
        }


def verify_facts(params: KerrParams, theta0: float = 0.94 * math.pi, n: int = 512,
                 epsilon: float = None) -> TopologyReport:
    """Winding indices of ``gamma1`` and ``gamma2`` at ``lam = 0, 1``.

    The ``(s, varsigma)`` circle is oriented so that ``gamma2`` at
    ``lam = 0`` has index +1; the same orientation is used at ``lam = 1``.
    """
    if not 0.5 * math.pi < theta0 < math.pi:
        raise DomainError("theta0 must lie in (pi/2, pi)")
    eps = concavity_epsilon(params) if epsilon is None else epsilon
    raw = {
        "gamma1_0": loop_index(params, 0.0, theta0, "gamma1", n),
        "gamma1_1": loop_index(params, 1.0, theta0, "gamma1", n),
        "gamma2_0": loop_index(params, 0.0, theta0, "gamma2", n),
        "gamma2_1": loop_index(params, 1.0, theta0, "gamma2", n),
    }
    orient = 1 if raw["gamma2_0"] >= 0 else -1
    idx = dict(raw)
    idx["gamma2_0"] *= orient
    idx["gamma2_1"] *= orient
    mism = [f"{k}: got {idx[k]:+d}, expected {v:+d}" for k, v in EXPECTED_INDICES.items()
            if idx[k] != v]
    s2 = math.sin(theta0) ** 2
    return TopologyReport(theta0, n, idx, orient, dict(EXPECTED_INDICES), eps, s2, s2 < eps, mism)
