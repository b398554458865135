"""Spherical photon orbits and the spacetime photon region.

``phi_trap``/``q_trap`` give the conserved quotients of the constant-radius
photons, defined for ``a > 0`` on ``[r_hat_1, r_hat_2]``.  ``region_slice``
finds, for a latitude, the radial extent of the crescent swept out by those
orbits, and ``rbar`` is a smooth monotone parametrisation of that extent.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UndefinedFamilyError
from .kerr import KerrParams
from .numerics import bisect


@dataclass(frozen=True)
class TrappedFamilyPoint:
    r: float
    Phi: float
    Q: float


@dataclass(frozen=True)
class RegionSlice:
    theta: float
    r_min: float
    r_max: float
    r_m_at: float


def _require_spin(params: KerrParams) -> None:
    if params.a == 0.0:
        raise UndefinedFamilyError(
            "Phi_trap/Q_trap are undefined for a = 0; the photon sphere is r = 3M")


def phi_trap(params: KerrParams, r):
    _require_spin(params)
    a, M = params.a, params.M
    return -(r ** 3 - 3.0 * M * r ** 2 + a * a * r + a * a * M) / (a * (r - M))


def q_trap(params: KerrParams, r):
    _require_spin(params)
    a, M = params.a, params.M
    return -(r ** 3) * (r ** 3 - 6.0 * M * r ** 2 + 9.0 * M * M * r - 4.0 * a * a * M) / (
        a * a * (r - M) ** 2)


def r_hat_bounds(params: KerrParams) -> tuple:
    a, M = params.a, params.M
    r1 = 2.0 * M * (1.0 + math.cos(2.0 / 3.0 * math.acos(-a / M)))
    r2 = 2.0 * M * (1.0 + math.cos(2.0 / 3.0 * math.acos(a / M)))
    return r1, r2


def r_m(params: KerrParams) -> float:
    """Radius of the spherical orbits with zero angular momentum."""
    a, M = params.a, params.M
    b = M * M - a * a / 3.0
    arg = M * (M * M - a * a) / b ** 1.5
    return M + 2.0 * math.sqrt(b) * math.cos(math.acos(min(1.0, max(-1.0, arg))) / 3.0)


def family_point(params: KerrParams, r: float) -> TrappedFamilyPoint:
    return TrappedFamilyPoint(r, phi_trap(params, r), q_trap(params, r))


def in_family(params: KerrParams, r: float, slack: float = 0.0) -> bool:
    r1, r2 = r_hat_bounds(params)
    return r1 - slack <= r <= r2 + slack


def radius_for_phi(params: KerrParams, Phi: float) -> float:
    """Invert the strictly decreasing ``phi_trap`` on ``[r_hat_1, r_hat_2]``."""
    r1, r2 = r_hat_bounds(params)
    f1, f2 = phi_trap(params, r1), phi_trap(params, r2)
    if not f2 <= Phi <= f1:
        raise DomainError(f"Phi={Phi} outside the trapped range [{f2}, {f1}]")
    lo, hi = bisect(lambda r: phi_trap(params, r) - Phi, r1, r2, xtol=0.0)
    return 0.5 * (lo + hi)


def polar_on_family(params: KerrParams, r, C):
    """Scaled polar potential with the family quotients at radius ``r`` inserted."""
    a = params.a
    Phi = phi_trap(params, r)
    Q = q_trap(params, r)
    C2 = C * C
    return Q - (Q + Phi * Phi - a * a) * C2 - a * a * C2 * C2


def _boundary(params: KerrParams, C: float, r_start: float, r_end: float) -> float:
    """Zero of the polar potential nearest ``r_start`` going towards ``r_end``.

    Returns the bracket end on the admissible (non-negative) side.
    """
    g = lambda r: polar_on_family(params, r, C)
    grid = np.linspace(r_start, r_end, 65)
    prev = grid[0]
    for r in grid[1:]:
        if g(r) < 0.0:
            lo, hi = bisect(g, prev, r, xtol=0.0)
            return lo if g(lo) >= 0.0 else hi
        prev = r
    return float(r_end)


@functools.lru_cache(maxsize=65536)
def _slice_cached(a: float, M: float, theta: float) -> tuple:
    params = KerrParams(a, M)
    rm = r_m(params)
    C = math.cos(theta)
    S2 = math.sin(theta) ** 2
    r1, r2 = r_hat_bounds(params)
    if C == 0.0:
        return r1, r2, rm
    if S2 == 0.0:
        return rm, rm, rm
    return _boundary(params, C, rm, r1), _boundary(params, C, rm, r2), rm


def region_slice(params: KerrParams, theta: float) -> RegionSlice:
    """Radial extent ``[r_min, r_max]`` of the photon region at latitude ``theta``."""
    _require_spin(params)
    if not 0.0 <= theta <= math.pi:
        raise DomainError("theta must lie in [0, pi]")
    # the region is symmetric under theta -> pi - theta; evaluate on the
    # northern representative so that both hemispheres agree bit for bit
    th = theta if theta <= 0.5 * math.pi else math.pi - theta
    r_min, r_max, rm = _slice_cached(params.a, params.M, th)
    return RegionSlice(theta, float(r_min), float(r_max), float(rm))


def rbar(params: KerrParams, theta: float, s: float) -> float:
    """Monotone map ``s in [-1, 1] -> [r_min, r_max]`` with ``rbar(theta, 0) = r_m``."""
    if not -1.0 <= s <= 1.0:
        raise DomainError("s must lie in [-1, 1]")
    sl = region_slice(params, theta)
    rm, lo, hi = sl.r_m_at, sl.r_min, sl.r_max
    # exact endpoints keep the boundary radicand from going negative by rounding
    if s == -1.0:
        return lo
    if s == 1.0:
        return hi
    if s < 0.0:
        return float((rm - lo) * s + rm)
    return float(rm * ((hi + lo - rm) / rm) ** (s * s) + (rm - lo) * s)


def rbar_inverse(params: KerrParams, theta: float, r: float) -> float:
    sl = region_slice(params, theta)
    if not sl.r_min <= r <= sl.r_max:
        raise DomainError(f"r={r} outside [{sl.r_min}, {sl.r_max}]")
    if sl.r_min == sl.r_max:
        return 0.0
    lo, hi = bisect(lambda s: rbar(params, theta, s) - r, -1.0, 1.0, xtol=0.0)
    return 0.5 * (lo + hi)


def family_table(params: KerrParams, n: int = 200) -> np.ndarray:
    """Rows ``(r, Phi, Q)`` on ``n`` radii strictly inside ``(r_hat_1, r_hat_2)``."""
    r1, r2 = r_hat_bounds(params)
    r = np.linspace(r1, r2, n + 2)[1:-1]
    return np.column_stack([r, phi_trap(params, r), q_trap(params, r)])
