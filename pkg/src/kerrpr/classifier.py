"""Fate of a photon from its conserved quotients and initial radius.

The classification follows the real-root structure of the scaled radial
quartic: the photon lives in the connected component of ``{R >= 0}`` that
contains ``r0`` and bounces between simple roots.  Bounded motion between
two simple roots in the exterior never occurs (``trapping_inequality`` is
the reason); finding one raises ``RuntimeError``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, KerrError
from .kerr import ConservedQuotients, KerrParams, horizon_radius
from .potentials import (
    polar_admissible,
    radial_deriv,
    radial_eval,
    real_roots,
    scaled_radial_coeffs,
)
from .spherical import phi_trap, q_trap, r_hat_bounds, radius_for_phi

CURVE_TOL = 1e-9


class Fate(enum.Enum):
    TRAPPED_SPHERICAL = "TrappedSpherical"
    FALLS_IN = "FallsIn"
    ESCAPES = "Escapes"
    FORBIDDEN = "Forbidden"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OrbitClass:
    fate: Fate
    turning_points: tuple = ()
    asymptotic: bool = False  # forward orbit creeps towards a spherical orbit

    def __str__(self) -> str:
        return self.fate.value


def trapping_inequality(params: KerrParams, cq: ConservedQuotients):
    """``R(M)/E^2``; non-negative whenever ``Q > 0`` and ``0 <= a < M``.

    Accepts arrays in ``cq.Phi``/``cq.Q``.
    """
    a, M = params.a, params.M
    return M * M * ((cq.Phi - 2.0 * a) ** 2 + M * M - a * a) + (M * M - a * a) * cq.Q


def trapping_inequality_array(a, Phi, Q, M: float = 1.0):
    """Vectorised ``trapping_inequality`` over arrays of spins as well."""
    a = np.asarray(a, dtype=float)
    return M * M * ((Phi - 2.0 * a) ** 2 + M * M - a * a) + (M * M - a * a) * Q


def is_on_trapped_curve(params: KerrParams, cq: ConservedQuotients,
                        tol: float = CURVE_TOL) -> Optional[float]:
    """Radius ``r*`` of the spherical orbit with quotients ``cq``, if any.

    For ``a = 0`` the family collapses to the photon sphere: any
    ``Phi^2 + Q = 27 M^2`` gives ``r* = 3M``.
    """
    M = params.M
    if params.a == 0.0:
        if abs(cq.Phi ** 2 + cq.Q - 27.0 * M * M) <= tol * M * M:
            return 3.0 * M
        return None
    r1, r2 = r_hat_bounds(params)
    f_hi, f_lo = phi_trap(params, r1), phi_trap(params, r2)
    if cq.Phi > f_hi:
        if cq.Phi - f_hi > tol * M:
            return None
        rs = r1
    elif cq.Phi < f_lo:
        if f_lo - cq.Phi > tol * M:
            return None
        rs = r2
    else:
        rs = radius_for_phi(params, cq.Phi)
    if abs(cq.Q - q_trap(params, rs)) <= tol * M * M:
        return rs
    return None


def zero_energy_roots(params: KerrParams, L: float, Qc: float) -> tuple:
    """Turning radii of an E = 0 photon, ``M +- sqrt(M^2 - a^2 Qc/(L^2 + Qc))``."""
    M, a = params.M, params.a
    w = L * L + Qc
    if not w > 0.0:
        raise KerrError("zero-energy roots need L^2 + Qc > 0")
    disc = M * M - a * a * Qc / w
    if disc < 0.0:
        return ()
    sq = math.sqrt(disc)
    return (M - sq, M + sq)


def zero_energy_fate(params: KerrParams, L: float, Qc: float, r0: float) -> OrbitClass:
    """E = 0 photons: allowed set is ``[r-, r+]`` with ``r- < r_h``, so none are trapped."""
    rh = horizon_radius(params)
    if r0 <= rh:
        raise DomainError("r0 must lie outside the horizon")
    roots = zero_energy_roots(params, L, Qc)
    if not roots or not roots[0] <= r0 <= roots[1]:
        return OrbitClass(Fate.FORBIDDEN)
    tp = (roots[1],) if roots[1] > rh else ()
    return OrbitClass(Fate.FALLS_IN, tp)


def classify(params: KerrParams, cq: ConservedQuotients, r0: float, sign_rdot: int = 0,
             tol: float = CURVE_TOL, include_axis: bool = False) -> OrbitClass:
    """Classify the forward orbit of a photon with quotients ``cq`` at radius ``r0``.

    ``sign_rdot`` is the sign of the initial radial velocity; 0 is only
    valid at a root of ``R``.  Orbits that creep towards a spherical orbit
    are flagged ``asymptotic`` and reported with the fate of the
    admissible interval: ``Escapes`` if it is unbounded above, else
    ``FallsIn``.
    """
    M = params.M
    rh = horizon_radius(params)
    if r0 <= rh:
        raise DomainError(f"r0={r0} is not outside the horizon r_h={rh}")
    if sign_rdot not in (-1, 0, 1):
        raise ValueError("sign_rdot must be -1, 0 or +1")
    if not polar_admissible(params, cq, include_axis=include_axis):
        return OrbitClass(Fate.FORBIDDEN)

    rp = scaled_radial_coeffs(params, cq)
    scale = max(M ** 4, r0 ** 4, abs(rp.c2) * r0 * r0, abs(rp.c1) * r0, abs(rp.c0))
    r_tol = 1e-11 * scale
    R0 = radial_eval(rp, r0)
    if R0 < -r_tol:
        return OrbitClass(Fate.FORBIDDEN)

    rs = is_on_trapped_curve(params, cq, tol)
    # Q < 0 photons never stay bounded; Q = 0 only at the equatorial circular orbits
    if rs is not None and cq.Q >= 0.0 and abs(r0 - rs) <= math.sqrt(tol) * M:
        return OrbitClass(Fate.TRAPPED_SPHERICAL, (rs,))

    ms = real_roots(rp, M)
    roots = list(zip(ms.roots, ms.multiplicities))
    at_root = abs(R0) <= r_tol
    turning = []
    if at_root:
        d1 = radial_deriv(rp, r0)
        if abs(d1) <= 1e-9 * scale / max(r0, M):
            raise ValueError("r0 sits on a double root off the trapped family")
        direction = 1 if d1 > 0 else -1
        turning.append(r0)
    else:
        if sign_rdot == 0:
            raise ValueError("sign_rdot = 0 requires r0 to be a root of R")
        direction = sign_rdot

    eps = 1e-9 * max(M, r0)
    pos = r0
    bounces = 0
    while True:
        if direction < 0:
            ahead = [(r, m) for r, m in roots if r < pos - eps]
            nxt = max(ahead, default=None)
            if nxt is None or nxt[0] <= rh:
                return OrbitClass(Fate.FALLS_IN, tuple(turning))
        else:
            ahead = [(r, m) for r, m in roots if r > pos + eps]
            nxt = min(ahead, default=None)
            if nxt is None:
                return OrbitClass(Fate.ESCAPES, tuple(turning))
        r_next, mult = nxt
        if mult % 2 == 0:
            # creeping approach to a double root; classify by the far end
            turning.append(r_next)
            if r_next > r0:
                below = [r for r, _ in roots if r < r0 - eps]
                lo = max(below, default=-math.inf)
                fate = Fate.FALLS_IN if lo <= rh else None
            else:
                above = [r for r, _ in roots if r > r0 + eps]
                fate = Fate.ESCAPES if not above else None
            if fate is None:
                raise RuntimeError(
                    f"bounded orbit between {r0} and double root {r_next}; "
                    "this contradicts the trapping inequality")
            return OrbitClass(fate, tuple(turning), asymptotic=True)
        turning.append(r_next)
        bounces += 1
        if bounces >= 2 or (at_root and bounces >= 1):
            raise RuntimeError(
                f"bounded non-spherical photon between turning points {sorted(turning)}")
        direction = -direction
        pos = r_next
