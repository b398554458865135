"""Radial quartic R(r) and polar potential, plain and scaled by E^2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kerr import ConservedQuotients, KerrParams, MotionConstants

CLUSTER_TOL = 1e-7  # in units of M
IMAG_TOL = 1e-7     # eigenvalue pairs closer than this to the real line count as real


@dataclass(frozen=True)
class RadialPotential:
    """Coefficients ``c4 r^4 + c3 r^3 + c2 r^2 + c1 r + c0``."""

    c4: float
    c3: float
    c2: float
    c1: float
    c0: float
    scaled: bool = False

    @property
    def coeffs(self) -> tuple:
        return (self.c4, self.c3, self.c2, self.c1, self.c0)


@dataclass(frozen=True)
class RootMultiset:
    roots: tuple          # distinct real roots, ascending
    multiplicities: tuple
    complex_pairs: int

    def __post_init__(self):
        if sum(self.multiplicities) + 2 * self.complex_pairs != 4:
            raise ValueError("root multiplicities must add up to 4")

    def expanded(self) -> list:
        out = []
        for r, m in zip(self.roots, self.multiplicities):
            out.extend([r] * m)
        return out


def radial_coeffs(params: KerrParams, mc: MotionConstants) -> RadialPotential:
    a, M = params.a, params.M
    E, L, Qc = mc.E, mc.L, mc.Qc
    return RadialPotential(
        E * E, 0.0, a * a * E * E - L * L - Qc,
        2.0 * M * ((a * E - L) ** 2 + Qc), -a * a * Qc, scaled=False)


def scaled_radial_coeffs(params: KerrParams, cq: ConservedQuotients) -> RadialPotential:
    a, M = params.a, params.M
    Phi, Q = cq.Phi, cq.Q
    return RadialPotential(
        1.0, 0.0, a * a - Phi * Phi - Q, 2.0 * M * ((a - Phi) ** 2 + Q), -a * a * Q, scaled=True)


def radial_eval(rp: RadialPotential, r):
    c4, c3, c2, c1, c0 = rp.coeffs
    return (((c4 * r + c3) * r + c2) * r + c1) * r + c0


def radial_deriv(rp: RadialPotential, r):
    c4, c3, c2, c1, _ = rp.coeffs
    return ((4.0 * c4 * r + 3.0 * c3) * r + 2.0 * c2) * r + c1


def radial_second_deriv(rp: RadialPotential, r):
    c4, c3, c2, _, _ = rp.coeffs
    return (12.0 * c4 * r + 6.0 * c3) * r + 2.0 * c2


def polar_eval(params: KerrParams, cq: ConservedQuotients, C):
    """Scaled polar potential in ``C = cos(theta)``: ``Q - (Q + Phi^2 - a^2) C^2 - a^2 C^4``.

    This is ``sin^2(theta) * Theta / E^2``, the right-hand side for ``(rho^2 dC/ds / E)^2``.
    """
    a = params.a
    C2 = C * C
    return cq.Q - (cq.Q + cq.Phi ** 2 - a * a) * C2 - a * a * C2 * C2


def theta_potential(params: KerrParams, mc: MotionConstants, theta: float) -> float:
    """Unscaled ``Theta(theta) = Qc - (L^2/S^2 - E^2 a^2) C^2``."""
    S, C = math.sin(theta), math.cos(theta)
    return mc.Qc - (mc.L ** 2 / (S * S) - mc.E ** 2 * params.a ** 2) * C * C


def polar_roots(params: KerrParams, cq: ConservedQuotients) -> list:
    """Roots ``u = C^2`` of the scaled polar potential that lie in ``[0, 1]``."""
    a = params.a
    A = -a * a
    B = -(cq.Q + cq.Phi ** 2 - a * a)
    c = cq.Q
    if A == 0.0:
        us = [] if B == 0.0 else [-c / B]
    else:
        disc = B * B - 4.0 * A * c
        if disc < 0.0:
            return []
        sq = math.sqrt(disc)
        # stable quadratic formula
        qq = -0.5 * (B + math.copysign(sq, B))
        us = [qq / A]
        if qq != 0.0:
            us.append(c / qq)
        elif c == 0.0:
            us.append(0.0)
    return sorted(u for u in us if -1e-15 <= u <= 1.0 + 1e-15)


def polar_admissible(params: KerrParams, cq: ConservedQuotients, tol: float = 1e-14,
                     include_axis: bool = False) -> bool:
    """Whether the scaled polar potential is non-negative somewhere off the axis.

    The potential is concave in ``u = C^2``, so its supremum over ``[0, 1)``
    is attained at ``u = 0`` or at the vertex.  With ``include_axis`` the
    axis point ``u = 1`` is allowed too.
    """
    a = params.a
    scale = max(1.0, abs(cq.Q), cq.Phi ** 2, a * a)
    f = lambda u: cq.Q - (cq.Q + cq.Phi ** 2 - a * a) * u - a * a * u * u
    best = f(0.0)
    if a > 0.0:
        uv = -(cq.Q + cq.Phi ** 2 - a * a) / (2.0 * a * a)
        if 0.0 < uv < 1.0:
            best = max(best, f(uv))
    if include_axis:
        best = max(best, f(1.0))
    return best >= -tol * scale


def _polish(coeffs, x, steps=2):
    p = np.poly1d(coeffs)
    dp = p.deriv()
    for _ in range(steps):
        d = dp(x)
        if d == 0.0:
            break
        x_new = x - p(x) / d
        if not math.isfinite(x_new) or abs(p(x_new)) > abs(p(x)):
            break
        x = x_new
    return x


def real_roots(rp: RadialPotential, M: float = 1.0) -> RootMultiset:
    """Real roots of the quartic with multiplicities.

    Companion-matrix eigenvalues, two Newton polishing steps on each simple
    real root, and clustering of roots closer than ``1e-7 M``.  Complex
    pairs within ``1e-7 M`` of the real axis are split double roots and are
    merged into one real root of multiplicity 2.
    """
    coeffs = np.array(rp.coeffs, dtype=float)
    if coeffs[0] == 0.0:
        raise ValueError("leading coefficient must be non-zero")
    eig = np.roots(coeffs)
    real_vals = []
    pairs = 0
    used = np.zeros(len(eig), dtype=bool)
    for i, z in enumerate(eig):
        if used[i]:
            continue
        used[i] = True
        if abs(z.imag) <= IMAG_TOL * M:
            if z.imag != 0.0:
                # consume the conjugate partner as well
                j = _partner(eig, used, z)
                if j is not None:
                    used[j] = True
                    real_vals.extend([z.real, z.real])
                    continue
            real_vals.append(z.real)
        else:
            j = _partner(eig, used, z)
            if j is not None:
                used[j] = True
            pairs += 1
    real_vals.sort()
    clusters = []
    for v in real_vals:
        if clusters and abs(v - clusters[-1][-1]) <= CLUSTER_TOL * M:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    roots, mults = [], []
    for cl in clusters:
        x = float(np.mean(cl))
        if len(cl) == 1:
            x = _polish(coeffs, x)
        else:
            # a multiple root is a simple root of the derivative
            x = _polish(np.polyder(coeffs, len(cl) - 1), x)
        roots.append(x)
        mults.append(len(cl))
    return RootMultiset(tuple(roots), tuple(mults), pairs)


def _partner(eig, used, z):
    best, best_d = None, math.inf
    for j, w in enumerate(eig):
        if used[j]:
            continue
        d = abs(w - z.conjugate())
        if d < best_d:
            best, best_d = j, d
    return best
