"""Small numerical helpers: Richardson-extrapolated differences and bisection."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np


def central_difference(f: Callable, x: float, h: float):
    """Central difference of ``f`` at ``x`` with one Richardson level.

    ``f`` may return a scalar or an array.  The error is O(h^4) plus
    rounding of order eps/h.
    """
    d1 = (np.asarray(f(x + h)) - np.asarray(f(x - h))) / (2.0 * h)
    h2 = 0.5 * h
    d2 = (np.asarray(f(x + h2)) - np.asarray(f(x - h2))) / (2.0 * h2)
    return (4.0 * d2 - d1) / 3.0


def jacobian(f: Callable, x, step: float = 1e-6, scale=None) -> np.ndarray:
    """Jacobian of ``f: R^n -> R^m`` by Richardson central differences.

    ``scale`` (length n) sets a per-direction step multiplier; the step in
    direction i is ``step * scale[i]``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if scale is None:
        scale = np.maximum(1.0, np.abs(x))
    cols = []
    for i in range(n):
        def fi(xi, i=i):
            y = x.copy()
            y[i] = xi
            return np.asarray(f(y), dtype=float)

        cols.append(central_difference(fi, x[i], step * float(scale[i])))
    return np.column_stack(cols)


def bisect(f: Callable[[float], float], lo: float, hi: float,
           xtol: float = 1e-12, maxiter: int = 200):
    """Bisection on a sign change of ``f`` in ``[lo, hi]``.

    Returns the final bracket ``(a, b)`` with ``f(a)`` and ``f(b)`` of the
    original endpoint signs, so callers can pick the side they need.
    """
    fa = f(lo)
    fb = f(hi)
    if fa == 0.0:
        return lo, lo
    if fb == 0.0:
        return hi, hi
    if (fa > 0) == (fb > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    a, b = lo, hi
    for _ in range(maxiter):
        if abs(b - a) <= xtol:
            break
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = f(m)
        if fm == 0.0:
            return m, m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return a, b


def wrap_angle(u: float) -> float:
    """Representative of ``u`` modulo 2*pi in [-pi, pi)."""
    return (u + math.pi) % (2.0 * math.pi) - math.pi
