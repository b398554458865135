"""Compiled kernels for null geodesic integration.

State layout ``y = [t, r, q1, q2, p_t, p_r, k1, k2]``.  In the Boyer-Lindquist
chart ``(q1, q2) = (theta, phi)`` and ``(k1, k2) = (p_theta, p_phi)``; in the
axis chart ``(q1, q2) = (x, y)`` with ``x + i y = r sin(theta) e^{i phi}`` and
``(k1, k2)`` the matching covariant components.  ``chart`` is 0 for
Boyer-Lindquist and +1/-1 for the axis chart on the northern/southern cap.

The vector field is the Hamiltonian flow of ``N = rho^2 g^{-1}(p, p)``
divided by ``2 rho^2``.  On the null cone it coincides with the geodesic
flow of ``H = g^{-1}(p, p)/2``; off it, it still preserves ``N`` exactly,
which keeps the null shell invariant under the flow.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

BL = 0
SWITCH_TO_AXIS = 0.005
SWITCH_TO_BL = 0.02
CSTEP = 1e-30

ST_HORIZON = 0
ST_ESCAPE = 1
ST_BUDGET = 2
ST_UNDERFLOW = 3
ST_MAXSTEPS = 4
ST_NONFINITE = 5


@njit(cache=True)
def bl_rhs(a, M, y, out):
    r, th = y[1], y[2]
    E = -y[4]
    pr, pth, L = y[5], y[6], y[7]
    S, C = math.sin(th), math.cos(th)
    r2a2 = r * r + a * a
    rho2 = r * r + a * a * C * C
    D = r * r - 2.0 * M * r + a * a
    K = r2a2 * E - a * L
    W = L / S - a * E * S
    out[0] = (K * r2a2 / D + a * S * W) / rho2
    out[1] = D * pr / rho2
    out[2] = pth / rho2
    out[3] = (a * K / D + W / S) / rho2
    out[4] = 0.0
    dD = 2.0 * r - 2.0 * M
    dNr = dD * pr * pr - 4.0 * r * E * K / D + K * K * dD / (D * D)
    out[5] = -dNr / (2.0 * rho2)
    dW = -L * C / (S * S) - a * E * C
    out[6] = -W * dW / rho2
    out[7] = 0.0


@njit(cache=True)
def bl_N(a, M, y):
    r, th = y[1], y[2]
    E = -y[4]
    L = y[7]
    S = math.sin(th)
    D = r * r - 2.0 * M * r + a * a
    K = (r * r + a * a) * E - a * L
    W = L / S - a * E * S
    return D * y[5] ** 2 + y[6] ** 2 + W * W - K * K / D


@njit(cache=True)
def axis_N(a, M, r, x, yy, pt, pr, px, py):
    """``rho^2 g^{-1}(p, p)`` in the axis chart; analytic in all arguments."""
    S2 = (x * x + yy * yy) / (r * r)
    D = r * r - 2.0 * M * r + a * a
    wp = x * px + yy * py
    vp = pr + wp / r
    lp = -yy * px + x * py
    kp = -(r * r + a * a) * pt - a * lp
    return (D * vp * vp + r * r * (px * px + py * py) - wp * wp
            + 2.0 * a * pt * lp + a * a * S2 * pt * pt - kp * kp / D)


@njit(cache=True)
def axis_rhs(a, M, y, out):
    r, x, yy = y[1], y[2], y[3]
    pt, pr, px, py = y[4], y[5], y[6], y[7]
    S2 = (x * x + yy * yy) / (r * r)
    rho2 = r * r + a * a * (1.0 - S2)
    h = CSTEP
    ih = 1j * h
    dr = axis_N(a, M, r + ih, x + 0j, yy + 0j, pt + 0j, pr + 0j, px + 0j, py + 0j).imag / h
    dx = axis_N(a, M, r + 0j, x + ih, yy + 0j, pt + 0j, pr + 0j, px + 0j, py + 0j).imag / h
    dy = axis_N(a, M, r + 0j, x + 0j, yy + ih, pt + 0j, pr + 0j, px + 0j, py + 0j).imag / h
    dpt = axis_N(a, M, r + 0j, x + 0j, yy + 0j, pt + ih, pr + 0j, px + 0j, py + 0j).imag / h
    dpr = axis_N(a, M, r + 0j, x + 0j, yy + 0j, pt + 0j, pr + ih, px + 0j, py + 0j).imag / h
    dpx = axis_N(a, M, r + 0j, x + 0j, yy + 0j, pt + 0j, pr + 0j, px + ih, py + 0j).imag / h
    dpy = axis_N(a, M, r + 0j, x + 0j, yy + 0j, pt + 0j, pr + 0j, px + 0j, py + ih).imag / h
    s = 0.5 / rho2
    out[0] = dpt * s
    out[1] = dpr * s
    out[2] = dpx * s
    out[3] = dpy * s
    out[4] = 0.0
    out[5] = -dr * s
    out[6] = -dx * s
    out[7] = -dy * s


@njit(cache=True)
def state_rhs(a, M, chart, y, out):
    if chart == BL:
        bl_rhs(a, M, y, out)
    else:
        axis_rhs(a, M, y, out)


@njit(cache=True)
def sin2_of(chart, y):
    if chart == BL:
        s = math.sin(y[2])
        return s * s
    return (y[2] * y[2] + y[3] * y[3]) / (y[1] * y[1])


@njit(cache=True)
def bl_to_axis(y, out):
    """Boyer-Lindquist to axis chart; returns the hemisphere sign."""
    r, th, ph = y[1], y[2], y[3]
    S, C = math.sin(th), math.cos(th)
    cp, sp = math.cos(ph), math.sin(ph)
    alpha = y[6] / (r * C)
    beta = y[7] / (r * S)
    out[0] = y[0]
    out[1] = r
    out[2] = r * S * cp
    out[3] = r * S * sp
    out[4] = y[4]
    out[5] = y[5] - S * alpha
    out[6] = cp * alpha - sp * beta
    out[7] = sp * alpha + cp * beta
    return 1 if C >= 0.0 else -1


@njit(cache=True)
def axis_to_bl(y, hemi, out):
    r, x, yy = y[1], y[2], y[3]
    rs = math.sqrt(x * x + yy * yy)
    S = rs / r
    C = hemi * math.sqrt(max(0.0, 1.0 - S * S))
    th = math.atan2(rs, hemi * math.sqrt(max(0.0, r * r - rs * rs)))
    ph = math.atan2(yy, x)
    cp, sp = math.cos(ph), math.sin(ph)
    alpha = cp * y[6] + sp * y[7]
    beta = -sp * y[6] + cp * y[7]
    out[0] = y[0]
    out[1] = r
    out[2] = th
    out[3] = ph
    out[4] = y[4]
    out[5] = y[5] + S * alpha
    out[6] = r * C * alpha
    out[7] = r * S * beta


# Dormand-Prince 5(4) tableau with Hairer's dense-output weights
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
A71, A73, A74, A75, A76 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
D1, D3, D4, D5, D6, D7 = (-12715105075.0 / 11282082432.0, 87487479700.0 / 32700410799.0,
                          -10690763975.0 / 1880347072.0, 701980252875.0 / 199316789632.0,
                          -1453857185.0 / 822651844.0, 69997945.0 / 29380423.0)


@njit(cache=True)
def dp_step(a, M, chart, y, k1, h, ynew, k2, k3, k4, k5, k6, k7, ytmp, err):
    n = 8
    for i in range(n):
        ytmp[i] = y[i] + h * A21 * k1[i]
    state_rhs(a, M, chart, ytmp, k2)
    for i in range(n):
        ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
    state_rhs(a, M, chart, ytmp, k3)
    for i in range(n):
        ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
    state_rhs(a, M, chart, ytmp, k4)
    for i in range(n):
        ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
    state_rhs(a, M, chart, ytmp, k5)
    for i in range(n):
        ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i]
                              + A65 * k5[i])
    state_rhs(a, M, chart, ytmp, k6)
    for i in range(n):
        ynew[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i]
                              + A76 * k6[i])
    state_rhs(a, M, chart, ynew, k7)
    for i in range(n):
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                      + E7 * k7[i])


@njit(cache=True)
def error_norm(y, ynew, err, tol):
    # componentwise bound: every entry of the local error is within tol
    s = 0.0
    for i in range(8):
        sc = tol + tol * max(abs(y[i]), abs(ynew[i]))
        s = max(s, abs(err[i]) / sc)
    return s


@njit(cache=True)
def dense_eval(y, ynew, k1, k3, k4, k5, k6, k7, h, th, out):
    for i in range(8):
        yd = ynew[i] - y[i]
        bs = h * k1[i] - yd
        r4 = yd - h * k7[i] - bs
        r5 = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
        out[i] = y[i] + th * (yd + (1.0 - th) * (bs + th * (r4 + (1.0 - th) * r5)))


@njit(cache=True)
def event_values(chart, y, r_shell, r_esc, g):
    g[0] = y[1] - r_shell
    g[1] = y[1] - r_esc
    s2 = sin2_of(chart, y)
    if chart == BL:
        g[2] = s2 - SWITCH_TO_AXIS
    else:
        g[2] = s2 - SWITCH_TO_BL


@njit(cache=True)
def _triggered(chart, g_old, g_new):
    # horizon shell: inward; escape: outward; chart switch in the relevant direction
    t0 = g_old[0] > 0.0 and g_new[0] <= 0.0
    t1 = g_old[1] < 0.0 and g_new[1] >= 0.0
    if chart == BL:
        t2 = g_old[2] >= 0.0 and g_new[2] < 0.0
    else:
        t2 = g_old[2] <= 0.0 and g_new[2] > 0.0
    return t0, t1, t2


@njit(cache=True)
def integrate_kernel(a, M, y0, chart0, lam_end, tol, r_shell, r_esc, h0,
                     max_samples, max_steps):
    """Adaptive DP5(4) with dense event location.

    Returns ``(lam_s, y_s, chart_s, n, status, lam, y, chart, steps)``.
    """
    y = y0.copy()
    chart = chart0
    ynew = np.empty(8)
    ytmp = np.empty(8)
    yev = np.empty(8)
    yconv = np.empty(8)
    k1 = np.empty(8)
    k2 = np.empty(8)
    k3 = np.empty(8)
    k4 = np.empty(8)
    k5 = np.empty(8)
    k6 = np.empty(8)
    k7 = np.empty(8)
    err = np.empty(8)
    g_old = np.empty(3)
    g_new = np.empty(3)
    lam_s = np.empty(max_samples)
    y_s = np.empty((max_samples, 8))
    chart_s = np.empty(max_samples, dtype=np.int64)
    n = 0
    stride = 1
    count = 0

    if chart == BL and sin2_of(chart, y) < SWITCH_TO_AXIS:
        chart = bl_to_axis(y, yconv)
        y[:] = yconv

    lam = 0.0
    lam_s[0] = lam
    y_s[0, :] = y
    chart_s[0] = chart
    n = 1
    state_rhs(a, M, chart, y, k1)
    h = min(h0, lam_end)
    status = ST_BUDGET
    steps = 0
    while lam < lam_end:
        if steps >= max_steps:
            status = ST_MAXSTEPS
            break
        if h < 1e-14 * max(1.0, abs(lam)):
            status = ST_UNDERFLOW
            break
        last = False
        if lam + h >= lam_end:
            h = lam_end - lam
            last = True
        dp_step(a, M, chart, y, k1, h, ynew, k2, k3, k4, k5, k6, k7, ytmp, err)
        en = error_norm(y, ynew, err, tol)
        if not math.isfinite(en):
            h *= 0.2
            steps += 1
            continue
        if en > 1.0:
            h *= max(0.2, 0.9 * en ** -0.2)
            steps += 1
            continue
        steps += 1
        event_values(chart, y, r_shell, r_esc, g_old)
        event_values(chart, ynew, r_shell, r_esc, g_new)
        t0, t1, t2 = _triggered(chart, g_old, g_new)
        hit = -1
        if t0 or t1 or t2:
            # locate the earliest crossing on the dense output
            best = 2.0
            for e in range(3):
                fired = t0 if e == 0 else (t1 if e == 1 else t2)
                if not fired:
                    continue
                lo, hi = 0.0, 1.0
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    dense_eval(y, ynew, k1, k3, k4, k5, k6, k7, h, mid, yev)
                    event_values(chart, yev, r_shell, r_esc, g_new)
                    gt0, gt1, gt2 = _triggered(chart, g_old, g_new)
                    if (gt0 if e == 0 else (gt1 if e == 1 else gt2)):
                        hi = mid
                    else:
                        lo = mid
                if hi < best:
                    best = hi
                    hit = e
            h_ev = best * h
            dp_step(a, M, chart, y, k1, h_ev, ynew, k2, k3, k4, k5, k6, k7, ytmp, err)
            h_used = h_ev
            last = False
        else:
            h_used = h
        lam = lam_end if last else lam + h_used
        for i in range(8):
            y[i] = ynew[i]
            k1[i] = k7[i]
        finite = True
        for i in range(8):
            if not math.isfinite(y[i]):
                finite = False
        if not finite:
            status = ST_NONFINITE
            break

        count += 1
        if count % stride == 0:
            if n == max_samples:
                # keep every other sample and halve the recording rate
                m = 0
                for j in range(0, n, 2):
                    lam_s[m] = lam_s[j]
                    y_s[m, :] = y_s[j, :]
                    chart_s[m] = chart_s[j]
                    m += 1
                n = m
                stride *= 2
            lam_s[n] = lam
            y_s[n, :] = y
            chart_s[n] = chart
            n += 1

        if hit == 0:
            status = ST_HORIZON
            break
        if hit == 1:
            status = ST_ESCAPE
            break
        if hit == 2:
            if chart == BL:
                chart = bl_to_axis(y, yconv)
            else:
                axis_to_bl(y, chart, yconv)
                chart = BL
            y[:] = yconv
            state_rhs(a, M, chart, y, k1)
            continue
        if en == 0.0:
            fac = 5.0
        else:
            fac = min(5.0, max(0.2, 0.9 * en ** -0.2))
        h = h_used * fac
        if last:
            status = ST_BUDGET
            break

    # make sure the final state is the last sample
    if n == 0 or lam_s[n - 1] != lam:
        if n == max_samples:
            n -= 1
        lam_s[n] = lam
        y_s[n, :] = y
        chart_s[n] = chart
        n += 1
    return lam_s, y_s, chart_s, n, status, lam, y, chart, steps
