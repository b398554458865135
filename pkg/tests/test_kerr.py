import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrpr.errors import ChartDomainError, ChartMismatchError, KerrError, ZeroEnergyError
from kerrpr.kerr import (
    AxisPoint,
    BLPoint,
    Covec4,
    KerrParams,
    MotionConstants,
    Vec4,
    axis_chart,
    axis_transform_vec,
    conserved_quotients,
    covector_constants,
    horizon_radius,
    inverse_metric,
    lower,
    metric,
    raise_,
    scalars,
    umbilicity_defect,
)

spins = st.floats(0.0, 0.99)
radii = st.floats(2.05, 30.0)
lats = st.floats(0.05, math.pi - 0.05)
comps = st.floats(-3.0, 3.0)


def test_params_reject_extremal_and_negative_spin():
    with pytest.raises(KerrError):
        KerrParams(1.0)
    with pytest.raises(KerrError):
        KerrParams(-0.1)
    with pytest.raises(KerrError):
        KerrParams(0.1, 0.0)


def test_horizon_radius_schwarzschild_and_kerr():
    assert horizon_radius(KerrParams(0.0)) == 2.0
    assert horizon_radius(KerrParams(0.6)) == pytest.approx(1.8)


@given(spins, radii, lats)
def test_inverse_metric_is_inverse(a, r, th):
    p = KerrParams(a)
    pt = BLPoint(0.0, r, th, 0.3)
    prod = metric(p, pt) @ inverse_metric(p, pt)
    assert np.allclose(prod, np.eye(4), atol=1e-11)


def test_metric_matches_high_precision_oracle():
    mp.mp.dps = 40
    a, r, th = mp.mpf("0.7"), mp.mpf("3.3"), mp.mpf("1.1")
    S, C = mp.sin(th), mp.cos(th)
    rho2 = r ** 2 + a ** 2 * C ** 2
    D = r ** 2 - 2 * r + a ** 2
    A = (r ** 2 + a ** 2) ** 2 - D * a ** 2 * S ** 2
    ref = {(0, 0): -(1 - 2 * r / rho2), (1, 1): rho2 / D, (2, 2): rho2,
           (0, 3): -2 * r * a * S ** 2 / rho2, (3, 3): A * S ** 2 / rho2}
    g = metric(KerrParams(0.7), BLPoint(0.0, 3.3, 1.1, 0.0))
    for (i, j), v in ref.items():
        assert g[i, j] == pytest.approx(float(v), rel=1e-14, abs=1e-15)


@given(spins, radii, lats, comps, comps, comps, comps)
def test_lower_raise_round_trip(a, r, th, u0, u1, u2, u3):
    p = KerrParams(a)
    pt = BLPoint(0.0, r, th, 0.0)
    v = Vec4((u0, u1, u2, u3))
    back = raise_(p, pt, lower(p, pt, v))
    assert np.allclose(back.array(), v.array(), atol=1e-10 * (1 + np.abs(v.array()).max()))


def test_chart_tags_are_enforced():
    p = KerrParams(0.5)
    pt = BLPoint(0.0, 4.0, 0.4, 0.0)
    with pytest.raises(ChartMismatchError):
        lower(p, pt, Vec4((1, 0, 0, 0), "axis+"))


def test_bl_chart_degenerate_on_axis():
    with pytest.raises(ChartDomainError):
        metric(KerrParams(0.5), BLPoint(0.0, 4.0, 0.0, 0.0))


@given(spins, radii, st.floats(0.05, 1.5), st.floats(-3.0, 3.0), comps, comps, comps, comps)
def test_axis_chart_preserves_norm_and_constants(a, r, th, phi, p0, p1, p2, p3):
    p = KerrParams(a)
    pt = BLPoint(0.0, r, th, phi)
    cov = Covec4((p0, p1, p2, p3))
    ax = axis_chart(p, pt)
    cov_ax = axis_transform_vec(p, pt, cov)
    n_bl = cov.array() @ inverse_metric(p, pt) @ cov.array()
    n_ax = cov_ax.array() @ inverse_metric(p, ax) @ cov_ax.array()
    assert n_ax == pytest.approx(n_bl, rel=1e-9, abs=1e-9)
    c_bl = covector_constants(p, pt, cov)
    c_ax = covector_constants(p, ax, cov_ax)
    for f in ("E", "L", "Qc", "q"):
        assert getattr(c_ax, f) == pytest.approx(getattr(c_bl, f), rel=1e-8, abs=1e-8)


@given(spins, radii, st.floats(0.05, 3.0), st.floats(-3.0, 3.0))
def test_axis_chart_point_round_trip(a, r, th, phi):
    p = KerrParams(a)
    if abs(math.cos(th)) < 1e-3:
        return
    back = axis_chart(p, axis_chart(p, BLPoint(1.0, r, th, phi)), "backward")
    assert back.theta == pytest.approx(th, abs=1e-12)
    assert math.cos(back.phi - phi) == pytest.approx(1.0, abs=1e-12)


def test_axis_chart_regular_on_axis():
    p = KerrParams(0.5)
    gi = inverse_metric(p, AxisPoint(0.0, 4.0, 0.0, 0.0, 1))
    assert np.all(np.isfinite(gi))


def test_conserved_quotients_need_energy():
    with pytest.raises(ZeroEnergyError):
        conserved_quotients(MotionConstants(0.0, 0.0, 1.0, 2.0))
    cq = conserved_quotients(MotionConstants(0.0, 2.0, 3.0, 8.0))
    assert (cq.Phi, cq.Q) == (1.5, 2.0)


def test_scalars_sigma_identity():
    sb = scalars(KerrParams(0.8), 3.0, 0.9)
    # Acal = (r^2 + a^2) rho^2 + 2 M r a^2 S^2
    assert sb.Acal == pytest.approx((9.64) * sb.rho2 + 2 * 3.0 * 0.64 * sb.S ** 2, rel=1e-14)


def test_umbilicity_photon_sphere_only():
    p0 = KerrParams(0.0)
    assert umbilicity_defect(p0, 3.0, 1.0) <= 1e-8
    assert umbilicity_defect(p0, 2.5, 1.0) > 1e-3
    assert umbilicity_defect(p0, 4.0, 1.0) > 1e-3


@given(st.floats(0.05, 0.95), st.floats(2.2, 6.0), st.floats(0.2, 1.5))
def test_umbilicity_defect_positive_with_spin(a, r, th):
    p = KerrParams(a)
    if r <= horizon_radius(p) + 0.05:
        return
    assert umbilicity_defect(p, r, th) > 0.0
