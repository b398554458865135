import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrpr.errors import DomainError, UndefinedFamilyError
from kerrpr.kerr import ConservedQuotients, KerrParams
from kerrpr.potentials import radial_deriv, radial_eval, scaled_radial_coeffs
from kerrpr.spherical import (
    family_table,
    phi_trap,
    polar_on_family,
    q_trap,
    r_hat_bounds,
    r_m,
    radius_for_phi,
    rbar,
    rbar_inverse,
    region_slice,
)

spins = st.floats(0.01, 0.99)


@given(spins, st.floats(0.001, 0.999))
def test_family_makes_double_root(a, frac):
    p = KerrParams(a)
    r1, r2 = r_hat_bounds(p)
    r = r1 + frac * (r2 - r1)
    rp = scaled_radial_coeffs(p, ConservedQuotients(phi_trap(p, r), q_trap(p, r)))
    # Phi_trap loses digits like 1/a, so the bound scales with the largest term
    terms = max(r ** 4, abs(rp.c2) * r * r, abs(rp.c1) * r, abs(rp.c0))
    assert abs(radial_eval(rp, r)) <= 1e-13 * terms / a
    assert abs(radial_deriv(rp, r)) <= 1e-12 * terms / (a * r)


def test_family_values_against_mpmath():
    mp.mp.dps = 50
    a, r = mp.mpf("0.9"), mp.mpf("2.7")
    Phi = -(r ** 3 - 3 * r ** 2 + a ** 2 * r + a ** 2) / (a * (r - 1))
    Q = -r ** 3 * (r ** 3 - 6 * r ** 2 + 9 * r - 4 * a ** 2) / (a ** 2 * (r - 1) ** 2)
    p = KerrParams(0.9)
    assert phi_trap(p, 2.7) == pytest.approx(float(Phi), rel=1e-13)
    assert q_trap(p, 2.7) == pytest.approx(float(Q), rel=1e-13)


@given(spins)
def test_r3_substitution(a):
    p = KerrParams(a)
    assert phi_trap(p, 3.0) == pytest.approx(-2 * a, abs=1e-13)
    assert q_trap(p, 3.0) == pytest.approx(27.0, rel=1e-13)


@given(spins)
def test_endpoints_are_equatorial(a):
    p = KerrParams(a)
    r1, r2 = r_hat_bounds(p)
    assert 1.0 <= r1 < 3.0 < r2 <= 4.0
    assert abs(q_trap(p, r1)) < 1e-9 and abs(q_trap(p, r2)) < 1e-9


@given(spins)
def test_r_m_is_zero_angular_momentum(a):
    p = KerrParams(a)
    assert abs(phi_trap(p, r_m(p))) < 1e-10


@given(spins)
def test_phi_trap_monotone(a):
    p = KerrParams(a)
    rows = family_table(p, 50)
    assert np.all(np.diff(rows[:, 1]) < 0)


def test_family_undefined_without_spin():
    with pytest.raises(UndefinedFamilyError):
        phi_trap(KerrParams(0.0), 3.0)


@given(spins, st.floats(-1, 1))
def test_radius_for_phi_inverts(a, t):
    p = KerrParams(a)
    r1, r2 = r_hat_bounds(p)
    r = 0.5 * (r1 + r2) + 0.5 * t * (r2 - r1) * 0.999
    assert radius_for_phi(p, phi_trap(p, r)) == pytest.approx(r, abs=1e-9)


@given(spins, st.floats(0.01, math.pi - 0.01))
def test_region_slice_boundaries(a, th):
    p = KerrParams(a)
    sl = region_slice(p, th)
    assert sl.r_min <= sl.r_m_at <= sl.r_max
    C = math.cos(th)
    for r in (sl.r_min, sl.r_max):
        scale = max(1.0, q_trap(p, r), phi_trap(p, r) ** 2)
        assert polar_on_family(p, r, C) >= -1e-12 * scale
    # just outside the slice the polar potential goes negative
    r1, r2 = r_hat_bounds(p)
    if sl.r_max < r2 - 1e-6:
        assert polar_on_family(p, sl.r_max + 1e-6, C) < 0


def test_region_slice_equator_and_pole():
    p = KerrParams(0.5)
    r1, r2 = r_hat_bounds(p)
    sl = region_slice(p, 0.5 * math.pi)
    assert sl.r_min == pytest.approx(r1, abs=1e-14)
    assert sl.r_max == pytest.approx(r2, abs=1e-14)
    pole = region_slice(p, 0.0)
    assert pole.r_min == pole.r_max == r_m(p)


@given(spins, st.floats(0.02, math.pi - 0.02), st.floats(-1, 1))
def test_rbar_round_trip(a, th, s):
    p = KerrParams(a)
    r = rbar(p, th, s)
    assert rbar_inverse(p, th, r) == pytest.approx(s, abs=1e-10)


@given(spins, st.floats(0.02, math.pi - 0.02))
def test_rbar_monotone_with_centre(a, th):
    p = KerrParams(a)
    ss = np.linspace(-1, 1, 41)
    rr = [rbar(p, th, s) for s in ss]
    assert np.all(np.diff(rr) >= 0)
    assert rbar(p, th, 0.0) == pytest.approx(r_m(p), abs=1e-12)


def test_rbar_rejects_bad_s():
    with pytest.raises(DomainError):
        rbar(KerrParams(0.5), 1.0, 1.5)
