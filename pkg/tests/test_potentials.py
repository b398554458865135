import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrpr.kerr import ConservedQuotients, KerrParams, MotionConstants
from kerrpr.potentials import (
    RootMultiset,
    polar_admissible,
    polar_eval,
    polar_roots,
    radial_coeffs,
    radial_deriv,
    radial_eval,
    real_roots,
    scaled_radial_coeffs,
    theta_potential,
)


def direct_R(a, M, E, L, Qc, r):
    D = r * r - 2 * M * r + a * a
    K = (r * r + a * a) * E - a * L
    return K * K - D * (Qc + (L - a * E) ** 2)


@given(st.floats(0, 0.99), st.floats(0.1, 3), st.floats(-8, 8), st.floats(-5, 40), st.floats(1.5, 20))
def test_coefficients_match_direct_form(a, E, L, Qc, r):
    p = KerrParams(a)
    rp = radial_coeffs(p, MotionConstants(0.0, E, L, Qc))
    ref = direct_R(a, 1.0, E, L, Qc, r)
    assert radial_eval(rp, r) == pytest.approx(ref, rel=1e-10, abs=1e-9 * max(1, r ** 4))


@given(st.floats(0, 0.99), st.floats(0.2, 3), st.floats(-8, 8), st.floats(-5, 40), st.floats(1.5, 20))
def test_scaled_potential_is_R_over_E2(a, E, Phi, Q, r):
    p = KerrParams(a)
    full = radial_eval(radial_coeffs(p, MotionConstants(0.0, E, Phi * E, Q * E * E)), r)
    scaled = radial_eval(scaled_radial_coeffs(p, ConservedQuotients(Phi, Q)), r)
    assert full / (E * E) == pytest.approx(scaled, rel=1e-9, abs=1e-8 * r ** 4)


def test_derivative_against_difference():
    rp = scaled_radial_coeffs(KerrParams(0.4), ConservedQuotients(1.3, 20.0))
    h = 1e-5
    fd = (radial_eval(rp, 4 + h) - radial_eval(rp, 4 - h)) / (2 * h)
    assert radial_deriv(rp, 4.0) == pytest.approx(fd, rel=1e-8)


@given(st.lists(st.floats(-5, 10), min_size=4, max_size=4))
def test_real_roots_recover_distinct_roots(rs):
    rs = sorted(rs)
    if min(np.diff(rs)) < 1e-2:
        return
    coeffs = np.poly(rs)
    from kerrpr.potentials import RadialPotential
    ms = real_roots(RadialPotential(*coeffs))
    assert ms.multiplicities == (1, 1, 1, 1)
    assert np.allclose(ms.roots, rs, atol=1e-8)


def test_double_root_is_merged():
    from kerrpr.potentials import RadialPotential
    ms = real_roots(RadialPotential(*np.poly([-1.0, 0.5, 3.0, 3.0])))
    assert ms.roots[-1] == pytest.approx(3.0, abs=1e-9)
    assert ms.multiplicities[-1] == 2
    assert sum(ms.multiplicities) == 4


def test_trapped_orbit_gives_double_root():
    # a = 0.5, r = 3: Phi = -2a, Q = 27
    rp = scaled_radial_coeffs(KerrParams(0.5), ConservedQuotients(-1.0, 27.0))
    ms = real_roots(rp)
    i = int(np.argmin(np.abs(np.array(ms.roots) - 3.0)))
    assert ms.roots[i] == pytest.approx(3.0, abs=1e-8)
    assert ms.multiplicities[i] == 2


def test_root_multiset_validates_count():
    with pytest.raises(ValueError):
        RootMultiset((1.0,), (1,), 0)


def test_polar_potential_and_roots():
    p = KerrParams(0.6)
    cq = ConservedQuotients(2.0, 10.0)
    for u in polar_roots(p, cq):
        assert polar_eval(p, cq, math.sqrt(u)) == pytest.approx(0.0, abs=1e-12)
    assert polar_admissible(p, cq)
    assert not polar_admissible(p, ConservedQuotients(5.0, -1.0))


def test_theta_potential_matches_scaled():
    p = KerrParams(0.6)
    E = 1.7
    mc = MotionConstants(0.0, E, 2.0 * E, 10.0 * E * E)
    th = 1.0
    assert theta_potential(p, mc, th) / E ** 2 == pytest.approx(
        polar_eval(p, ConservedQuotients(2.0, 10.0), math.cos(th)) / math.sin(th) ** 2, rel=1e-12)
