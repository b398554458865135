import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrpr import integrator as ig
from kerrpr.classifier import (
    Fate,
    classify,
    is_on_trapped_curve,
    trapping_inequality,
    trapping_inequality_array,
    zero_energy_fate,
    zero_energy_roots,
)
from kerrpr.errors import DomainError, KerrError
from kerrpr.kerr import ConservedQuotients, KerrParams, horizon_radius
from kerrpr.spherical import phi_trap, q_trap, r_hat_bounds, r_m

P5 = KerrParams(0.5)


def test_trapped_at_family_double_root():
    cq = ConservedQuotients(phi_trap(P5, 2.6), q_trap(P5, 2.6))
    assert classify(P5, cq, 2.6).fate is Fate.TRAPPED_SPHERICAL


def test_schwarzschild_falls_in_below_critical():
    v = classify(KerrParams(0.0), ConservedQuotients(4.0, 4.0), 10.0, -1)
    assert v.fate is Fate.FALLS_IN
    assert v.turning_points == ()


def test_schwarzschild_escapes_above_critical():
    v = classify(KerrParams(0.0), ConservedQuotients(math.sqrt(30.0), 0.0), 10.0, -1)
    assert v.fate is Fate.ESCAPES
    assert len(v.turning_points) == 1 and v.turning_points[0] > 3.0


def test_polar_forbidden():
    assert classify(P5, ConservedQuotients(0.0, -1.0), 5.0, 1).fate is Fate.FORBIDDEN


def test_radially_forbidden_start():
    # impact parameter far above critical: r0 = 3 lies inside the barrier
    assert classify(KerrParams(0.0), ConservedQuotients(10.0, 0.0), 3.0, 1).fate is Fate.FORBIDDEN


def test_input_errors():
    with pytest.raises(DomainError):
        classify(P5, ConservedQuotients(0.0, 27.0), 1.5, 1)
    with pytest.raises(ValueError):
        classify(KerrParams(0.0), ConservedQuotients(4.0, 4.0), 10.0, 0)


def test_curve_membership_examples():
    assert is_on_trapped_curve(P5, ConservedQuotients(-1.0, 27.0)) == pytest.approx(3.0, abs=1e-9)
    rm = r_m(P5)
    assert is_on_trapped_curve(P5, ConservedQuotients(0.0, q_trap(P5, rm))) == pytest.approx(rm, abs=1e-8)
    r1, _ = r_hat_bounds(P5)
    got = is_on_trapped_curve(P5, ConservedQuotients(phi_trap(P5, r1), 0.0))
    assert got == pytest.approx(r1, abs=1e-8)
    assert is_on_trapped_curve(P5, ConservedQuotients(0.0, 5.0)) is None


def test_schwarzschild_curve_is_circle():
    assert is_on_trapped_curve(KerrParams(0.0), ConservedQuotients(3.0, 18.0)) == 3.0


@given(st.floats(0.0, 0.999), st.floats(-50, 50), st.floats(1e-12, 1e4))
def test_trapping_inequality_nonnegative(a, Phi, Q):
    assert trapping_inequality(KerrParams(a), ConservedQuotients(Phi, Q)) >= 0.0


def test_trapping_inequality_example():
    a = 0.3
    v = trapping_inequality(KerrParams(a), ConservedQuotients(2 * a, 0.0))
    assert v == pytest.approx(1.0 - a * a)


def test_trapping_inequality_array_matches_scalar():
    rng = np.random.default_rng(0)
    a, Phi, Q = rng.uniform(0, 0.99, 50), rng.uniform(-5, 5, 50), rng.uniform(0, 30, 50)
    arr = trapping_inequality_array(a, Phi, Q)
    for i in range(50):
        assert arr[i] == pytest.approx(
            trapping_inequality(KerrParams(a[i]), ConservedQuotients(Phi[i], Q[i])), rel=1e-14)


def test_zero_energy_examples():
    p = KerrParams(0.6)
    assert zero_energy_roots(p, 2.0, 0.0) == (0.0, 2.0)
    lo, hi = zero_energy_roots(p, 0.0, 5.0)
    assert hi == pytest.approx(horizon_radius(p), abs=1e-15)
    # a^2 Qc/(L^2 + Qc) < M^2 whenever L^2 + Qc > 0, so real roots always exist
    assert zero_energy_roots(KerrParams(0.99), 0.1, 100.0) != ()
    with pytest.raises(KerrError):
        zero_energy_roots(p, 0.0, 0.0)


@given(st.floats(0.0, 0.999), st.floats(-10, 10), st.floats(-30, 30))
def test_zero_energy_never_two_exterior_roots(a, L, Qc):
    if not L * L + Qc > 0:
        return
    p = KerrParams(a)
    roots = zero_energy_roots(p, L, Qc)
    if roots:
        assert roots[0] < horizon_radius(p) or roots[0] == roots[1]


def test_zero_energy_fate_is_not_trapped():
    p = KerrParams(0.6)
    assert zero_energy_fate(p, 2.0, 0.0, 1.9).fate is Fate.FALLS_IN
    assert zero_energy_fate(p, 2.0, 0.0, 5.0).fate is Fate.FORBIDDEN


def test_asymptotic_approach_is_flagged():
    # r0 outside the photon sphere heading in with critical parameters
    v = classify(KerrParams(0.0), ConservedQuotients(math.sqrt(27.0), 0.0), 10.0, -1)
    assert v.asymptotic
    assert v.fate is Fate.ESCAPES


@pytest.mark.parametrize("phi,Q,r0,sign,theta", [
    (4.0, 4.0, 10.0, -1, 1.2),
    (5.5, 0.5, 12.0, -1, 1.5),
    (-3.0, 20.0, 2.5, 1, 1.0),
    (1.0, 10.0, 6.0, 1, 0.9),
    (2.0, 40.0, 12.0, -1, 0.7),
])
def test_classifier_agrees_with_integration(phi, Q, r0, sign, theta):
    p = P5
    cq = ConservedQuotients(phi, Q)
    verdict = classify(p, cq, r0, sign)
    st_ = ig.state_from_constants(p, cq, r0, theta, sign_r=sign)
    emp = ig.empirical_fate(ig.integrate(p, st_, 2e4, tol=1e-10))
    assert emp is not None and emp.fate is verdict.fate
