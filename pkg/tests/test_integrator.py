import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrpr import integrator as ig
from kerrpr import phasespace as ps
from kerrpr.classifier import Fate
from kerrpr.errors import DomainError
from kerrpr.kerr import BLPoint, ConservedQuotients, Covec4, KerrParams, scalars
from kerrpr.potentials import theta_potential
from kerrpr.kerr import MotionConstants

P5 = KerrParams(0.5)


def random_null_state(a, phi_q, Q, r, th, sr, sth):
    p = KerrParams(a)
    return p, ig.state_from_constants(p, ConservedQuotients(phi_q, Q), r, th,
                                      sign_r=sr, sign_theta=sth)


null_inputs = st.tuples(st.floats(0.0, 0.95), st.floats(-4, 4), st.floats(0, 40),
                        st.floats(3.0, 20.0), st.floats(0.3, 2.8),
                        st.sampled_from([-1, 1]), st.sampled_from([-1, 1]))


@given(null_inputs)
def test_rhs_time_and_polar_components(args):
    try:
        p, s = random_null_state(*args)
    except DomainError:
        return
    a, M = p.a, p.M
    r, th = s.point.r, s.point.theta
    E, L = -s.p.comps[0], s.p.comps[3]
    sb = scalars(p, r, th)
    d = ig.rhs(p, s)
    tdot = (sb.Acal * E - 2 * M * r * a * L) / (sb.Delta * sb.rho2)
    assert d[0] == pytest.approx(tdot, rel=1e-10)
    mc = MotionConstants(0.0, E, L, ConservedQuotients(*args[1:3]).Q)
    Th = theta_potential(p, mc, th)
    assert sb.rho2 ** 2 * d[2] ** 2 == pytest.approx(Th, rel=1e-8, abs=1e-10)


def test_equatorial_plane_is_invariant():
    s = ig.state_from_constants(P5, ConservedQuotients(3.0, 0.0), 8.0, 0.5 * math.pi, sign_r=-1)
    res = ig.integrate(P5, s, 30.0, tol=1e-11)
    assert np.max(np.abs(res.states[:, 2] - 0.5 * math.pi)) == 0.0


def test_spherical_orbit_stays_put():
    tp = ps.trapped_sample(P5, 3.0, 0.5 * math.pi)
    s = ig.PhaseState(tp.point, ps.trapped_covector(P5, tp))
    res = ig.integrate(P5, s, 200.0, tol=1e-12)
    assert np.max(np.abs(res.states[:, 1] - 3.0)) <= 1e-6
    d = res.drift
    assert max(d.E, d.L, d.Qc, d.q) <= 1e-9
    assert ig.empirical_fate(res).fate is Fate.TRAPPED_SPHERICAL


def test_radial_infall_hits_shell():
    p = KerrParams(0.0)
    s = ig.state_from_constants(p, ConservedQuotients(0.0, 0.0), 10.0, 1.0, sign_r=-1)
    res = ig.integrate(p, s, 100.0)
    assert res.termination is ig.Termination.HIT_HORIZON_SHELL
    assert res.final.point.r == pytest.approx(2.0 + 1e-6, abs=1e-9)
    assert ig.empirical_fate(res).fate is Fate.FALLS_IN


def test_supercritical_impact_parameter_escapes():
    p = KerrParams(0.0)
    s = ig.state_from_constants(p, ConservedQuotients(math.sqrt(30.0), 0.0), 10.0,
                                0.5 * math.pi, sign_r=1)
    res = ig.integrate(p, s, 5000.0)
    assert res.termination is ig.Termination.REACHED_ESCAPE_RADIUS
    assert ig.empirical_fate(res).fate is Fate.ESCAPES


def test_polar_orbit_crosses_axis_charts():
    # zero angular momentum spherical orbit passes over both poles; it is
    # unstable and peels off after roughly 30M, so keep the span short
    from kerrpr.spherical import q_trap, r_m
    rm = r_m(P5)
    tp = ps.trapped_sample(P5, rm, 0.5 * math.pi)
    s = ig.PhaseState(tp.point, ps.trapped_covector(P5, tp))
    res = ig.integrate(P5, s, 25.0, tol=1e-12)
    charts = set(int(c) for c in res.charts)
    assert len(charts) >= 3
    assert np.min(res.states[:, 2]) < 0.05 and np.max(res.states[:, 2]) > math.pi - 0.05
    d = res.drift
    assert max(d.E, d.L, d.Qc, d.q) <= 1e-9
    assert np.max(np.abs(res.states[:, 1] - rm)) <= 1e-6
    assert q_trap(P5, rm) > 0


def test_time_symmetry():
    s = ig.state_from_constants(P5, ConservedQuotients(1.5, 12.0), 6.0, 1.1, sign_r=1, sign_theta=1)
    fwd = ig.integrate(P5, s, 10.0, tol=1e-12)
    back = ig.integrate(P5, ig.mirror(fwd.final), 10.0, tol=1e-12)
    m = ig.mirror(back.final)
    assert np.allclose(m.point.r, s.point.r, atol=1e-8)
    assert np.allclose(m.point.theta, s.point.theta, atol=1e-8)
    assert np.allclose(m.point.phi, s.point.phi, atol=1e-8)
    assert np.allclose(m.point.t, s.point.t, atol=1e-7)
    assert np.allclose(m.p.comps, s.p.comps, atol=1e-8)


def test_non_null_start_rejected():
    s = ig.PhaseState(BLPoint(0.0, 6.0, 1.0, 0.0), Covec4((-1.0, 0.3, 0.0, 0.0)))
    with pytest.raises(DomainError):
        ig.integrate(P5, s, 1.0)


def test_forbidden_constants_have_no_state():
    with pytest.raises(DomainError):
        ig.state_from_constants(P5, ConservedQuotients(0.0, -1.0), 6.0, 1.0)


def test_trajectory_csv_layout():
    s = ig.state_from_constants(P5, ConservedQuotients(1.0, 20.0), 8.0, 1.0, sign_r=1)
    res = ig.integrate(P5, s, 2.0, max_samples=16)
    buf = io.StringIO()
    ig.write_trajectory_csv(res, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(ig.CSV_COLUMNS)
    assert len(lines) == len(res.affine) + 1
    row = [float(x) for x in lines[1].split(",")]
    assert row[2] == 8.0


def test_integration_is_deterministic():
    s = ig.state_from_constants(P5, ConservedQuotients(1.0, 20.0), 8.0, 1.0, sign_r=-1)
    a = ig.integrate(P5, s, 50.0)
    b = ig.integrate(P5, s, 50.0)
    assert np.array_equal(a.states, b.states)


@given(st.floats(0.0, 0.95), st.floats(-4, 4), st.floats(0, 40), st.floats(6.0, 15.0),
       st.floats(0.2, 2.9))
def test_constants_conserved_on_outgoing_rays(a, phi_q, Q, r, th):
    try:
        p, s = random_null_state(a, phi_q, Q, r, th, 1, 1)
    except DomainError:
        return
    res = ig.integrate(p, s, 40.0, tol=1e-12)
    d = res.drift
    assert max(d.E, d.L, d.Qc, d.q) <= 1e-9
