"""The eight end-to-end checks, shared by the test suite and ``kerrpr report``.

Each check returns a ``CheckResult`` with a pass flag and the measured
quantities.  Sizes default to the full sweeps; tests may shrink them only
where noted.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import classifier as cl
from . import integrator as ig
from . import phasespace as ps
from . import spherical as sp
from . import topology as tp
from .errors import DomainError
from .kerr import ConservedQuotients, KerrParams, horizon_radius, umbilicity_defect
from .potentials import radial_deriv, radial_eval, scaled_radial_coeffs


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0
    limit: float = math.inf

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.elapsed:.2f}s, limit {self.limit:g}s)"

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "details": self.details}


def _timed(number: int, name: str, limit: float):
    def deco(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            passed, details = fn(*args, **kwargs)
            return CheckResult(number, name, bool(passed), details, time.perf_counter() - t0, limit)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return deco


def family_residuals(params: KerrParams, n: int = 200) -> np.ndarray:
    """Rows ``(r, Phi, Q, R, R')`` on ``n`` interior radii of the trapped family."""
    rows = []
    for r, Phi, Q in sp.family_table(params, n):
        rp = scaled_radial_coeffs(params, ConservedQuotients(Phi, Q))
        rows.append((r, Phi, Q, radial_eval(rp, r), radial_deriv(rp, r)))
    return np.array(rows)


@_timed(1, "trapped-family residuals", 1.0)
def check_family_residuals(spins=(0.1, 0.5, 0.9, 0.99), n: int = 200):
    worst_R = worst_dR = 0.0
    for a in spins:
        rows = family_residuals(KerrParams(a), n)
        worst_R = max(worst_R, float(np.max(np.abs(rows[:, 3]))))
        worst_dR = max(worst_dR, float(np.max(np.abs(rows[:, 4]))))
    ok = worst_R <= 1e-10 and worst_dR <= 1e-8
    return ok, {"max_abs_R": worst_R, "max_abs_dR": worst_dR, "spins": list(spins), "radii": n}


@_timed(2, "spherical-orbit stability", 5.0)
def check_spherical_orbit(a: float = 0.5, r: float = 3.0, span: float = 200.0, tol: float = 1e-12):
    params = KerrParams(a)
    sample = ps.trapped_sample(params, r, 0.5 * math.pi)
    state = ig.PhaseState(sample.point, ps.trapped_covector(params, sample))
    res = ig.integrate(params, state, span, tol=tol)
    dev = float(np.max(np.abs(res.states[:, 1] - r)))
    d = res.drift
    worst = max(d.E, d.L, d.Qc, d.q)
    ok = dev <= 1e-6 and worst <= 1e-9
    drift = {"E": float(d.E), "L": float(d.L), "Qc": float(d.Qc), "q": float(d.q)}
    return ok, {"max_abs_r_minus_r0": dev, "drift": drift,
                "termination": str(res.termination), "steps": res.steps}


def _polar_latitude(params: KerrParams, cq: ConservedQuotients, rng) -> float:
    """A random latitude where the scaled polar potential is non-negative."""
    a = params.a
    B = cq.Q + cq.Phi ** 2 - a * a
    f = lambda u: cq.Q - B * u - a * a * u * u
    # the admissible set in u = C^2 is an interval; find it on a fine grid
    us = np.linspace(0.0, 0.999, 2001)
    ok = us[f(us) > 1e-9 * max(1.0, abs(cq.Q))]
    if ok.size == 0:
        raise DomainError("no admissible latitude")
    u = float(rng.uniform(ok.min(), ok.max()))
    C = math.sqrt(u) * (1 if rng.random() < 0.5 else -1)
    return math.acos(C)


def cross_check(n: int, seed: int = 42, tol: float = cl.CURVE_TOL, int_tol: float = 1e-10,
                budget: float = 2e4) -> dict:
    """Classifier versus integrator on ``n`` random photons."""
    rng = np.random.default_rng(seed)
    agree = excluded = forbidden_ok = 0
    disagreements = []
    for i in range(n):
        a = float(rng.uniform(0.0, 0.99))
        params = KerrParams(a)
        cq = ConservedQuotients(float(rng.uniform(-8.0, 8.0)), float(rng.uniform(-5.0, 40.0)))
        rh = horizon_radius(params)
        r0 = float(rng.uniform(rh + 0.05, 15.0))
        sign = 1 if rng.random() < 0.5 else -1
        if cl.is_on_trapped_curve(params, cq, 10.0 * tol) is not None:
            excluded += 1
            continue
        verdict = cl.classify(params, cq, r0, sign, tol=tol)
        if verdict.fate is cl.Fate.FORBIDDEN:
            # no real momentum may exist at any latitude
            try:
                th = _polar_latitude(params, cq, rng)
                ig.state_from_constants(params, cq, r0, th, sign_r=sign)
            except DomainError:
                forbidden_ok += 1
                agree += 1
                continue
            disagreements.append({"index": i, "a": a, "Phi": cq.Phi, "Q": cq.Q, "r0": r0,
                                  "sign": sign, "classify": "Forbidden", "integrate": "constructible"})
            continue
        th = _polar_latitude(params, cq, rng)
        st = ig.state_from_constants(params, cq, r0, th, sign_r=sign,
                                     sign_theta=1 if rng.random() < 0.5 else -1)
        res = ig.integrate(params, st, budget, tol=int_tol)
        emp = ig.empirical_fate(res)
        got = "undetermined" if emp is None else str(emp.fate)
        if emp is not None and emp.fate is verdict.fate:
            agree += 1
        else:
            disagreements.append({"index": i, "a": a, "Phi": cq.Phi, "Q": cq.Q, "r0": r0,
                                  "sign": sign, "classify": str(verdict.fate), "integrate": got})
    return {"samples": n, "agree": agree, "excluded_band": excluded,
            "forbidden_confirmed": forbidden_ok, "disagreements": len(disagreements),
            "examples": disagreements[:10]}


@_timed(3, "trapping falsification sweep", 300.0)
def check_falsification(n_inequality: int = 1_000_000, n_cross: int = 10_000, seed: int = 42):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 1.0, n_inequality)
    a = np.minimum(a, np.nextafter(1.0, 0.0))
    Phi = rng.uniform(-20.0, 20.0, n_inequality)
    Q = rng.uniform(0.0, 1.0, n_inequality) * 400.0
    Q = np.where(Q > 0.0, Q, np.finfo(float).tiny)
    val = cl.trapping_inequality_array(a, Phi, Q)
    violations = int(np.sum(val < 0.0))
    cc = cross_check(n_cross, seed)
    ok = violations == 0 and cc["disagreements"] == 0
    return ok, {"inequality_samples": n_inequality, "violations": violations,
                "min_value": float(np.min(val)), "cross_check": cc}


@_timed(4, "zero-energy exclusion", 1.0)
def check_zero_energy(n: int = 10_000, seed: int = 42):
    rng = np.random.default_rng(seed)
    bad = 0
    real_pairs = 0
    for _ in range(n):
        params = KerrParams(float(rng.uniform(0.0, 0.999)))
        L = float(rng.normal(0.0, 5.0))
        Qc = float(rng.uniform(-1.0, 1.0) * 30.0)
        if not L * L + Qc > 0.0:
            continue
        roots = cl.zero_energy_roots(params, L, Qc)
        if not roots:
            continue
        real_pairs += 1
        rh = horizon_radius(params)
        if roots[0] > rh and roots[1] > rh and roots[0] != roots[1]:
            bad += 1
    return bad == 0, {"samples": n, "real_root_pairs": real_pairs, "violations": bad}


def off_axis_samples(params: KerrParams, n: int, rng) -> list:
    out = []
    while len(out) < n:
        th = float(rng.uniform(0.02, math.pi - 0.02))
        r = sp.rbar(params, th, float(rng.uniform(-1.0, 1.0)))
        out.append(ps.trapped_sample(params, r, th, 1 if rng.random() < 0.5 else -1,
                                     phi=float(rng.uniform(-math.pi, math.pi))))
    return out


def axis_cap_samples(params: KerrParams, n: int, rng, max_sin2: float = 1e-4) -> list:
    out = []
    while len(out) < n:
        s2 = float(rng.uniform(1e-3, 1.0)) * max_sin2
        th = math.asin(math.sqrt(s2))
        if rng.random() < 0.5:
            th = math.pi - th
        r = sp.rbar(params, th, float(rng.uniform(-1.0, 1.0)))
        bl = ps.trapped_sample(params, r, th, 1 if rng.random() < 0.5 else -1,
                               phi=float(rng.uniform(-math.pi, math.pi)))
        out.append(ps.to_axis(params, bl))
    return out


def submanifold_report(params: KerrParams, n_f: int = 1000, n_h: int = 100, seed: int = 42,
                       threshold: float = ps.RANK_THRESHOLD) -> dict:
    rng = np.random.default_rng(seed)
    failures = []
    sig_f = []
    for i, t in enumerate(off_axis_samples(params, n_f, rng)):
        rep = ps.jacobian(lambda z: ps.f_map(params, t.replace_packed(z)), t.packed(),
                          threshold=threshold)
        sig_f.append(rep.sigma_min)
        if not rep.passed:
            failures.append({"map": "f", "index": i, "sigma_min": rep.sigma_min})
    sig_h, sig_g = [], []
    for i, t in enumerate(axis_cap_samples(params, n_h, rng)):
        rep = ps.jacobian(lambda z: ps.h_map(params, t.replace_packed(z)), t.packed(),
                          threshold=threshold)
        sig_h.append(rep.sigma_min)
        if not rep.passed:
            failures.append({"map": "h", "index": i, "sigma_min": rep.sigma_min})
        sig_g.append(ps.jacobian(lambda z: ps.g_map(params, t.replace_packed(z)), t.packed(),
                                 threshold=threshold).sigma_min)
    heart = {str(a): ps.heart_identity_residual(KerrParams(a)) for a in (0.1, 0.5, 0.9)}
    heart_max = max(heart.values())
    if heart_max > 1e-10:
        failures.append({"map": "heart", "residual": heart_max})
    return {"grid": {"spin": params.a, "mass": params.M, "f_samples": n_f, "h_samples": n_h,
                     "h_max_sin2": 1e-4, "seed": seed, "threshold": threshold},
            "min_sigma_f": float(min(sig_f)), "min_sigma_h": float(min(sig_h)),
            "min_sigma_g": float(min(sig_g)), "heart_residuals": heart,
            "failure_count": len(failures), "failures": failures[:20],
            "passed": not failures}


@_timed(5, "submersion ranks", 30.0)
def check_submersion(a: float = 0.5, n_f: int = 1000, n_h: int = 100, seed: int = 42):
    rep = submanifold_report(KerrParams(a), n_f, n_h, seed)
    return rep["passed"], rep


def topology_report(params: KerrParams, thetas=(0.94 * math.pi, 0.96 * math.pi, 0.98 * math.pi),
                    densities=(256, 512, 1024)) -> dict:
    eps = tp.concavity_epsilon(params)
    margin = tp.concavity_margin(params, math.asin(math.sqrt(1e-3)))
    runs = []
    for th in thetas:
        for n in densities:
            runs.append(tp.verify_facts(params, th, n, epsilon=eps).as_dict())
    patterns = {tuple(sorted(r["indices"].items())) for r in runs}
    first = runs[0]
    stable = len(patterns) == 1
    mism = sorted({m for r in runs for m in r["mismatches"]})
    ok = stable and not mism and margin < 0.0 and eps > 0.0 and all(r["in_cap"] for r in runs)
    return {"indices": first["indices"], "expected": first["expected"], "stable": stable,
            "orientation": first["orientation"], "thetas": list(thetas),
            "densities": list(densities), "epsilon_concavity": eps,
            "concavity_margin_sin2_1e-3": margin, "mismatches": mism, "passed": ok}


@_timed(6, "topology facts", 30.0)
def check_topology(a: float = 0.5):
    rep = topology_report(KerrParams(a))
    return rep["passed"], rep


@_timed(7, "Schwarzschild limit", 1.0)
def check_schwarzschild():
    small = KerrParams(1e-4)
    r1, r2 = sp.r_hat_bounds(small)
    rm = sp.r_m(small)
    q3 = sp.q_trap(small, 3.0)
    d3 = umbilicity_defect(KerrParams(0.0), 3.0, 0.5 * math.pi)
    d_other = [umbilicity_defect(KerrParams(0.0), r, 0.5 * math.pi) for r in (2.5, 4.0)]
    kerr_defects = [umbilicity_defect(KerrParams(a), r, th)
                    for a in (0.3, 0.7) for r in (2.5, 3.0, 3.5) for th in (0.6, 1.2, 1.5707963)]
    ok = (abs(r1 - 3.0) <= 1e-3 and abs(r2 - 3.0) <= 1e-3 and abs(rm - 3.0) <= 1e-3
          and abs(q3 - 27.0) <= 1e-8 and d3 <= 1e-8 and min(d_other) > 1e-3
          and min(kerr_defects) > 0.0)
    return ok, {"r_hat_1": r1, "r_hat_2": r2, "r_m": rm, "Q_trap_3M": q3,
                "defect_photon_sphere": d3, "defect_2.5M_4M": d_other,
                "min_defect_kerr": min(kerr_defects)}


def chart_membership(params: KerrParams, n: int = 20) -> dict:
    thetas = np.linspace(0.0, math.pi, n + 2)[1:-1]
    phis = np.linspace(-math.pi, math.pi, n, endpoint=False)
    ss = np.linspace(-1.0, 1.0, n)
    worst_f = worst_round = 0.0
    for th in thetas:
        for ph in phis:
            for s in ss:
                for vs in (1, -1):
                    p0 = tp.chart_H(params, tp.TorusCoord(float(th), float(ph), float(s), vs))
                    worst_f = max(worst_f, tp.membership_residual(params, p0))
                s_back = sp.rbar_inverse(params, float(th), p0.point.r)
                worst_round = max(worst_round, abs(s_back - float(s)))
    return {"grid": n, "max_f_residual": worst_f, "max_roundtrip_error": worst_round,
            "passed": worst_f <= 1e-9 and worst_round <= 1e-10}


@_timed(8, "chart H membership", 10.0)
def check_chart_H(a: float = 0.5, n: int = 20):
    rep = chart_membership(KerrParams(a), n)
    return rep["passed"], rep


ALL_CHECKS = (check_family_residuals, check_spherical_orbit, check_falsification,
              check_zero_energy, check_submersion, check_topology, check_schwarzschild,
              check_chart_H)


SEEDED = {check_falsification, check_zero_energy, check_submersion}


def run_all(seed: int = 42) -> list:
    ig.warmup()
    return [chk(seed=seed) if chk in SEEDED else chk() for chk in ALL_CHECKS]
