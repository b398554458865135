"""Command-line front end: ``kerrpr <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 output could not be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import acceptance as acc
from . import classifier as cl
from . import integrator as ig
from . import spherical as sp
from .errors import DomainError, IntegrationError, KerrError
from .kerr import ConservedQuotients, KerrParams
from .potentials import radial_deriv, radial_eval, scaled_radial_coeffs

SCHEMA = "kpr/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    M: float = 1.0
    a: Optional[float] = None
    tol_integrator: float = 1e-12
    tol_rank: float = 1e-6
    tol_curve: float = cl.CURVE_TOL
    grid_rows: int = 200
    grid_samples: int = 1000
    grid_loop: Optional[int] = None
    seed: int = 42
    fmt: str = "json"
    output: Optional[str] = None

    def validate(self) -> None:
        if not (math.isfinite(self.M) and self.M > 0):
            raise ValueError("--mass must be positive")
        if self.a is not None and not 0.0 <= self.a < self.M:
            raise ValueError("--spin must satisfy 0 <= a < M")
        for name in ("tol_integrator", "tol_rank", "tol_curve"):
            if not getattr(self, name) > 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        for name in ("grid_rows", "grid_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be at least 1")
        if self.grid_loop is not None and self.grid_loop < 8:
            raise ValueError("--grid-loop must be at least 8")

    def params(self) -> KerrParams:
        if self.a is None:
            raise ValueError("--spin is required for this command")
        return KerrParams(self.a, self.M)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def render_json(payload: dict) -> str:
    body = {"schema": SCHEMA, **payload}
    return json.dumps(body, sort_keys=True, indent=2, ensure_ascii=False, default=_jsonable) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _flatten(d: dict, prefix: str = "") -> list:
    out = []
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.extend(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out.append((key, json.dumps(v, sort_keys=True, default=_jsonable)))
        else:
            out.append((key, v))
    return out


def emit(cfg: RunConfig, payload: dict, header=None, rows=None) -> None:
    """Write ``payload`` as JSON, or ``rows`` (else a key/value listing) as CSV."""
    if cfg.fmt == "json":
        text = render_json(payload)
    elif rows is not None:
        text = render_csv(header, rows)
    else:
        text = render_csv(("key", "value"), _flatten(payload))
    if cfg.output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {cfg.output}: {exc.strerror or exc}") from exc


# commands

SPHERICAL_COLUMNS = ("r", "Phi_trap", "Q_trap", "R_residual", "dR_residual")


def spherical_rows(params: KerrParams, n: int) -> np.ndarray:
    """``n`` family rows with residuals; the radius closest to ``3M`` is replaced by ``3M``."""
    M = params.M
    if params.a == 0.0:
        r, Phi, Q = 3.0 * M, 0.0, 27.0 * M * M
        rp = scaled_radial_coeffs(params, ConservedQuotients(Phi, Q))
        return np.array([[r, Phi, Q, radial_eval(rp, r), radial_deriv(rp, r)]])
    r1, r2 = sp.r_hat_bounds(params)
    r = np.linspace(r1, r2, n + 2)[1:-1]
    if r1 < 3.0 * M < r2:
        r[np.argmin(np.abs(r - 3.0 * M))] = 3.0 * M
    rows = []
    for ri in r:
        Phi, Q = float(sp.phi_trap(params, ri)), float(sp.q_trap(params, ri))
        rp = scaled_radial_coeffs(params, ConservedQuotients(Phi, Q))
        rows.append((float(ri), Phi, Q, radial_eval(rp, ri), radial_deriv(rp, ri)))
    return np.array(rows)


def cmd_spherical_table(cfg: RunConfig, args) -> int:
    params = cfg.params()
    rows = spherical_rows(params, cfg.grid_rows)
    M = params.M
    ok = bool(np.all(np.abs(rows[:, 3]) <= 1e-10 * M ** 4) and np.all(np.abs(rows[:, 4]) <= 1e-8 * M ** 3))
    payload = {"command": "spherical-table", "spin": params.a, "mass": M, "columns": list(SPHERICAL_COLUMNS),
               "rows": rows.tolist(), "passed": ok}
    emit(cfg, payload, SPHERICAL_COLUMNS, rows.tolist())
    return EXIT_OK if ok else EXIT_FAIL


REGION_COLUMNS = ("theta", "r_min", "r_max", "r_m")


def cmd_region_boundary(cfg: RunConfig, args) -> int:
    params = cfg.params()
    if params.a == 0.0:
        raise ValueError("the photon region is the sphere r = 3M when a = 0")
    rows = []
    for th in np.linspace(0.0, math.pi, cfg.grid_rows):
        sl = sp.region_slice(params, float(th))
        rows.append((float(th), sl.r_min, sl.r_max, sl.r_m_at))
    payload = {"command": "region-boundary", "spin": params.a, "mass": params.M,
               "columns": list(REGION_COLUMNS), "rows": rows}
    emit(cfg, payload, REGION_COLUMNS, rows)
    return EXIT_OK


def cmd_classify(cfg: RunConfig, args) -> int:
    params = cfg.params()
    cq = ConservedQuotients(args.phi, args.Q)
    try:
        verdict = cl.classify(params, cq, args.r0, args.sign, tol=cfg.tol_curve)
    except RuntimeError as exc:
        emit(cfg, {"command": "classify", "error": str(exc), "passed": False})
        return EXIT_FAIL
    payload = {"command": "classify", "spin": params.a, "mass": params.M, "Phi": args.phi,
               "Q": args.Q, "r0": args.r0, "sign": args.sign, "fate": str(verdict),
               "turning_points": list(verdict.turning_points), "asymptotic": verdict.asymptotic}
    header = ("fate", "asymptotic", "turning_points")
    emit(cfg, payload, header, [(str(verdict), verdict.asymptotic,
                                 " ".join("%.17g" % x for x in verdict.turning_points))])
    return EXIT_OK


def cmd_integrate(cfg: RunConfig, args) -> int:
    params = cfg.params()
    st = ig.state_from_constants(params, ConservedQuotients(args.phi, args.Q), args.r0,
                                 args.theta0, sign_r=args.sign_r, sign_theta=args.sign_theta)
    try:
        res = ig.integrate(params, st, args.affine, tol=cfg.tol_integrator)
    except IntegrationError as exc:
        emit(cfg, {"command": "integrate", "error": str(exc), "passed": False})
        return EXIT_FAIL
    table = ig.trajectory_table(res)
    d = res.drift
    payload = {"command": "integrate", "spin": params.a, "mass": params.M,
               "termination": str(res.termination), "steps": res.steps,
               "drift": {"E": d.E, "L": d.L, "Qc": d.Qc, "q": d.q},
               "columns": list(ig.CSV_COLUMNS), "rows": table.tolist()}
    emit(cfg, payload, ig.CSV_COLUMNS, table.tolist())
    return EXIT_OK


def cmd_verify_submanifold(cfg: RunConfig, args) -> int:
    params = cfg.params()
    if params.a == 0.0:
        raise ValueError("the trapped-photon maps need a > 0")
    rep = acc.submanifold_report(params, cfg.grid_samples, max(1, cfg.grid_samples // 10),
                                 cfg.seed, cfg.tol_rank)
    emit(cfg, {"command": "verify-submanifold", **rep})
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_verify_topology(cfg: RunConfig, args) -> int:
    params = cfg.params()
    if params.a == 0.0:
        raise ValueError("the topology checks need a > 0")
    densities = (cfg.grid_loop,) if cfg.grid_loop else (256, 512, 1024)
    tp_report = acc.topology_report(params, densities=densities)
    mem = acc.chart_membership(params, 20)
    rep = {**tp_report, "H_membership_residual_max": mem["max_f_residual"],
           "H_roundtrip_error_max": mem["max_roundtrip_error"],
           "passed": tp_report["passed"] and mem["passed"]}
    emit(cfg, {"command": "verify-topology", "spin": params.a, "mass": params.M, **rep})
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_report(cfg: RunConfig, args) -> int:
    results = acc.run_all(cfg.seed)
    payload = {"command": "report", "seed": cfg.seed, "checks": [r.as_dict() for r in results],
               "passed": all(r.passed for r in results)}
    rows = [(r.number, r.name, r.passed) for r in results]
    emit(cfg, payload, ("criterion", "name", "passed"), rows)
    return EXIT_OK if payload["passed"] else EXIT_FAIL


COMMANDS = {
    "spherical-table": cmd_spherical_table,
    "region-boundary": cmd_region_boundary,
    "classify": cmd_classify,
    "integrate": cmd_integrate,
    "verify-submanifold": cmd_verify_submanifold,
    "verify-topology": cmd_verify_topology,
    "report": cmd_report,
}


def _sign(text: str) -> int:
    v = int(text)
    if v not in (-1, 0, 1):
        raise argparse.ArgumentTypeError("sign must be -1, 0 or 1")
    return v


def _pm(text: str) -> int:
    v = int(text)
    if v not in (-1, 1):
        raise argparse.ArgumentTypeError("sign must be -1 or 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--mass", type=float, default=argparse.SUPPRESS, help="black-hole mass M (default 1)")
    g.add_argument("--spin", type=float, default=argparse.SUPPRESS, help="spin a, 0 <= a < M")
    g.add_argument("--tol-integrator", type=float, default=argparse.SUPPRESS)
    g.add_argument("--tol-rank", type=float, default=argparse.SUPPRESS)
    g.add_argument("--tol-curve", type=float, default=argparse.SUPPRESS)
    g.add_argument("--grid-rows", type=int, default=argparse.SUPPRESS)
    g.add_argument("--grid-samples", type=int, default=argparse.SUPPRESS)
    g.add_argument("--grid-loop", type=int, default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    g.add_argument("--output", metavar="PATH", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="kerrpr", parents=[common],
                                     description="Trapped photons in subcritical Kerr.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spherical-table", parents=[common], help="trapped-family table with residuals")
    sub.add_parser("region-boundary", parents=[common], help="photon-region extent per latitude")
    p = sub.add_parser("classify", parents=[common], help="fate of a photon")
    p.add_argument("--phi", type=float, required=True, help="Phi = L/E")
    p.add_argument("--Q", type=float, required=True, help="Q = Carter constant / E^2")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--sign", type=_sign, default=0, help="sign of dr/dlambda at r0")
    p = sub.add_parser("integrate", parents=[common], help="integrate one null geodesic")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--Q", type=float, required=True)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--theta0", type=float, default=0.5 * math.pi)
    p.add_argument("--sign-r", type=_pm, default=1)
    p.add_argument("--sign-theta", type=_pm, default=1)
    p.add_argument("--affine", type=float, default=100.0, help="affine budget")
    sub.add_parser("verify-submanifold", parents=[common], help="rank checks for f and h")
    sub.add_parser("verify-topology", parents=[common], help="winding indices and chart H")
    sub.add_parser("report", parents=[common], help="run every acceptance check")
    return parser


def config_from_args(args) -> RunConfig:
    ns = vars(args)
    default_spin = 0.5 if args.command in ("report",) else None
    cfg = RunConfig(
        M=ns.get("mass", 1.0),
        a=ns.get("spin", default_spin),
        tol_integrator=ns.get("tol_integrator", 1e-12),
        tol_rank=ns.get("tol_rank", 1e-6),
        tol_curve=ns.get("tol_curve", cl.CURVE_TOL),
        grid_rows=ns.get("grid_rows", 200),
        grid_samples=ns.get("grid_samples", 1000),
        grid_loop=ns.get("grid_loop"),
        seed=ns.get("seed", 42),
        fmt=ns.get("format", "json"),
        output=ns.get("output"),
    )
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.a is None:
            raise ValueError("--spin is required for this command")
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return COMMANDS[args.command](cfg, args)
    except (DomainError, KerrError, ValueError) as exc:
        print(f"kerrpr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kerrpr: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
