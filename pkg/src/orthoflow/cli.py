"""``orthoflow`` command line: evaluate actions, run seeded suites, print ledger tables.

Every command writes one JSON report to standard output:

    {"command": ..., "config": {...}, "checks": [{name, value, threshold, pass}],
     "summary": {...}, "result": ...}

Exit status is 0 when every check passes, 1 when a check fails and 2 on a
usage error.  The report layout is documented in docs/report_schema.md.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import action_engine as ae
from . import circleflow as cf
from . import ledger
from . import orbit_lab as ol
from .errors import OrthoflowError, UsageError
from .sopq import Signature, exp_algebra
from .suites import ALIASES, SUITES, SuiteConfig, at_most, check_dicts, covering_defect, equals, run_suite

SCHEMA_VERSION = 1
FLOW_NAMES = {"basicJ1": cf.BASIC_J1, "basicJ1J2": cf.BASIC_J1J2}


# --- serialization -------------------------------------------------------------------

def _num(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(command: str, config: dict, checks: list, result=None) -> dict:
    failed = [c["name"] for c in checks if not c["pass"]]
    summary = {"total": len(checks), "passed": len(checks) - len(failed), "failed": failed,
               "status": "pass" if not failed else "fail"}
    return {"schema": SCHEMA_VERSION, "command": command, "config": config,
            "checks": checks, "summary": summary, "result": result}


# --- argument parsing ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def _range(text: str) -> tuple:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc
    return lo, hi


def _flow_spec(text: str) -> tuple:
    """KIND:N:A, e.g. basicJ1:2:0.0"""
    parts = text.split(":")
    if len(parts) != 3 or parts[0] not in FLOW_NAMES:
        raise argparse.ArgumentTypeError(f"expected KIND:N:A with KIND in {sorted(FLOW_NAMES)}")
    try:
        return FLOW_NAMES[parts[0]], int(parts[1]), float(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, default=3)
    common.add_argument("--q", type=int, default=3)
    common.add_argument("--n", type=int, default=1)
    common.add_argument("--a", type=float, default=0.0)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--samples", type=int, default=100)

    parser = _Parser(prog="orthoflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    act = sub.add_parser("act", parents=[common], help="apply exp(sum c_i X_i) to a point")
    act.add_argument("--coeffs", type=_floats, required=True)
    act.add_argument("--point", type=_floats, required=True,
                     help="product: v (p+1 numbers) then w (q numbers); sphere: p+q numbers")
    act.add_argument("--space", choices=("product", "sphere"), default="product")
    act.add_argument("--route", choices=("auto", "chart", "decompose", "direct"), default="auto")

    dec = sub.add_parser("decompose", parents=[common], help="factor g = k m(theta) u")
    dec.add_argument("--coeffs", type=_floats, required=True)
    dec.add_argument("--f", type=float, required=True, help="slice datum value in (-1, 1)")

    fl = sub.add_parser("flow", parents=[common], help="build and inspect circle flows")
    fl.add_argument("--make", choices=sorted(FLOW_NAMES), default="basicJ1")
    fl.add_argument("--validate", action="store_true")
    fl.add_argument("--invariants", action="store_true")
    fl.add_argument("--conjugacy", type=_flow_spec, metavar="KIND:N:A")
    fl.add_argument("--lift", action="store_true")

    ver = sub.add_parser("verify", parents=[common], help="run a seeded verification suite")
    ver.add_argument("--suite", required=True, choices=[*SUITES, *ALIASES, "all"])

    tab = sub.add_parser("tables", help="dimension ledger tables")
    tab.add_argument("--parabolic", action="store_true")
    tab.add_argument("--range", type=_range, default=(3, 9), metavar="LO:HI")
    tab.add_argument("--table1", action="store_true")

    orb = sub.add_parser("orbit", parents=[common], help="classify the orbit of a slice point")
    orb.add_argument("--space", choices=("product", "sphere", "bundle"), default="product")
    orb.add_argument("--phi", type=float, required=True, help="slice angle")
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "command"}
    for k, v in list(cfg.items()):
        if isinstance(v, tuple):
            cfg[k] = list(v)
    return cfg


def _validate(args):
    if hasattr(args, "p"):
        if args.p < 3 or args.q < 3:
            raise UsageError("--p/--q: both must be at least 3")
        if args.n < 1:
            raise UsageError("--n: must be a positive integer")
        if not abs(args.a) < 1:
            raise UsageError("--a: need |a| < 1")
        if args.samples < 1:
            raise UsageError("--samples: must be positive")
        if not 0 <= args.seed < 2 ** 64:
            raise UsageError("--seed: must fit in 64 unsigned bits")


# --- commands ------------------------------------------------------------------------

def _group(args, sig: Signature) -> np.ndarray:
    if len(args.coeffs) != sig.dim:
        raise UsageError(f"--coeffs: expected {sig.dim} numbers for so({sig.p},{sig.q}), got {len(args.coeffs)}")
    return exp_algebra(sig, args.coeffs)


def cmd_act(args):
    sig = Signature(args.p, args.q)
    g = _group(args, sig)
    pt = np.asarray(args.point)
    if args.space == "product":
        if len(pt) != sig.n + 1:
            raise UsageError(f"--point: expected {sig.n + 1} numbers (v then w)")
        if args.route == "direct":
            raise UsageError("--route: 'direct' applies to the sphere action")
        x = ae.ProductSpherePoint.make(pt[:sig.p + 1], pt[sig.p + 1:])
        y = ae.act_product(sig, g, x, cf.make_flow(cf.BASIC_J1, args.n, args.a), route=args.route)
        res = {"v": y.v, "w": y.w}
    else:
        if len(pt) != sig.n:
            raise UsageError(f"--point: expected {sig.n} numbers")
        if args.route in ("chart",):
            raise UsageError("--route: 'chart' applies to the product action")
        y = ae.act_sphere(sig, g, ae.SpherePoint.make(pt), cf.make_flow(cf.BASIC_J1J2, args.n, args.a),
                          route=args.route)
        res = {"y": y.y}
    res["g"] = g
    return [], res


def cmd_decompose(args):
    sig = Signature(args.p, args.q)
    g = _group(args, sig)
    d = ae.decompose(sig, g, args.f)
    checks = [at_most("reconstruction", d.diagnostics["reconstruction"], 1e-9),
              at_most("stabilizer-residual", d.diagnostics["residual"], 1e-6)]
    return checks, {"theta": d.theta, "k": d.k, "u": d.u,
                    "accepted_branches": d.diagnostics["accepted_count"],
                    "runner_up_residual": d.diagnostics["runner_up_residual"]}


def cmd_flow(args):
    flow = cf.make_flow(FLOW_NAMES[args.make], args.n, args.a)
    res = {"kind": flow.kind, "n": flow.n, "a": flow.a, "fixed_points": list(flow.fixed_points())}
    checks = []
    if args.validate or not (args.invariants or args.conjugacy or args.lift):
        res["validation"] = flow.report
        checks.append(equals("flow-validation", bool(flow.report["ok"]), True))
    if args.invariants:
        res["jacobians"] = list(flow.jacobians())
        res["mu_pv"] = cf.pv_global_invariant(flow)
    if args.conjugacy:
        other = cf.make_flow(*args.conjugacy)
        c = cf.conjugacy_map(flow, other)
        res["conjugacy"] = {"success": c.success, "certificate": c.certificate, "defect": c.defect}
    if args.lift:
        lifted = cf.lift_double_cover(cf.project_to_rp1(flow))
        res["lift"] = {"fixed_points": list(lifted.fixed_points()), "jacobians": list(lifted.jacobians())}
        checks.append(covering_defect(flow.n, flow.a))
    return checks, res


def cmd_verify(args):
    cfg = SuiteConfig(args.p, args.q, args.n, args.a, args.seed, args.samples)
    return run_suite(args.suite, cfg), None


def cmd_tables(args):
    if not (args.parabolic or args.table1):
        raise UsageError("tables: pass --parabolic and/or --table1")
    checks, res = [], {}
    if args.parabolic:
        lo, hi = args.range
        if lo < 3 or hi < lo:
            raise UsageError("--range: need 3 <= LO <= HI")
        rows, bad = [], 0
        for p in range(lo, hi + 1):
            for q in range(3, p + 1):
                for kind in (ledger.NULL_LINE, ledger.MAX_ISOTROPIC):
                    d = ledger.parabolic_dims(kind, p, q)
                    bad += d.dimPTheta != ledger.parabolic_closed_form(kind, p, q)
                    rows.append(dict(vars(d)))
        checks.append(equals("parabolic-closed-form-vs-roots", bad, 0))
        res["parabolic"] = rows
    if args.table1:
        rc = ledger.printed_row_checks()
        checks.append(equals("table1-printed-mismatches", sum(not ok for _, ok in rc), 0))
        res["table1"] = [dict(vars(r)) for r in ledger.table1_rows()]
    return checks, res


def cmd_orbit(args):
    sig = Signature(args.p, args.q)
    if args.space == "product":
        act = ol.product_action(sig, cf.make_flow(cf.BASIC_J1, args.n, args.a))
    elif args.space == "sphere":
        act = ol.sphere_action(sig, cf.make_flow(cf.BASIC_J1J2, args.n, args.a))
    else:
        act = ol.bundle_action(sig, cf.make_flow(cf.BASIC_J1, args.n, args.a))
    r = ol.classify_orbit(act, act.slice_point(args.phi))
    res = {"dimension": r.dimension, "isotropy_dim": r.isotropy_dim, "orbit_type": r.orbit_type,
           "stabilizer": r.stabilizer_label,
           "f_tilde": None if r.f_tilde is None else [r.f_tilde.a, r.f_tilde.b],
           "details": r.details}
    return [], res


COMMANDS = {"act": cmd_act, "decompose": cmd_decompose, "flow": cmd_flow, "verify": cmd_verify,
            "tables": cmd_tables, "orbit": cmd_orbit}


def dispatch(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = list(sys.argv[1:] if argv is None else argv)
    command = argv[0] if argv and not argv[0].startswith("-") else None
    try:
        args = build_parser().parse_args(argv)
        env_seed = os.environ.get("ORTHOFLOW_SEED")
        if env_seed is not None and hasattr(args, "seed"):
            try:
                args.seed = int(env_seed)
            except ValueError:
                raise UsageError(f"ORTHOFLOW_SEED: not an integer: {env_seed!r}") from None
        _validate(args)
        command = args.command
        checks, result = COMMANDS[command](args)
    except UsageError as exc:
        rep = make_report(command or "", {}, [], None)
        rep["summary"] = {"status": "usage-error", "error": str(exc)}
        print(to_json(rep), file=out)
        return 2
    except OrthoflowError as exc:
        rep = make_report(command, _config(args), [], None)
        rep["summary"] = {"status": "error", "error": f"{type(exc).__name__}: {exc}"}
        print(to_json(rep), file=out)
        return 1
    rep = make_report(command, _config(args), check_dicts(checks), result)
    print(to_json(rep), file=out)
    return 0 if rep["summary"]["status"] == "pass" else 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
