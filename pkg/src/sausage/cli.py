"""Command-line interface: ``sausage <command> [flags]``.

Every command emits :class:`OutputRecord` rows, as JSON lines (default) or as
CSV with a header.  Exit codes: 0 success, 1 verification failure, 2 usage
error, 3 Monte Carlo budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, expansion, hitting, inversion, montecarlo, ramanujan, verify
from .inversion import InversionConfig, InversionError
from .specfun import KAPPA

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class OutputRecord:
    command: str
    params: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    error_estimates: dict = field(default_factory=dict)
    seed: int | None = None

    def as_dict(self):
        return {
            "command": self.command,
            "params": self.params,
            "values": self.values,
            "error_estimates": self.error_estimates,
            "seed": self.seed,
        }


# ----------------------------------------------------------------------------
# Serialisation
# ----------------------------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        return "null"  # JSON has no NaN/inf
    return format(v, ".17g")


def _json(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_json(str(k))}: {_json(obj[k])}" for k in sorted(obj)) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    return _num(obj)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    s = _num(v)
    return "nan" if s == "null" else s


def _flatten(rec: OutputRecord) -> dict:
    row = {"command": rec.command, "seed": rec.seed}
    for group in ("params", "values", "error_estimates"):
        for k, v in getattr(rec, group).items():
            row[f"{group}.{k}"] = v
    return row


def write_records(records, fmt: str, stream) -> None:
    records = list(records)
    if fmt == "json":
        for r in records:
            stream.write(_json(r.as_dict()) + "\n")
        return
    if not records:
        return
    rows = [_flatten(r) for r in records]
    head = ["command", "seed"]
    rest = sorted({k for row in rows for k in row} - set(head))
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(head + rest)
    for row in rows:
        w.writerow([_cell(row.get(k)) for k in head + rest])


# ----------------------------------------------------------------------------
# Flag helpers
# ----------------------------------------------------------------------------

def _grid(values, spec, flag):
    """Explicit values plus an optional ``lo:hi:n`` log-spaced grid."""
    out = list(values or [])
    if spec:
        try:
            lo, hi, n = spec.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
        except ValueError:
            raise UsageError(flag, "expected lo:hi:n") from None
        if not (lo > 0 and hi >= lo and n >= 0):
            raise UsageError(flag, "need 0 < lo <= hi and n >= 0")
        out += list(np.geomspace(lo, hi, n)) if n else []
    return [float(v) for v in out]


def _positive(values, flag):
    for v in values:
        if not v > 0:
            raise UsageError(flag, f"must be positive, got {v:g}")


def _threads(args):
    if args.threads is not None:
        if args.threads < 1:
            raise UsageError("--threads", "must be a positive integer")
        return args.threads
    env = os.environ.get("SAUSAGE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            n = 0
        if n < 1:
            raise UsageError("SAUSAGE_THREADS", "must be a positive integer")
        return n
    return 1


def _config(args):
    try:
        return InversionConfig(method=args.method, nodes=args.nodes, tail_cut=args.tail_cut)
    except ValueError as e:
        raise UsageError("--nodes/--tail-cut", str(e)) from None


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------

def cmd_eval_n(args):
    if args.lam is not None and (args.alpha is not None or args.t is not None):
        raise UsageError("--lambda", "give either --lambda or --alpha with --t, not both")
    if args.lam is None:
        if args.alpha is None or args.t is None:
            raise UsageError("--alpha/--t", "both are required without --lambda")
        if not args.alpha > 0:
            raise UsageError("--alpha", "must be positive")
        if not args.t > 0:
            raise UsageError("--t", "must be positive")
        alpha, t = args.alpha, args.t
        lam = alpha * t
    else:
        lam = args.lam
        if not (lam >= 0 and math.isfinite(lam)):
            raise UsageError("--lambda", f"must be finite and >= 0, got {lam:g}")
        alpha, t = 1.0, lam
    if args.s is not None and not args.s > 0:
        raise UsageError("--s", "must be positive")
    methods = ["direct", "bouwkamp", "expansion"] if args.n_method == "all" else [args.n_method]
    params = {"lambda": lam, "alpha": alpha, "t": t}
    for m in methods:
        p = dict(params, method=m)
        vals, errs = {}, {}
        if m == "direct":
            vals["value"] = ramanujan.n_direct(lam)
        elif m == "bouwkamp":
            if not lam > 1:
                p["status"] = "skipped: needs lambda > 1"
            else:
                rep = ramanujan.n_bouwkamp(lam, "auto" if args.s is None else args.s)
                vals["value"], vals["s"] = rep.value, rep.s
                errs["bound"] = rep.error_bound
        else:
            if not t > 1:
                p["status"] = "skipped: needs t > 1"
            else:
                a = expansion.a_coeffs(alpha, args.n_max)
                ev = expansion.eval_expansion(t, a, "N")
                vals["value"] = ev.value
                p["n_terms"] = ev.n_terms
                errs["omitted_term"] = ev.omitted
        yield OutputRecord("eval-n", p, vals, errs)


def cmd_coeffs(args):
    if not 0 <= args.n_max <= expansion.N_MAX_CAP:
        raise UsageError("--n-max", f"must lie in [0, {expansion.N_MAX_CAP}]")
    if not args.alpha > 0:
        raise UsageError("--alpha", "must be positive")
    kinds = ("a", "b") if args.kind == "both" else (args.kind,)
    for k in kinds:
        c = (expansion.a_coeffs if k == "a" else expansion.b_coeffs)(args.alpha, args.n_max)
        for n, v in enumerate(c):
            yield OutputRecord("coeffs", {"alpha": args.alpha, "kind": k, "n": n}, {"coefficient": float(v)})


def _ts(args):
    ts = _grid(args.t, args.t_grid, "--t-grid")
    _positive(ts, "--t")
    if not args.r > 0:
        raise UsageError("--r", "must be positive")
    return ts


def cmd_rate(args):
    ts, cfg = _ts(args), _config(args)
    for t in ts:
        p = {"t": t, "r": args.r, "method": cfg.method.value}
        T = t / args.r**2
        try:
            res = inversion.rate_m(T, cfg)
        except InversionError as e:
            yield OutputRecord("rate", dict(p, status=f"error: {e}"), {"rate": math.nan}, {"inversion": e.achieved})
            continue
        v = {"rate": res.m, "leading": res.leading, "correction": res.correction}
        yield OutputRecord("rate", p, v, {"inversion": res.error_estimate})


def cmd_area(args):
    ts, cfg = _ts(args), _config(args)
    for t in ts:
        p = {"t": t, "r": args.r, "method": cfg.method.value}
        try:
            area = inversion.free_area_theory(t, args.r, cfg)
            rate = inversion.rate_m_scaled(t, args.r, cfg)
        except InversionError as e:
            yield OutputRecord("area", dict(p, status=f"error: {e}"), {"area": math.nan}, {"inversion": e.achieved})
            continue
        yield OutputRecord("area", p, {"area": area, "rate": rate})


def cmd_bridge_theory(args):
    ts = _ts(args)
    x = tuple(args.x)
    for t in ts:
        p = {"t": t, "r": args.r, "x": list(x), "M": args.M}
        try:
            pred = inversion.bridge_area_prediction(t, x, args.r, args.M)
        except ValueError as e:
            yield OutputRecord("bridge-theory", dict(p, status=f"error: {e}"), {"value": math.nan})
            continue
        v = {"value": pred.value, "leading": pred.leading, "second": pred.second}
        if x == (0.0, 0.0):
            v["f0_route"] = inversion.bridge_area_f0(t, args.r)
            v["mode_sum"] = inversion.bridge_area_exact(t, args.r)
        yield OutputRecord("bridge-theory", p, v, {"second_term_band": pred.uncertainty})


def cmd_hitting(args):
    ts = _ts(args)
    rhos = _grid(args.rho, args.rho_grid, "--rho-grid")
    for rho in rhos:
        if not rho > args.r:
            raise UsageError("--rho", f"must exceed r = {args.r:g}, got {rho:g}")
    for rho in rhos:
        for t in ts:
            q = hitting.HittingQuery(rho, t, args.r)
            p = {"rho": rho, "t": t, "r": args.r}
            v, e = {}, {}
            try:
                v["q_exact"] = hitting.q_exact(q)
            except InversionError as exc:
                v["q_exact"] = math.nan
                e["q_exact"] = exc.achieved
                p["status"] = f"error: {exc}"
            v["cdf"] = hitting.hitting_cdf(q)
            v["cdf_bound"] = hitting.hitting_cdf_bound(q)
            if args.r == 1.0 and t > 1.0:
                v["density_bound"] = hitting.DENSITY_BOUND_CONSTANT * float(hitting.heat_kernel_radial(t + 1.0, rho))
            try:
                a = hitting.q_asymptotic(q)
                v["q_asymptotic"] = a.value
                p["regime"] = a.regime.value
                e["q_asymptotic"] = a.error_scale
            except ValueError:
                p["regime"] = "none"
            yield OutputRecord("hitting", p, v, e)


def cmd_simulate(args):
    threads = _threads(args)
    for flag, v in (("--t", args.t), ("--r", args.r), ("--grid-h", args.grid_h)):
        if not v > 0:
            raise UsageError(flag, "must be positive")
    for flag, v in (("--n-paths", args.n_paths), ("--n-steps", args.n_steps)):
        if v < 1:
            raise UsageError(flag, "must be a positive integer")
    if not 0 <= args.seed < montecarlo.MAX_SEED:
        raise UsageError("--seed", "must be a 64-bit unsigned integer")
    levels = tuple(int(s) for s in args.levels.split(",")) if args.levels else None
    x = tuple(args.x)
    p = {"mode": args.mode, "t": args.t, "r": args.r, "x": list(x), "n_paths": args.n_paths, "n_steps": args.n_steps}
    kw = dict(seed=args.seed, threads=threads, budget=args.budget)
    try:
        if args.mode == "hitting":
            rho = math.hypot(*x)
            est = montecarlo.estimate_hitting_prob(rho, args.t, args.r, args.n_paths, args.n_steps, **kw)
            theory = hitting.hitting_cdf(hitting.HittingQuery(rho, args.t, args.r))
        else:
            p.update(grid_h=args.grid_h, levels=list(levels or (1,)))
            if args.mode == "free":
                est = montecarlo.estimate_free_area(args.t, args.r, args.n_paths, args.n_steps, args.grid_h, levels=levels, **kw)
                theory = inversion.free_area_theory(args.t, args.r)
            else:
                est = montecarlo.estimate_bridge_area(args.t, x, args.r, args.n_paths, args.n_steps, args.grid_h, levels=levels, **kw)
                try:
                    theory = inversion.bridge_area_theory(args.t, x, args.r)
                except ValueError:
                    theory = math.nan
    except montecarlo.BudgetExceeded:
        raise
    except ValueError as e:
        raise UsageError("--" + args.mode, str(e)) from None
    yield OutputRecord("simulate", p, {"mean": est.mean, "theory": theory}, {"stderr": est.stderr}, seed=args.seed)


def cmd_verify(args):
    threads = _threads(args)
    results = verify.run_suite(args.suite, seed=args.seed, threads=threads, echo=lambda s: print(s, file=sys.stderr))
    args._failed = not all(r.passed for r in results)
    for r in results:
        yield OutputRecord(
            "verify",
            {"criterion": r.cid, "title": r.title, "tolerance": r.tolerance, "passed": r.passed},
            _numeric_leaves(r.measured),
            seed=args.seed if r.mc else None,
        )


def _numeric_leaves(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_numeric_leaves(v, key + "."))
        elif isinstance(v, (list, tuple)):
            for i, x in enumerate(v):
                out[f"{key}[{i}]"] = float(x)
        elif isinstance(v, str):
            continue
        else:
            out[key] = float(v)
    return out


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sausage", description="Wiener sausage area: evaluation, inversion, simulation.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write records here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-n", parents=[common], help="evaluate N(lambda)")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--method", dest="n_method", choices=("direct", "bouwkamp", "expansion", "all"), default="direct")
    p.add_argument("--s", type=float, help="Bouwkamp contour abscissa (default: automatic)")
    p.add_argument("--n-max", type=int, default=20, help="coefficients available to the expansion")
    p.set_defaults(func=cmd_eval_n)

    p = sub.add_parser("coeffs", parents=[common], help="expansion coefficients a_n, b_n")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--kind", choices=("a", "b", "both"), default="both")
    p.set_defaults(func=cmd_coeffs)

    def grid_flags(p, r=True):
        p.add_argument("--t", type=float, nargs="*", default=[])
        p.add_argument("--t-grid", help="log-spaced grid lo:hi:n")
        if r:
            p.add_argument("--r", type=float, default=1.0)

    def inv_flags(p):
        p.add_argument("--method", choices=("talbot", "fourier"), default="talbot")
        p.add_argument("--nodes", type=int, default=24)
        p.add_argument("--tail-cut", type=float, default=1.0)

    p = sub.add_parser("rate", parents=[common], help="growth rate m(t; r)")
    grid_flags(p)
    inv_flags(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("area", parents=[common], help="expected free sausage area")
    grid_flags(p)
    inv_flags(p)
    p.set_defaults(func=cmd_area)

    p = sub.add_parser("bridge-theory", parents=[common], help="conditional area given B_t = x")
    grid_flags(p)
    p.add_argument("--x", type=float, nargs=2, default=(0.0, 0.0))
    p.add_argument("--M", type=float, default=inversion.BRIDGE_M_DEFAULT)
    p.set_defaults(func=cmd_bridge_theory)

    p = sub.add_parser("hitting", parents=[common], help="hitting-time density of a disc")
    grid_flags(p)
    p.add_argument("--rho", type=float, nargs="*", default=[])
    p.add_argument("--rho-grid", help="log-spaced grid lo:hi:n")
    p.set_defaults(func=cmd_hitting)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate with the theory value inlined")
    p.add_argument("--mode", choices=("free", "bridge", "hitting"), default="free")
    p.add_argument("--t", type=float, default=10.0)
    p.add_argument("--x", type=float, nargs=2, default=(0.0, 0.0), help="bridge endpoint, or start point for hitting")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--n-paths", type=int, default=200)
    p.add_argument("--n-steps", type=int, default=10_000)
    p.add_argument("--grid-h", type=float, default=0.05)
    p.add_argument("--levels", help="sub-sampling factors for extrapolation, e.g. 4,2,1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("--budget", type=int, default=montecarlo.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.add_argument("--suite", choices=("quick", "full"), default="quick")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)  # argparse exits with 2 on malformed flags
    try:
        records = list(args.func(args))
    except UsageError as e:
        print(f"sausage {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except montecarlo.BudgetExceeded as e:
        print(f"sausage {args.command}: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    buf = io.StringIO()
    write_records(records, args.format, buf)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_FAIL if getattr(args, "_failed", False) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
