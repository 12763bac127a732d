"""Command-line front end: files in, delimited data (and optional figures) out.

Exit status: 0 success / all bounds hold; 1 a verifier recorded a bound
violation (the witness is written next to the report); 2 bad input or
parameters.  All randomness is seeded and the seed is echoed into output
headers, so identical (argv, seed) runs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .continuous import StepFunction1D, mollification_convergence
from .core import EvaluationWindow, LatticeFunction
from .discrete import (
    frac_max_1d_centered,
    frac_max_1d_uncentered,
    frac_max_nd_centered,
    frac_max_nd_uncentered,
)
from .omega import ConvexBody, count_lattice, enumerate_ball, estimate_constants
from .variation import var_q_discrete
from . import experiments as xp


def _threads_cap() -> int:
    raw = os.environ.get("FRACMAX_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FRACMAX_THREADS must be a nonnegative integer, got {raw!r}")
    if n < 0:
        raise ValueError("FRACMAX_THREADS must be >= 0 (0 = auto)")
    return n


def parse_window(spec: str) -> EvaluationWindow:
    """Inclusive per-dimension ranges, e.g. "-50:50" or "-10:10,-10:10"."""
    lo, hi = [], []
    for part in spec.split(","):
        a, _, b = part.partition(":")
        if not _:
            raise ValueError(f"window component {part!r} must look like lo:hi")
        lo.append(int(a))
        hi.append(int(b))
    return EvaluationWindow(tuple(lo), tuple(hi))


def _parse_floats(spec: str) -> list:
    return [float(x) for x in spec.split(",") if x != ""]


def _load_function(path: str) -> LatticeFunction:
    return LatticeFunction.from_json(Path(path).read_text())


def _load_body(spec: str) -> ConvexBody:
    p = Path(spec)
    if p.exists():
        return ConvexBody.from_json(p.read_text())
    # shorthand: linf:d, lp:p:d
    parts = spec.split(":")
    if parts[0] == "linf" and len(parts) == 2:
        return ConvexBody.linf(int(parts[1]))
    if parts[0] == "lp" and len(parts) == 3:
        return ConvexBody.lp(float(parts[1]), int(parts[2]))
    raise ValueError(f"body {spec!r} is neither a file nor linf:<d> / lp:<p>:<d>")


def _comment(**params) -> str:
    body = " ".join(f"{k}={params[k]}" for k in sorted(params))
    return f"# fracmax {__version__} {body}"


def _write(path, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _maxfun_csv(result, args) -> str:
    win = result.window()
    pts = win.points()
    vals = result.values.values.ravel()
    lines = [_comment(command="maxfun", beta=args.beta, mode=args.mode, window=args.window, seed="none")]
    d = win.dim
    if d == 1 and result.cert_s is not None:
        lines.append("n,value,r,s")
        for p, v, r, s in zip(pts, vals, result.cert_r.ravel(), result.cert_s.ravel()):
            lines.append(f"{p[0]},{float(v)!r},{int(r)},{int(s)}")
    elif result.cert_x0 is not None:
        lines.append(",".join([f"n{i+1}" for i in range(d)] + ["value", "r"] + [f"x0{i+1}" for i in range(d)]))
        x0s = result.cert_x0.reshape(-1, d)
        for p, v, r, x0 in zip(pts, vals, result.cert_r.ravel(), x0s):
            lines.append(",".join([str(int(x)) for x in p] + [repr(float(v)), repr(float(r))] + [repr(float(c)) for c in x0]))
    else:
        lines.append(",".join([f"n{i+1}" for i in range(d)] + ["value", "r"]))
        for p, v, r in zip(pts, vals, result.cert_r.ravel()):
            lines.append(",".join([str(int(x)) for x in p] + [repr(float(v)), repr(float(r))]))
    return "\n".join(lines) + "\n"


def cmd_maxfun(args) -> int:
    f = _load_function(args.input)
    win = parse_window(args.window)
    if f.dim == 1:
        if args.mode == "uncentered":
            res = frac_max_1d_uncentered(f, args.beta, win)
        else:
            res = frac_max_1d_centered(f, args.beta, win)
    else:
        if args.body is None:
            raise ValueError("d >= 2 requires --body")
        body = _load_body(args.body)
        if args.mode == "uncentered":
            res = frac_max_nd_uncentered(f, body, args.beta, win, args.K)
        else:
            res = frac_max_nd_centered(f, body, args.beta, win)
    fmt = args.format or ("json" if args.out and str(args.out).endswith(".json") else "csv")
    if fmt == "json":
        _write(args.out, json.dumps(res.to_json_obj()) + "\n")
    else:
        _write(args.out, _maxfun_csv(res, args))
    if args.plot:
        if not args.out:
            raise ValueError("--plot requires --out")
        from .plots import render_maxfun_figure

        render_maxfun_figure(res, f, str(Path(args.out).with_suffix(".png")))
    return 0


def cmd_variation(args) -> int:
    f = _load_function(args.input)
    win = parse_window(args.window) if args.window else f.window()
    vv = var_q_discrete(f, args.q, win)
    obj = vv.to_json_obj()
    fmt = args.format or ("json" if args.out and str(args.out).endswith(".json") else "csv")
    if fmt == "json":
        _write(args.out, json.dumps(obj) + "\n")
    else:
        text = _comment(command="variation", q=args.q, seed="none") + "\nvalue,q,tail_bound,infinite\n"
        text += f"{obj['value']!r},{obj['q']!r},{obj['tail_bound']!r},{int(obj['infinite'])}\n"
        _write(args.out, text)
    return 0


def cmd_omega(args) -> int:
    body = _load_body(args.omega)
    x0 = _parse_floats(args.x0) if args.x0 else [0.0] * body.dim
    if args.action == "count":
        print(count_lattice(body, x0, args.r))
        return 0
    if args.action == "enumerate":
        pts = enumerate_ball(body, x0, args.r)
        lines = [_comment(command="omega-enumerate", r=args.r, x0=args.x0, seed="none")]
        lines.append(",".join(f"m{i+1}" for i in range(body.dim)))
        for p in pts:
            lines.append(",".join(str(int(x)) for x in p))
        _write(args.out, "\n".join(lines) + "\n")
        return 0
    oc = estimate_constants(body, args.r_max)
    obj = {
        "c_omega": oc.c_omega,
        "c1": oc.c1,
        "c2": oc.c2,
        "lambda": oc.lam,
        "r_max_fitted": oc.r_max_fitted,
    }
    _write(args.out, json.dumps(obj) + "\n")
    return 0


def _emit_report(report, args) -> int:
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(json.dumps(report.to_json_obj()) + "\n")
    csv_path = getattr(args, "csv", None)
    if csv_path:
        Path(csv_path).write_text(report.to_csv())
    if not out and not csv_path:
        sys.stdout.write(report.to_csv())
    if getattr(args, "plot", False):
        if not (out or csv_path):
            raise ValueError("--plot requires --out or --csv")
        from .plots import render_report_figures

        prefix = str(Path(out or csv_path).with_suffix(""))
        render_report_figures(report, prefix)
    status = 0 if report.passed else 1
    if status == 1:
        base = Path(out or csv_path or "report.json")
        for idx in report.violations[:8]:
            w = _witness_for(report, idx)
            if w is not None:
                wpath = base.with_name(base.stem + f".witness{idx}.json")
                wpath.write_text(json.dumps(w) + "\n")
                print(f"violation witness written to {wpath}", file=sys.stderr)
    print(
        f"{report.experiment}: passed={report.passed} max_ratio={report.max_ratio!r} "
        f"trials={len(report.trials)} runtime={report.runtime_seconds:.2f}s",
        file=sys.stderr,
    )
    return status


def _witness_for(report, index: int):
    p = report.params
    rec = next((t for t in report.trials if t.index == index), None)
    if rec is None:
        return None
    rng = xp._child_rng(rec.seed, rec.index)
    if report.experiment == "thm2":
        return xp.random_function_1d(rng, p["support_len"]).to_json_obj()
    if report.experiment == "thm1":
        return xp.random_step_function(rng, p["pieces"]).to_json_obj()
    return rec.to_json_obj()


def cmd_verify(args) -> int:
    if args.suite == "thm2":
        rep = xp.verify_thm2(args.trials, args.support, _parse_floats(args.betas), args.seed)
    elif args.suite == "thm1":
        rep = xp.verify_thm1(args.trials, args.pieces, _parse_floats(args.betas), args.seed)
    elif args.suite == "thm3":
        body = _load_body(args.body)
        rep = xp.verify_thm3(
            args.trials, args.d, body, args.beta, args.alpha, args.q, args.seed, explore=args.explore
        )
    elif args.suite == "pointwise":
        body = _load_body(args.body)
        rep = xp.pointwise_regularization_check(args.trials, args.d, body, args.beta, args.seed)
    elif args.suite == "monotone":
        rep = xp.run_monotone_segment_trials(args.trials, args.seed)
    elif args.suite == "radius":
        rep = xp.run_radius_stability_trials(args.trials, args.seed)
    else:
        raise ValueError(f"unknown verify suite {args.suite!r}")
    return _emit_report(rep, args)


def cmd_scaling(args) -> int:
    a, _, b = args.k.partition(":")
    k_list = list(range(int(a), int(b) + 1)) if _ else [int(x) for x in args.k.split(",")]
    body = _load_body(args.body)
    rep = xp.scaling_experiment(args.d, body, args.beta, args.alpha, args.q, k_list)
    return _emit_report(rep, args)


def cmd_search(args) -> int:
    res = xp.extremal_search(args.mode, args.beta, args.size, args.iterations, args.restarts, args.seed)
    _write(args.out, json.dumps(res.to_json_obj()) + "\n")
    if args.plot:
        if not args.out:
            raise ValueError("--plot requires --out")
        from .plots import render_search_figure

        render_search_figure(res, str(Path(args.out).with_suffix(".png")))
    print(f"search {args.mode} beta={args.beta}: best ratio {res.best_ratio!r}", file=sys.stderr)
    return 0


def cmd_convergence(args) -> int:
    f = StepFunction1D.from_json(Path(args.input).read_text())
    eps = _parse_floats(args.eps)
    if args.queries == "auto":
        qs = xp._convergence_queries(f, max(eps))
    else:
        qs = sorted(_parse_floats(args.queries))
    table = mollification_convergence(f, args.beta, eps, qs)
    fmt = args.format or ("json" if args.out and str(args.out).endswith(".json") else "csv")
    if fmt == "json":
        _write(args.out, json.dumps(table.to_json_obj()) + "\n")
    else:
        lines = [_comment(command="convergence", beta=args.beta, eps=args.eps, seed="none")]
        lines.append("eps,sup_discrepancy,step_error_bound")
        for e, s, err in zip(table.eps, table.sup_discrepancy, table.step_error_bound):
            lines.append(f"{e!r},{s!r},{err!r}")
        _write(args.out, "\n".join(lines) + "\n")
    if args.plot:
        if not args.out:
            raise ValueError("--plot requires --out")
        from .plots import render_convergence_figure

        render_convergence_figure(table, str(Path(args.out).with_suffix(".png")))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracmax", description=__doc__)
    ap.add_argument("--version", action="version", version=f"fracmax {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maxfun", help="evaluate a discrete maximal function")
    p.add_argument("--input", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--mode", choices=["centered", "uncentered"], default="uncentered")
    p.add_argument("--window", required=True, help="inclusive lo:hi per dimension, comma separated")
    p.add_argument("--body", help="body JSON file or linf:<d> / lp:<p>:<d>")
    p.add_argument("--K", type=int, default=2, help="center refinement for uncentered d >= 2")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_maxfun)

    p = sub.add_parser("variation", help="discrete q-variation of a function")
    p.add_argument("--input", required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--window")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(fn=cmd_variation)

    p = sub.add_parser("omega", help="lattice ball counting and constants")
    p.add_argument("action", choices=["count", "enumerate", "constants"])
    p.add_argument("--omega", required=True, help="body JSON file or linf:<d> / lp:<p>:<d>")
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--x0", help="comma separated center, defaults to the origin")
    p.add_argument("--r-max", dest="r_max", type=float, default=20.0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_omega)

    p = sub.add_parser("verify", help="run an inequality verification suite")
    p.add_argument("suite", choices=["thm1", "thm2", "thm3", "pointwise", "monotone", "radius"])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--support", type=int, default=64)
    p.add_argument("--pieces", type=int, default=20)
    p.add_argument("--betas", default="0,0.25,0.5,0.75")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--q", type=float, default=4.0 / 3.0)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--body", default="linf:2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--explore", action="store_true", help="skip admissibility and assertions (open-question mode)")
    p.add_argument("--out")
    p.add_argument("--csv")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("scaling", help="dilation-family scaling exponents")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--body", default="linf:2")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--k", default="4:40", help="k range a:b or comma list")
    p.add_argument("--out")
    p.add_argument("--csv")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_scaling)

    p = sub.add_parser("search", help="extremal-ratio hill climbing")
    p.add_argument("--mode", choices=["thm1", "thm2"], required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--size", type=int, default=32)
    p.add_argument("--iterations", type=int, default=400)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("convergence", help="mollification convergence table")
    p.add_argument("--input", required=True, help="step function JSON")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--eps", default="0.2,0.1,0.05,0.025")
    p.add_argument("--queries", default="auto")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=cmd_convergence)

    return ap


# flags whose values may start with "-" (windows, centers, ranges);
# merged into --flag=value so argparse does not mistake them for options
_DASH_VALUE_FLAGS = {"--window", "--x0", "--betas", "--eps", "--queries", "--k"}


def _merge_dash_values(argv) -> list:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _DASH_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv=None) -> int:
    ap = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_dash_values(list(argv))
    try:
        args = ap.parse_args(argv)
        _threads_cap()
        return args.fn(args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
