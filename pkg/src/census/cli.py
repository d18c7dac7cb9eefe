"""``census`` command line front end.

Every subcommand reads JSON from a file argument or stdin and writes one JSON
object to stdout.  Exact integers are emitted as decimal strings.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import asymptotics as asy
from . import exact, harness, instances, saddle

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_ROW_ERRORS = 3


def _read(path: str) -> dict | list:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return json.loads(text)


def _bip(args) -> instances.BipartiteInstance:
    return instances.BipartiteInstance.from_dict(_read(args.input))


def _dig(args) -> instances.DigraphInstance:
    return instances.DigraphInstance.from_dict(_read(args.input))


def _frac(v: Fraction) -> dict:
    return {"num": str(v.numerator), "den": str(v.denominator)}


def cmd_count(args):
    if args.digraph:
        v = exact.count_exact_digraph(_dig(args), args.engine)
    else:
        v = exact.count_exact(_bip(args), args.engine)
    return {"value": str(v)}


def cmd_perm(args):
    data = _read(args.input)
    mat = data["matrix"] if isinstance(data, dict) else data
    return {"value": str(exact.permanent_exact(np.array(mat, dtype=np.int64)))}


def cmd_prob(args):
    inst = _bip(args)
    host = instances.BipartiteInstance(inst.m, inst.n, inst.s, inst.t)
    p = exact.prob_exact(host, inst.forbidden, args.mode,
                         tuple(args.window) if args.window else None, args.engine)
    return {"value": _frac(p.value), "numerator": str(p.numerator),
            "denominator": str(p.denominator), "float": float(p)}


def cmd_eperm(args):
    v = exact.expected_permanent_exact(_bip(args), args.path, args.engine)
    return {"value": _frac(v), "float": float(v)}


def cmd_aut(args):
    data = _read(args.input)
    if args.digraph:
        dig = instances.DigraphInstance.from_dict(data)
        v = exact.aut_count_digraph(dig.forbidden_arcs, dig.n)
        size = Fraction(math.factorial(dig.n), v)
    else:
        inst = instances.BipartiteInstance.from_dict(data)
        v = exact.aut_count(inst.forbidden, inst.m, inst.n)
        size = Fraction(math.factorial(inst.m) * math.factorial(inst.n), v)
    return {"value": str(v), "class_size": str(size)}


def cmd_saddle(args):
    inst = _bip(args)
    sp = saddle.solve_saddle(inst, tol=args.tol, max_iter=args.max_iter)
    res = saddle.saddle_residuals(inst, sp)
    if args.dump_lambda:
        np.savetxt(args.dump_lambda, sp.edge_probabilities(), delimiter=",", fmt="%.17g")
    return {
        "a": sp.a.tolist(), "b": sp.b.tolist(),
        "iterations": sp.iterations, "converged": sp.converged, "damped": sp.damped,
        "residuals": {"max_abs": res.max_abs, "balance": res.balance_residual,
                      "max_row": float(np.max(np.abs(res.row_residuals))),
                      "max_col": float(np.max(np.abs(res.col_residuals)))},
    }


def cmd_estimate(args):
    if args.digraph:
        return asy.estimate_log_count_digraph(_dig(args)).to_dict()
    return asy.estimate_log_count_bipartite(_bip(args)).to_dict()


def cmd_miss_hit(args):
    if args.digraph:
        return asy.log_prob_miss_hit_digraph(_dig(args), args.which, args.mode).to_dict()
    return asy.log_prob_miss_hit(_bip(args), args.which, args.mode).to_dict()


def cmd_induced(args):
    if args.kind == "digraph":
        dig = _dig(args)
        ist = instances.induced_stats_digraph(dig, args.window[0])
        host = instances.digraph_stats(instances.DigraphInstance(dig.n, dig.s, dig.t))
        return asy.induced_prob(ist, host, dig.n, dig.n, "digraph").to_dict()
    inst = _bip(args)
    J, K = args.window
    ist = instances.induced_stats(inst, J, K)
    host = instances.compute_stats(instances.BipartiteInstance(inst.m, inst.n, inst.s, inst.t))
    return asy.induced_prob(ist, host, inst.m, inst.n, "bipartite").to_dict()


def cmd_eperm_est(args):
    inst = _bip(args)
    if inst.m != inst.n:
        raise instances.InstanceError("expected permanent needs m == n")
    st = instances.compute_stats(inst)
    return asy.expected_permanent_estimate(inst.n, st.lam, st.R, st.C).to_dict()


def cmd_bounds(args):
    b = asy.permanent_bounds(args.n, args.s)
    return {"vdw_log": b.vdw_log, "gurvits_log": b.gurvits_log,
            "minc_bregman_log": b.minc_bregman_log}


def cmd_avg(args):
    data = _read(args.input)
    z = data["z"] if isinstance(data, dict) else data
    res = asy.averaging_normalize(z, record=args.trace)
    out = {"values": res.array.tolist(), "steps": res.steps}
    if args.trace:
        out["trace"] = [list(p) for p in res.trace]
    return out


def cmd_sweep(args):
    try:
        cfg_dict = _read(args.config)
        if args.seed is not None:
            cfg_dict["seed"] = args.seed
        if args.engine != "auto":
            cfg_dict["engine"] = args.engine
        if args.tol is not None:
            cfg_dict["tol"] = args.tol
        if args.out:
            cfg_dict["output"] = args.out
        if args.format:
            cfg_dict["format"] = args.format
        cfg = harness.SweepConfig.from_dict(cfg_dict)
    except (OSError, ValueError) as exc:
        print(f"census: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = harness.run_compare_sweep(cfg, workers=args.workers)
    text = harness.report_csv(rows) if cfg.format == "csv" else harness.report_json(rows, cfg)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    bad = [r for r in rows if r.errors]
    for r in bad:
        print(f"census: row {r.index}: {'; '.join(r.errors)}", file=sys.stderr)
    return EXIT_ROW_ERRORS if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, top):
        none = None if top else argparse.SUPPRESS
        parser.add_argument("--seed", type=int, default=none)
        parser.add_argument("--engine", choices=("auto", "brute", "dp"),
                            default="auto" if top else argparse.SUPPRESS)
        parser.add_argument("--tol", type=float, default=none)

    # subcommands repeat the global flags without defaults so they never clobber
    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, False)
    p = argparse.ArgumentParser(prog="census",
                                description="Exact and asymptotic counts of 0-1 matrices with given margins.")
    global_flags(p, True)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help, inp=True):
        sp = sub.add_parser(name, parents=[common], help=help)
        if inp:
            sp.add_argument("input", nargs="?", default="-", help="JSON file, '-' for stdin")
        sp.set_defaults(func=func)
        return sp

    sp = add("count", cmd_count, "exact count of B(s,t,H) or D(s,t,X)")
    sp.add_argument("--digraph", action="store_true")
    add("perm", cmd_perm, "exact permanent of a 0-1 matrix")
    sp = add("prob", cmd_prob, "exact probability; the instance's forbidden set is the pattern")
    sp.add_argument("--mode", choices=("disjoint", "contains", "induced"), default="disjoint")
    sp.add_argument("--window", type=int, nargs=2, metavar=("J", "K"))
    sp = add("eperm", cmd_eperm, "exact expected permanent over B(s,t)")
    sp.add_argument("--path", choices=("auto", "enumerate", "symmetry"), default="auto")
    sp = add("aut", cmd_aut, "colour-preserving automorphism count of the pattern")
    sp.add_argument("--digraph", action="store_true")
    sp = add("saddle", cmd_saddle, "solve the saddle-point equations")
    sp.add_argument("--max-iter", type=int, default=saddle.DEFAULT_MAX_ITER)
    sp.add_argument("--dump-lambda", metavar="CSV")
    sp = add("estimate", cmd_estimate, "asymptotic log-count")
    sp.add_argument("--digraph", action="store_true")
    sp = add("miss-hit", cmd_miss_hit, "asymptotic log-probability of avoiding/containing the pattern")
    sp.add_argument("--mode", choices=("general", "host_semiregular", "pattern_semiregular"),
                    default="general")
    sp.add_argument("--which", choices=("miss", "hit"), default="miss")
    sp.add_argument("--digraph", action="store_true")
    sp = add("induced", cmd_induced, "asymptotic induced-window log-probability")
    sp.add_argument("--window", type=int, nargs="+", required=True, metavar="J [K]")
    sp.add_argument("--kind", choices=("bipartite", "digraph"), default="bipartite")
    add("eperm-est", cmd_eperm_est, "asymptotic expected permanent")
    sp = add("bounds", cmd_bounds, "log permanent bounds for constant line sums", inp=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp = add("avg", cmd_avg, "pairwise averaging of a zero-sum vector")
    sp.add_argument("--trace", action="store_true")
    sp = add("sweep", cmd_sweep, "exact-versus-estimate comparison sweep", inp=False)
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--workers", type=int, default=1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is None and args.command == "saddle":
        args.tol = saddle.DEFAULT_TOL
    if args.command == "induced" and args.kind == "bipartite" and len(args.window) != 2:
        print("census: --window needs J K for bipartite windows", file=sys.stderr)
        return EXIT_CONFIG
    try:
        out = args.func(args)
    except (instances.InstanceError, json.JSONDecodeError, KeyError) as exc:
        print(f"census: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"census: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if isinstance(out, int):
        return out
    json.dump(out, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
