"""Command-line entry point.

Subcommands: generate, convert, solve, bench, analyze, report. Randomized
subcommands echo the effective master seed to stderr; artifacts embed the
config and seeds needed to regenerate them.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

import numpy as np

from . import __version__
from . import analyze as an
from .bench import (
    default_nsweep,
    density_scan,
    rho_peak_reference,
    scaling_study,
    write_csv_summary,
    write_jsonl,
)
from .convert import (
    load_instance,
    max2sat_from_dict,
    max2sat_to_dict,
    read_wcnf,
    rbm_to_max2sat,
    save_instance,
    write_wcnf,
)
from .generate import GenParams, SaturationError, generate_instance
from .solve import AnnealSchedule, solve_with_restarts

EXIT_USAGE = 2
EXIT_SATURATED = 3
EXIT_IO = 4


def _effective_seed(seed):
    if seed is None:
        seed = secrets.randbits(63)
    print(f"seed: {seed}", file=sys.stderr)
    return int(seed)


def _dump(obj, out):
    text = json.dumps(obj, indent=2) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)


def _cmd_generate(args) -> int:
    seed = _effective_seed(args.seed)
    params = GenParams(
        n=args.n, m=args.m if args.m is not None else args.n, f=args.f,
        rho=args.rho, seed=seed, mode=args.mode, d=args.d,
        jitter=args.alpha_jitter,
    )
    try:
        result = generate_instance(params)
    except SaturationError as exc:
        print(json.dumps({"error": "saturation", "detail": str(exc)}), file=sys.stderr)
        return EXIT_SATURATED
    if args.mode == "uniform-sat":
        if args.format == "wcnf":
            write_wcnf(result, args.out, args.scale)
        else:
            _dump(max2sat_to_dict(result), args.out)
        return 0
    if args.format == "wcnf":
        write_wcnf(rbm_to_max2sat(result), args.out, args.scale)
    else:
        result.meta["version"] = __version__
        save_instance(result, args.out)
    return 0


def _cmd_convert(args) -> int:
    path = getattr(args, "in")
    if path.endswith(".wcnf") or path.endswith(".cnf"):
        sat = read_wcnf(path)
    else:
        with open(path, "r", encoding="ascii") as fh:
            doc = json.load(fh)
        if doc.get("type") == "max2sat":
            sat = max2sat_from_dict(doc)
        else:
            from .convert import instance_from_dict

            sat = rbm_to_max2sat(instance_from_dict(doc))
    if args.format == "wcnf":
        write_wcnf(sat, args.out, args.scale)
    else:
        _dump(max2sat_to_dict(sat), args.out)
    return 0


def _cmd_solve(args) -> int:
    seed = _effective_seed(args.seed)
    inst = load_instance(getattr(args, "in"))
    if args.target is not None:
        target = args.target
    elif inst.ground_energy is not None:
        target = inst.ground_energy
    else:
        print("error: instance has no certified energy; pass --target", file=sys.stderr)
        return EXIT_USAGE
    f = inst.meta.get("f", 0.1)
    n_sweep = args.nsweep if args.nsweep else default_nsweep(inst.n, min(max(f, 1e-3), 0.2499))
    sched = AnnealSchedule(n_sweep=n_sweep, max_runs=args.max_runs, seed=seed,
                           beta_min=args.beta_min)
    rec = solve_with_restarts(inst, target, sched)
    _dump({
        "version": __version__, "seed": seed, "n_sweep": n_sweep,
        "max_runs": args.max_runs, "target": target,
        "found": rec.found, "n_tot": rec.n_tot, "runs_used": rec.runs_used,
        "best_energy": rec.best_energy,
    }, args.out)
    return 0


def _cmd_bench(args) -> int:
    cfg = {}
    if args.config:
        with open(args.config, "r", encoding="ascii") as fh:
            cfg = json.load(fh)
    def pick(flag, key, default=None):
        return flag if flag is not None else cfg.get(key, default)

    seed = _effective_seed(pick(args.seed, "master_seed"))
    n = pick(args.n, "n", 30)
    f = pick(args.f, "f", 0.05)
    samples = pick(args.samples, "samples", 50)
    n_sweep = pick(args.nsweep, "n_sweep")
    max_runs = pick(args.max_runs, "max_runs", 10_000)
    mode = pick(args.mode, "mode", "random")
    d = pick(args.d, "d", 0.5)
    sizes = cfg.get("sizes")
    try:
        if sizes:
            records, fits = scaling_study(
                f, sizes, samples, seed, n_sweep=n_sweep, max_runs=max_runs,
                mode=mode, d=d,
            )
            extra = {"fits": fits}
        else:
            densities = pick(args.rho and [args.rho], "densities")
            if not densities:
                densities = [round(rho_peak_reference(n), 4)]
            records, peak = density_scan(
                n, f, densities, samples, seed, n_sweep=n_sweep,
                max_runs=max_runs, mode=mode, d=d,
            )
            extra = {"peak_rho": peak}
    except SaturationError as exc:
        print(json.dumps({"error": "saturation", "detail": str(exc)}), file=sys.stderr)
        return EXIT_SATURATED
    for rec in records:
        rec["master_seed"] = seed
        rec["version"] = __version__
    write_jsonl(records, args.out)
    if args.csv:
        write_csv_summary(records, args.csv)
    print(json.dumps(extra), file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    name = args.predictor
    try:
        if name == "intersections":
            model = an.intersection_model(args.n, args.m or args.n, args.N)
            out = {"value": model.expected_intersections, "method": model.method,
                   "lambda": model.lam, "expected_frustration": model.expected_frustration}
        elif name == "frustration-decay":
            out = {"value": an.expected_frustration_decay(args.n, args.m or args.n, args.N),
                   "method": "exact-series"}
        elif name == "local-minima":
            val, overflow = an.expected_local_minima_info(args.n, args.alpha)
            out = {"value": val, "overflow": overflow, "method": "exact-series"}
        elif name == "gap-variance":
            out = {"value": an.gap_variance(args.n, args.m or args.n, args.d,
                                            args.mu, args.sigma), "method": "closed-form"}
        elif name == "field-dispersion":
            mean, var, c_v = an.local_field_dispersion(args.n, args.N, args.eps,
                                                       args.r, args.d)
            out = {"mean": mean, "variance": var, "c_v": None if np.isnan(c_v) else c_v,
                   "c_v_defined": not np.isnan(c_v), "method": "closed-form"}
        else:
            print(f"error: unknown predictor {name!r}", file=sys.stderr)
            return EXIT_USAGE
    except ValueError as exc:
        print(json.dumps({"error": "invalid-parameters", "detail": str(exc)}),
              file=sys.stderr)
        return EXIT_USAGE
    out["version"] = __version__
    _dump(out, args.out)
    return 0


def _cmd_report(args) -> int:
    from .report import read_jsonl, render_report

    records = read_jsonl(getattr(args, "in"))
    written = render_report(records, args.out)
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frustloop")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="generate a planted instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--f", type=float, required=True)
    g.add_argument("--rho", type=float, required=True)
    g.add_argument("--d", type=float, default=0.5)
    g.add_argument("--mode", choices=["random", "structured", "uniform-sat"],
                   default="random")
    g.add_argument("--alpha-jitter", type=float, default=0.0)
    g.add_argument("--seed", type=int)
    g.add_argument("--scale", type=int, default=10**6)
    g.add_argument("--format", choices=["json", "wcnf"], default="json")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    c = sub.add_parser("convert", help="convert between instance formats")
    c.add_argument("--in", required=True)
    c.add_argument("--format", choices=["json", "wcnf"], default="wcnf")
    c.add_argument("--scale", type=int, default=10**6)
    c.add_argument("--out", required=True)
    c.set_defaults(func=_cmd_convert)

    s = sub.add_parser("solve", help="anneal an instance to its target energy")
    s.add_argument("--in", required=True)
    s.add_argument("--target", type=float)
    s.add_argument("--nsweep", type=int)
    s.add_argument("--max-runs", type=int, default=10_000)
    s.add_argument("--beta-min", type=float, default=0.01)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", help="measure hardness over a parameter grid")
    b.add_argument("--config")
    b.add_argument("--n", type=int)
    b.add_argument("--f", type=float)
    b.add_argument("--rho", type=float)
    b.add_argument("--d", type=float)
    b.add_argument("--mode", choices=["random", "structured"])
    b.add_argument("--samples", type=int)
    b.add_argument("--nsweep", type=int)
    b.add_argument("--max-runs", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--csv")
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_bench)

    a = sub.add_parser("analyze", help="evaluate a closed-form predictor")
    a.add_argument("predictor", choices=["intersections", "frustration-decay",
                                         "local-minima", "gap-variance",
                                         "field-dispersion"])
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--m", type=int)
    a.add_argument("--N", type=int, default=0)
    a.add_argument("--alpha", type=float, default=1.0)
    a.add_argument("--d", type=float, default=0.5)
    a.add_argument("--mu", type=float, default=0.0)
    a.add_argument("--sigma", type=float, default=1.0)
    a.add_argument("--eps", type=float, default=0.01)
    a.add_argument("--r", type=float, default=0.7)
    a.add_argument("--out")
    a.set_defaults(func=_cmd_analyze)

    r = sub.add_parser("report", help="render figures and CSV from bench output")
    r.add_argument("--in", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(json.dumps({"error": "io", "detail": str(exc)}), file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(json.dumps({"error": "invalid-parameters", "detail": str(exc)}),
              file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
