"""Command-line frontend: every subsystem as a subcommand.

Single values print to stdout; bulk data goes to files (atomically
written, byte-identical on reruns with the same arguments and seed).
Numeric flags accept exact rationals like ``1/3`` as well as decimals;
rationals route into the exact-phase code paths.

Exit codes: 0 success, 2 argument/validation error (the message names
the flag), 1 runtime failure (certificate budget, memory guard).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .calibration import DEFAULT_TOLERANCE
from .campaigns import CampaignConfig, ProfileCache, run_campaign
from .checks import (bourgain_envelope, bourgain_sweep, classical_weyl_ratio,
                     completion_check, jarnik_containment, major_arc_lower,
                     mv_local_check, sharpness_witness)
from .diophantine import classify_time, jarnik_witnesses, major_arc_points
from .evaluate import (WeylScale, eval_point, eval_point_naive, eval_t_grid,
                       eval_x_grid)
from .rectangles import (build_collection, count_vs_bound, level_set,
                         partition_by_q, verify_one_dimensional)
from .serialize import (collection_from_json, collection_to_json, grid_to_binary,
                        grid_to_csv, levelset_to_csv, partition_to_json,
                        profile_to_csv, profile_to_json, write_csv)
from .supremum import (CertificateBudgetError, lp_norm, maximal_grid,
                       sup_over_t)


def rational(text: str):
    """Parse a flag value: 'a/q' becomes an exact Fraction, else float."""
    if "/" in text:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den))
    return float(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 2 with the offending flag named
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="weylsums",
                  description="quadratic exponential sums: evaluation, certified "
                              "maximal function, Diophantine structure, scaling "
                              "experiments")
    top.add_argument("--version", action="version", version=__version__)
    top.add_argument("--threads", type=int, default=None,
                     help="cap transform worker threads (default: all cores); "
                          "results are identical for any value")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="w_N(x,t); |w_N| <= N with equality structure "
                                    "at rational points")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--t", type=rational, required=True)
    p.add_argument("--naive", action="store_true", help="per-term reference route")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("grid", help="batch values on an x- or t-grid by one DFT")
    p.add_argument("axis", choices=["x", "t"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--x", type=rational, help="fixed x (t-grid)")
    p.add_argument("--t", type=rational, help="fixed t (x-grid)")
    p.add_argument("--count", type=int, required=True, help="grid length M or K")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "bin"], default="csv")
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("maxfn", help="certified sup_t |w_N| profile; its L4(dx) "
                                     "norm scales as N^(3/4)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, help="x-grid nodes (default 4N)")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                   help="certificate gap in units of N^(3/4)")
    p.add_argument("--x", type=rational, help="single x instead of a grid")
    p.add_argument("--out", help="profile CSV (grid mode)")
    p.add_argument("--json", dest="json_out", help="profile JSON with certificate")
    p.set_defaults(func=_cmd_maxfn)

    p = sub.add_parser("norm", help="L^p norm of the sup profile "
                                    "(p=4 target slope 3/4; p<=6 comparable)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int)
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("classify", help="Dirichlet data of t against the window "
                                        "q <= c log^2(N) 2^m, 2^m ~ N^(2-2a)")
    p.add_argument("--t", type=rational, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--c", type=float, default=1.0)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("arcs", help="major-arc boxes (sum >= cN/sqrt(q) inside) "
                                    "or witnesses within q^-(2+beta) of a/q")
    p.add_argument("kind", choices=["major", "jarnik"])
    p.add_argument("--N", type=int)
    p.add_argument("--q-max", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--q-lo", type=int)
    p.add_argument("--q-hi", type=int)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--all-q", action="store_true", help="include even q")
    p.add_argument("--prime-only", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_arcs)

    p = sub.add_parser("levelset", help="measure of {x : sup_t |w_N| >= c N^a}; "
                                        "decays like N^(3-4a)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_levelset)

    p = sub.add_parser("collection", help="one-dimensional rectangle collections: "
                                          "count bounded by N^(5(1-a))")
    p.add_argument("action", choices=["build", "verify", "partition", "count"])
    p.add_argument("--N", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--in", dest="infile")
    p.add_argument("--out")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.set_defaults(func=_cmd_collection)

    p = sub.add_parser("check", help="inequality checkers; ratios against the "
                                     "stated envelopes")
    p.add_argument("kind", choices=["bourgain", "weyl-ratio", "major-arc", "mv",
                                    "completion", "sharpness", "jarnik"])
    p.add_argument("--N", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--x", type=rational)
    p.add_argument("--t", type=rational)
    p.add_argument("--q", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--dx", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=0.0)
    p.add_argument("--eta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--x-samples", type=int)
    p.add_argument("--seed", type=int, default=20107)
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--evaluate", action="store_true",
                   help="jarnik: also evaluate the large-sum witness (slow)")
    p.add_argument("--out", help="write records CSV (and .json summary) here")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("campaign", help="full scaling sweep; slopes vs the target "
                                        "exponents 3/4, 3-4a, 5(1-a), -3/4")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override output_dir")
    p.add_argument("--seed", type=int, help="override seed")
    p.add_argument("--cache-dir", help="profile cache directory")
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("report", help="summarize a campaign directory as a table")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=_cmd_report)

    return top


def _cmd_eval(args) -> int:
    f = eval_point_naive if args.naive else eval_point
    v = f(args.N, args.x, args.t)
    print(f"{v.real:.12g} {v.imag:.12g}")
    return 0


def _cmd_grid(args) -> int:
    if args.axis == "x":
        if args.t is None:
            raise SystemExit2("--t is required for an x-grid")
        vals = eval_x_grid(args.N, args.t, args.count)
        spacing, fixed = 1.0 / args.count, float(args.t)
    else:
        if args.x is None:
            raise SystemExit2("--x is required for a t-grid")
        vals = eval_t_grid(args.N, args.x, args.count)
        spacing, fixed = 1.0 / args.count, float(args.x)
    if args.format == "csv":
        grid_to_csv(args.out, vals, spacing)
    else:
        grid_to_binary(args.out, vals, args.N, args.axis, fixed)
    print(args.out)
    return 0


def _cmd_maxfn(args) -> int:
    if args.x is not None:
        s, t_star, cert = sup_over_t(args.N, args.x, args.tolerance)
        print(f"{s:.12g} {t_star:.12g} {cert.max_undershoot:.3g}")
        return 0
    prof = maximal_grid(args.N, args.M or args.N, args.tolerance)
    if args.out:
        profile_to_csv(args.out, prof)
        print(args.out)
    if args.json_out:
        profile_to_json(args.json_out, prof)
        print(args.json_out)
    if not args.out and not args.json_out:
        raise SystemExit2("--out or --json is required in grid mode")
    return 0


def _cmd_norm(args) -> int:
    prof = maximal_grid(args.N, args.M or args.N, args.tolerance)
    print(f"{lp_norm(prof, args.p):.12g}")
    return 0


def _cmd_classify(args) -> int:
    cls = classify_time(args.t, WeylScale(args.N, args.alpha), args.delta, args.c)
    print(f"approximant={cls.approximant} distance={cls.distance:.6g} m={cls.m} "
          f"regime={cls.regime} passes={cls.passes_lemma}")
    return 0


def _cmd_arcs(args) -> int:
    if args.kind == "major":
        if args.N is None or args.q_max is None:
            raise SystemExit2("--N and --q-max are required for major arcs")
        boxes = major_arc_points(args.N, args.q_max, odd_only=not args.all_q,
                                 prime_only=args.prime_only)
        write_csv(args.out, ["a", "q", "b", "x_center", "t_center",
                             "x_radius", "t_radius"],
                  [(bx.a, bx.q, bx.b, str(bx.x_center), str(bx.t_center),
                    repr(bx.x_radius), repr(bx.t_radius)) for bx in boxes])
        print(f"{args.out} ({len(boxes)} boxes)")
    else:
        if args.beta is None or args.q_lo is None or args.q_hi is None:
            raise SystemExit2("--beta, --q-lo, --q-hi are required for witnesses")
        pts = jarnik_witnesses(args.beta, (args.q_lo, args.q_hi),
                               odd_only=not args.all_q,
                               samples_per_q=args.samples,
                               prime_only=args.prime_only)
        write_csv(args.out, ["x", "a", "q", "radius"],
                  [(repr(x), c.a, c.q, repr(float(c.q) ** -(2 + args.beta)))
                   for x, c in pts])
        print(f"{args.out} ({len(pts)} witnesses)")
    return 0


def _cmd_levelset(args) -> int:
    prof = maximal_grid(args.N, args.N, args.tolerance)
    rep = level_set(prof, args.alpha, args.c)
    if args.out:
        levelset_to_csv(args.out, rep)
    print(f"{rep.total_measure:.12g}")
    return 0


def _cmd_collection(args) -> int:
    if args.action == "build":
        if args.N is None or args.alpha is None or not args.out:
            raise SystemExit2("build needs --N, --alpha, --out")
        prof = maximal_grid(args.N, args.N, args.tolerance)
        coll = build_collection(prof, args.alpha)
        collection_to_json(args.out, coll)
        print(f"{args.out} ({len(coll)} rectangles)")
        return 0
    if not args.infile:
        raise SystemExit2(f"{args.action} needs --in")
    coll = collection_from_json(args.infile)
    if args.action == "verify":
        ok, witness = verify_one_dimensional(coll)
        print("one-dimensional" if ok else f"violation at x={witness:.6g}")
        return 0 if ok else 1
    if args.action == "partition":
        part = partition_by_q(coll, args.delta, args.c)
        if args.out:
            partition_to_json(args.out, part)
        print(f"classes={sorted(part.classes)} unassigned={len(part.unassigned)} "
              f"ambiguous={len(part.ambiguous)}")
        return 0
    count, bound, ratio = count_vs_bound(coll, args.epsilon)
    print(f"count={count} bound={bound:.6g} ratio={ratio:.6g}")
    return 0


def _write_check_outputs(out, records, summary, args) -> None:
    if not out:
        return
    from .serialize import params_hash, write_json

    if records:
        write_csv(out, ["point", "lhs", "rhs_envelope", "ratio", "flagged"],
                  [(repr(r.point), repr(r.lhs), repr(r.rhs_envelope),
                    repr(r.ratio), r.flagged) for r in records])
    if summary is not None:
        write_json(str(out) + ".json", {
            "max_ratio": summary.max_ratio,
            "p50": summary.p50, "p90": summary.p90, "p99": summary.p99,
            "sample_count": summary.sample_count,
            "fitted_constant": summary.fitted_constant,
            "seed": summary.seed,
            "meta": dict(summary.meta),
            "params_hash": params_hash(vars(args)["kind"] + str(summary.seed)),
        })


def _cmd_check(args) -> int:
    kind = args.kind
    records, summary = [], None
    code = 0
    if kind == "bourgain":
        if args.sweep:
            summary = bourgain_sweep(args.N, args.samples, args.seed)
            print(f"seed={summary.seed} max_ratio={summary.max_ratio:.6g} "
                  f"p99={summary.p99:.6g} p50={summary.p50:.6g} "
                  f"samples={summary.sample_count}")
        else:
            r = bourgain_envelope(args.N, float(args.x), float(args.t))
            records = [r]
            print(f"lhs={r.lhs:.6g} envelope={r.rhs_envelope:.6g} "
                  f"ratio={r.ratio:.6g} q={r.params['q']}")
    elif kind == "weyl-ratio":
        r = classical_weyl_ratio(args.N, args.q, args.a, float(args.x), float(args.t))
        records = [r]
        flag = " (unstable)" if r.flagged else ""
        print(f"lhs={r.lhs:.6g} envelope={r.rhs_envelope:.6g} "
              f"ratio={r.ratio:.6g}{flag}")
    elif kind == "major-arc":
        r = major_arc_lower(args.N, args.q, args.a, args.b, args.dx, args.dt)
        records = [r]
        print(f"lhs={r.lhs:.6g} envelope={r.rhs_envelope:.6g} ratio={r.ratio:.6g}")
    elif kind == "mv":
        summary = mv_local_check(args.N, args.eta, args.x_samples or 4 * args.N,
                                 seed=args.seed)
        print(f"seed={summary.seed} max_ratio={summary.max_ratio:.6g} "
              f"p50={summary.p50:.6g} windows={summary.sample_count}")
    elif kind == "completion":
        summary, records = completion_check(args.N, args.M or args.N,
                                            args.samples, seed=args.seed)
        print(f"seed={summary.seed} max_ratio={summary.max_ratio:.6g} "
              f"p99={summary.p99:.6g} samples={summary.sample_count}")
    elif kind == "sharpness":
        r = sharpness_witness(args.N)
        records = [r]
        print(f"lhs={r.lhs:.6g} floor={r.rhs_envelope:.6g} passes={r.passes}")
        code = 0 if r.passes else 1
    else:  # jarnik
        r = jarnik_containment(args.alpha, args.q, args.delta,
                               evaluate=args.evaluate)
        records = [r]
        print(f"N_q={r.params['N_q']} sandwich={r.passes} lhs={r.lhs:.6g} "
              f"envelope={r.rhs_envelope:.6g}")
        code = 0 if r.passes else 1
    _write_check_outputs(args.out, records, summary, args)
    return code


def _cmd_campaign(args) -> int:
    overrides = {}
    if args.out:
        overrides["output_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    config = CampaignConfig.from_file(args.config, **overrides)
    print(f"seed={config.seed}")
    cache = ProfileCache(args.cache_dir)
    summary = run_campaign(config, cache)
    print(f"{config.output_dir}/summary.json (hash {summary['params_hash']})")
    return 0


def _cmd_report(args) -> int:
    import json
    from pathlib import Path

    summary = json.loads((Path(args.dir) / "summary.json").read_text())
    rows = []
    for section in ("maximal_norm", "level_sets", "rect_counts", "progressions"):
        for key, fit in summary.get(section, {}).items():
            if "slope" in fit:
                rows.append((section, key, f"{fit['slope']:+.4f}",
                             f"{fit['r_squared']:.4f}"))
            else:
                rows.append((section, key, "-", fit.get("error", "-")))
    width = max(len(r[1]) for r in rows) if rows else 8
    print(f"{'section':<14} {'series':<{width}} {'slope':>8} {'r2':>8}")
    for sec, key, slope, r2 in rows:
        print(f"{sec:<14} {key:<{width}} {slope:>8} {r2:>8}")
    return 0


class SystemExit2(Exception):
    """Validation failure mapped to exit code 2."""


def main(argv=None) -> int:
    import os

    import scipy.fft as _fft

    parser = build_parser()
    args = parser.parse_args(argv)
    workers = args.threads if args.threads else os.cpu_count() or 1
    try:
        with _fft.set_workers(workers):
            return args.func(args)
    except SystemExit2 as exc:
        print(f"weylsums: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(f"weylsums: error: {exc}", file=sys.stderr)
        return 2
    except (CertificateBudgetError, MemoryError) as exc:
        print(f"weylsums: failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
