"""Command line entry point: ``fann ingest|build|query|bench|selftest``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional

from .errors import ArityMismatch, FannError, FeasibilityRefused, StructureMismatch
from .frechet import frechet_decide, frechet_value
from .geometry import PolyCurve
from .index import EAGER, LAZY, ONE_EPS, THREE_EPS, build_one_eps, build_three_eps
from .io import corpus_digest, ingest, load_index, save_index, write_jsonl
from .reduction import ScaleLadder, ann_query, brute_force_nn, build_ladder

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_REFUSED = 3
EXIT_ARITY = 4

VARIANTS = {"one-eps": ONE_EPS, "three-eps": THREE_EPS, ONE_EPS: ONE_EPS, THREE_EPS: THREE_EPS}
LADDER_FORMAT = "fann-ladder"


def _emit(obj, out: Optional[str] = None) -> None:
    text = json.dumps(obj, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _eps_arg(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 0.5:
        raise argparse.ArgumentTypeError("eps must lie in (0, 0.5)")
    return v


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


# ---------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    ds = ingest(args.path, args.format)
    if args.out:
        write_jsonl(args.out, ds)
    print(json.dumps({"curves": len(ds), "d": ds.d, "m": ds.m, "digest": corpus_digest(ds.curves, ds.ids)}))
    return EXIT_OK


def cmd_build(args) -> int:
    ds = ingest(args.data, args.format)
    if len(ds) == 0:
        print("error: the dataset is empty", file=sys.stderr)
        return EXIT_BAD_INPUT
    variant = VARIANTS[args.variant]
    t = time.perf_counter()
    if args.delta is None:
        if args.mode != LAZY:
            print("error: the scale ladder is built lazily; pass --delta for an eager index", file=sys.stderr)
            return EXIT_BAD_INPUT
        ladder = build_ladder(ds.curves, args.eps, args.k, variant=variant, mode=LAZY, oracle=args.oracle)
        manifest = {
            "format": LADDER_FORMAT,
            "version": 1,
            "variant": variant,
            "oracle": args.oracle,
            "params": {"d": ds.d, "k": args.k, "eps": repr(args.eps)},
            "deltas": [repr(x) for x in ladder.deltas],
            "corpus": {"ids": ds.ids, "curves": [c.vertices.tolist() for c in ladder.T],
                       "digest": corpus_digest(ladder.T, ds.ids)},
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, sort_keys=True, separators=(",", ":"))
        _emit({"ladder_scales": len(ladder), "delta_0": ladder.deltas[0], "delta_top": ladder.deltas[-1],
               "wall_s": round(time.perf_counter() - t, 3)})
        return EXIT_OK
    build = build_one_eps if variant == ONE_EPS else build_three_eps
    try:
        idx = build(ds.curves, args.eps, args.delta, args.k, mode=args.mode, budget=args.budget, oracle=args.oracle)
    except FeasibilityRefused as exc:
        _emit({"refused": str(exc), "estimate": exc.estimate, "budget": exc.budget})
        return EXIT_REFUSED
    keys = len(idx.trie) if variant == ONE_EPS else (len(idx.table) if idx.table is not None else 0)
    size = save_index(idx, args.out, ds.ids)
    _emit({
        "variant": variant,
        "mode": args.mode,
        "G1": len(idx.grids.G1),
        "G2": len(idx.grids.G2),
        "G3": len(idx.grids.G3),
        "keys": keys,
        "bytes": size,
        "wall_s": round(time.perf_counter() - t, 3),
    })
    return EXIT_OK


def _load_any(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        blob = json.load(fh)
    if blob.get("format") == LADDER_FORMAT:
        p = blob["params"]
        curves = [PolyCurve(v) for v in blob["corpus"]["curves"]]
        if corpus_digest(curves, blob["corpus"]["ids"]) != blob["corpus"]["digest"]:
            raise StructureMismatch("corpus digest does not match the stored curves")
        deltas = [float(x) for x in blob["deltas"]]
        ladder = ScaleLadder(curves, float(p["eps"]), int(p["k"]), blob["variant"], LAZY, deltas, blob["oracle"])
        return ladder, list(blob["corpus"]["ids"])
    return load_index(path)


def _pad_query(curve: PolyCurve, k: int) -> PolyCurve:
    if curve.m > k:
        raise ArityMismatch(f"query has {curve.m} vertices, the index accepts at most {k}")
    return curve.padded(k)


def cmd_query(args) -> int:
    target, ids = _load_any(args.index)
    queries = ingest(args.queries, args.format, pad=False)
    k = target.k
    lines = []
    for qid, q in zip(queries.ids, queries.curves):
        sigma = _pad_query(q, k)
        row = {"id": qid}
        if isinstance(target, ScaleLadder):
            i = ann_query(target, sigma)
            row["answer"] = ids[i]
            if args.verify:
                _, d_opt = brute_force_nn(target.T, sigma)
                bound = target.bound_factor() * (1.0 + target.eps) * max(d_opt, target.deltas[0]) + 1e-6
                row["distance"] = frechet_value(sigma, target.T[i])
                row["bound"] = bound
                row["bound_ok"] = frechet_decide(sigma, target.T[i], bound)
        else:
            ans = target.query(sigma)
            row["answer"] = "no" if ans.is_no else ids[ans.index]
            if args.verify and not ans.is_no:
                bound = target.bound() + 1e-6
                row["distance"] = frechet_value(sigma, target.T[ans.index])
                row["bound"] = bound
                row["bound_ok"] = frechet_decide(sigma, target.T[ans.index], bound)
        lines.append(json.dumps(row, sort_keys=True))
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_bench

    _emit(run_bench(seed=args.seed, size="quick" if args.quick else "default", queries=args.queries), args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import SUITES, report_json, run_selftest

    only = args.only.split(",") if args.only else None
    unknown = [s for s in (only or []) if s not in SUITES]
    if unknown:
        print(f"error: unknown suites {unknown}; choose from {sorted(SUITES)}", file=sys.stderr)
        return EXIT_BAD_INPUT

    def progress(name, res):
        print(f"{name}: {'pass' if res['passed'] else 'FAIL'}", file=sys.stderr)

    report = run_selftest(seed=args.seed, scale=args.scale, only=only, tol_scale=args.tol_scale, on_suite=progress)
    text = report_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fann", description="Approximate nearest curves under the Fréchet distance.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and validate a curve file")
    p.add_argument("path")
    p.add_argument("--format", choices=["jsonl", "csv"])
    p.add_argument("--out", help="write the padded corpus as jsonl")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("build", help="build an index and save it as JSON")
    p.add_argument("data")
    p.add_argument("--format", choices=["jsonl", "csv"])
    p.add_argument("--eps", type=_eps_arg, default=0.4)
    p.add_argument("--delta", type=_positive, help="fixed scale; omit to build a scale ladder")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--variant", choices=sorted(VARIANTS), default="three-eps")
    p.add_argument("--mode", choices=[LAZY, EAGER], default=LAZY)
    p.add_argument("--oracle", choices=["brute", "canonical"], default="brute")
    p.add_argument("--budget", type=_positive, help="eager test budget (default: FANN_BUDGET or 1e8)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer queries against a saved index")
    p.add_argument("index")
    p.add_argument("queries")
    p.add_argument("--format", choices=["jsonl", "csv"])
    p.add_argument("--verify", action="store_true", help="report exact distances and check the bound")
    p.add_argument("--out")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="time compiled kernels against the numpy fallbacks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--queries", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="run the oracle-comparison suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="fraction of the full case counts")
    p.add_argument("--only", help="comma-separated suite names")
    p.add_argument("--tol-scale", type=float, default=1.0, help="loosen the Fréchet value tolerance (canary)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ArityMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARITY
    except FeasibilityRefused as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (FannError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
