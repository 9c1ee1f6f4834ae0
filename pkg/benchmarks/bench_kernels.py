"""Compiled kernels against their numpy fallbacks, plus mean index query time.

    python3 benchmarks/bench_kernels.py [--quick] [--seed N] [--out report.json]
"""

import argparse
import json

from fann.bench import run_bench


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--queries", type=int, default=10)
    ap.add_argument("--out")
    args = ap.parse_args()
    report = run_bench(args.seed, "quick" if args.quick else "default", args.queries)
    width = max(len(k) for k in report["kernels"])
    print(f"backend: {report['backend']}")
    print(f"{'kernel':<{width}}  {'numpy s':>10}  {'numba s':>10}  {'speedup':>8}")
    for name, row in report["kernels"].items():
        nb = row.get("numba_s")
        sp = row.get("speedup")
        print(f"{name:<{width}}  {row['numpy_s']:>10.5f}  "
              f"{'-' if nb is None else f'{nb:.5f}':>10}  {'-' if sp is None else f'{sp:.1f}x':>8}")
    for variant, row in report["queries"].items():
        print(f"{variant} lazy query: {row['mean_query_s'] * 1e3:.2f} ms over {row['queries']} queries")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
