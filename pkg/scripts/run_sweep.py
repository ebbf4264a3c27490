"""Run verification suites over a grid and write JSON-lines reports plus a summary.

    python3 scripts/run_sweep.py --p-list 11,13 --suites main --k-max 500 --out results/main.jsonl
"""

import argparse
import json
import os
import sys
import time

from ghostslopes.verify import SUITES, SweepConfig, summarize, sweep


def ints(text):
    return tuple(int(x) for x in text.split(",") if x)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p-list", type=ints, default=(11, 13))
    ap.add_argument("--a-list", type=ints)
    ap.add_argument("--b-list", type=ints)
    ap.add_argument("--k-max", type=int, default=500)
    ap.add_argument("--suites", default="main", help=f"comma list from {','.join(SUITES)} or 'all'")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/sweep.jsonl")
    args = ap.parse_args()

    suites = SUITES if args.suites == "all" else tuple(args.suites.split(","))
    cfg = SweepConfig(p_list=args.p_list, a_list=args.a_list, b_list=args.b_list, k_max=args.k_max)
    t = time.perf_counter()
    reports = sweep(cfg, suites, jobs=args.jobs)
    secs = time.perf_counter() - t
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w") as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")
    summary = {"config": {"p_list": cfg.p_list, "a_list": cfg.a_list, "b_list": cfg.b_list, "k_max": cfg.k_max},
               "suites": suites, "seconds": round(secs, 1), "counts": summarize(reports)}
    with open(os.path.splitext(args.out)[0] + ".summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    print(json.dumps(summary["counts"], sort_keys=True))
    print(f"{len(reports)} reports in {secs:.1f}s -> {args.out}")
    return 1 if any(r.status == "fail" for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())
