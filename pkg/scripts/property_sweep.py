"""Randomized property sweep, optionally with an exhaustive derivative comparison.

The exhaustive pass compares partial derivatives and 1-chart steps against the
rule-table interpreter in tests/oracles.py for every expression over {0, 1, a, b}
with at most --max-ops operators.
"""
import argparse
import json
import os
import sys
import time

from milnerkit.sweep import run_sweep


def exhaustive(max_ops: int) -> dict:
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))
    import oracles
    from milnerkit.charts import one_steps, partial_derivatives

    checked, failures = 0, []
    for level in oracles.all_exprs(max_ops):
        for e in level:
            checked += 1
            same = all(partial_derivatives(a, e) == oracles.plain_derivatives(a, e) for a in "ab")
            if not same or one_steps(e) != oracles.one_chart_steps(e):
                failures.append(str(e))
        oracles.clear_caches()
    return {"checked": checked, "failures": len(failures), "examples": failures[:3]}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--max-ops", type=int, default=None,
                    help="also run the exhaustive derivative comparison up to this bound")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    t0 = time.time()
    res = run_sweep(args.seed, args.count)
    if args.max_ops is not None:
        res["exhaustive-derivatives"] = exhaustive(args.max_ops)
    if args.json:
        print(json.dumps(res, indent=2))
    else:
        for name, r in res.items():
            print(f"{name:<24} {r['checked']:>8} checked  {r['failures']} failures")
            for ex in r["examples"]:
                print(f"    {ex}")
        print(f"{time.time() - t0:.1f}s")
    return 1 if any(r["failures"] for r in res.values()) else 0


if __name__ == "__main__":
    sys.exit(main())
