"""Run the worked-example corpus and print one line per fixture."""
import argparse
import sys

from milnerkit.fixtures import FIXTURES, run_fixtures


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help=f"subset of: {', '.join(FIXTURES)}")
    args = ap.parse_args(argv)
    results = run_fixtures(args.names or None)
    for r in results:
        line = f"{'ok  ' if r['ok'] else 'FAIL'} {r['name']:<24} {r['seconds']:.2f}s"
        print(line + ("" if r["ok"] else f"  {r['message']}"))
    bad = sum(not r["ok"] for r in results)
    print(f"{len(results) - bad}/{len(results)} fixtures passed")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
