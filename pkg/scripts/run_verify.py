"""Run the symbolic identity table and print one line per identity."""

import argparse
import sys
import time

from cmnf.config import VerifyConfig
from cmnf.symbolic.identities import check_identities, report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", type=int, default=9)
    cfg = VerifyConfig(ap.parse_args().max_order)
    t0 = time.perf_counter()
    results = check_identities(cfg.max_order)
    print(report(results).rstrip("\n"))
    bad = sum(not r.passed for r in results)
    print(f"# {len(results) - bad}/{len(results)} passed in {time.perf_counter() - t0:.1f}s")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
