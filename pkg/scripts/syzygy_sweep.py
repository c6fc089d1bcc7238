"""Invariants J, K, L and the syzygy residual over base points of the homogeneous examples."""

import argparse
from fractions import Fraction

from cmnf import fixtures
from cmnf.config import JobConfig
from cmnf.invariants import invariants_of, syzygy_residual

POINTS = {
    "tube-t1": (lambda y, n, p: fixtures.tube_t1(4, y, n, p), (1, 2, Fraction(1, 2), 3)),
    "tube-t3": (lambda t, n, p: fixtures.tube_t3(1, t, n, p), (0, Fraction(1, 3), Fraction(-1, 2), 1)),
    "proj-p1": (lambda pt, n, p: fixtures.proj_p1(2, pt, min(n, 12), p), fixtures.P1_POINTS),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--precision", type=int, default=256)
    ap.add_argument("--trunc", type=int, default=17)
    args = ap.parse_args()
    cfg = JobConfig(mode="float", precision=args.precision, trunc=args.trunc)
    print("germ     point                      J                      K                      L          residual")
    for name, (make, pts) in POINTS.items():
        for pt in pts:
            inv = invariants_of(make(pt, cfg.trunc, cfg.prec), cfg.prec)
            res = abs(complex(syzygy_residual(inv)))
            row = [complex(inv.J).real, complex(inv.K).real, complex(inv.L).real]
            print(f"{name:8} {str(pt):26} " + " ".join(f"{x:22.15g}" for x in row) + f" {res:10.2e}")


if __name__ == "__main__":
    main()
