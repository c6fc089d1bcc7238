"""Dimension of polynomial tangent fields for the standard germs."""

import argparse

from cmnf import fixtures
from cmnf.config import JobConfig
from cmnf.hypersurface import Hypersurface
from cmnf.invariants import polynomial_symmetries

CASES = [
    ("heisenberg", lambda n, p: Hypersurface.heisenberg(n, p), 2),
    ("sphere", lambda n, p: fixtures.sphere(n, p), 2),
    ("tube-t1(4,1)", lambda n, p: fixtures.tube_t1(4, 1, n, p), 1),
    ("std-nonumbilic", lambda n, p: fixtures.std_nonumbilic(n, None, p), 2),
    ("circ44", lambda n, p: fixtures.circ44(n, p), 2),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mode", choices=("exact", "float"), default="exact")
    ap.add_argument("--trunc", type=int, default=10)
    args = ap.parse_args()
    cfg = JobConfig(mode=args.mode, trunc=args.trunc, depth=min(10, args.trunc))
    for name, make, degree in CASES:
        res = polynomial_symmetries(make(cfg.trunc, cfg.prec), degree)
        print(f"{name:16} degree {degree}  dim {res.dim}")
    print(f"# {res.note}")


if __name__ == "__main__":
    main()
