"""Push a germ through seeded random biholomorphisms and compare normal forms."""

import argparse
import random
import sys
from fractions import Fraction

from cmnf import fixtures
from cmnf.config import JobConfig
from cmnf.hypersurface import Biholomorphism, pushforward
from cmnf.invariants import equivalent
from cmnf.normalform import full_normal_form, partial_normal_form
from cmnf.series import HoloSeries2


def random_map(rng):
    def c():
        return (Fraction(rng.randint(-3, 3), rng.randint(1, 4)), Fraction(rng.randint(-3, 3), rng.randint(1, 4)))

    lam = (0, 0)
    while lam == (0, 0):
        lam = c()
    F = {(1, 0): lam, (0, 1): c(), (2, 0): c(), (1, 1): c(), (0, 2): c()}
    P = {(0, 1): Fraction(rng.randint(1, 3), rng.randint(1, 2)), (2, 0): c(), (1, 1): c(), (0, 2): c()}
    return Biholomorphism(HoloSeries2(F, None), HoloSeries2(P, None))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--maps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--c", type=Fraction, default=None, help="coefficient of z^5 zbar^2")
    args = ap.parse_args()
    cfg = JobConfig(seed=args.seed)
    M = fixtures.std_nonumbilic(cfg.trunc, args.c)
    base = full_normal_form(partial_normal_form(M), cfg.precision)
    rng = random.Random(cfg.seed)
    bad = 0
    for i in range(args.maps):
        img = pushforward(M, random_map(rng))
        N = full_normal_form(partial_normal_form(img), cfg.precision)
        verdict = equivalent(M, img, cfg.depth, cfg.precision)
        ok = N.classification == base.classification and verdict.kind == "Congruent"
        bad += not ok
        mode = "exact" if N.prec is None else f"{N.prec}-bit"
        print(f"map {i:3d}  {mode:8} {N.classification}  {verdict}  {'ok' if ok else 'MISMATCH'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
