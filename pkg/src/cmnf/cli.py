"""Command line front end.

Exit codes: 0 success, 1 identity failure in ``verify``, 2 parse or usage
error, 3 degenerate Levi form, 4 solver failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import fixtures
from .config import JobConfig, VerifyConfig
from .hypersurface import GraphConditionError, Hypersurface, NotRealError
from .invariants import InsufficientTruncation, WrongBranch, chern_moser_invariants, equivalent, polynomial_symmetries
from .linalg import InconsistentSystem
from .normalform import (
    DegenerateLevi,
    SigmaConstraintViolated,
    SingularResidualSystem,
    classify,
    full_normal_form,
    partial_normal_form,
)
from .scalar import FloatModeRequired
from .series import Series3, SeriesParseError, SingularLinearPart

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DEGENERATE, EXIT_SOLVER = 0, 1, 2, 3, 4

SOLVER_ERRORS = (InconsistentSystem, SigmaConstraintViolated, SingularResidualSystem, FloatModeRequired,
                 SingularLinearPart, GraphConditionError, WrongBranch, InsufficientTruncation, ZeroDivisionError)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- fixtures


def _nums(params, n_max, name):
    if len(params) > n_max:
        raise UsageError(f"{name} takes at most {n_max} parameters")
    try:
        return [Fraction(p) for p in params]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad numeric parameter in {params!r}") from None


def _proj(kind):
    def make(params, trunc, prec):
        vals = _nums(params, 5, f"proj-{kind}")
        a = vals[0] if vals else None
        point = None
        if len(vals) > 1:
            if len(vals) != 5:
                raise UsageError("a base point needs four numbers: Re z Im z Re w Im w")
            point = ((vals[1], vals[2]), (vals[3], vals[4]))
        return fixtures.projective(f"p{kind}", a, point, trunc, prec)
    return make


def _simple(fn):
    def make(params, trunc, prec):
        _nums(params, 0, fn.__name__)
        return fn(trunc=trunc, prec=prec)
    return make


def _std_j(params, trunc, prec):
    (c,) = _nums(params, 1, "std-nonumbilic-J") or [Fraction(1, 10)]
    return fixtures.std_nonumbilic(trunc, c, prec)


def _t1(params, trunc, prec):
    vals = _nums(params, 2, "tube-t1")
    lam, y0 = (vals + [4, 1][len(vals):])[:2]
    return fixtures.tube_t1(lam, y0, trunc, prec)


def _t2(params, trunc, prec):
    vals = _nums(params, 1, "tube-t2")
    return fixtures.tube_t2(vals[0] if vals else 1, trunc, prec)


def _t3(params, trunc, prec):
    vals = _nums(params, 2, "tube-t3")
    a, phi0 = (vals + [1, 0][len(vals):])[:2]
    return fixtures.tube_t3(a, phi0, trunc, prec)


EXAMPLES = {
    "heisenberg": _simple(fixtures.heisenberg),
    "sphere": _simple(fixtures.sphere),
    "std-nonumbilic": _simple(fixtures.std_nonumbilic),
    "std-nonumbilic-J": _std_j,
    "generic-su": _simple(fixtures.generic_su),
    "circ44": _simple(fixtures.circ44),
    "tube-t1": _t1,
    "tube-t2": _t2,
    "tube-t3": _t3,
    "proj-p1": _proj(1),
    "proj-p2": _proj(2),
    "proj-p3": _proj(3),
}

EXAMPLE_HELP = """fixture parameters (all optional, rationals like 1/2):
  std-nonumbilic-J  c                  (default 1/10)
  tube-t1           lambda y0          (default 4 1)
  tube-t2           y0                 (default 1; non-rational values need --mode float)
  tube-t3           a phi0             (default 1 0; phi0 != 0 needs --mode float)
  proj-p1/p2/p3     a [Re z Im z Re w Im w]
tube germs default to order 17 so that their normal forms
still reach weight 8 after the linear terms are removed.
"""


def make_example(name, params, cfg):
    try:
        maker = EXAMPLES[name]
    except KeyError:
        raise UsageError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}") from None
    return maker(params, cfg.trunc, cfg.prec)


# ------------------------------------------------------------------ loading


def load_germ(path, cfg, order=None):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    f = Series3.loads(text, cfg.prec)
    if order is not None:
        if order > f.trunc:
            raise UsageError(f"--order {order} exceeds the file's order {f.trunc}")
        f = f.with_trunc(order)
    return Hypersurface(f)


# ----------------------------------------------------------------- commands


def cmd_normalize(args, cfg, out):
    M = load_germ(args.file, cfg, args.order)
    NF = full_normal_form(partial_normal_form(M), cfg.precision)
    out.write(NF.report())
    if NF.classification.kind == "NonUmbilic":
        out.write(chern_moser_invariants(NF).report() + "\n")
    return EXIT_OK


def cmd_classify(args, cfg, out):
    M = load_germ(args.file, cfg, args.order)
    out.write(f"{classify(partial_normal_form(M))}\n")
    return EXIT_OK


def cmd_invariants(args, cfg, out):
    M = load_germ(args.file, cfg, args.order)
    NF = full_normal_form(partial_normal_form(M), cfg.precision)
    out.write(chern_moser_invariants(NF).report() + "\n")
    return EXIT_OK


def cmd_equiv(args, cfg, out):
    M1 = load_germ(args.file, cfg, args.order)
    M2 = load_germ(args.file2, cfg, args.order)
    out.write(f"{equivalent(M1, M2, cfg.depth, cfg.precision)}\n")
    return EXIT_OK


def cmd_symmetries(args, cfg, out):
    M = load_germ(args.file, cfg, args.order)
    res = polynomial_symmetries(M, args.degree)
    out.write(f"dim {res.dim}\n# {res.note}\n")
    return EXIT_OK


def cmd_verify(args, cfg, out):
    from .symbolic.identities import check_identities, identity_table, report

    vcfg = VerifyConfig(args.max_order)
    if args.list:
        for row in identity_table(vcfg.max_order):
            out.write(f"{row.name:<34} {row.anchor}\n")
        return EXIT_OK
    results = check_identities(vcfg.max_order)
    out.write(report(results) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# tube graphs keep their linear terms and lose about half their order in normalization
RAW_GRAPH_ORDER = 17


def cmd_examples(args, cfg, out):
    if args.order is None and args.name.startswith("tube-"):
        cfg = JobConfig(cfg.mode, cfg.precision, RAW_GRAPH_ORDER, cfg.depth, cfg.seed)
    M = make_example(args.name, args.params, cfg)
    out.write(M.f.dumps())
    return EXIT_OK


# ------------------------------------------------------------------ parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=None, help="truncation order (weighted)")
    common.add_argument("--mode", choices=("exact", "float"), default="exact")
    common.add_argument("--precision", type=int, default=256, help="bits, float mode")
    common.add_argument("--depth", type=int, default=10, help="equivalence comparison depth")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="cmnf", description="Normal forms and invariants of real hypersurfaces in C^2")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("normalize", "full normal form report"), ("classify", "umbilic classification"),
                           ("invariants", "J, K, L and the syzygy residual")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("file")
    s = sub.add_parser("equiv", parents=[common], help="local congruence verdict")
    s.add_argument("file")
    s.add_argument("file2")
    s = sub.add_parser("symmetries", parents=[common], help="polynomial symmetry dimension")
    s.add_argument("file")
    s.add_argument("--degree", type=int, default=2)
    s = sub.add_parser("verify", parents=[common], help="check the symbolic identity table")
    s.add_argument("--max-order", type=int, default=9)
    s.add_argument("--list", action="store_true", help="list identity names without running")
    s = sub.add_parser("examples", parents=[common], help="emit a fixture germ",
                       epilog=EXAMPLE_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("name", help=", ".join(EXAMPLES))
    s.add_argument("params", nargs="*")
    return p


COMMANDS = {
    "normalize": cmd_normalize,
    "classify": cmd_classify,
    "invariants": cmd_invariants,
    "equiv": cmd_equiv,
    "symmetries": cmd_symmetries,
    "verify": cmd_verify,
    "examples": cmd_examples,
}


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        trunc = args.order if args.order is not None else 12
        cfg = JobConfig(args.mode, args.precision, trunc, min(args.depth, trunc), args.seed)
        return COMMANDS[args.command](args, cfg, out)
    except (UsageError, SeriesParseError, NotRealError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except DegenerateLevi as exc:
        err.write(f"degenerate Levi form: {exc}\n")
        return EXIT_DEGENERATE
    except SOLVER_ERRORS as exc:
        err.write(f"solver failure ({type(exc).__name__}): {exc}\n")
        return EXIT_SOLVER
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
