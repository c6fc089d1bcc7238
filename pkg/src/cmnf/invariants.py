"""Differential invariants, equivalence verdicts and polynomial symmetries."""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .hypersurface import TangentField, field_on_germ
from .linalg import rref
from .normalform import (
    Classification,
    DEFAULT_PRECISION,
    classify,
    full_normal_form,
    partial_normal_form,
)
from .scalar import Scalar, precision_context, real
from .series import HoloSeries2, weight

EQUIV_TOL = 1e-25


class WrongBranch(ValueError):
    """Invariants requested for a germ that is not non-umbilic."""


class InsufficientTruncation(ValueError):
    """The normal form is truncated below the weight of L (8)."""


INVARIANT_WEIGHT = 8


@dataclass(frozen=True)
class InvariantSet:
    R: Scalar
    J: Scalar
    K: Scalar
    L: Scalar
    sign_branch: int

    def report(self):
        res = syzygy_residual(self)
        return (f"R={self.R}  J={self.J}  K={self.K}  L={self.L}  "
                f"sign_branch={self.sign_branch}  syzygy_residual={res}")


def cartan_curvature(P):
    """V at z^4 zbar^2 divided by 6; only its vanishing is congruence-invariant."""
    return P.f[(4, 2, 0)] * 8


def chern_moser_invariants(NF):
    if NF.classification.kind != "NonUmbilic":
        raise WrongBranch(f"invariants J, K, L need a non-umbilic germ, got {NF.classification}")
    if NF.f.trunc < INVARIANT_WEIGHT:
        raise InsufficientTruncation(
            f"normal form known only to weight {NF.f.trunc}; J, K, L need weight {INVARIANT_WEIGHT} "
            "(germs with linear terms lose about half their order, use order >= 16)")
    prec = NF.prec
    with precision_context(prec):
        R = NF.v((4, 2, 0)) / 6
        J = NF.v((5, 2, 0)) / 240
        K = NF.v((4, 2, 1)) * Scalar(0, mpq(-1, 48), prec)
        L = NF.v((4, 4, 0))
        # K and L are real on a normal form; keep the real parts
        return InvariantSet(R, J, Scalar(K.re, 0, prec), Scalar(L.re, 0, prec), NF.residual.sign_branch)


def invariants_of(M, precision=DEFAULT_PRECISION):
    """Convenience pipeline: germ -> non-umbilic normal form -> invariants."""
    NF = full_normal_form(partial_normal_form(M), precision)
    return chern_moser_invariants(NF)


def syzygy_residual(inv):
    """(K - 25/24 |J|^2)(L - 75/2 Re J^2) - 192."""
    prec = inv.J.prec
    with precision_context(prec):
        J, K, L = inv.J, inv.K, inv.L
        absJ2 = J.abs2()
        reJ2 = Scalar((J * J).re, 0, prec)
        out = (K - absJ2 * mpq(25, 24)) * (L - reJ2 * mpq(75, 2)) - 192
        return out


# -------------------------------------------------------------- equivalence


@dataclass(frozen=True)
class Verdict:
    kind: str  # Congruent | Distinct | Inconclusive
    detail: str = ""

    def __str__(self):
        return f"{self.kind}({self.detail})" if self.detail else self.kind


def _same_mode(a, b):
    if a.prec == b.prec:
        return a, b
    if a.prec is None:
        return a.to_mode(b.prec), b
    if b.prec is None:
        return a, b.to_mode(a.prec)
    p = min(a.prec, b.prec)
    return a.to_mode(p) if a.prec != p else a, b.to_mode(p) if b.prec != p else b


def _flip(f):
    from .series import Series3

    with precision_context(f.prec):
        d = {k: (v if (k[0] + k[1]) % 2 == 0 else (-v[0], -v[1])) for k, v in f.coeffs.items()}
    return Series3._raw(d, f.trunc, f.prec)


def _coeffs_match(f, g, depth):
    f, g = _same_mode(f, g)
    n = min(depth, f.trunc, g.trunc)
    if f.prec is None:
        return f.agrees(g, upto=n)
    return f.agrees(g, upto=n, tol=EQUIV_TOL)


def equivalent(M1, M2, depth=10, precision=DEFAULT_PRECISION):
    """Local congruence verdict from normal forms compared to weight ``depth``."""
    P1, P2 = partial_normal_form(M1), partial_normal_form(M2)
    c1, c2 = classify(P1), classify(P2)
    if c1.kind != c2.kind:
        if "NonUmbilic" in (c1.kind, c2.kind):
            r1, r2 = cartan_curvature(P1), cartan_curvature(P2)
            return Verdict("Distinct", f"Cartan curvature {r1} vs {r2}")
        return Verdict("Distinct", f"classification {c1} vs {c2}")
    if c1.kind == "UmbilicToOrder":
        n = min(c1.order, c2.order)
        return Verdict("Congruent", f"both flat to order {n}")
    if c1.kind == "SingularlyUmbilic":
        key1 = (c1.order, c1.subkind, c1.types)
        key2 = (c2.order, c2.subkind, c2.types)
        if key1 != key2:
            return Verdict("Distinct", f"classification {c1} vs {c2}")
    N1 = full_normal_form(P1, precision)
    N2 = full_normal_form(P2, precision)
    if c1.kind == "NonUmbilic":
        if _coeffs_match(N1.f, N2.f, depth):
            return Verdict("Congruent", "direct")
        if _coeffs_match(N1.f, _flip(N2.f), depth):
            return Verdict("Congruent", "flip z -> -z")
        return Verdict("Distinct", _witness(N1.f, N2.f, depth))
    if c1.subkind != "CircularToOrder":
        r1, r2 = N1.residual, N2.residual
        same = _close(r1.sigma, r2.sigma) and _close(r1.tau, r2.tau) and c1.data == c2.data
        if not same:
            return Verdict("Inconclusive", "different normalization constants (sigma, tau) or indices")
    if _coeffs_match(N1.f, N2.f, depth):
        return Verdict("Congruent", "direct")
    if c1.subkind == "CircularToOrder":
        return Verdict("Distinct", _witness(N1.f, N2.f, depth))
    return Verdict("Inconclusive", "normal forms differ; canonicality of the normalization constants is unsettled")


def _close(a, b):
    if a is None or b is None:
        return a is None and b is None
    return abs(complex(a) - complex(b)) <= 1e-20 * max(1.0, abs(complex(a)))


def _witness(f, g, depth):
    f, g = _same_mode(f, g)
    n = min(depth, f.trunc, g.trunc)
    keys = sorted({k for k in list(f.coeffs) + list(g.coeffs) if weight(k) <= n},
                  key=lambda k: (weight(k), -k[0], -k[1], -k[2]))
    tol = 0 if f.prec is None else EQUIV_TOL * max(1.0, f.max_abs(n), g.max_abs(n))
    for k in keys:
        d = f[k] - g[k]
        if abs(d) > tol:
            return f"coefficient {k}: {f[k]} vs {g[k]}"
    return "coefficient maps differ"


# -------------------------------------------------------------- symmetries


@dataclass(frozen=True)
class SymmetryResult:
    dim: int
    basis: tuple
    note: str = "tangency checked to truncation order; an upper bound for true symmetries"


def _monomials(d):
    return [(a, n - a) for n in range(d + 1) for a in range(n, -1, -1)]


def polynomial_symmetries(M, degree):
    """Real dimension of tangent fields with polynomial coefficients of degree <= ``degree``."""
    prec = M.prec
    mons = _monomials(degree)
    unknowns = [(slot, ab, part) for slot in ("xi", "theta") for ab in mons for part in (0, 1)]
    cols = []
    with precision_context(prec):
        unit = {0: (1, 0), 1: (0, 1)}
        zero = HoloSeries2({}, None, prec)
        for slot, ab, part in unknowns:
            h = HoloSeries2({ab: unit[part]}, None, prec)
            X = TangentField(h, zero) if slot == "xi" else TangentField(zero, h)
            cols.append(field_on_germ(X, M))
    n = min(c.trunc for c in cols)
    rows_idx = sorted({k for c in cols for k in c.coeffs if weight(k) <= n})
    A = []
    for k in rows_idx:
        for part in (0, 1):
            A.append([c.get_pair(k)[part] for c in cols])
    tol = None
    if prec is not None:
        tol = 2.0 ** (-prec / 2) * max([1.0] + [float(abs(x)) for row in A for x in row])
    if A:
        R, piv = rref(A, tol)
    else:
        R, piv = [], []
    free = [j for j in range(len(unknowns)) if j not in piv]
    basis = []
    with precision_context(prec):
        for fj in free:
            vec = [real(0, prec)] * len(unknowns)
            vec[fj] = real(1, prec)
            for r, pc in enumerate(piv):
                vec[pc] = -R[r][fj]
            basis.append(_field_from_vector(unknowns, vec, prec))
    return SymmetryResult(len(free), tuple(basis))


def _field_from_vector(unknowns, vec, prec):
    xi, th = {}, {}
    for (slot, ab, part), val in zip(unknowns, vec):
        if not val:
            continue
        tgt = xi if slot == "xi" else th
        re_, im_ = tgt.get(ab, (0, 0))
        tgt[ab] = (re_ + val, im_) if part == 0 else (re_, im_ + val)
    return TangentField(HoloSeries2(xi, None, prec), HoloSeries2(th, None, prec))


__all__ = [
    "Classification",
    "InsufficientTruncation",
    "InvariantSet",
    "SymmetryResult",
    "Verdict",
    "WrongBranch",
    "cartan_curvature",
    "chern_moser_invariants",
    "equivalent",
    "invariants_of",
    "polynomial_symmetries",
    "syzygy_residual",
]
