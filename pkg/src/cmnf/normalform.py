"""Order-by-order normalization of nondegenerate hypersurface germs.

The partial normal form removes every coefficient outside the family
``(j >= 2 and k >= 4) or (j >= 4 and k >= 2)`` except the Levi term
``z zbar`` (normalized to 1).  What remains free is the five-parameter
isotropy group of the Heisenberg sphere, fixed afterwards by the full
normal form according to the umbilic type of the germ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import gmpy2
from gmpy2 import mpfr, mpq

from .hypersurface import Biholomorphism, Hypersurface, pushforward
from .linalg import CachedSolver, InconsistentSystem, inverse
from .scalar import (
    FloatModeRequired,
    Scalar,
    csqrt_exact,
    csqrt_float,
    exact_root,
    exact_sqrt,
    pair,
    precision_context,
    real,
)
from .series import HoloSeries2, Series3, graded_key, plain_degree, weight

__all__ = [
    "Classification",
    "DegenerateLevi",
    "InconsistentSystem",
    "NormalForm",
    "PartialNF",
    "Residual",
    "SigmaConstraintViolated",
    "SingularResidualSystem",
    "classify",
    "full_normal_form",
    "in_cross_section",
    "partial_normal_form",
    "survives",
    "verify_transform",
]

DEFAULT_PRECISION = 256
NEWTON_TOL = 1e-40
DET_REL_TOL = 1e-20
MAX_SIGMA = 5


class DegenerateLevi(ValueError):
    """The Levi coefficient vanishes; no normal form of this kind exists."""


class SigmaConstraintViolated(ArithmeticError):
    pass


class SingularResidualSystem(ArithmeticError):
    pass


def survives(idx):
    """True for the indices left free by the partial normalization."""
    j, k, _ = idx
    return (j >= 2 and k >= 4) or (j >= 4 and k >= 2)


def in_cross_section(idx):
    """True for the indices forced to zero by the partial normalization."""
    return idx != (1, 1, 0) and not survives(idx)


def zero_tol(prec):
    """Magnitude below which a float coefficient counts as zero."""
    return max(1e-30, 2.0 ** (-prec / 2))


def _is_small(p, prec, scale=1.0):
    if prec is None:
        return not p[0] and not p[1]
    with precision_context(prec):
        return float(abs(p[0]) + abs(p[1])) <= zero_tol(prec) * max(1.0, scale)


def _V(idx):
    j, k, l = idx
    return factorial(j) * factorial(k) * factorial(l)


# ------------------------------------------------------------------ records


@dataclass(frozen=True)
class PartialNF:
    f: Series3
    certificate: tuple
    transform: Biholomorphism

    @property
    def hypersurface(self):
        return Hypersurface(self.f, check=False)

    @property
    def prec(self):
        return self.f.prec


@dataclass(frozen=True)
class Classification:
    """``kind`` is NonUmbilic, UmbilicToOrder or SingularlyUmbilic.

    For singularly umbilic germs ``order`` is the umbilic order n0,
    ``types`` the minimal-degree types (alpha >= beta), ``subkind`` one of
    Generic, SemiCircular, CircularToOrder and ``data`` the indices that
    qualify the subkind.  ``certified_to`` is the truncation order behind
    verdicts that only hold for the finite jet.
    """

    kind: str
    order: int | None = None
    types: tuple = ()
    subkind: str | None = None
    data: tuple = ()
    certified_to: int | None = None

    def __str__(self):
        if self.kind == "NonUmbilic":
            return "NonUmbilic"
        if self.kind == "UmbilicToOrder":
            return f"UmbilicToOrder({self.order})"
        types = ", ".join(f"({a},{b},{c})" for a, b, c in self.types)
        if self.subkind == "Generic":
            sub = "Generic({},{},{})".format(*self.data)
        elif self.subkind == "SemiCircular":
            sub = "SemiCircular({},{},{}; {},{},{})".format(*self.data)
        else:
            sub = f"CircularToOrder({self.data[0]})"
        return f"SingularlyUmbilic(n0={self.order}, types=[{types}], {sub})"


@dataclass(frozen=True)
class Residual:
    """Choices made when fixing the residual isotropy."""

    sign_branch: int | None = None
    sigma: Scalar | None = None
    tau: Scalar | None = None
    lam: Scalar | None = None
    a: Scalar | None = None
    r: Scalar | None = None
    lambda_solutions: tuple = ()
    rotation: bool = False
    method: str = "affine"
    notes: tuple = ()


@dataclass(frozen=True)
class NormalForm:
    f: Series3
    classification: Classification
    transform: Biholomorphism
    residual: Residual = field(default_factory=Residual)

    @property
    def prec(self):
        return self.f.prec

    def v(self, idx):
        return self.f[idx] * _V(idx)

    def report(self):
        lines = [f"classification {self.classification}"]
        res = self.residual
        for name in ("sign_branch", "sigma", "tau", "lam", "a", "r"):
            val = getattr(res, name)
            if val is not None:
                lines.append(f"residual {name} {val}")
        if res.rotation:
            lines.append("residual rotation i*z*d/dz")
        for note in res.notes:
            lines.append(f"# {note}")
        for idx, c in self.f.items():
            lines.append("V {} {} {} {}".format(*idx, c * _V(idx)))
        lines.append("transform")
        lines.append(self.transform.dumps().rstrip())
        return "\n".join(lines) + "\n"


# ------------------------------------------------------ partial normal form


def _unknowns(k):
    out = []
    for tag, deg in (("f", k - 1), ("g", k)):
        for b in range(deg // 2 + 1):
            a = deg - 2 * b
            out.append((tag, a, b, 0))
            out.append((tag, a, b, 1))
    return out


def _equations(k):
    eqs = []
    for l in range(k // 2 + 1):
        rest = k - 2 * l
        for j in range(rest, -1, -1):
            kk = rest - j
            idx = (j, kk, l)
            if j < kk or not in_cross_section(idx):
                continue
            eqs.append((idx, 0))
            if j > kk:
                eqs.append((idx, 1))
    return eqs


@lru_cache(maxsize=None)
def _operator(k):
    """Linearized response of the weight-k cross-section coefficients."""
    T = k
    wH = Series3({(0, 0, 1): 1, (1, 1, 0): (0, 1)}, T)
    zb = Series3.var("zbar", T)
    cols = []
    for tag, a, b, part in _unknowns(k):
        e = (1, 0) if part == 0 else (0, 1)
        s = Series3.monomial((a, 0, 0), e, T) * (wH ** b)
        resp = s.imag_part() if tag == "g" else (zb * s).real_part().scale(-2)
        cols.append(resp)
    eqs = _equations(k)
    A = [[col.get_pair(idx)[part] for col in cols] for idx, part in eqs]
    return CachedSolver(A), eqs


def _weight_step(cur, k):
    """Holomorphic map removing the weight-k cross-section coefficients, or None."""
    prec = cur.prec
    solver, eqs = _operator(k)
    with precision_context(prec):
        b = [-cur.f.get_pair(idx)[part] for idx, part in eqs]
    if all(_is_small((x, x * 0), prec) for x in b):
        return None
    x = solver.solve(b, prec)
    F, Phi = {(1, 0): 1}, {(0, 1): 1}
    with precision_context(prec):
        for (tag, a, bb, part), val in zip(_unknowns(k), x):
            if not val:
                continue
            tgt = F if tag == "f" else Phi
            cur_re, cur_im = pair(tgt.get((a, bb), 0), prec)
            tgt[(a, bb)] = (cur_re + val, cur_im) if part == 0 else (cur_re, cur_im + val)
    return Biholomorphism(HoloSeries2(F, None, prec), HoloSeries2(Phi, None, prec))


def _check_weight(f, k):
    scale = f.max_abs() if f.prec is not None else 1.0
    for idx, _ in _equations(k):
        if not _is_small(f.get_pair(idx), f.prec, scale):
            raise InconsistentSystem(f"coefficient {idx} survived its normalization step")


def _normalize_weights(M, start, cap):
    """Normalize weights start..trunc of M; returns (germ, accumulated map)."""
    prec = M.prec
    acc = Biholomorphism.identity(prec)
    cur = M
    for k in range(start, cur.trunc + 1):
        g = _weight_step(cur, k)
        if g is None:
            continue
        cur = pushforward(cur, g)
        _check_weight(cur.f, k)
        acc = g.compose(acc, cap=cap)
    return cur, acc


def partial_normal_form(M):
    """Partial normal form of a germ, with the map realizing it."""
    f = M.f
    prec = f.prec
    T_in = f.trunc
    acc = Biholomorphism.identity(prec)
    cur = M
    with precision_context(prec):
        alpha = f.get_pair((1, 0, 0))
        c = f.get_pair((0, 0, 1))[0]
        if not _is_small(alpha, prec) or not _is_small((c, c * 0), prec):
            g0 = Biholomorphism.linear(
                1, 0, Scalar.from_pair((2 * alpha[1], -2 * alpha[0]), prec), Scalar(1, -c, prec), prec
            )
            cur = pushforward(cur, g0)
            acc = g0
        f1 = cur.f
        B = f1.get_pair((1, 1, 0))[0]
        if _is_small((B, B * 0), prec, f1.max_abs() if prec is not None else 1.0):
            raise DegenerateLevi("Levi form vanishes at the base point")
        A = f1.get_pair((2, 0, 0))
        if not _is_small(A, prec) or B != 1:
            # W = (w - 2i A z^2) / B
            g1 = Biholomorphism(
                HoloSeries2.var("z", prec),
                HoloSeries2({(2, 0): (2 * A[1] / B, -2 * A[0] / B), (0, 1): (1 / B, B * 0)}, None, prec),
            )
            cur = pushforward(cur, g1)
            acc = g1.compose(acc, cap=T_in)
    cur, renorm = _normalize_weights(cur, 3, T_in)
    acc = renorm.compose(acc, cap=T_in)
    f = cur.f
    if prec is not None:
        f = _clean(f)
    cert = _certificate(f)
    return PartialNF(f, cert, acc)


def _clean(f):
    """Drop float coefficients at cross-section indices (verified small)."""
    scale = f.max_abs()
    d = {}
    for idx, p in f.coeffs.items():
        if in_cross_section(idx):
            if not _is_small(p, f.prec, scale):
                raise InconsistentSystem(f"cross-section coefficient {idx} is not small")
            continue
        d[idx] = p
    one = (real(1, f.prec), real(0, f.prec))
    levi_c = d.get((1, 1, 0), one)
    if _is_small((levi_c[0] - 1, levi_c[1]), f.prec, scale):
        d[(1, 1, 0)] = one  # rounding left by the 1/B rescaling
    return Series3._raw(d, f.trunc, f.prec)


def _certificate(f):
    out = []
    for w in range(f.trunc + 1):
        for l in range(w // 2 + 1):
            rest = w - 2 * l
            for j in range(rest, -1, -1):
                idx = (j, rest - j, l)
                if in_cross_section(idx):
                    if idx in f.coeffs:
                        raise InconsistentSystem(f"cross-section coefficient {idx} is nonzero")
                    out.append(idx)
    if f.get_pair((1, 1, 0)) != (real(1, f.prec), real(0, f.prec)):
        raise InconsistentSystem("Levi coefficient is not 1")
    return tuple(out)


# ------------------------------------------------------------ classification


def _nonzero_survivors(f):
    scale = f.max_abs() if f.prec is not None else 1.0
    return [idx for idx, p in sorted(f.coeffs.items(), key=lambda kv: graded_key(kv[0]))
            if survives(idx) and not _is_small(p, f.prec, scale)]


def classify(P):
    f = P.f
    N = f.trunc
    nz = _nonzero_survivors(f)
    if (4, 2, 0) in nz:
        return Classification("NonUmbilic")
    if not nz:
        return Classification("UmbilicToOrder", order=N, certified_to=N)
    n0 = min(plain_degree(idx) for idx in nz)
    types = sorted({(max(j, k), min(j, k), l) for j, k, l in nz if j + k + l == n0}, key=lambda t: (-t[0], -t[1], t[2]))
    generic = [t for t in types if t[0] > t[1]]
    if generic:
        chosen = _choose_generic(generic)
        return Classification("SingularlyUmbilic", n0, tuple(types), "Generic", chosen)
    off = [idx for idx in nz if idx[0] > idx[1]]
    if off:
        a, _, c = types[0]
        return Classification("SingularlyUmbilic", n0, tuple(types), "SemiCircular", (a, a, c) + off[0])
    return Classification("SingularlyUmbilic", n0, tuple(types), "CircularToOrder", (N,), certified_to=N)


def _choose_generic(types):
    for a, b, c in types:
        if survives((a - 1, b, c + 1)):
            return (a, b, c)
    return types[0]


# ------------------------------------------------------- isotropy machinery


def _isotropy_step(f, lam, a, r, upto, cap=None):
    """Apply the Heisenberg isotropy h(lam, a, r) and renormalize."""
    prec = f.prec
    g = f.truncate(upto)
    h = Biholomorphism.heisenberg_isotropy(lam, a, r, upto, prec)
    M1 = pushforward(Hypersurface(g, check=False), h)
    M2, renorm = _normalize_weights(M1, 3, cap or upto)
    return M2.f, renorm.compose(h, cap=cap or upto)


def _scalar(x, prec):
    return Scalar.from_pair(pair(x, prec), prec)


def _to_real_list(xs, prec):
    return [real(x, prec) for x in xs]


def _affine_solve(F, n, prec):
    """Root of a map R^n -> R^n assumed affine; None when the probe shows it is not."""
    with precision_context(prec):
        zero = [real(0, prec)] * n
        F0 = F(zero)
        cols = []
        for i in range(n):
            e = list(zero)
            e[i] = real(1, prec)
            cols.append([y - y0 for y, y0 in zip(F(e), F0)])
        probe = _to_real_list([2, -3, 5][:n], prec)
        Fp = F(probe)
        pred = [F0[r] + sum(probe[i] * cols[i][r] for i in range(n)) for r in range(n)]
        scale = max([1.0] + [float(abs(v)) for v in F0 + Fp])
        if any(not _is_small((p - q, p * 0), prec, scale) for p, q in zip(pred, Fp)):
            return None, None
        A = [[cols[i][r] for i in range(n)] for r in range(n)]
        det_info = _det_ratio(A)
        try:
            Ainv = inverse(A, None if prec is None else 0)
        except ZeroDivisionError:
            return None, det_info
        x = [-sum(Ainv[i][r] * F0[r] for r in range(n)) for i in range(n)]
        return x, det_info


def _det_ratio(A):
    if len(A) == 1:
        return 1.0 if A[0][0] else 0.0
    (p, q), (r, s) = A
    det = p * s - q * r
    norm = (p * p + q * q + r * r + s * s) / 2
    if not norm:
        return 0.0
    return abs(float(det)) / float(norm)


def _newton(F, n, prec, x0=None):
    """Damped Newton iteration with a finite-difference Jacobian (float mode)."""
    with precision_context(prec):
        x = list(x0) if x0 is not None else [mpfr(0)] * n
        h = mpfr(2) ** (-(prec // 3))
        fx = F(x)
        for _ in range(60):
            nrm = max(abs(v) for v in fx)
            if nrm <= NEWTON_TOL * max(1, max(abs(v) for v in x)):
                return x
            J = []
            for i in range(n):
                e = list(x)
                e[i] += h
                fe = F(e)
                J.append([(a - b) / h for a, b in zip(fe, fx)])
            A = [[J[i][r] for i in range(n)] for r in range(n)]
            try:
                Ainv = inverse(A, 0)
            except ZeroDivisionError:
                raise SingularResidualSystem("singular Jacobian in the residual Newton solve") from None
            step = [-sum(Ainv[i][r] * fx[r] for r in range(n)) for i in range(n)]
            t = mpfr(1)
            while True:
                xn = [a + t * s for a, s in zip(x, step)]
                fn = F(xn)
                if max(abs(v) for v in fn) < nrm or t < mpfr(2) ** -20:
                    break
                t /= 2
            x, fx = xn, fn
        raise SingularResidualSystem("residual Newton solve did not converge")


def _residual_solve(f, lam, targets, prec, notes):
    """Find (a, r) killing ``targets``: [(idx, 'c' | 're'), ...]; a first, then r.

    Both targets are expected to be affine in their unknowns; otherwise a
    joint Newton solve in (Re a, Im a, r) is used.
    """
    (ia, _), (ir, _) = targets
    wa, wr = weight(ia), weight(ir)

    def Fa(x):
        g, _ = _isotropy_step(f, lam, (x[0], x[1]), 0, wa)
        p = g.get_pair(ia)
        return [p[0], p[1]]

    a_sol, det_a = _affine_solve(Fa, 2, prec)
    method = "affine"
    if a_sol is not None:
        a = (a_sol[0], a_sol[1])

        def Fr(x):
            g, _ = _isotropy_step(f, lam, a, x[0], wr)
            return [g.get_pair(ir)[0]]

        r_sol, _ = _affine_solve(Fr, 1, prec)
    else:
        r_sol = None
    if a_sol is None or r_sol is None:
        if prec is None:
            raise FloatModeRequired("residual equations are not affine; float mode needed")
        notes.append("residual equations not affine; Newton fallback")
        method = "newton"

        def Fj(x):
            g, _ = _isotropy_step(f, lam, (x[0], x[1]), x[2], wr)
            pa, pr = g.get_pair(ia), g.get_pair(ir)
            return [pa[0], pa[1], pr[0]]

        x = _newton(Fj, 3, prec)
        a, r = (x[0], x[1]), x[2]
    else:
        r = r_sol[0]
    return a, r, det_a, method


def _lam_nonumbilic(c, prec):
    """Principal lam with lam^2 |lam|^2 = c (the z^4 zbar^2 coefficient)."""
    if prec is None:
        m = exact_sqrt(c[0] * c[0] + c[1] * c[1])
        s = exact_sqrt(m) if m is not None else None
        if s is not None:
            lam = csqrt_exact((c[0] / s, c[1] / s))
            if lam is not None:
                return lam
        raise FloatModeRequired("the scaling parameter is irrational")
    with precision_context(prec):
        m = gmpy2.sqrt(c[0] * c[0] + c[1] * c[1])
        s = gmpy2.sqrt(m)
        return csqrt_float((c[0] / s, c[1] / s))


def _polar_lam(c, n_mod, n_arg, target, prec):
    """lam with |lam|^n_mod = |c|/|target| and arg lam = arg(c/target)/n_arg (principal)."""
    if prec is None:
        if c[1] == 0 and c[0] / target > 0:
            rho = exact_root(c[0] / target, n_mod)
            if rho is not None:
                return (rho, mpq(0))
        raise FloatModeRequired("the scaling parameter is irrational")
    with precision_context(prec):
        absc = gmpy2.sqrt(c[0] * c[0] + c[1] * c[1])
        rho = (absc / abs(mpfr(target))) ** (mpfr(1) / n_mod)
        if not n_arg:
            return (rho, mpfr(0))
        ang = gmpy2.atan2(c[1], c[0])
        if target < 0:
            ang = ang - gmpy2.const_pi() if ang > 0 else ang + gmpy2.const_pi()
        th = ang / n_arg
        return (rho * gmpy2.cos(th), rho * gmpy2.sin(th))


# ----------------------------------------------------------- full normal form


def full_normal_form(P, precision=DEFAULT_PRECISION, allow_float=True):
    """Fix the residual isotropy of a partial normal form."""
    cls = classify(P)
    try:
        return _full(P, cls)
    except FloatModeRequired:
        if P.prec is not None or not allow_float:
            raise
        Pf = PartialNF(P.f.to_mode(precision), P.certificate, P.transform.to_mode(precision))
        return _full(Pf, cls)


def _full(P, cls):
    if cls.kind == "UmbilicToOrder":
        return NormalForm(P.f, cls, P.transform, Residual(notes=("finite-jet verdict",)))
    if cls.kind == "NonUmbilic":
        return _nonumbilic(P, cls)
    if cls.subkind == "Generic":
        return _generic(P, cls)
    return _circular_family(P, cls)


def _finish(P, lam, a, r, upto=None):
    f = P.f
    T = f.trunc
    g, t = _isotropy_step(f, lam, a, r, T, cap=P.transform.trunc or T)
    g = _clean(g) if g.prec is not None else g
    return g, t.compose(P.transform, cap=P.transform.trunc or T)


def _nonumbilic(P, cls):
    f, prec = P.f, P.prec
    notes = []
    c = f.get_pair((4, 2, 0))
    lam = _lam_nonumbilic(c, prec)
    a, r, _, method = _residual_solve(f, lam, [((4, 3, 0), "c"), ((4, 2, 1), "re")], prec, notes)
    g, t = _finish(P, lam, a, r)
    # canonical sign branch
    with precision_context(prec):
        scale = g.max_abs() if prec is not None else 1.0
        sign = 0
        for idx in sorted(g.coeffs, key=graded_key):
            if (idx[0] + idx[1]) % 2 and not _is_small(g.coeffs[idx], prec, scale):
                re_, im_ = g.coeffs[idx]
                if _is_small((re_, re_ * 0), prec, scale):
                    sign = 1 if im_ > 0 else -1
                else:
                    sign = 1 if re_ > 0 else -1
                break
        lam_s = Scalar.from_pair(lam, prec)
        sols = (lam_s, -lam_s)
        branch = 0
        if sign < 0:
            flip = Biholomorphism.scaling(-1, prec)
            g = Series3._raw(
                {k: (v if (k[0] + k[1]) % 2 == 0 else (-v[0], -v[1])) for k, v in g.coeffs.items()}, g.trunc, prec
            )
            t = flip.compose(t, cap=t.trunc)
            branch = -1
            sols = (-lam_s, lam_s)
        elif sign > 0:
            branch = 1
    _verify_nonumbilic(g)
    res = Residual(
        sign_branch=branch,
        lam=sols[0],
        a=_scalar(a, prec),
        r=_scalar(r, prec),
        lambda_solutions=sols,
        method=method,
        notes=tuple(notes),
    )
    return NormalForm(g, cls, t, res)


def _verify_nonumbilic(g):
    prec = g.prec
    scale = g.max_abs() if prec is not None else 1.0
    one = (real(1, prec), real(0, prec))
    d = (g.get_pair((4, 2, 0))[0] - one[0], g.get_pair((4, 2, 0))[1])
    checks = [d, g.get_pair((4, 3, 0)), (g.get_pair((4, 2, 1))[0], one[1])]
    if any(not _is_small(p, prec, scale) for p in checks):
        raise SingularResidualSystem("normal-form conditions failed after the residual solve")


def _generic(P, cls):
    f, prec = P.f, P.prec
    al, be, ga = cls.data
    ia, ir = (al - 1, be, ga + 1), (al, be, ga + 1)
    if not survives(ia):
        raise SingularResidualSystem(f"type {cls.data} leaves no free coefficient to fix the translation")
    c = f.get_pair((al, be, ga))
    last = None
    for sigma in range(1, MAX_SIGMA + 1):
        notes = []
        lam = _polar_lam(c, al + be + 2 * ga - 2, al - be, mpq(sigma, _V((al, be, ga))), prec)
        a, r, det, method = _residual_solve(f, lam, [(ia, "c"), (ir, "re")], prec, notes)
        if det is not None and det < DET_REL_TOL:
            last = f"determinant ratio {det:.3e} at sigma={sigma}"
            continue
        g, t = _finish(P, lam, a, r)
        # the constraint sigma != |V_{alpha-1, beta+1, gamma}| at the imposing stage
        vt = abs(g[(al - 1, be + 1, ga)] * _V((al - 1, be + 1, ga)))
        if abs(float(vt) - sigma) <= 1e-20 * sigma:
            last = f"sigma={sigma} equals |V| of the neighbouring index"
            continue
        notes.append(f"determinant ratio {det:.3e}" if det is not None else "Newton solve")
        res = Residual(sigma=Scalar(sigma, 0, prec), lam=_scalar(lam, prec), a=_scalar(a, prec),
                       r=_scalar(r, prec), method=method, notes=tuple(notes))
        return NormalForm(g, cls, t, res)
    raise SigmaConstraintViolated(f"no admissible sigma in 1..{MAX_SIGMA}: {last}")


def _circular_family(P, cls):
    f, prec = P.f, P.prec
    al, _, ga = cls.types[0]
    ia, ir = (al - 1, al, ga + 1), (al, al, ga + 1)
    c = f.get_pair((al, al, ga))
    sgn = 1 if c[0] > 0 else -1
    circular = cls.subkind == "CircularToOrder"
    sigmas = [sgn] if circular else [sgn * k for k in range(1, MAX_SIGMA + 1)]
    last = None
    for sigma in sigmas:
        notes = []
        lam = _polar_lam(c, 2 * al + 2 * ga - 2, 0, mpq(sigma, _V((al, al, ga))), prec)
        a, r, det, method = _residual_solve(f, lam, [(ia, "c"), (ir, "re")], prec, notes)
        if det is not None and det < DET_REL_TOL:
            last = f"determinant ratio {det:.3e} at sigma={sigma}"
            continue
        g, t = _finish(P, lam, a, r)
        if circular:
            res = Residual(sigma=Scalar(sigma, 0, prec), lam=_scalar(lam, prec), a=_scalar(a, prec),
                           r=_scalar(r, prec), rotation=True, method=method,
                           notes=("finite-jet verdict", *notes))
            return NormalForm(g, cls, t, res)
        g, t, tau = _fix_phase(g, t, cls.data[3:], prec)
        res = Residual(sigma=Scalar(sigma, 0, prec), tau=tau, lam=_scalar(lam, prec), a=_scalar(a, prec),
                       r=_scalar(r, prec), method=method, notes=tuple(notes))
        return NormalForm(g, cls, t, res)
    raise SigmaConstraintViolated(f"no admissible sigma: {last}")


def _fix_phase(g, t, idx, prec):
    """Rotate z so that V at ``idx`` is i*tau with tau > 0."""
    d, k, _ = idx
    m = d - k
    c = g.get_pair(idx)
    units = [((1, 0), (1, 0)), ((-1, 0), (-1, 0)), ((0, 1), (0, -1)), ((0, -1), (0, 1))]
    zeta = None
    with precision_context(prec):
        for u, ubar in units:
            # coefficient scales by zeta^(k - j) = conj(zeta)^m for |zeta| = 1
            p = _cpow(ubar, m, prec)
            cr = (c[0] * p[0] - c[1] * p[1], c[0] * p[1] + c[1] * p[0])
            if _is_small((cr[0], cr[0] * 0), prec) and cr[1] > 0:
                zeta = u
                break
        if zeta is None:
            if prec is None:
                raise FloatModeRequired("rotation angle is not a multiple of pi/2")
            th = (gmpy2.atan2(c[1], c[0]) - gmpy2.const_pi() / 2) / m
            zeta = (gmpy2.cos(th), gmpy2.sin(th))
        zeta = (real(zeta[0], prec), real(zeta[1], prec))
        rot = Biholomorphism.scaling(Scalar.from_pair(zeta, prec), prec)
        g2 = pushforward(Hypersurface(g, check=False), rot).f
        if prec is not None:
            g2 = _clean(g2)
        t2 = rot.compose(t, cap=t.trunc)
        tau = g2[idx] * _V(idx)
        return g2, t2, Scalar.from_pair((tau.im, tau.re * 0), prec)


def _cpow(z, n, prec):
    out = (real(1, prec), real(0, prec))
    for _ in range(n):
        out = (out[0] * z[0] - out[1] * z[1], out[0] * z[1] + out[1] * z[0])
    return out


def verify_transform(M, NF, tol=None):
    """Apply NF.transform to M and compare with NF.f."""
    prec = NF.prec
    M = M.to_mode(prec) if M.prec != prec else M
    img = pushforward(M, NF.transform).f
    n = min(img.trunc, NF.f.trunc)
    if prec is None:
        return img.agrees(NF.f, upto=n)
    return img.agrees(NF.f, upto=n, tol=tol if tol is not None else 1e-25)
