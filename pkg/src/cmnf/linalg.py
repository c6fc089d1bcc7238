"""Small dense linear algebra over mpq or mpfr."""

from __future__ import annotations

import gmpy2
from gmpy2 import mpq

from .scalar import precision_context


class InconsistentSystem(ArithmeticError):
    """A linear system that should be consistent is not."""


def _is_zero(x, tol):
    return x == 0 if tol is None else abs(x) <= tol


def rref(A, tol=None):
    """Row-reduce a copy of ``A``; returns (R, pivot_columns).

    Exact data (``tol=None``) pivots on the first nonzero entry of each
    column so the pivot pattern is deterministic; float data uses partial
    pivoting with the threshold ``tol``.
    """
    R = [list(row) for row in A]
    m = len(R)
    n = len(R[0]) if m else 0
    # float entries carry their precision; the ambient context may not
    prec = max((x.precision for row in R for x in row if isinstance(x, type(gmpy2.mpfr(0)))), default=None)
    with precision_context(prec):
        return _rref(R, m, n, tol)


def _rref(R, m, n, tol):
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        if tol is None:
            p = next((i for i in range(r, m) if R[i][c] != 0), None)
        else:
            p = max(range(r, m), key=lambda i: abs(R[i][c]))
            if _is_zero(R[p][c], tol):
                p = None
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and not _is_zero(R[i][c], tol):
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A, tol=None):
    return len(rref(A, tol)[1]) if A else 0


def inverse(A, tol=None):
    n = len(A)
    aug = [list(row) + [mpq(1) if i == j else mpq(0) for j in range(n)] for i, row in enumerate(A)]
    R, piv = rref(aug, tol)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def matvec(M, x):
    return [sum((a * b for a, b in zip(row, x)), x[0] * 0) for row in M]


class CachedSolver:
    """Solver for A x = b with a fixed exact matrix A and varying right sides.

    Free unknowns (non-pivot columns of the exact row reduction) are set to
    zero, so the particular solution is deterministic and the same in exact
    and float mode.
    """

    def __init__(self, A):
        self.A = [[mpq(x) for x in row] for row in A]
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        # choose independent rows and pivot columns exactly
        _, cols = rref(self.A)
        self.pivots = cols
        _, rows = rref([list(col) for col in zip(*[[self.A[i][c] for c in cols] for i in range(self.m)])]) if cols else ([], [])
        self.rows = rows
        sub = [[self.A[i][c] for c in cols] for i in rows]
        self.inv = inverse(sub) if sub else []
        self._float = {}

    @property
    def rank(self):
        return len(self.pivots)

    def _inv_for(self, prec):
        if prec is None:
            return self.inv, self.A
        if prec not in self._float:
            with precision_context(prec):
                self._float[prec] = (
                    [[gmpy2.mpfr(x) for x in row] for row in self.inv],
                    [[gmpy2.mpfr(x) for x in row] for row in self.A],
                )
        return self._float[prec]

    def solve(self, b, prec=None, rel_tol=None):
        """Return x with A x = b; raises InconsistentSystem if none exists."""
        inv, A = self._inv_for(prec)
        with precision_context(prec):
            zero = b[0] * 0 if b else mpq(0)
            x = [zero] * self.n
            rhs = [b[i] for i in self.rows]
            for c, val in zip(self.pivots, matvec(inv, rhs) if rhs else []):
                x[c] = val
            res = [ax - bi for ax, bi in zip(matvec(A, x), b)] if self.n else list(b)
            if prec is None:
                if any(res):
                    raise InconsistentSystem("linear system has no solution")
            else:
                scale = max([abs(v) for v in b] + [1])
                tol = rel_tol if rel_tol is not None else 1e-30
                if any(abs(v) > tol * scale for v in res):
                    raise InconsistentSystem("least-squares residual above tolerance")
            return x
