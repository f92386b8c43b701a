"""Dual-mode dense linear algebra.

A matrix is a two-dimensional numpy array.  Arrays of dtype ``object``
holding :class:`fractions.Fraction` entries are handled exactly; ``float64``
arrays use tolerance-based decisions.  In float mode a singular value counts
toward the rank when it exceeds ``tol * sigma_max * max(rows, cols)``.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import kernels
from .errors import Inconsistent, NotSymmetric, ParseError

DEFAULT_TOL = 1e-10
_tol = [DEFAULT_TOL]


def get_tolerance() -> float:
    return _tol[0]


def set_tolerance(tol: float) -> None:
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    _tol[0] = float(tol)


@contextlib.contextmanager
def tolerance(tol: float | None) -> Iterator[None]:
    """Temporarily override the float-mode tolerance."""
    old = _tol[0]
    if tol is not None:
        set_tolerance(tol)
    try:
        yield
    finally:
        _tol[0] = old


# ---------------------------------------------------------------- conversion


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise ParseError(f"boolean is not a number: {x!r}")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ParseError(f"non-finite value {x!r}")
        return Fraction(float(x))
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise ParseError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"cannot parse {x!r} as a rational number") from exc
    raise ParseError(f"unsupported scalar {x!r}")


def is_exact(M: np.ndarray) -> bool:
    return np.asarray(M).dtype == object


def exact(M) -> np.ndarray:
    """Return an object array of Fractions with the same shape as ``M``."""
    a = np.asarray(M, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = to_fraction(v)
    return out


def floating(M) -> np.ndarray:
    a = np.asarray(M)
    if a.dtype == object:
        out = np.empty(a.shape, dtype=float)
        for idx, v in np.ndenumerate(a):
            out[idx] = float(v)
        return out
    return a.astype(float)


def convert(M, exact_mode: bool) -> np.ndarray:
    return exact(M) if exact_mode else floating(M)


def zeros(rows: int, cols: int, exact_mode: bool) -> np.ndarray:
    if exact_mode:
        out = np.empty((rows, cols), dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros((rows, cols))


def eye(n: int, exact_mode: bool) -> np.ndarray:
    out = zeros(n, n, exact_mode)
    for i in range(n):
        out[i, i] = Fraction(1) if exact_mode else 1.0
    return out


def zeros_like_mode(ref: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return zeros(rows, cols, is_exact(ref))


def matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix product that stays well-typed for empty exact operands."""
    if A.shape[1] == 0 and is_exact(A):
        return zeros(A.shape[0], B.shape[1], True)
    return A @ B


def hstack(blocks, rows: int | None = None, exact_mode: bool = True) -> np.ndarray:
    blocks = [b for b in blocks]
    if not blocks:
        return zeros(rows or 0, 0, exact_mode)
    return np.hstack(blocks)


def vstack(blocks, cols: int | None = None, exact_mode: bool = True) -> np.ndarray:
    blocks = [b for b in blocks]
    if not blocks:
        return zeros(0, cols or 0, exact_mode)
    return np.vstack(blocks)


def is_zero(M: np.ndarray, tol: float | None = None, scale: float = 1.0) -> bool:
    if M.size == 0:
        return True
    if is_exact(M):
        return all(v == 0 for v in M.flat)
    t = get_tolerance() if tol is None else tol
    return float(np.max(np.abs(M))) <= t * max(scale, 1.0)


def is_symmetric(M: np.ndarray, tol: float | None = None) -> bool:
    if M.shape[0] != M.shape[1]:
        return False
    if is_exact(M):
        return bool(np.all(M == M.T))
    t = get_tolerance() if tol is None else tol
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    return bool(np.all(np.abs(M - M.T) <= t * scale))


def max_abs(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(max(abs(float(v)) for v in M.flat))


# ---------------------------------------------------------------- exact core


def _integer_rows(M: np.ndarray) -> list[list[int]]:
    rows = []
    for r in M:
        fr = [v if isinstance(v, Fraction) else Fraction(v) for v in r]
        den = 1
        for v in fr:
            if v.denominator != 1:
                den = math.lcm(den, v.denominator)
        rows.append([v.numerator * (den // v.denominator) for v in fr])
    return rows


def _exact_pivots(M: np.ndarray) -> tuple[list[int], list[list[int]]]:
    if M.shape[0] == 0 or M.shape[1] == 0:
        return [], []
    return kernels.echelon(_integer_rows(M), M.shape[1])


def _exact_rref(M: np.ndarray) -> tuple[list[int], list[list[Fraction]]]:
    """Pivot columns and the nonzero rows of the reduced row echelon form."""
    pivots, ech = _exact_pivots(M)
    ncols = M.shape[1]
    rows = [[Fraction(v) for v in r] for r in ech]
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        rk = rows[k]
        pv = rk[c]
        if pv != 1:
            rows[k] = rk = [v / pv for v in rk]
        for i in range(k):
            f = rows[i][c]
            if f:
                ri = rows[i]
                rows[i] = [ri[j] - f * rk[j] if j >= c else ri[j] for j in range(ncols)]
    return pivots, rows


def _exact_inverse(M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            raise np.linalg.LinAlgError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        rc = [v / pv for v in a[c]]
        a[c] = rc
        for i in range(n):
            if i != c:
                f = a[i][c]
                if f:
                    ri = a[i]
                    a[i] = [ri[j] - f * rc[j] for j in range(2 * n)]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = a[i][n + j]
    return out


# ---------------------------------------------------------------- float core


def _float_threshold(M: np.ndarray, tol: float | None) -> tuple[np.ndarray, float]:
    t = get_tolerance() if tol is None else tol
    s = np.linalg.svd(M, compute_uv=False)
    smax = float(s[0]) if s.size else 0.0
    return s, t * smax * max(M.shape)


def _float_pivots(M: np.ndarray, tol: float | None, scale: float | None = None) -> list[int]:
    t = get_tolerance() if tol is None else tol
    if M.size == 0:
        return []
    norm = max(float(np.linalg.norm(M, 2)), scale or 0.0)
    thresh = t * norm * max(M.shape)
    basis: list[np.ndarray] = []
    pivots = []
    for j in range(M.shape[1]):
        v = M[:, j].astype(float).copy()
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        nv = float(np.linalg.norm(v))
        if nv > thresh and nv > 0:
            basis.append(v / nv)
            pivots.append(j)
    return pivots


# ---------------------------------------------------------------- public API


@dataclass(frozen=True)
class RankReport:
    """Rank, a kernel basis (as columns) and the pivot column indices."""

    rank: int
    kernel_basis: np.ndarray
    column_space_basis: tuple[int, ...]


def pivot_columns(M: np.ndarray, tol: float | None = None, scale: float | None = None) -> list[int]:
    """Indices of columns not in the span of the preceding columns.

    In float mode ``scale`` floors the norm used for the threshold, so a
    submatrix made of roundoff is judged against its parent matrix.
    """
    if is_exact(M):
        return _exact_pivots(M)[0]
    return _float_pivots(M, tol, scale)


def rank(M: np.ndarray, tol: float | None = None, scale: float | None = None) -> int:
    """Rank; in float mode ``scale`` sets a floor for ``sigma_max`` in the threshold."""
    if M.size == 0:
        return 0
    if is_exact(M):
        return len(_exact_pivots(M)[0])
    s, thresh = _float_threshold(M, tol)
    if scale is not None:
        t = get_tolerance() if tol is None else tol
        thresh = max(thresh, t * scale * max(M.shape))
    return int(np.sum(s > thresh))


def rank_and_kernel(M: np.ndarray, tol: float | None = None, scale: float | None = None) -> RankReport:
    ncols = M.shape[1]
    if is_exact(M):
        pivots, rows = _exact_rref(M)
        free = [j for j in range(ncols) if j not in set(pivots)]
        K = zeros(ncols, len(free), True)
        for k, f in enumerate(free):
            K[f, k] = Fraction(1)
            for i, c in enumerate(pivots):
                K[c, k] = -rows[i][f]
        return RankReport(len(pivots), K, tuple(pivots))
    if M.size == 0:
        return RankReport(0, np.eye(ncols), ())
    U, s, Vt = np.linalg.svd(M)
    t = get_tolerance() if tol is None else tol
    r = int(np.sum(s > t * max(s[0] if s.size else 0.0, scale or 0.0) * max(M.shape)))
    K = Vt[r:].T.copy()
    return RankReport(r, K, tuple(_float_pivots(M, tol, scale)))


def kernel(M: np.ndarray, tol: float | None = None, scale: float | None = None) -> np.ndarray:
    return rank_and_kernel(M, tol, scale).kernel_basis


def inverse(M: np.ndarray) -> np.ndarray:
    if M.shape[0] != M.shape[1]:
        raise np.linalg.LinAlgError("matrix is not square")
    if M.shape[0] == 0:
        return M.copy()
    if is_exact(M):
        return _exact_inverse(M)
    return np.linalg.inv(M)


def pseudo_inverse(M: np.ndarray, tol: float | None = None, scale: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse.

    Exact mode uses the full-rank factorization ``M = F G`` with ``F`` the
    pivot columns and ``G`` the nonzero rows of the reduced echelon form:
    ``M^+ = G^T (G G^T)^{-1} (F^T F)^{-1} F^T``.  Float mode drops singular
    values below ``tol * max(sigma_max, scale) * max(shape)``.
    """
    m, n = M.shape
    if is_exact(M):
        pivots, rows = _exact_rref(M)
        if not pivots:
            return zeros(n, m, True)
        F = M[:, pivots]
        G = np.array(rows, dtype=object).reshape(len(pivots), n)
        left = G.T @ _exact_inverse(G @ G.T)
        right = _exact_inverse(F.T @ F) @ F.T
        return left @ right
    if M.size == 0:
        return np.zeros((n, m))
    t = get_tolerance() if tol is None else tol
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    cut = t * max(float(s[0]) if s.size else 0.0, scale or 0.0) * max(M.shape)
    keep = s > cut
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def column_space_contains(A: np.ndarray, B: np.ndarray, tol: float | None = None, scale: float | None = None) -> bool:
    """True when every column of ``B`` lies in the column space of ``A``."""
    if B.shape[1] == 0:
        return True
    if A.shape[1] == 0:
        return is_zero(B, tol, max_abs(B))
    AB = np.hstack([A, B])
    if is_exact(AB):
        return rank(AB) == rank(A)
    t = get_tolerance() if tol is None else tol
    s_ab = np.linalg.svd(AB, compute_uv=False)
    thresh = t * max(s_ab[0] if s_ab.size else 0.0, scale or 0.0) * max(AB.shape)
    s_a = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s_ab > thresh)) == int(np.sum(s_a > thresh))


def least_norm_solve(A: np.ndarray, B: np.ndarray, tol: float | None = None, scale: float | None = None) -> np.ndarray:
    """Minimum-norm solution of ``A X = B``; raises ``Inconsistent`` otherwise."""
    if not column_space_contains(A, B, tol, scale):
        raise Inconsistent("linear system has no solution", shape=A.shape)
    if A.shape[1] == 0 or B.shape[1] == 0:
        return zeros(A.shape[1], B.shape[1], is_exact(A))
    return matmul(pseudo_inverse(A, tol, scale), B)


def _exact_psd_failure(M: np.ndarray) -> int | None:
    """Index at which symmetric elimination detects indefiniteness, or None."""
    n = M.shape[0]
    a = [[Fraction(v) for v in row] for row in M]
    for k in range(n):
        d = a[k][k]
        if d < 0:
            return k
        if d == 0:
            if any(a[k][j] != 0 for j in range(k + 1, n)):
                return k
            continue
        rk = a[k]
        for i in range(k + 1, n):
            f = a[i][k] / d
            if f:
                ri = a[i]
                for j in range(k, n):
                    ri[j] -= f * rk[j]
    return None


def is_psd(M: np.ndarray, tol: float | None = None) -> bool:
    """Exact LDL with zero-pivot checks, or smallest eigenvalue against the tolerance."""
    if M.shape[0] != M.shape[1]:
        raise NotSymmetric("psd test needs a square matrix", shape=M.shape)
    if M.shape[0] == 0:
        return True
    if not is_symmetric(M, tol):
        raise NotSymmetric("psd test needs a symmetric matrix")
    if is_exact(M):
        return _exact_psd_failure(M) is None
    t = get_tolerance() if tol is None else tol
    w = np.linalg.eigvalsh((M + M.T) / 2)
    scale = max(1.0, float(np.max(np.abs(w))))
    return bool(w[0] >= -t * scale * M.shape[0])


def psd_failure_order(M: np.ndarray, block: int = 1, tol: float | None = None) -> int | None:
    """Smallest k such that the leading ``k*block`` principal submatrix is not PSD."""
    if is_psd(M, tol):
        return None
    n = M.shape[0] // block
    for k in range(1, n + 1):
        if not is_psd(M[: k * block, : k * block], tol):
            return k
    return n


def schur_complement(M: np.ndarray, k: int, tol: float | None = None) -> np.ndarray:
    """Generalized Schur complement ``D - C A^+ B`` of the leading k x k block."""
    A, B = M[:k, :k], M[:k, k:]
    C, D = M[k:, :k], M[k:, k:]
    return D - matmul(matmul(C, pseudo_inverse(A, tol)), B)


def kernels_equal(A: np.ndarray, B: np.ndarray, tol: float | None = None, scale: float | None = None) -> bool:
    """True when two matrices with the same column count have equal kernels."""
    KA = kernel(A, tol, scale)
    KB = kernel(B, tol, scale)
    if KA.shape[1] != KB.shape[1]:
        return False
    sc = max(1.0, max_abs(A), max_abs(B), scale or 0.0)
    return is_zero(matmul(B, KA), tol, sc) and is_zero(matmul(A, KB), tol, sc)


def kernel_contained(A: np.ndarray, B: np.ndarray, tol: float | None = None, scale: float | None = None) -> bool:
    """True when ``Ker A`` is contained in ``Ker B``."""
    KA = kernel(A, tol, scale)
    return is_zero(matmul(B, KA), tol, max(1.0, max_abs(B), scale or 0.0))
