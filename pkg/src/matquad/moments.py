"""Matrix moment sequences, block Hankel matrices and matrix polynomials."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import DegreeTooHigh, IndexOutOfRange, Inconsistent, NotSymmetric, OrderTooHigh


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``S_0, ..., S_{2n}`` of size ``p x p``.

    All matrices share one arithmetic mode: object arrays of Fractions
    (exact) or float arrays.
    """

    moments: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.moments) % 2 != 1:
            raise Inconsistent("a moment sequence must have odd length 2n+1", length=len(self.moments))
        p = self.moments[0].shape[0]
        kinds = {la.is_exact(S) for S in self.moments}
        if len(kinds) != 1:
            raise Inconsistent("moments mix exact and float entries")
        for i, S in enumerate(self.moments):
            if S.shape != (p, p):
                raise Inconsistent("moments must be square of a common size", index=i, shape=S.shape)
            if not la.is_symmetric(S):
                raise NotSymmetric(f"moment S_{i} is not symmetric", index=i)

    @classmethod
    def from_matrices(cls, mats: Sequence, exact: bool = True) -> "MomentSequence":
        return cls(tuple(la.convert(np.atleast_2d(np.asarray(M, dtype=object)), exact) for M in mats))

    @property
    def p(self) -> int:
        return self.moments[0].shape[0]

    @property
    def n(self) -> int:
        return (len(self.moments) - 1) // 2

    @property
    def exact(self) -> bool:
        return la.is_exact(self.moments[0])

    def __len__(self) -> int:
        return len(self.moments)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.moments[i]

    def as_float(self) -> "MomentSequence":
        return MomentSequence(tuple(la.floating(S) for S in self.moments))

    def as_exact(self) -> "MomentSequence":
        return MomentSequence(tuple(la.exact(S) for S in self.moments))

    def truncate(self, n: int) -> "MomentSequence":
        if n > self.n:
            raise IndexOutOfRange("cannot truncate to a larger order", n=n, available=self.n)
        return MomentSequence(self.moments[: 2 * n + 1])


@dataclass(frozen=True)
class MatrixPolynomial:
    """``P(x) = sum_i x^i coeffs[i]`` with ``p x q`` matrix coefficients."""

    coeffs: tuple[np.ndarray, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs[0].shape

    @property
    def exact(self) -> bool:
        return la.is_exact(self.coeffs[0])

    def __call__(self, x):
        acc = self.coeffs[-1].copy()
        for C in reversed(self.coeffs[:-1]):
            acc = acc * x + C
        return acc

    def shift(self, t) -> "MatrixPolynomial":
        """The polynomial ``x -> P(x - t)``."""
        d = self.degree
        mt = -t
        out = [self.coeffs[0] * 0 for _ in range(d + 1)]
        for i, C in enumerate(self.coeffs):
            for k in range(i + 1):
                out[k] = out[k] + C * (comb(i, k) * mt ** (i - k))
        return MatrixPolynomial(tuple(out))

    def stacked(self) -> np.ndarray:
        """``col(P_0, ..., P_d)``."""
        return np.vstack(self.coeffs)

    def entry(self, i: int, j: int) -> list:
        return [C[i, j] for C in self.coeffs]


def riesz_evaluate(S: MomentSequence, coeffs: Sequence[np.ndarray]) -> np.ndarray:
    """``L(P) = sum_i S_i P_i`` for a matrix polynomial of degree at most 2n."""
    if len(coeffs) - 1 > 2 * S.n:
        raise DegreeTooHigh("polynomial degree exceeds 2n", degree=len(coeffs) - 1, n=S.n)
    acc = la.zeros(S.p, coeffs[0].shape[1], S.exact)
    for Si, Pi in zip(S.moments, coeffs):
        acc = acc + Si @ Pi
    return acc


def shift_sequence(S: MomentSequence, t) -> MomentSequence:
    """``T_i = sum_l C(i, l) (-t)^l S_{i-l}``, the moments of ``x - t``."""
    if S.exact:
        t = la.to_fraction(t)
    else:
        t = float(t)
    mt = -t
    out = []
    for i in range(len(S)):
        acc = S[i].copy()
        for l in range(1, i + 1):
            acc = acc + S[i - l] * (comb(i, l) * mt**l)
        out.append(acc)
    return MomentSequence(tuple(out))


def moment_matrix(S: MomentSequence, k: int | None = None) -> np.ndarray:
    """Block Hankel matrix ``M(k) = (S_{i+j})_{i,j=0..k}``."""
    k = S.n if k is None else k
    if k > S.n or k < 0:
        raise OrderTooHigh("moment matrix order exceeds available moments", k=k, n=S.n)
    return np.block([[S[i + j] for j in range(k + 1)] for i in range(k + 1)])


def hankel(S: MomentSequence, rows: range, cols: range) -> np.ndarray:
    """Block matrix ``(S_{i+j})`` for ``i`` in ``rows`` and ``j`` in ``cols``."""
    p = S.p
    if len(rows) == 0 or len(cols) == 0:
        return la.zeros(len(rows) * p, len(cols) * p, S.exact)
    for i in rows:
        for j in cols:
            if not 0 <= i + j < len(S):
                raise IndexOutOfRange("moment index out of range", index=i + j)
    return np.block([[S[i + j] for j in cols] for i in rows])


def block_column(S: MomentSequence, i: int) -> np.ndarray:
    """``X^i = col(S_i, ..., S_{i+n})``, the i-th block column of ``M(n)``."""
    if not 0 <= i <= S.n:
        raise IndexOutOfRange("block column index out of range", i=i, n=S.n)
    return np.vstack([S[i + k] for k in range(S.n + 1)])


def evaluate_on_columns(S: MomentSequence, P: MatrixPolynomial) -> np.ndarray:
    """``P(X) = sum_i X^i P_i`` on the block columns of ``M(n)``."""
    if P.degree > S.n:
        raise DegreeTooHigh("polynomial degree exceeds n", degree=P.degree, n=S.n)
    acc = la.zeros((S.n + 1) * S.p, P.shape[1], S.exact)
    for i, C in enumerate(P.coeffs):
        acc = acc + block_column(S, i) @ C
    return acc


def is_block_recursively_generated(S: MomentSequence) -> bool:
    """Every column relation of degree < n stays a relation after multiplying by x."""
    n, p = S.n, S.p
    if n == 0:
        return True
    M = moment_matrix(S)
    K = la.kernel(M[:, : n * p])
    if K.shape[1] == 0:
        return True
    shifted = np.vstack([la.zeros(p, K.shape[1], S.exact), K])
    return la.is_zero(M @ shifted, scale=la.max_abs(M))


def has_representing_measure(S: MomentSequence) -> bool:
    """``M(n) >= 0`` and ``col(S_{n+1}, ..., S_{2n})`` lies in the range of ``M(n-1)``."""
    return representing_measure_failure(S) is None


def representing_measure_failure(S: MomentSequence) -> dict | None:
    """Diagnostic for the failing condition, or ``None`` when a measure exists."""
    M = moment_matrix(S)
    k = la.psd_failure_order(M, S.p)
    if k is not None:
        return {"reason": "moment matrix not positive semidefinite", "failing_block_order": k - 1}
    n = S.n
    if n == 0:
        return None
    M1 = moment_matrix(S, n - 1)
    tail = np.vstack([S[i] for i in range(n + 1, 2 * n + 1)])
    if not la.column_space_contains(M1, tail):
        return {"reason": "range condition fails", "failing_block_order": n}
    return None


def basis_change_matrix(t, size: int, p: int = 1, exact: bool = True) -> np.ndarray:
    """``J (x) I_p`` where ``J`` maps ``coef(q(x))`` to ``coef(q(x - t))``.

    With this matrix, ``M_T(n) = J^T M_S(n) J`` for the shifted sequence.
    """
    t = la.to_fraction(t) if exact else float(t)
    J = la.zeros(size, size, exact)
    for i in range(size):
        for k in range(i + 1):
            J[k, i] = comb(i, k) * (-t) ** (i - k)
    return np.kron(J, la.eye(p, exact)) if p > 1 else J


def localizing_blocks(T: MomentSequence) -> dict[str, np.ndarray]:
    """The block matrices used by the feasibility tests.

    ``M1`` is ``M_T(n)``; ``M2_wide`` is ``(T_{i+j-2})`` for ``i`` in [1, n],
    ``j`` in [1, n+2]; ``M2`` and ``M3`` are ``(T_{i+j-2})`` and ``(T_{i+j})``
    for ``i, j`` in [1, n].
    """
    n = T.n
    return {
        "M1": moment_matrix(T),
        "M2_wide": hankel(T, range(0, n), range(0, n + 2)),
        "M2": hankel(T, range(0, n), range(0, n)),
        "M3": hankel(T, range(1, n + 1), range(1, n + 1)),
        "H": hankel(T, range(0, n), range(1, n + 1)),
        "K": np.vstack([T[i] for i in range(n + 1, 2 * n + 1)]) if n else la.zeros(0, T.p, T.exact),
    }


def moments_of_atoms(atoms: Sequence, masses: Sequence[np.ndarray], count: int) -> list[np.ndarray]:
    """``S_i = sum_j x_j^i A_j`` for ``i < count``."""
    out = []
    for i in range(count):
        acc = masses[0] * 0
        for x, A in zip(atoms, masses):
            acc = acc + A * (x**i)
        out.append(acc)
    return out
