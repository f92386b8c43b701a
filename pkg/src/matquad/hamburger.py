"""Strong truncated Hamburger problem for Laurent moment sequences.

Moments ``S_i`` are indexed by ``i`` in ``[-2 n1, 2 n2]``.  Reindexing by
``2 n1`` turns them into an ordinary sequence whose minimal measures avoiding
the origin are exactly the Laurent solutions after rescaling each mass by
``x^(2 n1)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import ConsistencyViolation, Inconsistent, Infeasible, MatquadError, NotSymmetric
from .moments import MomentSequence, moment_matrix
from .quadrature import Atom, AtomicMeasure, QuadratureResult, solve_quadrature


@dataclass(frozen=True)
class LaurentMomentSequence:
    """``S_{-2 n1}, ..., S_{2 n2}`` stored in increasing index order."""

    n1: int
    n2: int
    moments: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise Inconsistent("n1 and n2 must be non-negative", n1=self.n1, n2=self.n2)
        want = 2 * self.n1 + 2 * self.n2 + 1
        if len(self.moments) != want:
            raise Inconsistent("wrong number of Laurent moments", expected=want, got=len(self.moments))
        p = self.moments[0].shape[0]
        for k, S in enumerate(self.moments):
            if S.shape != (p, p):
                raise Inconsistent("moments must be square of a common size", index=k - 2 * self.n1)
            if not la.is_symmetric(S):
                raise NotSymmetric(f"moment S_{k - 2 * self.n1} is not symmetric", index=k - 2 * self.n1)

    @classmethod
    def from_matrices(cls, n1: int, n2: int, mats: Sequence, exact: bool = True) -> "LaurentMomentSequence":
        return cls(n1, n2, tuple(la.convert(np.atleast_2d(np.asarray(M, dtype=object)), exact) for M in mats))

    @property
    def p(self) -> int:
        return self.moments[0].shape[0]

    @property
    def exact(self) -> bool:
        return la.is_exact(self.moments[0])

    @property
    def indices(self) -> range:
        return range(-2 * self.n1, 2 * self.n2 + 1)

    def __getitem__(self, i: int) -> np.ndarray:
        if i not in self.indices:
            raise IndexError(i)
        return self.moments[i + 2 * self.n1]

    def hankel(self, lo: int, hi: int, offset: int = 0) -> np.ndarray:
        """``(S_{i+j+offset})_{i,j=lo..hi}``."""
        idx = range(lo, hi + 1)
        if len(idx) == 0:
            return la.zeros(0, 0, self.exact)
        return np.block([[self[i + j + offset] for j in idx] for i in idx])

    def reindexed(self) -> MomentSequence:
        """The ordinary sequence ``S~_i = S_{i - 2 n1}``."""
        return MomentSequence(self.moments)


def _kernel_matrices(S: LaurentMomentSequence) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = -S.n1, S.n2 - 1
    return S.hankel(lo, hi), S.hankel(lo, hi, offset=2)


def hamburger_feasible(S: LaurentMomentSequence) -> bool:
    """The full Laurent Hankel is psd and ``Ker (S_{i+j}) = Ker (S_{i+j+2})``
    over ``i, j`` in ``[-n1, n2 - 1]``."""
    M = S.hankel(-S.n1, S.n2)
    if not la.is_psd(M):
        return False
    if S.n1 + S.n2 == 0:
        return True
    K0, K2 = _kernel_matrices(S)
    return la.kernels_equal(K0, K2)


def quadratic_forms_agree(S: LaurentMomentSequence, vectors: Sequence[np.ndarray]) -> bool:
    """For each stacked vector ``v``, ``v^T (S_{i+j}) v = 0`` iff ``v^T (S_{i+j+2}) v = 0``."""
    K0, K2 = _kernel_matrices(S)
    scale = max(1.0, la.max_abs(K0), la.max_abs(K2))
    for v in vectors:
        v = np.asarray(v).reshape(-1, 1)
        a = la.is_zero(v.T @ K0 @ v, scale=scale)
        b = la.is_zero(v.T @ K2 @ v, scale=scale)
        if a != b:
            return False
    return True


@dataclass
class HamburgerResult:
    measure: AtomicMeasure
    base: QuadratureResult
    residuals: tuple[float, ...]
    residuals_exact: bool
    direct_residuals: tuple[float, ...]

    @property
    def max_residual(self) -> float:
        return max(self.residuals + self.direct_residuals, default=0.0)


def _frob(M) -> float:
    return float(np.linalg.norm(la.floating(M)))


def laurent_residuals(S: LaurentMomentSequence, mu: AtomicMeasure) -> tuple[float, ...]:
    """``||S_i - sum_j x_j^i A_j|| / max(1, ||S_i||)`` by direct summation over all indices."""
    out = []
    for i in S.indices:
        if S.exact and all(a.exact for a in mu.atoms):
            acc = la.zeros(S.p, S.p, True)
            for a in mu.atoms:
                acc = acc + a.mass * (a.location**i)
            out.append(_frob(S[i] - acc) / max(1.0, _frob(S[i])))
        else:
            acc = np.zeros((S.p, S.p))
            for a in mu.atoms:
                acc = acc + la.floating(a.mass) * float(a.location) ** i
            Si = la.floating(S[i])
            out.append(float(np.linalg.norm(Si - acc)) / max(1.0, float(np.linalg.norm(Si))))
    return tuple(out)


def solve_hamburger(S: LaurentMomentSequence, *, seed: int | None = None, verify_tol: float = 1e-8) -> HamburgerResult:
    """Minimal measure with nonzero atoms reproducing every Laurent moment."""
    if not hamburger_feasible(S):
        raise Infeasible("Laurent moment sequence has no representing measure")
    St = S.reindexed()
    try:
        base = solve_quadrature(St, Fraction(0) if St.exact else 0.0, 0, seed=seed)
    except MatquadError as exc:
        raise ConsistencyViolation("feasible Laurent sequence but the shifted problem failed", cause=exc.code) from exc
    shift = 2 * S.n1
    atoms = []
    for a in base.measure.atoms:
        x = a.location
        if x == 0:
            raise ConsistencyViolation("atom at the origin in a Laurent solution")
        atoms.append(Atom(x, a.mass * (x**shift), a.rank))
    measure = AtomicMeasure(tuple(atoms), S.p, None)
    direct = laurent_residuals(S, measure)
    if base.report.exact:
        residuals = base.report.residuals
    else:
        residuals = direct
    if max(direct, default=0.0) > verify_tol:
        raise ConsistencyViolation("Laurent moments not reproduced", max_residual=max(direct))
    return HamburgerResult(measure, base, tuple(residuals), base.report.exact, direct)


def planted_laurent(n1: int, n2: int, atoms: Sequence, masses: Sequence[np.ndarray]) -> LaurentMomentSequence:
    """Laurent moments of ``sum_j delta_{x_j} A_j``; all atoms must be nonzero."""
    if any(x == 0 for x in atoms):
        raise Inconsistent("Laurent moments need nonzero atoms")
    mats = []
    for i in range(-2 * n1, 2 * n2 + 1):
        acc = masses[0] * 0
        for x, A in zip(atoms, masses):
            acc = acc + A * (x**i)
        mats.append(acc)
    return LaurentMomentSequence(n1, n2, tuple(mats))


def moment_rank(S: LaurentMomentSequence) -> int:
    return la.rank(moment_matrix(S.reindexed()))
