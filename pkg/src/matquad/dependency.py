"""Column dependency structure of shifted moment matrices and feasibility.

Column indices reported to users are 1-based within a block: index ``j`` of
block column ``X^i`` is column ``i*p + j`` of ``M_T(n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import ConsistencyViolation, NoRepresentingMeasure
from .moments import (
    MomentSequence,
    hankel,
    localizing_blocks,
    moment_matrix,
    representing_measure_failure,
    shift_sequence,
)


@dataclass(frozen=True)
class DependencyProfile:
    """Dependency sets of the block columns of ``M_T(n)``.

    ``dep[i]`` lists the indices ``j`` for which column ``j`` of ``X^i`` is in
    the span of the columns to its left.  ``dep1[i]`` is the same test
    performed without the block ``X^0`` (empty for ``i = 0``).  ``depn`` and
    ``depn1`` keep only the indices that first become dependent at block
    ``i``; ``depn0`` is their difference.
    """

    p: int
    n: int
    dep: tuple[frozenset[int], ...]
    dep1: tuple[frozenset[int], ...]
    depn: tuple[frozenset[int], ...]
    depn1: tuple[frozenset[int], ...]
    depn0: tuple[frozenset[int], ...]
    rank: int
    z: tuple[int, ...] = field(default=())

    @property
    def s(self) -> int:
        return len(self.z)

    @property
    def p0(self) -> int:
        return self.p - len(self.dep[self.z[-1]]) if self.z else self.p

    def group_size(self, j: int, ell: int) -> int:
        """``p_{j,ell}``: size of ``Depn_ell`` at block ``z_{s-j+1}`` (j is 1-based)."""
        block = self.z[self.s - j]
        return len((self.depn0, self.depn1)[ell][block])

    def group_total(self, j: int) -> int:
        return self.group_size(j, 0) + self.group_size(j, 1)

    @property
    def A(self) -> frozenset[int]:
        out: set[int] = set()
        for d in self.depn1:
            out |= d
        return frozenset(out)

    def as_dict(self) -> dict:
        fmt = lambda sets: [sorted(x) for x in sets]  # noqa: E731
        return {
            "dep": fmt(self.dep),
            "dep1": fmt(self.dep1),
            "depn": fmt(self.depn),
            "depn1": fmt(self.depn1),
            "depn0": fmt(self.depn0),
            "z": list(self.z),
            "p0": self.p0,
            "rank": self.rank,
        }


def _scale(M) -> float | None:
    """Norm of the full moment matrix, the reference for float rank decisions on its submatrices."""
    return None if la.is_exact(M) else float(np.linalg.norm(M, 2))


def dependency_profile(T: MomentSequence) -> DependencyProfile:
    """Compute all dependency sets of ``M_T(n)`` in two pivot sweeps."""
    p, n = T.p, T.n
    M = moment_matrix(T)
    sc = _scale(M)
    piv = set(la.pivot_columns(M))
    piv1 = set(la.pivot_columns(M[:, p:], scale=sc)) if n else set()
    dep = tuple(frozenset(j + 1 for j in range(p) if i * p + j not in piv) for i in range(n + 1))
    dep1 = (frozenset(),) + tuple(
        frozenset(j + 1 for j in range(p) if (i - 1) * p + j not in piv1) for i in range(1, n + 1)
    )
    depn = (dep[0],) + tuple(dep[i] - dep[i - 1] for i in range(1, n + 1))
    depn1 = (frozenset(),) + tuple(dep1[i] - dep[i - 1] for i in range(1, n + 1))
    depn0 = tuple(depn[i] - depn1[i] for i in range(n + 1))
    for i in range(n + 1):
        if not depn1[i] <= depn[i]:
            raise ConsistencyViolation(
                "dependency sets are not nested; the moment matrix is not recursively generated",
                block=i,
            )
    z = tuple(i for i in range(n + 1) if depn[i])
    return DependencyProfile(p, n, dep, dep1, depn, depn1, depn0, len(piv), z)


def compute_A(T: MomentSequence, route: str = "profile") -> frozenset[int]:
    """Indices ``i`` whose column first becomes dependent on shifted columns only.

    ``route="profile"`` takes the union of ``Depn1`` over all blocks;
    ``route="direct"`` evaluates the defining span conditions one column at a
    time on ``M_T(n)``.
    """
    if route == "profile":
        return dependency_profile(T).A
    if route != "direct":
        raise ValueError(f"unknown route {route!r}")
    p, n = T.p, T.n
    Y = moment_matrix(T)
    sc = _scale(Y)
    out = set()
    for i in range(1, p + 1):
        for k in range(1, n + 1):
            col = k * p + i - 1
            first = la.column_space_contains(Y[:, p:col], Y[:, col : col + 1], scale=sc)
            prev = (k - 1) * p + i - 1
            second = not la.column_space_contains(Y[:, :prev], Y[:, prev : prev + 1], scale=sc)
            if first and second:
                out.add(i)
                break
    return frozenset(out)


def compute_B(T: MomentSequence) -> frozenset[int]:
    """Indices ``i`` whose column of ``col(T_{n+1}, ..., T_{2n})`` depends on the
    shifted block columns and earlier such columns, while column ``i`` of the
    last block of ``M_T(n)`` is independent."""
    p, n = T.p, T.n
    Y = moment_matrix(T)
    last_free = set(j for j in range(p) if n * p + j in set(la.pivot_columns(Y)))
    if n == 0:
        return frozenset()
    U = hankel(T, range(0, n), range(1, n + 2))
    piv = set(la.pivot_columns(U, scale=_scale(Y)))
    return frozenset(i + 1 for i in range(p) if n * p + i not in piv and i in last_free)


def compute_B_direct(T: MomentSequence) -> frozenset[int]:
    """Column-by-column evaluation of the same conditions as :func:`compute_B`."""
    p, n = T.p, T.n
    if n == 0:
        return frozenset()
    Y = moment_matrix(T)
    sc = _scale(Y)
    U = hankel(T, range(0, n), range(0, n + 2))
    out = set()
    for i in range(1, p + 1):
        u = (n + 1) * p + i - 1
        y = n * p + i - 1
        if la.column_space_contains(U[:, p:u], U[:, u : u + 1], scale=sc) and not la.column_space_contains(
            Y[:, :y], Y[:, y : y + 1], scale=sc
        ):
            out.add(i)
    return frozenset(out)


@dataclass(frozen=True)
class FeasibilityResult:
    """Admissible multiplicities ``[lo, hi]`` of the atom ``t``."""

    t: object
    lo: int
    hi: int
    A: frozenset[int]
    B: frozenset[int]
    unique_at_hi: bool
    profile: DependencyProfile

    @property
    def feasible_range(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    def as_dict(self) -> dict:
        return {
            "feasible_range": [self.lo, self.hi],
            "A": sorted(self.A),
            "B": sorted(self.B),
            "unique_at": [self.hi] if self.unique_at_hi else [],
        }


def require_measure(S: MomentSequence) -> None:
    failure = representing_measure_failure(S)
    if failure is not None:
        raise NoRepresentingMeasure("the sequence has no representing measure", **failure)


def feasibility(S: MomentSequence, t) -> FeasibilityResult:
    """Range of multiplicities ``m`` such that a minimal measure has an atom
    of mass rank ``m`` at ``t``."""
    require_measure(S)
    T = shift_sequence(S, t)
    profile = dependency_profile(T)
    A = profile.A
    B = compute_B(T)
    if A & B:
        raise ConsistencyViolation("A and B overlap", A=sorted(A), B=sorted(B))
    hi = len(A | B)
    return FeasibilityResult(
        t=t, lo=len(A), hi=hi, A=A, B=B, unique_at_hi=uniqueness_at(T, hi, A=A, B=B), profile=profile
    )


def uniqueness_at(T: MomentSequence, m: int, A=None, B=None) -> bool:
    """True when the minimal measure with mass rank ``m`` at ``t`` is unique."""
    p, n = T.p, T.n
    if A is None:
        A = dependency_profile(T).A
    if B is None:
        B = compute_B(T)
    if m != len(A | B):
        return False
    Y = moment_matrix(T)
    piv = set(la.pivot_columns(Y))
    last_free = frozenset(j + 1 for j in range(p) if n * p + j in piv)
    if B != last_free:
        return False
    if n == 0:
        return True
    blocks = localizing_blocks(T)
    H, K = blocks["H"], blocks["K"]
    Bi = [i - 1 for i in sorted(B)]
    Ci = [i for i in range(p) if i + 1 not in B]
    sc = _scale(Y)
    return la.kernel_contained(H, K[:, Bi].T, scale=sc) and la.kernel_contained(H, K[:, Ci].T, scale=sc)


def zero_multiplicity_possible(T: MomentSequence) -> bool:
    """Whether ``t`` can be avoided by a minimal measure.

    Evaluates both ``A = {}`` and ``Ker (T_{i+j-2}) = Ker (T_{i+j})``; they
    must agree on sequences with a representing measure.
    """
    by_a = not dependency_profile(T).A
    if T.n == 0:
        by_kernel = True
    else:
        blocks = localizing_blocks(T)
        by_kernel = la.kernels_equal(blocks["M2"], blocks["M3"], scale=_scale(blocks["M1"]))
    if by_a != by_kernel:
        raise ConsistencyViolation(
            "dependency and kernel characterizations disagree", by_dependency=by_a, by_kernel=by_kernel
        )
    return by_a


def claim_ranks(profile: DependencyProfile, T: MomentSequence) -> dict[str, int]:
    """Predicted and observed ranks of ``M_T(n)`` and of its shifted rows."""
    p0 = profile.p0
    s = profile.s
    z = profile.z
    predicted = (profile.n + 1) * p0 + sum(z[s - j] * profile.group_total(j) for j in range(1, s + 1))
    M = moment_matrix(T)
    rows = M[T.p :, :] if T.n else M[:0, :]
    return {
        "rank": la.rank(M),
        "rank_predicted": predicted,
        "shifted_rows_rank": la.rank(rows),
        "shifted_rows_predicted": predicted - p0 - len(profile.A),
    }
