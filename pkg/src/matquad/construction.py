"""Rank-preserving extension and block column relation of a shifted moment matrix.

Given moments ``S`` with a representing measure, a point ``t`` and an
admissible multiplicity ``m``, :func:`construct` extends the shifted sequence
``T`` by ``T_{2n+1}`` and ``T_{2n+2}`` without raising the rank, and
returns a matrix polynomial ``H`` of degree ``n+1`` with invertible leading
coefficient whose coefficients form a block column relation of the extended
moment matrix.  ``det H(x - t)`` then vanishes at ``t`` to order exactly
``m + (n+1)p - rank M(n)``.

Internally all column indices are 0-based.  Every intermediate identity is
re-checked and a failure raises an internal-error exception.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg as la
from .dependency import DependencyProfile, compute_B, dependency_profile, require_measure
from .errors import (
    ConsistencyViolation,
    FlatnessViolation,
    Inconsistent,
    InfeasibleMultiplicity,
    RelationViolation,
    Z1SearchFailed,
)
from .moments import (
    MatrixPolynomial,
    MomentSequence,
    evaluate_on_columns,
    localizing_blocks,
    moment_matrix,
    shift_sequence,
)

Z1_RETRIES = 16


@dataclass
class Group:
    """Columns that first become dependent at one block, split by ``ell``."""

    g: int  # 1-based group number; group g lives at block z_{s-g+1}
    ell: int
    block: int
    columns: list[int]
    offset: int  # position inside the dependent part of the ordering


@dataclass
class ConstructionState:
    S: MomentSequence
    t: object
    T: MomentSequence
    profile: DependencyProfile
    A: frozenset
    B: frozenset
    order: list[int] = field(default_factory=list)
    groups: list[Group] = field(default_factory=list)
    relations: dict = field(default_factory=dict)
    Hc: list = field(default_factory=list)
    Hc_n0: np.ndarray | None = None
    Hc_n: np.ndarray | None = None
    H: list = field(default_factory=list)
    G: np.ndarray | None = None
    calH0: np.ndarray | None = None
    calH: np.ndarray | None = None
    K: np.ndarray | None = None
    k: int = 0
    m: int | None = None
    c1: int = 0
    C1: list[int] = field(default_factory=list)
    C2: list[int] = field(default_factory=list)
    porder: list[int] = field(default_factory=list)
    Khat: np.ndarray | None = None
    Ghat: np.ndarray | None = None
    J: np.ndarray | None = None
    Zhat: np.ndarray | None = None
    Z_blocks: dict = field(default_factory=dict)
    U1: np.ndarray | None = None
    U2: np.ndarray | None = None
    Q: list = field(default_factory=list)
    H_T: MatrixPolynomial | None = None
    H_S: MatrixPolynomial | None = None
    T_ext: MomentSequence | None = None
    S_ext: MomentSequence | None = None
    kernel_bound: tuple[int, int] | None = None
    _scale: float | None = field(default=None, repr=False)

    @property
    def exact(self) -> bool:
        return self.T.exact

    @property
    def p(self) -> int:
        return self.T.p

    @property
    def n(self) -> int:
        return self.T.n

    @property
    def p0(self) -> int:
        return self.profile.p0

    @property
    def d(self) -> int:
        """Number of dependent columns, ``p - p0``."""
        return self.p - self.p0

    @property
    def q(self) -> int:
        """``m - Card A``."""
        return self.m - len(self.A)

    def zeros(self, r: int, c: int) -> np.ndarray:
        return la.zeros(r, c, self.exact)

    def eye(self, r: int) -> np.ndarray:
        return la.eye(r, self.exact)

    @property
    def scale(self) -> float | None:
        """Float-mode reference norm for rank decisions on submatrices of ``M_T(n)``."""
        if self.exact:
            return None
        if self._scale is None:
            self._scale = float(np.linalg.norm(moment_matrix(self.T), 2))
        return self._scale

    def rank(self, M: np.ndarray) -> int:
        return la.rank(M, scale=self.scale)

    def solve(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return la.least_norm_solve(A, B, scale=self.scale)

    def pinv(self, M: np.ndarray) -> np.ndarray:
        return la.pseudo_inverse(M, scale=self.scale)

    def check_zero(self, M: np.ndarray, what: str, error=ConsistencyViolation, scale: float = 1.0) -> None:
        if not la.is_zero(M, scale=max(scale, 1.0) * max(M.shape, default=1)):
            raise error(f"identity failed: {what}", max_residual=la.max_abs(M))


def permutation_matrix(order: list[int], exact: bool) -> np.ndarray:
    """``P`` with ``X @ P == X[:, order]``."""
    P = la.zeros(len(order), len(order), exact)
    for c, j in enumerate(order):
        P[j, c] = Fraction(1) if exact else 1.0
    return P


# ---------------------------------------------------------------- ordering


def ordering_permutation(profile: DependencyProfile) -> tuple[list[int], list[Group]]:
    """Column order ``[p] \\ Dep(X^{z_s})``, then ``Depn0``, ``Depn1`` of
    ``X^{z_s}``, ``X^{z_{s-1}}``, ..., ascending inside each set."""
    p, s, z = profile.p, profile.s, profile.z
    last_dep = profile.dep[z[-1]] if z else frozenset()
    order = [j for j in range(p) if j + 1 not in last_dep]
    groups = []
    offset = 0
    for g in range(1, s + 1):
        block = z[s - g]
        for ell, sets in ((0, profile.depn0), (1, profile.depn1)):
            cols = sorted(j - 1 for j in sets[block])
            groups.append(Group(g, ell, block, cols, offset))
            order.extend(cols)
            offset += len(cols)
    return order, groups


def prepare(S: MomentSequence, t) -> ConstructionState:
    require_measure(S)
    T = shift_sequence(S, t)
    profile = dependency_profile(T)
    state = ConstructionState(S=S, t=t, T=T, profile=profile, A=profile.A, B=compute_B(T))
    state.order, state.groups = ordering_permutation(profile)
    return state


# ---------------------------------------------------------------- relations


def relation_matrices(state: ConstructionState) -> ConstructionState:
    """Express every newly dependent column through the allowed columns.

    For ``ell = 0`` the allowed columns are the blocks ``X^0 .. X^{z-1}`` and,
    in block ``z``, the never-dependent columns and the groups with smaller
    number.  For ``ell = 1`` the block ``X^0`` is excluded (its coefficient is
    zero) and the ``ell = 0`` part of the same group is allowed.
    """
    T, p = state.T, state.p
    M = moment_matrix(T)
    Mq = np.hstack([M[:, i * p : (i + 1) * p][:, state.order] for i in range(state.n + 1)])
    p0 = state.p0
    for grp in state.groups:
        if not grp.columns:
            continue
        z = grp.block
        first = 1 if grp.ell == 1 else 0
        # groups before this one in the ordering: smaller numbers, plus (g, 0) when ell = 1
        in_block = list(range(p0 + grp.offset))
        cols = list(range(first * p, z * p)) + [z * p + c for c in in_block]
        target = [z * p + p0 + grp.offset + c for c in range(len(grp.columns))]
        try:
            coef = state.solve(Mq[:, cols], Mq[:, target])
        except Inconsistent as exc:
            raise ConsistencyViolation("dependent column is not in the expected span", group=grp.g, ell=grp.ell) from exc
        state.check_zero(Mq[:, cols] @ coef - Mq[:, target], "column relation", scale=la.max_abs(M))
        full = state.zeros(z * p + len(in_block), len(grp.columns))
        full[first * p :, :] = coef
        state.relations[(grp.g, grp.ell)] = {
            "coefficients": full,
            "lower": [full[i * p : (i + 1) * p] for i in range(z)],
            "block0": full[z * p : z * p + p0],
            "block": full[z * p + p0 :],
        }
    return state


def assemble_claim2(state: ConstructionState) -> ConstructionState:
    """Build ``H_0..H_{n-1}``, the last-block coefficient and ``G``."""
    p, n, p0, d = state.p, state.n, state.p0, state.d
    Hc = [state.zeros(p, d) for _ in range(n)]
    Hn0 = state.zeros(p0, d)
    Hn = state.eye(d)
    for grp in state.groups:
        if not grp.columns:
            continue
        rel = state.relations[(grp.g, grp.ell)]
        z = grp.block
        sl = slice(grp.offset, grp.offset + len(grp.columns))
        for i in range(n - z, n):
            Hc[i][:, sl] = rel["lower"][i - n + z]
        Hn0[:, sl] = rel["block0"]
        blk = rel["block"]
        Hn[: blk.shape[0], sl] = -blk
    Qm = permutation_matrix(state.order, state.exact)
    state.Hc = Hc
    state.H = [Qm @ h for h in Hc]
    state.Hc_n0 = Hn0
    state.Hc_n = Hn
    state.G = la.vstack(state.H + [Hn0], cols=d, exact_mode=state.exact)

    M = moment_matrix(state.T)
    Xs = [M[:, i * p : (i + 1) * p] for i in range(n + 1)]
    Xn_q = Xs[n][:, state.order]
    lhs = Xn_q[:, p0:] @ Hn
    rhs = la.matmul(np.hstack(Xs[:n] + [Xn_q[:, :p0]]), state.G)
    state.check_zero(lhs - rhs, "relation of the last block", scale=la.max_abs(M))

    # kernel-dimension lower bound
    if d:
        dims = []
        stack = None
        for h in state.H:
            stack = h if stack is None else np.vstack([stack, h])
            dims.append(d - la.rank(stack))
        prof, s, z = state.profile, state.profile.s, state.profile.z
        r = [0]
        for j in range(1, s + 1):
            r.append(r[-1] + prof.group_total(j))
        bound = (n - z[-1]) * d + sum((z[j] - z[j - 1]) * (d - r[s - j]) for j in range(1, s)) + len(state.A)
        state.kernel_bound = (sum(dims), bound)
        if sum(dims) < bound:
            raise ConsistencyViolation("kernel dimension bound violated", observed=sum(dims), bound=bound)
    return state


# ---------------------------------------------------------------- split


def extract_blocks(state: ConstructionState) -> ConstructionState:
    blocks = localizing_blocks(state.T)
    n, p = state.n, state.p
    T = state.T
    state.calH0 = la.vstack([T[i] for i in range(n)], cols=p, exact_mode=state.exact)
    state.calH = blocks["H"]
    state.K = blocks["K"]
    state.k = state.rank(np.hstack([state.calH, state.K])) - state.rank(state.calH)
    return state


def split_K(state: ConstructionState, m: int) -> ConstructionState:
    """Choose the columns kept free (``C1``) and forced onto ``t`` (``C2``)."""
    lo, hi = len(state.A), len(state.A | state.B)
    if not lo <= m <= hi:
        raise InfeasibleMultiplicity(f"multiplicity {m} outside feasible range [{lo}, {hi}]", m=m, lo=lo, hi=hi)
    state.m = m
    p0 = state.p0
    c1 = p0 - m + len(state.A)
    state.c1 = c1
    group0 = state.order[:p0]
    nonB = [j for j in group0 if j + 1 not in state.B]
    inB = [j for j in group0 if j + 1 in state.B]
    if len(nonB) > c1:
        raise ConsistencyViolation("too many columns outside B", c1=c1, outside=len(nonB))
    take = c1 - len(nonB)
    state.C1 = sorted(nonB + inB[:take])
    state.C2 = sorted(inB[take:])
    state.porder = state.C1 + state.C2 + state.order[p0:]
    state.Khat = state.K[:, state.porder]

    H = state.calH
    r_h = state.rank(H)
    r1 = state.rank(np.hstack([H, state.Khat[:, :c1]]))
    r_all = state.rank(np.hstack([H, state.Khat]))
    if not (r1 == r_all == r_h + state.k):
        raise ConsistencyViolation("rank equalities of the split fail", rank_h=r_h, rank_h_k1=r1, rank_h_k=r_all, k=state.k)
    return state


def build_G_hat(state: ConstructionState) -> ConstructionState:
    n, p, p0 = state.n, state.p, state.p0
    group0 = state.order[:p0]
    p1 = [group0.index(j) for j in state.C1 + state.C2]
    Hn_inv = la.inverse(state.Hc_n)
    G = state.G
    top = G[: n * p]
    bottom = G[n * p :][p1, :]
    state.Ghat = la.matmul(la.vstack([top, bottom], cols=state.d, exact_mode=state.exact), Hn_inv)
    c1 = state.c1
    K1, K2, K3 = state.Khat[:, :c1], state.Khat[:, c1:p0], state.Khat[:, p0:]
    rhs = la.matmul(np.hstack([state.calH, K1, K2]), state.Ghat)
    state.check_zero(K3 - rhs, "dependent shifted columns", scale=la.max_abs(state.K))
    return state


def solve_J(state: ConstructionState) -> ConstructionState:
    c1, p0 = state.c1, state.p0
    K1, K2 = state.Khat[:, :c1], state.Khat[:, c1:p0]
    try:
        state.J = state.solve(np.hstack([state.calH, K1]), K2)
    except Inconsistent as exc:
        raise ConsistencyViolation("columns forced onto t are not spanned") from exc
    return state


# ---------------------------------------------------------------- Z hat


def _z1_candidates(state: ConstructionState, seed: int | None):
    c1 = state.c1
    K1 = state.Khat[:, :c1]
    base = la.matmul(la.matmul(K1.T, state.pinv(state.calH)), K1)
    base = (base + base.T) / 2
    if seed is None:
        yield state.zeros(c1, c1)
        c = 1
        for _ in range(Z1_RETRIES):
            yield base + state.eye(c1) * c
            c *= 2
        return
    rng = random.Random(seed)
    c = 1
    for _ in range(Z1_RETRIES + 1):
        D = state.zeros(c1, c1)
        for i in range(c1):
            v = Fraction(rng.randint(1, 1000), 1000) + 1
            D[i, i] = v if state.exact else float(v)
        yield base + D * c
        c *= 2


def _assemble_Z(state: ConstructionState, Z1: np.ndarray) -> dict:
    c1, q, d = state.c1, state.q, state.d
    p0 = state.p0
    K1, K2, K3 = state.Khat[:, :c1], state.Khat[:, c1:p0], state.Khat[:, p0:]
    J, Gh = state.J, state.Ghat
    mm = la.matmul
    Z2 = mm(np.hstack([K1.T, Z1]), J)
    Z3 = mm(np.hstack([K1.T, Z1, Z2]), Gh)
    Z4 = mm(np.hstack([K2.T, Z2.T]), J)
    Z5 = mm(np.hstack([K2.T, Z2.T, Z4]), Gh)
    Z6 = mm(np.hstack([K3.T, Z3.T, Z5.T]), Gh)
    Z = np.block([[Z1, Z2, Z3], [Z2.T, Z4, Z5], [Z3.T, Z5.T, Z6]])
    Z = Z.reshape(c1 + q + d, c1 + q + d)
    return {"Z1": Z1, "Z2": Z2, "Z3": Z3, "Z4": Z4, "Z5": Z5, "Z6": Z6, "Z": Z}


def complete_Zhat(state: ConstructionState, seed: int | None = None) -> ConstructionState:
    """Choose ``Z1`` satisfying the rank condition and complete ``Zhat``.

    Without a seed the zero matrix is tried first, then
    ``K1^T H^+ K1 + c I`` for ``c = 1, 2, 4, ...``.  A seed replaces the
    identity by a random positive diagonal and skips the zero candidate.
    """
    c1, p0 = state.c1, state.p0
    H = state.calH
    K1 = state.Khat[:, :c1]
    target = state.rank(np.vstack([H, K1.T])) + c1
    chosen = None
    for Z1 in _z1_candidates(state, seed):
        if c1 == 0 or state.rank(np.block([[H, K1], [K1.T, Z1]])) == target:
            chosen = Z1
            break
    if chosen is None:
        raise Z1SearchFailed("no admissible Z1 found", retries=Z1_RETRIES)
    blocks = _assemble_Z(state, chosen)
    Z = blocks["Z"]
    if not la.is_symmetric(Z):
        raise ConsistencyViolation("Zhat is not symmetric")
    state.Zhat = Z
    state.Z_blocks = blocks

    q, d = state.q, state.d
    J1, J2 = state.J[: state.n * state.p], state.J[state.n * state.p :]
    G1 = state.Ghat[: state.n * state.p]
    G2 = state.Ghat[state.n * state.p : state.n * state.p + c1]
    G3 = state.Ghat[state.n * state.p + c1 :]
    right = np.block(
        [
            [-J1, -G1],
            [-J2, -G2],
            [state.eye(q), -G3],
            [state.zeros(d, q), state.eye(d)],
        ]
    ).reshape(state.n * state.p + p0 + d, q + d)
    big = np.block([[H, state.Khat], [state.Khat.T, Z]])
    state.check_zero(la.matmul(big, right), "kernel identity of the bordered matrix", scale=la.max_abs(big))
    r_big = state.rank(big)
    r_expected = state.rank(np.vstack([H, state.Khat.T])) + c1
    if r_big != r_expected:
        raise ConsistencyViolation("rank condition on Zhat fails", rank=r_big, expected=r_expected)
    return state


# ---------------------------------------------------------------- relation


def solve_U(state: ConstructionState) -> ConstructionState:
    n, p, c1 = state.n, state.p, state.c1
    Tn_hat = state.T[n][:, state.porder]
    lhs = np.block([[state.calH0, state.calH], [Tn_hat.T, state.Khat.T]]).reshape((n + 1) * p, (n + 1) * p)
    rhs = la.vstack([state.Khat[:, :c1], state.Zhat[:, :c1]], cols=c1, exact_mode=state.exact)
    try:
        U = state.solve(lhs, rhs)
    except Inconsistent as exc:
        raise ConsistencyViolation("free shifted columns are not spanned") from exc
    state.U1, state.U2 = U[:p], U[p:]
    if la.rank(state.U1) != c1:
        raise ConsistencyViolation("U1 does not have full column rank", rank=la.rank(state.U1), expected=c1)
    bordered = np.block([[state.calH0, state.calH, state.Khat], [Tn_hat.T, state.Khat.T, state.Zhat]])
    if state.rank(bordered) != state.profile.rank:
        raise ConsistencyViolation("bordered matrix raises the rank")
    return state


def assemble_Q(state: ConstructionState) -> ConstructionState:
    n, p, c1, q, d = state.n, state.p, state.c1, state.q, state.d
    np_ = n * p
    J1, J2 = state.J[:np_], state.J[np_:]
    G1 = state.Ghat[:np_]
    G2 = state.Ghat[np_ : np_ + c1]
    G3 = state.Ghat[np_ + c1 :]
    Hn_inv = la.inverse(state.Hc_n)
    Qs = []
    for i in range(n):
        Qs.append(
            np.hstack(
                [state.U2[i * p : (i + 1) * p], J1[i * p : (i + 1) * p], la.matmul(state.H[i], Hn_inv)]
            ).reshape(p, p)
        )
        state.check_zero(la.matmul(state.H[i], Hn_inv) - G1[i * p : (i + 1) * p], "G hat top block")
    Qhat = np.block(
        [
            [state.eye(c1), -J2, -G2],
            [state.zeros(q, c1), state.eye(q), -G3],
            [state.zeros(d, c1), state.zeros(d, q), state.eye(d)],
        ]
    ).reshape(p, p)
    Pm = permutation_matrix(state.porder, state.exact)
    Qs.append(Pm @ Qhat)
    state.Q = Qs
    return state


def extension_moments(state: ConstructionState) -> ConstructionState:
    n, p = state.n, state.p
    T = state.T
    Pm = permutation_matrix(state.porder, state.exact)
    Z = Pm @ state.Zhat @ Pm.T
    tail = la.vstack([T[i] for i in range(n + 1, 2 * n + 1)] + [Z], cols=p, exact_mode=state.exact)
    M = moment_matrix(T)
    T2 = tail.T @ state.pinv(M) @ tail
    if not state.exact:
        Z = (Z + Z.T) / 2
        T2 = (T2 + T2.T) / 2
    T_ext = MomentSequence(tuple(T.moments) + (Z, T2))
    Me = moment_matrix(T_ext)
    if not la.is_psd(Me):
        raise FlatnessViolation("extension is not positive semidefinite")
    # M_T(n) is a principal block of Me, so only an increase is a genuine failure;
    # a lower float rank means the larger extension scale hid small singular values
    r_ext = state.rank(Me)
    if r_ext > state.profile.rank or (state.exact and r_ext != state.profile.rank):
        raise FlatnessViolation("extension raises the rank", rank=r_ext, expected=state.profile.rank)
    state.T_ext = T_ext
    state.S_ext = shift_sequence(T_ext, -state.t if state.exact else -float(state.t))
    return state


def build_H(state: ConstructionState) -> ConstructionState:
    n, p, c1 = state.n, state.p, state.c1
    H0 = -np.hstack([state.U1, state.zeros(p, p - c1)])
    coeffs = [H0] + [-Qi for Qi in state.Q[:n]] + [state.Q[n]]
    state.H_T = MatrixPolynomial(tuple(coeffs))
    scale = la.max_abs(moment_matrix(state.T_ext))
    state.check_zero(evaluate_on_columns(state.T_ext, state.H_T), "relation on the shifted extension", RelationViolation, scale)
    t = state.t if state.exact else float(state.t)
    state.H_S = state.H_T.shift(t)
    state.check_zero(evaluate_on_columns(state.S_ext, state.H_S), "relation on the extension", RelationViolation, la.max_abs(moment_matrix(state.S_ext)))
    return state


# ---------------------------------------------------------------- driver


def construct(S: MomentSequence, t, m: int, seed: int | None = None) -> ConstructionState:
    """Run the whole pipeline and return the final state.

    The useful outputs are ``state.S_ext`` (moments up to degree ``2n+2``)
    and ``state.H_S`` (the relation polynomial in the original variable).
    """
    t = la.to_fraction(t) if S.exact else float(t)
    state = prepare(S, t)
    lo, hi = len(state.A), len(state.A | state.B)
    if not lo <= m <= hi:
        raise InfeasibleMultiplicity(f"multiplicity {m} outside feasible range [{lo}, {hi}]", m=m, lo=lo, hi=hi)
    relation_matrices(state)
    assemble_claim2(state)
    extract_blocks(state)
    split_K(state, m)
    build_G_hat(state)
    solve_J(state)
    complete_Zhat(state, seed)
    solve_U(state)
    assemble_Q(state)
    extension_moments(state)
    build_H(state)
    return state


def extra_moments(state: ConstructionState, upto: int) -> list[np.ndarray]:
    """Shifted moments ``T_0 .. T_{upto-1}`` continued by the relation.

    ``T_r = row(T_{r-n-1}, ..., T_{r-1}) col([U1 0] Q_n^{-1}, Q_0 Q_n^{-1}, ..., Q_{n-1} Q_n^{-1})``.
    """
    n, p = state.n, state.p
    moms = list(state.T_ext.moments)
    if upto <= len(moms):
        return moms[:upto]
    Qn_inv = la.inverse(state.Q[n])
    U0 = np.hstack([state.U1, state.zeros(p, p - state.c1)])
    coeffs = [U0 @ Qn_inv] + [Qi @ Qn_inv for Qi in state.Q[:n]]
    while len(moms) < upto:
        r = len(moms)
        acc = state.zeros(p, p)
        for i, C in enumerate(coeffs):
            acc = acc + moms[r - n - 1 + i] @ C
        if not state.exact:
            acc = (acc + acc.T) / 2
        moms.append(acc)
    return moms
