"""Atoms and masses of a minimal measure from a block column relation.

Exact mode keeps everything rational: the determinant of the relation
polynomial is computed by fraction-free elimination, the known root is
deflated by exact division, and multiplicities come from a square-free
decomposition.  Masses are represented as ``A_j = R(x_j)`` for a rational
matrix polynomial ``R`` solving a Hankel system in the power sums of the
atoms, so moment residuals are checked exactly even when some atoms are
irrational.  Irrational atoms and their masses are evaluated with mpmath.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import linalg as la
from . import poly as P
from .construction import ConstructionState, construct, extra_moments
from .errors import (
    ConsistencyViolation,
    DegenerateZeroPolynomial,
    MassNotPSD,
    ResidualRootAtT,
    SingularVandermonde,
)
from .moments import MatrixPolynomial, MomentSequence, moment_matrix

DPS = 60
CLUSTER_TOL = 1e-8


# ---------------------------------------------------------------- determinant


def det_matrix_polynomial(H: MatrixPolynomial) -> list:
    """Coefficients (lowest first) of ``det H(x)``.

    Exact input uses fraction-free elimination over the polynomial ring.
    Float input evaluates the determinant on a circle and interpolates.
    """
    p = H.shape[0]
    if H.shape[0] != H.shape[1]:
        raise ValueError("determinant needs a square matrix polynomial")
    if H.exact:
        return P.matrix_det([[H.entry(i, j) for j in range(p)] for i in range(p)])
    deg = p * H.degree
    N = deg + 1
    scale = max(1.0, max(la.max_abs(C) for C in H.coeffs))
    pts = np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.array([np.linalg.det(sum(C * (x**k) for k, C in enumerate(H.coeffs))) for x in pts])
    # samples f(w^j) = sum_k a_k w^{jk}; the forward FFT inverts this up to 1/N
    coef = np.real(np.fft.fft(vals) / N)
    thresh = 1e-12 * max(1.0, float(np.max(np.abs(coef)))) * scale
    coef = [float(c) if abs(c) > thresh else 0.0 for c in coef]
    # the top coefficient is det of the leading matrix; computed directly it cannot be thresholded away
    coef[deg] = float(np.linalg.det(la.floating(H.coeffs[-1])))
    return P.trim(coef)


def kernel_dims_at(H: MatrixPolynomial, t) -> list[int]:
    """``s_k = dim of the common kernel of the first k+1 coefficients of H(y + t)``."""
    Ht = H.shift(-t)
    dims = []
    stack = None
    q = H.shape[1]
    scale = None if H.exact else max(la.max_abs(C) for C in Ht.coeffs)
    for C in Ht.coeffs:
        stack = C if stack is None else np.vstack([stack, C])
        dims.append(q - la.rank(stack, scale=scale))
    return dims


def predicted_vanishing_order(H: MatrixPolynomial, t) -> int:
    """Lower bound ``sum_{k<d} s_k`` for the order of ``t`` as a root of ``det H``.

    Raises ``DegenerateZeroPolynomial`` when all coefficients share a kernel
    vector, in which case the determinant is identically zero.
    """
    dims = kernel_dims_at(H, t)
    if dims[-1] > 0:
        raise DegenerateZeroPolynomial("coefficients share a kernel vector", common_kernel=dims[-1])
    return sum(dims[:-1])


def _is_rational(d: list) -> bool:
    return all(isinstance(c, (Fraction, int)) and not isinstance(c, bool) for c in d)


@dataclass(frozen=True)
class FactoredPolynomial:
    """``full = (x - t)^order * residual`` with ``residual(t) != 0``."""

    t: object
    order: int
    residual: list
    full: list


def deflate(d: list, t, order: int) -> FactoredPolynomial:
    """Divide out ``(x - t)^order`` and check nothing is left at ``t``."""
    if not d:
        raise DegenerateZeroPolynomial("determinant is identically zero")
    exact = _is_rational(d)
    g = [Fraction(c) for c in d] if exact else list(d)
    scale = max(abs(float(c)) for c in d)
    for _ in range(order):
        g, r = P.divide_linear(g, t)
        if exact and r != 0:
            raise ConsistencyViolation("(x - t)^order does not divide the determinant", order=order)
        if not exact and abs(r) > 1e-6 * scale:
            raise ConsistencyViolation("(x - t)^order does not divide the determinant", order=order, remainder=float(r))
    at_t = P.evaluate(g, t)
    if exact and at_t == 0:
        raise ResidualRootAtT("deflated determinant still vanishes at t")
    if not exact and abs(at_t) <= 1e-9 * max(abs(float(c)) for c in g):
        raise ResidualRootAtT("deflated determinant still vanishes at t", value=float(at_t))
    return FactoredPolynomial(t, order, g, d)


# ---------------------------------------------------------------- roots


@dataclass(frozen=True)
class Root:
    """A real root with its multiplicity.

    ``value`` is a Fraction for exactly verified rational roots, else a
    float; ``approx`` is a high-precision value; ``factor`` is the exact
    square-free factor the root belongs to (exact mode only).
    """

    value: object
    multiplicity: int
    approx: object = None
    factor: tuple | None = None

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)


@dataclass
class RootReport:
    roots: list[Root]
    complex_roots: list = field(default_factory=list)


def real_roots_of_squarefree(f: list, dps: int) -> tuple[list, list]:
    """Real and complex roots of a square-free rational polynomial."""
    if len(f) == 2:
        r = -f[0] / f[1]
        return [(Fraction(r), mpmath.mpf(r.numerator) / r.denominator)], []
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(f)]
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)
        real, cplx = [], []
        eps = mpmath.mpf(10) ** (-(dps // 2))
        for z in roots:
            z = mpmath.mpc(z)
            if abs(z.imag) <= eps * max(1, abs(z)):
                x = z.real
                fr = Fraction(float(x)).limit_denominator(10**9)
                if P.evaluate(f, fr) == 0:
                    real.append((fr, mpmath.mpf(fr.numerator) / fr.denominator))
                else:
                    real.append((None, x))
            else:
                cplx.append(complex(z))
    return real, cplx


def linearization_eigenvalues(H: MatrixPolynomial) -> np.ndarray:
    """Eigenvalues of the block companion matrix of ``H`` (leading coefficient invertible).

    These are the roots of ``det H`` with multiplicity; semisimple roots are
    far better conditioned here than as roots of the expanded determinant.
    """
    p, k = H.shape[0], H.degree
    lead_inv = np.linalg.inv(la.floating(H.coeffs[-1]))
    C = np.zeros((k * p, k * p))
    C[:-p, p:] = np.eye((k - 1) * p)
    for i in range(k):
        C[-p:, i * p : (i + 1) * p] = -lead_inv @ la.floating(H.coeffs[i])
    return np.linalg.eigvals(C)


def find_atoms(
    d: list,
    t,
    order: int,
    dps: int = DPS,
    cluster_tol: float = CLUSTER_TOL,
    eigenvalues: np.ndarray | None = None,
) -> RootReport:
    """Real roots of ``d`` with multiplicities, the known root ``t`` first.

    In float mode the roots are companion eigenvalues: of ``d`` itself, or
    the supplied ``eigenvalues`` (e.g. from :func:`linearization_eigenvalues`),
    from which the ``order`` values closest to ``t`` are removed.
    """
    fac = deflate(d, t, order)
    exact = _is_rational(d)
    out: list[Root] = []
    if order:
        tv = Fraction(t) if exact else float(t)
        out.append(Root(tv, order, mpmath.mpf(float(t)) if not exact else mpmath.mpf(tv.numerator) / tv.denominator))
    if exact:
        cplx_all = []
        for f, mult in P.square_free_decomposition(fac.residual):
            real, cplx = real_roots_of_squarefree(f, dps)
            cplx_all.extend((z, mult) for z in cplx)
            for fr, approx in real:
                out.append(Root(fr if fr is not None else float(approx), mult, approx, tuple(f)))
        return RootReport(out, cplx_all)
    g = fac.residual
    if len(g) <= 1:
        return RootReport(out, [])
    if eigenvalues is None:
        eig = np.roots(np.array(g[::-1], dtype=float))
    else:
        eig = np.asarray(eigenvalues)
        near = np.argsort(np.abs(eig - float(t)))[:order]
        eig = np.delete(eig, near)
    real = sorted(float(z.real) for z in eig if abs(z.imag) <= 1e-6 * max(1.0, abs(z)))
    cplx = [complex(z) for z in eig if abs(z.imag) > 1e-6 * max(1.0, abs(z))]
    clusters: list[list[float]] = []
    for x in real:
        if clusters and abs(x - np.mean(clusters[-1])) <= cluster_tol * max(1.0, abs(x)):
            clusters[-1].append(x)
        else:
            clusters.append([x])
    for c in clusters:
        out.append(Root(float(np.mean(c)), len(c), mpmath.mpf(float(np.mean(c)))))
    return RootReport(out, [(z, 1) for z in cplx])


# ---------------------------------------------------------------- measures


@dataclass(frozen=True)
class Atom:
    location: object
    mass: np.ndarray
    rank: int

    @property
    def exact(self) -> bool:
        return isinstance(self.location, Fraction) and la.is_exact(self.mass)


@dataclass(frozen=True)
class ExactForm:
    """Atoms are the roots of ``nodes``; the mass at ``x`` is ``sum_r x^r R[r]``."""

    nodes: tuple
    R: tuple


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: tuple[Atom, ...]
    p: int
    exact_form: ExactForm | None = None

    @property
    def total_rank(self) -> int:
        return sum(a.rank for a in self.atoms)

    @property
    def locations(self) -> list:
        return [a.location for a in self.atoms]

    def mass_at(self, x, tol: float = 1e-9):
        for a in self.atoms:
            if a.location == x or (not isinstance(a.location, Fraction) and abs(float(a.location) - float(x)) <= tol * max(1.0, abs(float(x)))):
                return a
        return None

    def multiplicity_at(self, x) -> int:
        a = self.mass_at(x)
        return a.rank if a is not None else 0

    def moments(self, count: int, exact: bool | None = None) -> list[np.ndarray]:
        """``sum_j x_j^i A_j`` for ``i < count``; exact when an exact form exists."""
        if self.exact_form is not None and exact is not False:
            pis = power_sums(list(self.exact_form.nodes), count + len(self.exact_form.R))
            out = []
            for i in range(count):
                acc = la.zeros(self.p, self.p, True)
                for r, Rr in enumerate(self.exact_form.R):
                    acc = acc + Rr * pis[i + r]
                out.append(acc)
            return out
        out = []
        for i in range(count):
            acc = np.zeros((self.p, self.p))
            for a in self.atoms:
                acc = acc + la.floating(a.mass) * float(a.location) ** i
            out.append(acc)
        return out


def power_sums(nodes: list, count: int) -> list[Fraction]:
    """``pi_k = sum of k-th powers of the roots of the monic polynomial nodes``."""
    ell = len(nodes) - 1
    a = [nodes[ell - k] for k in range(ell + 1)]  # a_0 = 1
    pis = [Fraction(ell)]
    for k in range(1, count):
        acc = Fraction(0)
        for i in range(1, min(k, ell) + 1):
            if i < k:
                acc += a[i] * pis[k - i]
        if k <= ell:
            acc += k * a[k]
        pis.append(-acc)
    return pis


def _mass_polynomial(moms: list[np.ndarray], nodes: list) -> list[np.ndarray]:
    ell = len(nodes) - 1
    pis = power_sums(nodes, 2 * ell)
    Pi = np.empty((ell, ell), dtype=object)
    for i in range(ell):
        for j in range(ell):
            Pi[i, j] = pis[i + j]
    try:
        Pinv = la.inverse(Pi)
    except np.linalg.LinAlgError as exc:
        raise SingularVandermonde("atoms are not distinct") from exc
    p = moms[0].shape[0]
    R = []
    for r in range(ell):
        acc = la.zeros(p, p, True)
        for k in range(ell):
            if Pinv[r, k]:
                acc = acc + moms[k] * Pinv[r, k]
        R.append(acc)
    return R


def eval_mass_mp(R: list[np.ndarray], x, dps: int) -> mpmath.matrix:
    p = R[0].shape[0]
    with mpmath.workdps(dps):
        out = mpmath.zeros(p, p)
        xp = mpmath.mpf(1)
        for Rr in R:
            for i in range(p):
                for j in range(p):
                    v = Rr[i, j]
                    if v:
                        out[i, j] += xp * (mpmath.mpf(v.numerator) / v.denominator)
            xp *= x
    return out


def _mp_eigs(M: mpmath.matrix, dps: int) -> list:
    with mpmath.workdps(dps):
        if M.rows == 0:
            return []
        E = mpmath.eigsy(M, eigvals_only=True)
        return [E[i] for i in range(M.rows)]


def solve_masses(moms: list[np.ndarray], atoms: list, info: dict | None = None) -> list[np.ndarray]:
    """Masses ``A_j`` with ``sum_j x_j^i A_j = S_i``.

    Exact atoms and moments give exact masses from the first ``len(atoms)``
    moments.  Otherwise every supplied moment is used: a least-squares
    Vandermonde fit with row ``i`` weighted by ``1 / max(1, ||S_i||)``,
    solved in extended precision; the condition number of the square
    Vandermonde matrix is stored in ``info`` when a dict is passed.  Masses
    are symmetrized.
    """
    ell = len(atoms)
    if len(set(atoms)) != ell:
        raise SingularVandermonde("duplicate atoms", atoms=[str(a) for a in atoms])
    if ell == 0:
        return []
    p = moms[0].shape[0]
    if all(isinstance(a, Fraction) for a in atoms) and la.is_exact(moms[0]):
        R = _mass_polynomial(moms, P.from_roots(atoms))
        out = []
        for x in atoms:
            A = la.zeros(p, p, True)
            xp = Fraction(1)
            for Rr in R:
                A = A + Rr * xp
                xp *= x
            out.append(A)
        return out
    xs = np.array([float(a) for a in atoms])
    srt = np.sort(xs)
    if ell > 1 and np.min(np.diff(srt)) <= 1e-14 * max(1.0, float(np.max(np.abs(xs)))):
        raise SingularVandermonde("atoms are numerically equal", atoms=xs.tolist())
    if len(moms) < ell:
        raise SingularVandermonde("fewer moments than atoms", atoms=ell, moments=len(moms))
    cond = float(np.linalg.cond(np.vander(xs, ell, increasing=True).T))
    if info is not None:
        info["condition"] = cond
    rows = [la.floating(S).reshape(-1) for S in moms]
    weights = [1.0 / max(1.0, float(np.linalg.norm(r))) for r in rows]
    # float moments are accurate; a double-precision solve is not once cond ~ 1e8
    digits = 20 + int(np.log10(cond)) if np.isfinite(cond) and cond > 1 else 60
    with mpmath.workdps(min(digits, 200)):
        V = mpmath.matrix([[mpmath.mpf(w) * mpmath.mpf(x) ** i for x in xs] for i, w in enumerate(weights)])
        sol = np.zeros((ell, p * p))
        for k in range(p * p):
            b = mpmath.matrix([mpmath.mpf(w) * mpmath.mpf(float(r[k])) for r, w in zip(rows, weights)])
            try:
                x, _ = mpmath.qr_solve(V, b)
            except ZeroDivisionError as exc:
                raise SingularVandermonde("Vandermonde matrix is numerically singular", atoms=xs.tolist()) from exc
            sol[:, k] = [float(v) for v in x]
    return [(sol[j].reshape(p, p) + sol[j].reshape(p, p).T) / 2 for j in range(ell)]


def psd_project(
    A: np.ndarray,
    scale: float,
    tol: float | None = None,
    condition: float = 1.0,
    rank: int | None = None,
) -> tuple[np.ndarray, int]:
    """Symmetrize and clamp a float mass; returns the projected mass and its rank.

    The noise threshold is ``max(tol, 10 eps cond) * scale * p`` so roundoff
    amplified by an ill-conditioned Vandermonde solve is not mistaken for
    indefiniteness.  Eigenvalues below ``-threshold`` raise ``MassNotPSD``.
    With ``rank`` given, the mass is truncated to its top ``rank``
    eigenpairs, and every discarded eigenvalue must lie within the
    threshold.
    """
    t = la.get_tolerance() if tol is None else tol
    t = max(t, 10 * np.finfo(float).eps * condition)
    w, V = np.linalg.eigh((A + A.T) / 2)
    thresh = t * max(scale, 1.0) * A.shape[0]
    if w.size and w[0] < -thresh:
        raise MassNotPSD("mass has a negative eigenvalue", eigenvalue=float(w[0]), threshold=thresh)
    if rank is None:
        w = np.where(w > thresh, w, 0.0)
        return (V * w) @ V.T, int(np.sum(w > 0))
    drop = w[: len(w) - rank]
    if drop.size and float(np.max(np.abs(drop))) > thresh:
        raise ConsistencyViolation("mass rank exceeds root multiplicity", eigenvalue=float(np.max(drop)), threshold=thresh)
    w = np.concatenate([np.zeros(len(w) - rank), np.maximum(w[len(w) - rank :], 0.0)])
    return (V * w) @ V.T, rank


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class VerificationReport:
    residuals: tuple[float, ...]
    exact: bool
    total_rank: int
    rank_moment_matrix: int
    multiplicity_at_t: int | None

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def as_dict(self) -> dict:
        return {
            "residuals": list(self.residuals),
            "max_residual": self.max_residual,
            "residuals_exact": self.exact,
            "total_rank": self.total_rank,
            "rank_moment_matrix": self.rank_moment_matrix,
            "multiplicity_at_t": self.multiplicity_at_t,
        }


def _frob(M: np.ndarray) -> float:
    if la.is_exact(M):
        return float(sum(v * v for v in M.flat)) ** 0.5
    return float(np.linalg.norm(M))


def verify_measure(S: MomentSequence, mu: AtomicMeasure, t=None) -> VerificationReport:
    """Relative Frobenius residuals ``||S_i - sum_j x_j^i A_j|| / max(1, ||S_i||)``."""
    count = len(S)
    exact = S.exact and mu.exact_form is not None
    moms = mu.moments(count, exact=exact if exact else False)
    res = []
    for i in range(count):
        Si = S[i] if exact else la.floating(S[i])
        diff = Si - moms[i]
        res.append(_frob(diff) / max(1.0, _frob(Si)))
    return VerificationReport(
        residuals=tuple(res),
        exact=exact,
        total_rank=mu.total_rank,
        rank_moment_matrix=la.rank(moment_matrix(S)),
        multiplicity_at_t=None if t is None else mu.multiplicity_at(t),
    )


# ---------------------------------------------------------------- driver


@dataclass
class QuadratureResult:
    measure: AtomicMeasure
    state: ConstructionState
    determinant: FactoredPolynomial
    roots: RootReport
    predicted_order: int
    expected_order: int
    report: VerificationReport
    diagnostics: dict = field(default_factory=dict)


def _shift_list(moms: list[np.ndarray], t) -> list[np.ndarray]:
    """Moments of ``x + t`` given moments of ``x`` (for a plain list)."""
    from math import comb

    out = []
    for i in range(len(moms)):
        acc = moms[i].copy()
        for l in range(1, i + 1):
            acc = acc + moms[i - l] * (comb(i, l) * t**l)
        out.append(acc)
    return out


def solve_quadrature(
    S: MomentSequence,
    t,
    m: int,
    *,
    seed: int | None = None,
    prune_mass: float = 0.0,
    dps: int = DPS,
    cluster_tol: float = CLUSTER_TOL,
) -> QuadratureResult:
    """Minimal representing measure with an atom of mass rank ``m`` at ``t``."""
    state = construct(S, t, m, seed=seed)
    t = state.t
    n, p = S.n, S.p
    rank_M = state.profile.rank
    expected = m + (n + 1) * p - rank_M
    H = state.H_S
    d = det_matrix_polynomial(H)
    predicted = predicted_vanishing_order(H, t)
    if predicted != expected:
        raise ConsistencyViolation("kernel count disagrees with the expected order", predicted=predicted, expected=expected)
    if S.exact:
        order, _ = P.order_at(d, t)
        if order != expected:
            raise ConsistencyViolation("determinant order at t is wrong", order=order, expected=expected)
    fac = deflate(d, t, expected)
    eig = None if S.exact else linearization_eigenvalues(H)
    roots = find_atoms(d, t, expected, dps=dps, cluster_tol=cluster_tol, eigenvalues=eig)
    if len(P.trim(fac.residual)) - 1 != rank_M - m:
        raise ConsistencyViolation("residual factor has the wrong degree", degree=len(fac.residual) - 1, expected=rank_M - m)

    nodes = [r for r in roots.roots if not (r.value == t and m == 0)]
    ell = len(nodes)
    T_moms = extra_moments(state, max(ell, 2 * n + 3))
    moms = _shift_list(T_moms, t)

    if S.exact and not roots.complex_roots:
        measure = _exact_measure(moms, nodes, t, m, p, dps)
    else:
        measure = _float_measure(moms, nodes, t, m, p)

    if prune_mass > 0:
        kept = tuple(a for a in measure.atoms if float(np.max(np.abs(la.floating(a.mass)))) >= prune_mass)
        measure = AtomicMeasure(kept, p, None if len(kept) != len(measure.atoms) else measure.exact_form)
    else:
        for r in nodes:
            a = measure.mass_at(r.value)
            want = m if r.value == t else r.multiplicity
            if a is None or a.rank != want:
                raise ConsistencyViolation(
                    "mass rank differs from root multiplicity",
                    atom=float(r.value),
                    rank=None if a is None else a.rank,
                    multiplicity=want,
                )
        if measure.total_rank != rank_M:
            raise ConsistencyViolation("measure is not minimal", total_rank=measure.total_rank, rank=rank_M)
        if measure.multiplicity_at(t) != m:
            raise ConsistencyViolation("mass at t has the wrong rank", rank=measure.multiplicity_at(t), m=m)
    report = verify_measure(S, measure, t)
    diag = {"complex_roots_discarded": [str(z) for z, _ in roots.complex_roots]}
    return QuadratureResult(measure, state, fac, roots, predicted, expected, report, diag)


def _exact_measure(moms, nodes: list[Root], t, m: int, p: int, dps: int) -> AtomicMeasure:
    node_poly = [Fraction(1)]
    seen = set()
    for r in nodes:
        if r.exact:
            node_poly = P.mul(node_poly, [-r.value, Fraction(1)])
        elif r.factor not in seen:
            seen.add(r.factor)
            rational_part = [q.value for q in nodes if q.exact and q.factor == r.factor]
            f = list(r.factor)
            for q in rational_part:
                f, _ = P.divide_linear(f, q)
            node_poly = P.mul(node_poly, P.monic(f))
    if len(node_poly) - 1 != len(nodes):
        raise ConsistencyViolation("node polynomial degree mismatch")
    R = _mass_polynomial(moms, node_poly)
    atoms = []
    for r in nodes:
        if r.exact:
            A = la.zeros(p, p, True)
            xp = Fraction(1)
            for Rr in R:
                A = A + Rr * xp
                xp *= r.value
            if not la.is_psd(A):
                raise MassNotPSD("mass is not positive semidefinite", atom=str(r.value))
            atoms.append(Atom(r.value, A, la.rank(A)))
        else:
            want = m if r.value == t else r.multiplicity
            F, rk = _irrational_mass(R, r, want, dps)
            atoms.append(Atom(float(r.approx), F, rk))
    atoms.sort(key=lambda a: float(a.location))
    return AtomicMeasure(tuple(atoms), p, ExactForm(tuple(node_poly), tuple(R)))


def _irrational_mass(R: list[np.ndarray], root: Root, want: int, dps: int, max_dps: int = 1000):
    """Mass ``R(x)`` at an irrational root and its certified rank.

    Evaluating ``R`` at a large root cancels many digits, so the working
    precision is sized to the largest term and the root is re-polished at
    that precision.  Eigenvalues beyond the rounding bound are certainly
    nonzero; precision is raised until ``want`` of them are resolved or
    ``max_dps`` is reached.
    """
    p = R[0].shape[0]
    norms = [max((abs(v) for v in Rr.flat), default=0) for Rr in R]
    work = dps
    while True:
        with mpmath.workdps(work + 20):
            x = mpmath.mpf(root.approx)
            # log10 of the largest term of sum_r x^r R_r
            digits = int(max(mpmath.log10(mpmath.mpf(float(nr) or 1) * max(1, abs(x)) ** k) for k, nr in enumerate(norms))) + 1
        prec = work + max(digits, 0) + 20
        with mpmath.workdps(prec):
            f = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(root.factor)]
            x = mpmath.findroot(lambda z: mpmath.polyval(f, z), mpmath.mpf(root.approx), tol=mpmath.mpf(10) ** (-prec + 5))
            Amp = eval_mass_mp(R, x, prec)
            eigs = _mp_eigs(Amp, prec)
            err = mpmath.mpf(10) ** (digits - work) * p * len(R)
        if eigs and min(eigs) < -err:
            raise MassNotPSD("mass has a negative eigenvalue", atom=float(x), eigenvalue=float(min(eigs)))
        rk = sum(1 for e in eigs if e > err)
        if rk >= want or work >= max_dps:
            F = np.array([[float(Amp[i, j]) for j in range(p)] for i in range(p)])
            return (F + F.T) / 2, rk
        work *= 2


def _float_measure(moms, nodes: list[Root], t, m: int, p: int) -> AtomicMeasure:
    locs = [float(r.value) for r in nodes]
    info: dict = {}
    masses = solve_masses([la.floating(M) for M in moms], locs, info)
    scale = max([1.0] + [float(np.max(np.abs(A))) for A in masses])
    atoms = []
    for r, x, A in zip(nodes, locs, masses):
        want = m if r.value == t else r.multiplicity
        Ap, rk = psd_project(A, scale, condition=info.get("condition", 1.0), rank=want)
        atoms.append(Atom(x, Ap, rk))
    atoms.sort(key=lambda a: float(a.location))
    return AtomicMeasure(tuple(atoms), p, None)


# ---------------------------------------------------------------- diagnostics


def w_polynomial(S_ext: list[np.ndarray], n: int) -> MatrixPolynomial:
    """``W(x) = x^(n+1) I - sum_i x^i W_i`` with ``col(W_i) = M(n)^+ col(S_{n+1}, ..., S_{2n+1})``.

    This relation of the extended moment matrix is a diagnostic only: its
    determinant has the atoms among its roots but may carry extra factors.
    """
    p = S_ext[0].shape[0]
    exact = la.is_exact(S_ext[0])
    M = np.block([[S_ext[i + j] for j in range(n + 1)] for i in range(n + 1)])
    rhs = np.vstack([S_ext[i] for i in range(n + 1, 2 * n + 2)])
    W = la.matmul(la.pseudo_inverse(M), rhs)
    coeffs = [-W[i * p : (i + 1) * p, :] for i in range(n + 1)] + [la.eye(p, exact)]
    return MatrixPolynomial(tuple(coeffs))


def w_diagnostic(result: QuadratureResult) -> dict:
    """Determinant of ``W(x)`` and the part of it that vanishes away from the atoms."""
    S = result.state.S
    W = w_polynomial(list(result.state.S_ext), S.n)
    d = det_matrix_polynomial(W)
    out = {"det": d}
    form = result.measure.exact_form
    if not S.exact or form is None:
        return out
    sq = [Fraction(1)]
    for f, _ in P.square_free_decomposition(d):
        sq = P.mul(sq, f)
    common = P.gcd(sq, list(form.nodes))
    extra, _ = P.divmod_poly(sq, common)
    out["extraneous"] = P.monic(extra)
    return out
