from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matquad import linalg as la
from matquad.errors import Inconsistent, NotSymmetric, ParseError
from matquad.moments import MomentSequence, moment_matrix, shift_sequence

from conftest import SEC7

small_int = st.integers(-4, 4)


def int_matrix(rows, cols):
    return st.lists(st.lists(small_int, min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(
        lambda r: la.exact(np.array(r, dtype=object))
    )


shapes = st.tuples(st.integers(1, 5), st.integers(1, 5))
matrices = shapes.flatmap(lambda s: int_matrix(*s))


def test_rank_identity():
    assert la.rank(la.eye(2, True)) == 2
    assert la.rank(np.eye(2)) == 2


def test_rank_worked_moment_matrix():
    S = MomentSequence.from_matrices(SEC7)
    assert la.rank(moment_matrix(S)) == 9


def test_kernel_of_dependent_columns():
    M = la.exact(np.array([[1, 0, 1], [0, 1, 1], [1, 1, 2], [2, 0, 2], [0, 3, 3]], dtype=object))
    rep = la.rank_and_kernel(M)
    assert rep.rank == 2
    assert rep.column_space_basis == (0, 1)
    k = rep.kernel_basis[:, 0]
    assert list(k / k[0]) == [1, 1, -1]


def test_pivot_columns_skip_spanned():
    M = la.exact(np.array([[1, 2, 0], [1, 2, 1]], dtype=object))
    assert la.pivot_columns(M) == [0, 2]


def test_pinv_of_singular_diagonal():
    P = la.pseudo_inverse(la.exact(np.array([[2, 0], [0, 0]], dtype=object)))
    assert P.tolist() == [[Fraction(1, 2), 0], [0, 0]]


def test_pinv_idempotent_on_worked_shifted_matrix():
    T = shift_sequence(MomentSequence.from_matrices(SEC7), 1)
    M = moment_matrix(T)
    P = la.pseudo_inverse(M)
    assert (M @ P @ M == M).all()
    assert (la.pseudo_inverse(P) == M).all()


def test_pinv_full_column_rank_matches_normal_equations():
    A = la.exact(np.array([[1, 2], [3, 4], [5, 7]], dtype=object))
    expected = la.inverse(A.T @ A) @ A.T
    assert (la.pseudo_inverse(A) == expected).all()


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_penrose_identities(M):
    P = la.pseudo_inverse(M)
    assert (M @ P @ M == M).all()
    assert (P @ M @ P == P).all()
    assert ((M @ P).T == M @ P).all()
    assert ((P @ M).T == P @ M).all()


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_exact_rank_matches_float_rank(M):
    assert la.rank(M) == np.linalg.matrix_rank(la.floating(M))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_dimension_and_annihilation(M):
    rep = la.rank_and_kernel(M)
    assert rep.kernel_basis.shape[1] == M.shape[1] - rep.rank
    assert la.is_zero(M @ rep.kernel_basis)


def test_is_psd_examples():
    assert la.is_psd(la.exact(np.array([[1, 1], [1, 1]], dtype=object)))
    assert not la.is_psd(la.exact(np.array([[1, 2], [2, 1]], dtype=object)))
    assert not la.is_psd(la.exact(np.array([[0, 1], [1, 0]], dtype=object)))
    assert la.is_psd(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert la.is_psd(la.zeros(0, 0, True))


def test_is_psd_rejects_asymmetric_and_nonsquare():
    with pytest.raises(NotSymmetric):
        la.is_psd(la.exact(np.array([[1, 2], [0, 1]], dtype=object)))
    with pytest.raises(NotSymmetric):
        la.is_psd(np.ones((2, 3)))


@settings(max_examples=60, deadline=None)
@given(shapes.flatmap(lambda s: int_matrix(*s)))
def test_gram_matrices_are_psd(B):
    G = B @ B.T
    assert la.is_psd(G)
    assert la.is_psd(la.floating(G))


def test_psd_failure_order():
    M = la.exact(np.diag([1, 2, -1, 4]).astype(object))
    assert la.psd_failure_order(M) == 3
    assert la.psd_failure_order(M, block=2) == 2
    assert la.psd_failure_order(la.eye(3, True)) is None


def test_column_space_contains():
    A = la.exact(np.array([[1, 0], [0, 1], [1, 1]], dtype=object))
    assert la.column_space_contains(A, la.exact(np.array([[2], [3], [5]], dtype=object)))
    assert not la.column_space_contains(A, la.exact(np.array([[0], [0], [1]], dtype=object)))
    assert la.column_space_contains(A, la.zeros(3, 0, True))
    assert la.column_space_contains(la.zeros(3, 0, True), la.zeros(3, 2, True))


def test_worked_tail_lies_in_range_of_truncated_moment_matrix():
    S = MomentSequence.from_matrices(SEC7)
    tail = np.vstack([S[3], S[4]])
    assert la.column_space_contains(moment_matrix(S, 1), tail)


def test_least_norm_solve():
    A = la.exact(np.array([[1, 1]], dtype=object))
    X = la.least_norm_solve(A, la.exact(np.array([[2]], dtype=object)))
    assert X.tolist() == [[1], [1]]
    with pytest.raises(Inconsistent):
        la.least_norm_solve(la.exact(np.array([[1], [1]], dtype=object)), la.exact(np.array([[1], [0]], dtype=object)))


def test_schur_complement_of_identity():
    assert (la.schur_complement(la.eye(4, True), 2) == la.eye(2, True)).all()


def test_schur_complement_matches_classical_formula():
    M = la.exact(np.array([[4, 2, 1], [2, 3, 0], [1, 0, 2]], dtype=object))
    S = la.schur_complement(M, 1)
    expected = M[1:, 1:] - M[1:, :1] @ M[:1, 1:] / M[0, 0]
    assert (S == expected).all()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.data())
def test_schur_rank_additivity_for_psd(n, k, data):
    B = data.draw(int_matrix(n + k, n + k))
    M = B @ B.T
    split = data.draw(st.integers(0, n + k))
    assert la.rank(M) == la.rank(M[:split, :split]) + la.rank(la.schur_complement(M, split))


def test_kernel_inclusion():
    A = la.exact(np.array([[1, 0, 0]], dtype=object))
    B = la.exact(np.array([[1, 0, 0], [0, 1, 0]], dtype=object))
    assert la.kernel_contained(B, A)
    assert not la.kernel_contained(A, B)
    assert la.kernels_equal(A, 3 * A)
    assert not la.kernels_equal(A, B)


@settings(max_examples=60, deadline=None)
@given(matrices, st.data())
def test_kernel_contained_after_left_multiplication(M, data):
    L = data.draw(int_matrix(3, M.shape[0]))
    assert la.kernel_contained(M, L @ M)


def test_empty_matrices():
    E = la.zeros(0, 3, True)
    assert la.rank(E) == 0
    assert la.kernel(E).shape == (3, 3)
    assert la.pseudo_inverse(E).shape == (3, 0)


def test_tolerance_context_restores():
    before = la.get_tolerance()
    with la.tolerance(1e-3):
        assert la.get_tolerance() == 1e-3
        assert la.rank(np.diag([1.0, 1e-5])) == 1
    assert la.get_tolerance() == before
    assert la.rank(np.diag([1.0, 1e-5])) == 2
    with pytest.raises(ValueError):
        la.set_tolerance(0)


@pytest.mark.parametrize("bad", ["1/0", "abc", float("nan"), True, [1]])
def test_to_fraction_rejects(bad):
    with pytest.raises(ParseError):
        la.to_fraction(bad)


def test_to_fraction_accepts():
    assert la.to_fraction("3/4") == Fraction(3, 4)
    assert la.to_fraction(np.int64(5)) == 5
    assert la.to_fraction(0.5) == Fraction(1, 2)
