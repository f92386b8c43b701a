import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matquad import linalg as la
from matquad.construction import construct, extra_moments, ordering_permutation, permutation_matrix
from matquad.dependency import DependencyProfile, feasibility
from matquad.errors import InfeasibleMultiplicity
from matquad.moments import MomentSequence, evaluate_on_columns, moment_matrix, moments_of_atoms

from conftest import SEC7
from generators import planted_measure

seeds = st.integers(0, 10**6)
E = frozenset()


def strs(M):
    return [[str(v) for v in row] for row in M.tolist()]


@pytest.fixture(scope="module")
def worked_state():
    return construct(MomentSequence.from_matrices(SEC7), 1, 2)


def test_worked_ordering_is_identity(worked_state):
    assert worked_state.order == [0, 1, 2, 3]
    assert (permutation_matrix(worked_state.order, True) == la.eye(4, True)).all()


def test_worked_relations(worked_state):
    rel = worked_state.relations
    assert strs(rel[(1, 0)]["coefficients"]) == [["0"], ["0"], ["0"], ["-2"], ["0"], ["0"], ["-3/2"], ["-3/2"], ["0"], ["0"]]
    assert strs(rel[(2, 1)]["coefficients"]) == [["0"]] * 6 + [["1"]]


def test_worked_claim2_matrices(worked_state):
    assert strs(worked_state.Hc_n) == [["1", "-1"], ["0", "1"]]
    G = worked_state.G
    assert strs(G[:, 1:]) == [["0"]] * 10
    assert strs(G[:, :1]) == [["0"], ["0"], ["0"], ["-2"], ["0"], ["0"], ["-3/2"], ["-3/2"], ["0"], ["0"]]


def test_worked_split_and_zhat(worked_state):
    st_ = worked_state
    assert st_.k == 0
    assert strs(st_.Khat[:, :1]) == [["-10"], ["0"], ["0"], ["0"], ["18"], ["0"], ["0"], ["0"]]
    Z = st_.Z_blocks
    assert strs(Z["Z1"]) == [["0"]]
    assert strs(Z["Z4"]) == [["-68"]]
    assert strs(Z["Z5"]) == [["-34", "-34"]]
    assert strs(Z["Z6"]) == [["-34", "-34"], ["-34", "-34"]]
    assert strs(st_.T_ext[5]) == [
        ["0", "0", "0", "0"],
        ["0", "-68", "-34", "-34"],
        ["0", "-34", "-34", "-34"],
        ["0", "-34", "-34", "-34"],
    ]


def test_worked_relation_polynomial(worked_state):
    st_ = worked_state
    Q0, Q1, Q2 = st_.Q
    assert strs(Q0) == [["66", "0", "0", "0"], ["0", "-2", "0", "0"], ["0", "0", "0", "0"], ["0", "0", "-2", "-2"]]
    h = "-3/2"
    assert strs(Q1) == [["31", "0", "0", "0"], ["0", "-3", "0", "0"], ["0", "0", h, h], ["0", "0", h, h]]
    assert (Q2 == la.eye(4, True)).all()
    assert strs(st_.U1.T) == [["17", "0", "0", "0"]]
    assert strs(st_.U2.T) == [["66", "0", "0", "0", "31", "0", "0", "0"]]
    assert la.is_zero(evaluate_on_columns(st_.T_ext, st_.H_T))
    assert la.is_zero(evaluate_on_columns(st_.S_ext, st_.H_S))


def test_ordering_rule_by_hand():
    prof = DependencyProfile(
        p=3,
        n=1,
        dep=(E, frozenset({1})),
        dep1=(E, frozenset({1})),
        depn=(E, frozenset({1})),
        depn1=(E, frozenset({1})),
        depn0=(E, E),
        rank=5,
        z=(1,),
    )
    order, groups = ordering_permutation(prof)
    assert [j + 1 for j in order] == [2, 3, 1]
    assert [(g.g, g.ell, g.columns) for g in groups] == [(1, 0, []), (1, 1, [0])]


def test_positive_definite_ordering_is_identity():
    prof = DependencyProfile(3, 1, (E, E), (E, E), (E, E), (E, E), (E, E), 6, ())
    assert ordering_permutation(prof) == ([0, 1, 2], [])


def test_point_mass_at_origin():
    S = MomentSequence.from_matrices([[[1]], [[0]], [[0]]])
    st_ = construct(S, 0, 1)
    assert all(v == 0 for v in st_.T_ext[3].flat)
    assert all(v == 0 for v in st_.T_ext[4].flat)
    assert st_.H_T.degree == 2
    assert la.is_zero(evaluate_on_columns(st_.T_ext, st_.H_T))


def test_multiplicity_outside_range_rejected():
    S = MomentSequence.from_matrices(SEC7)
    for m in (0, 4):
        with pytest.raises(InfeasibleMultiplicity):
            construct(S, 1, m)


def _planted(seed):
    rng = random.Random(seed)
    atoms, masses, S = planted_measure(rng, rng.randint(1, 3), rng.randint(1, 3))
    t = rng.choice(atoms) if rng.random() < 0.5 else Fraction(rng.randint(-7, 7), 2)
    return atoms, masses, S, t


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_constructions_are_flat_relations(seed):
    _, _, S, t = _planted(seed)
    res = feasibility(S, t)
    for m in range(res.lo, res.hi + 1):
        st_ = construct(S, t, m)
        n = S.n
        assert la.rank(moment_matrix(st_.T_ext)) == la.rank(moment_matrix(S))
        assert la.is_psd(moment_matrix(st_.S_ext))
        assert la.is_zero(evaluate_on_columns(st_.T_ext, st_.H_T))
        assert la.is_zero(evaluate_on_columns(st_.S_ext, st_.H_S))
        assert st_.H_T.degree == n + 1
        assert la.rank(st_.Q[n]) == S.p
        assert (st_.Zhat == st_.Zhat.T).all()
        assert all((a == b).all() for a, b in zip(st_.S_ext.moments, S.moments))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_extra_moments_follow_the_measure(seed):
    atoms, masses, S, t = _planted(seed)
    # at most n atoms with full-rank masses make M(n) flat, so the continuation is forced
    if len(atoms) > S.n or la.rank(moment_matrix(S)) != len(atoms) * S.p:
        return
    res = feasibility(S, t)
    st_ = construct(S, t, res.lo)
    count = 2 * S.n + 5
    more = extra_moments(st_, count)
    direct = moments_of_atoms([x - t for x in atoms], masses, count)
    assert len(more) == count
    assert all((a == b).all() for a, b in zip(more, direct))
    assert len(extra_moments(st_, 3)) == 3
