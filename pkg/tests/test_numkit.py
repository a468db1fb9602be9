import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from orthoflow.errors import NonUnitInput, NotRankOne, Overflow
from orthoflow.numkit import (Tolerances, canonical_sign, containment_angle, matrix_exp, null_space,
                              rank_one_factor, rank_report, rotation_sending)

vectors = arrays(np.float64, 5, elements=st.floats(-10, 10)).filter(lambda v: np.linalg.norm(v) > 1e-3)


@settings(max_examples=60, deadline=None)
@given(vectors, vectors)
def test_rotation_sending_is_special_orthogonal(a, b):
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    R = rotation_sending(a, b)
    np.testing.assert_allclose(R @ a, b, atol=1e-12)
    np.testing.assert_allclose(R.T @ R, np.eye(5), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)


def test_rotation_sending_antipodal_and_bad_input():
    a = np.array([1.0, 0, 0])
    R = rotation_sending(a, -a)
    np.testing.assert_allclose(R @ a, -a, atol=1e-15)
    assert np.linalg.det(R) == pytest.approx(1.0)
    with pytest.raises(NonUnitInput):
        rotation_sending(2 * a, a)


def test_rank_one_factor():
    u = np.array([-3.0, 4.0, 0.0]) / 5
    scale, v = rank_one_factor(2.5 * np.outer(u, u))
    assert scale == pytest.approx(2.5)
    np.testing.assert_allclose(v, -u, atol=1e-14)  # sign convention: first significant entry positive
    with pytest.raises(NotRankOne):
        rank_one_factor(np.diag([1.0, 0.5, 0.0]))


def test_canonical_sign():
    np.testing.assert_array_equal(canonical_sign(np.array([0.0, -2.0, 1.0])), [0.0, 2.0, -1.0])


def test_rank_report_gap():
    M = np.diag([3.0, 1.0, 1e-12])
    rep = rank_report(M)
    assert rep.rank == 2 and rep.gap == pytest.approx(1e12)
    assert rank_report(np.zeros((2, 2))).rank == 0
    assert rank_report(M, Tolerances(rank=1e-13)).rank == 3


def test_matrix_exp_matches_rotation_and_guards():
    A = np.array([[0.0, -1.0], [1.0, 0.0]])
    t = 0.9
    np.testing.assert_allclose(matrix_exp(t * A), [[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]],
                               atol=1e-15)
    with pytest.raises(Overflow):
        matrix_exp(np.array([[800.0]]))


def test_null_space_and_containment():
    M = np.array([[1.0, 1.0, 0.0]])
    N = null_space(M, 1e-12)
    assert N.shape == (3, 2) and np.linalg.norm(M @ N) < 1e-14
    B = np.eye(3)[:, :2]
    assert containment_angle(np.array([[1.0], [2.0], [0.0]]), B) == pytest.approx(0.0, abs=1e-15)
    assert containment_angle(np.array([[0.0], [1.0], [1.0]]), B) == pytest.approx(math.pi / 4)
