import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orthoflow.numkit import matrix_exp
from orthoflow.errors import BadSignature, NotAStabilizer, NotSpecialOrthogonal
from orthoflow.sopq import (Signature, algebra_basis, algebra_coefficients, boost, certify,
                            embed_K, exp_algebra, form, gram, group_inverse, in_algebra_residual,
                            involution, is_in_group, random_algebra_coeffs, random_so,
                            stabilizer_algebra, stabilizer_identity_component_test)

SIGS = [(3, 3), (3, 4), (4, 3), (4, 5)]


@pytest.mark.parametrize("p,q,dim", [(3, 3, 15), (4, 3, 21), (4, 5, 36)])
def test_algebra_dimension(p, q, dim):
    sig = Signature(p, q)
    B = algebra_basis(sig)
    assert sig.dim == dim and B.shape == (dim, p + q, p + q)
    assert np.linalg.matrix_rank(B.reshape(dim, -1)) == dim
    assert max(in_algebra_residual(sig, X) for X in B) < 1e-14


def test_small_signatures_rejected():
    with pytest.raises(BadSignature):
        Signature(2, 3)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SIGS), st.integers(0, 2**32 - 1))
def test_exponentials_are_certified(pq, seed):
    sig = Signature(*pq)
    rng = np.random.default_rng(seed)
    c = random_algebra_coeffs(sig, rng)
    X = exp_algebra(sig, c)
    rep = is_in_group(X, sig)
    assert rep.accepted, rep
    np.testing.assert_allclose(group_inverse(sig, X) @ X, np.eye(sig.n), atol=1e-10)
    # coefficients round trip through the basis
    np.testing.assert_allclose(algebra_coefficients(sig, np.tensordot(c, algebra_basis(sig), 1)), c, atol=1e-12)


def test_component_test_rejects_other_components():
    sig = Signature(3, 3)
    flip = np.diag([-1.0, 1, 1, -1, 1, 1])  # det 1 but reverses the negative block
    rep = is_in_group(flip, sig)
    assert not rep.accepted and rep.failed_check == "component"
    assert is_in_group(involution(sig, 1), sig).accepted
    assert is_in_group(involution(sig, 2), sig).accepted
    with pytest.raises(ValueError):
        certify(flip, sig)


def test_boost_preserves_form_and_composes():
    sig = Signature(3, 4)
    x = np.arange(1.0, 8.0)
    m = boost(sig, 0.7)
    assert form(sig, m @ x) == pytest.approx(form(sig, x), rel=1e-13)
    np.testing.assert_allclose(boost(sig, 0.3) @ boost(sig, 0.4), m, atol=1e-14)


def test_embed_K_checks_inputs():
    rng = np.random.default_rng(0)
    k = embed_K(random_so(3, rng), random_so(4, rng))
    assert is_in_group(k, Signature(3, 4)).accepted
    with pytest.raises(NotSpecialOrthogonal):
        embed_K(np.diag([-1.0, 1, 1]), np.eye(3))


@pytest.mark.parametrize("vec,expected", [
    ("timelike", 10),   # so(2,3) inside so(3,3)
    ("spacelike", 10),  # so(3,2)
    ("null", 10),       # dim G - (p + q - 1)
])
def test_stabilizer_dimensions(vec, expected):
    sig = Signature(3, 3)
    v = {"timelike": sig.e(0), "spacelike": sig.eps(0), "null": sig.e(0) + sig.eps(0)}[vec]
    S = stabilizer_algebra(sig, v)
    assert S.dim == expected
    assert max(np.linalg.norm(X @ v) for X in S.matrices()) < 1e-12


def test_stabilizer_component_test():
    sig = Signature(3, 3)
    w = 0.4 * sig.e(0) + sig.eps(0)
    rng = np.random.default_rng(3)
    S = stabilizer_algebra(sig, w).matrices()
    for _ in range(5):
        u = matrix_exp(np.tensordot(rng.standard_normal(len(S)), S, 1))
        assert stabilizer_identity_component_test(sig, u, w)
    half_turn = np.diag([1.0, -1, -1, 1, 1, 1])   # rotation by pi in (e2, e3)
    mixed_flip = np.diag([1.0, -1, 1, 1, -1, 1])  # fixes w, other component
    assert stabilizer_identity_component_test(sig, half_turn, w)
    assert not stabilizer_identity_component_test(sig, mixed_flip, w)
    with pytest.raises(NotAStabilizer):
        stabilizer_identity_component_test(sig, boost(sig, 0.3), w)


def test_gram_is_the_form():
    sig = Signature(3, 3)
    assert np.allclose(np.diag(gram(sig)), [-1, -1, -1, 1, 1, 1])
