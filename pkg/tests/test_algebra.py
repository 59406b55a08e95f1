import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from staticverify.algebra import (
    KATO_CONSTANT,
    ConstrainedJet,
    DegenerateError,
    conjugate_jet,
    cotton_norm_direct,
    cotton_norm_eigenform,
    cotton_of_jet,
    cubic_trace_gap,
    det_cubic_inequality,
    jet_basis,
    jet_projector,
    kato_check,
    kato_sup_search,
    kato_sweep,
    kato_terms,
    random_rotation,
    random_traceless,
    sample_constrained_jet,
    sample_constrained_jets,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
# entries that keep sixth powers of 2^k-scaled matrices out of the subnormal range
no_underflow = finite.filter(lambda x: x == 0 or abs(x) >= 1e-30)


def _traceless(v):
    A = np.array([[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], -v[0] - v[3]]])
    return A


def test_det_inequality_equality_cases():
    assert det_cubic_inequality(np.diag([-2.0, 1.0, 1.0])) == (216.0, 216.0, True)
    lhs, rhs, flag = det_cubic_inequality(np.diag([2.0, -1.0, -1.0]))
    assert lhs == pytest.approx(rhs) and flag
    assert det_cubic_inequality(np.zeros((3, 3))) == (0.0, 0.0, True)
    lhs, rhs, flag = det_cubic_inequality(np.diag([1.0, -1.0, 0.0]))
    assert (lhs, rhs, flag) == (0.0, 8.0, False)


def test_det_inequality_rejects_trace():
    with pytest.raises(ValueError, match="traceless"):
        det_cubic_inequality(np.eye(3))


def test_det_inequality_on_random_samples():
    A = random_traceless(100000, seed=0)
    lhs, rhs, _ = det_cubic_inequality(A)
    assert np.all(lhs <= rhs * (1 + 1e-12))


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, 5, elements=no_underflow), st.integers(-20, 20), st.floats(0.01, 100.0))
def test_det_inequality_scale_covariance(v, k, t):
    A = _traceless(v)
    lhs, rhs, flag = det_cubic_inequality(A)
    assert lhs <= rhs * (1 + 1e-12)
    # power-of-two scaling is exact in floating point
    s = 2.0**k
    lhs2, rhs2, flag2 = det_cubic_inequality(s * A)
    assert lhs2 == s**6 * lhs and rhs2 == s**6 * rhs and flag2 == flag
    lhs3, rhs3, flag3 = det_cubic_inequality(t * A)
    assert abs(lhs3 - t**6 * lhs) <= 1e-12 * rhs3
    assert rhs3 == pytest.approx(t**6 * rhs, rel=1e-12)
    assert flag3 == flag


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, 5, elements=finite))
def test_cubic_trace_identity(v):
    A = _traceless(v)
    scale = max(1.0, float(np.sum(A * A)) ** 1.5)
    assert abs(cubic_trace_gap(A)) <= 1e-12 * scale


def test_jet_projector_is_rank_twelve_projection():
    P = jet_projector()
    assert np.allclose(P @ P, P, atol=1e-13)
    assert np.allclose(P, P.T)
    assert round(np.trace(P)) == 12
    assert jet_basis().shape == (12, 27)


def test_sampled_jets_satisfy_constraints():
    T, DT = sample_constrained_jets(500, seed=1)
    trace, div = ConstrainedJet(T, DT).constraint_residuals()
    assert np.abs(trace).max() < 1e-12 and np.abs(div).max() < 1e-12
    assert np.abs(DT - np.swapaxes(DT, -2, -3)).max() < 1e-12
    assert np.allclose(T, np.swapaxes(T, -1, -2))


def test_kato_zero_violations_on_1e5_jets():
    r = kato_sweep(100000, seed=0)
    assert r["violations"] == 0
    assert r["ratio_quantiles"]["max"] <= KATO_CONSTANT


def test_kato_sup_search_reaches_three_fifths():
    r = kato_sup_search(starts=12, seed=0)
    assert r["sup_ratio"] <= KATO_CONSTANT * (1 + 1e-9)
    assert r["sup_ratio"] > 0.59


def test_kato_degenerate_input():
    with pytest.raises(DegenerateError):
        kato_terms(np.zeros((3, 3)), np.zeros((3, 3, 3)))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kato_frame_invariance(seed):
    jet = sample_constrained_jet(seed)
    Q = random_rotation(np.random.default_rng(seed))
    T2, DT2 = conjugate_jet(jet.T, jet.DT, Q)
    a = kato_check(jet)
    b = kato_check(ConstrainedJet(T2, DT2))
    for x, y in zip(a, b):
        assert abs(x - y) <= 1e-10 * max(1.0, abs(x))
    assert a[0] <= a[1] * (1 + 1e-12)


def test_cotton_of_jet_antisymmetric():
    _, DT = sample_constrained_jets(10, seed=2)
    C = cotton_of_jet(DT)
    assert np.allclose(C, -np.swapaxes(C, -1, -2))


@settings(max_examples=200, deadline=None)
@given(finite, finite, arrays(np.float64, 3, elements=finite))
def test_cotton_eigenform_matches_direct_norm(l1, l2, a):
    # with two equal eigenvalues the formula agrees with the direct norm for any gradient direction
    lhs = cotton_norm_eigenform(l1, l1, a)
    rhs = cotton_norm_direct(l1, l1, a)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))
    # with three distinct eigenvalues it agrees when grad V lies along an eigenvector
    e = np.zeros(3)
    e[0] = a[0]
    assert abs(cotton_norm_eigenform(l1, l2, e) - cotton_norm_direct(l1, l2, e)) <= 1e-8 * max(1.0, abs(l1 * l2 * a[0] ** 2))
