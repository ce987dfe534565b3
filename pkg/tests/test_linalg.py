import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qicrates.errors import DimensionError, ValidationError
from qicrates.linalg import (
    check_density,
    eig_hermitian,
    entropy,
    op_func,
    partial_trace,
    random_contraction,
    random_density,
    random_hermitian,
    tensor,
    trace_distance,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
seeds = st.integers(0, 2**32 - 1)


def test_tensor_examples():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(tensor(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    ket00 = np.array([1, 0, 0, 0])
    assert np.array_equal(tensor(SX, SX) @ ket00, np.array([0, 0, 0, 1]))


def test_partial_trace_examples():
    rng = np.random.default_rng(0)
    a, b = random_density(rng, 2), random_density(rng, 3)
    assert np.allclose(partial_trace(tensor(a, b), (2, 3), "A"), a, atol=1e-12)
    assert np.allclose(partial_trace(tensor(a, b), (2, 3), "B"), b, atol=1e-12)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(phi, phi), (2, 2), 0), np.eye(2) / 2)
    r = random_density(rng, 4)
    assert abs(np.trace(partial_trace(r, (2, 2), "A")) - 1) <= 1e-10


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4) / 4, (2, 3), "A")


def test_eig_examples():
    w, _ = eig_hermitian(np.eye(2) / 2)
    assert np.allclose(w, [0.5, 0.5])
    w, _ = eig_hermitian(SX)
    assert np.allclose(w, [1, -1])
    w, v = eig_hermitian(np.diag([0.75, 0.25]))
    assert np.allclose(w, [0.75, 0.25])
    assert np.allclose(np.abs(v), np.eye(2))


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_op_func_examples():
    assert np.allclose(op_func(np.eye(4), "sqrt"), np.eye(4))
    assert np.allclose(op_func(np.diag([4.0, 0.0]), "inv_sqrt_pseudo"), np.diag([0.5, 0.0]))
    assert np.allclose(op_func(np.diag([0.25, 0.09]), "sqrt"), np.diag([0.5, 0.3]))
    # log2 maps zero eigenvalues to zero
    assert np.allclose(op_func(np.diag([0.5, 0.0]), "log2"), np.diag([-1.0, 0.0]))


def test_op_func_negative_eigenvalue():
    with pytest.raises(ValidationError):
        op_func(np.diag([1.0, -1e-6]), "sqrt")
    # float noise above -1e-8 is clipped
    assert np.allclose(op_func(np.diag([1.0, -1e-11]), "sqrt"), np.diag([1.0, 0.0]))


def test_trace_distance_examples():
    rng = np.random.default_rng(1)
    r = random_density(rng, 3)
    assert trace_distance(r, r) == pytest.approx(0, abs=1e-12)
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(2)
    assert trace_distance(np.diag([0.6, 0.4]), np.diag([0.5, 0.5])) == pytest.approx(0.2)
    with pytest.raises(DimensionError):
        trace_distance(np.eye(2) / 2, np.eye(3) / 3)


def test_check_density():
    check_density(np.eye(2) / 2)
    with pytest.raises(ValidationError, match="trace"):
        check_density(np.diag([0.5, 0.4]))
    with pytest.raises(ValidationError, match="Hermitian"):
        check_density(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(ValidationError, match="negative"):
        check_density(np.diag([1.1, -0.1]))


def test_entropy():
    assert entropy(np.eye(4) / 4) == pytest.approx(2)
    assert entropy(np.diag([1.0, 0.0])) == pytest.approx(0)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6))
def test_spectral_reconstruction(seed, d):
    h = random_hermitian(np.random.default_rng(seed), d)
    w, v = eig_hermitian(h)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.max(np.abs((v * w) @ v.conj().T - h)) <= 1e-9
    assert np.max(np.abs(v.conj().T @ v - np.eye(d))) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_partial_trace_of_product(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, da), random_density(rng, db)
    assert np.max(np.abs(partial_trace(tensor(a, b), (da, db), "A") - a)) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_tensor_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_hermitian(rng, 2) for _ in range(3))
    assert np.max(np.abs(tensor(tensor(a, b), c) - tensor(a, tensor(b, c)))) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 5))
def test_triangle_inequality(seed, d):
    rng = np.random.default_rng(seed)
    a, b, c = (random_density(rng, d) for _ in range(3))
    assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-9


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 5))
def test_tr_trick(seed, d):
    rng = np.random.default_rng(seed)
    rho, sigma, lam = (random_contraction(rng, d) for _ in range(3))
    lhs = np.trace(lam @ rho).real
    assert lhs <= np.trace(lam @ sigma).real + trace_distance(rho, sigma) + 1e-9
