import numpy as np
import pytest
from hypothesis import given, strategies as st

from effectus_lab import linalg as la
from effectus_lab.errors import NotEffect, NotHermitian, NotPSD, ShapeMismatch
from effectus_lab.rng import Xoshiro256

from conftest import random_hermitian, random_psd

seeds = st.integers(min_value=0, max_value=2 ** 48)
sizes = st.integers(min_value=1, max_value=7)


@given(seeds, sizes)
def test_eig_reconstructs_and_sorts(seed, n):
    h = random_hermitian(n, Xoshiro256(seed))
    vals, vecs = la.herm_eig(h)
    assert np.all(np.diff(vals) >= 0)
    assert np.max(np.abs(vecs @ np.diag(vals) @ vecs.conj().T - h)) <= 1e-9
    assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(n))) <= 1e-9


@given(seeds, sizes)
def test_jacobi_agrees_with_lapack(seed, n):
    h = random_hermitian(n, Xoshiro256(seed))
    a = la.herm_eig(h, method="jacobi").values
    b = la.herm_eig(h, method="lapack").values
    assert np.max(np.abs(a - b)) <= 1e-10


def test_eig_is_bit_deterministic(rng):
    h = random_hermitian(6, rng)
    a, b = la.herm_eig(h), la.herm_eig(h.copy())
    assert a.values.tobytes() == b.values.tobytes()
    assert a.basis.tobytes() == b.basis.tobytes()


def test_known_spectrum():
    vals, _ = la.herm_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(vals, [1.0, 3.0], atol=1e-14)
    vals, _ = la.herm_eig(np.array([[0, -1j], [1j, 0]]))
    assert np.allclose(vals, [-1.0, 1.0], atol=1e-14)


def test_large_input_goes_to_lapack(rng):
    h = random_hermitian(la.JACOBI_MAX_DIM + 2, rng)
    vals, vecs = la.herm_eig(h)
    assert np.max(np.abs(vecs @ np.diag(vals) @ vecs.conj().T - h)) <= 1e-9


def test_rejects_non_hermitian_and_bad_shapes():
    with pytest.raises(NotHermitian):
        la.herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ShapeMismatch):
        la.herm_eig(np.zeros((2, 3)))
    with pytest.raises(NotPSD):
        la.sqrt_psd(np.diag([1.0, -0.5]))
    with pytest.raises(NotEffect):
        la.floor_proj(np.diag([1.5, 0.0]))


@given(seeds, sizes)
def test_sqrt_squares_back(seed, n):
    a = random_psd(n, Xoshiro256(seed))
    r = la.sqrt_psd(a)
    assert np.max(np.abs(r @ r - a)) <= 1e-9 * max(1.0, np.max(np.abs(a)))
    assert la.min_eig(r) >= -1e-12


def test_sqrt_clamps_rounding_dust():
    r = la.sqrt_psd(np.diag([1.0, 1e-17]))
    assert r[1, 1] == 0.0
    assert la.sqrt_psd(np.diag([4.0, -1e-12]))[0, 0] == pytest.approx(2.0)


@given(seeds, st.integers(min_value=2, max_value=6))
def test_support_projection_of_low_rank(seed, n):
    rng = Xoshiro256(seed)
    k = 1 + rng.integer(n - 1)
    a = random_psd(n, rng, rank=k)
    p = la.support_proj(a)
    assert la.is_projection_matrix(p, 1e-9)
    assert round(np.trace(p).real) == k
    assert np.max(np.abs(p @ a - a)) <= 1e-8 * np.max(np.abs(a))
    assert la.rank_psd(a) == k


def test_floor_and_ceil_of_diagonal_effect():
    e = np.diag([1.0, 0.5, 0.0])
    assert np.allclose(la.floor_proj(e), np.diag([1.0, 0.0, 0.0]))
    assert np.allclose(la.ceil(e), np.diag([1.0, 1.0, 0.0]))
    # an eigenvalue just below 1 is not sharp
    assert np.allclose(la.floor_proj(np.diag([1 - 1e-6, 1.0])), np.diag([0.0, 1.0]))


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_pinv_penrose_identities(seed, r, c):
    a = Xoshiro256(seed).ginibre(r, c)
    x = la.pinv(a)
    assert np.allclose(a @ x @ a, a, atol=1e-9)
    assert np.allclose(x @ a @ x, x, atol=1e-9)
    assert np.allclose((a @ x).conj().T, a @ x, atol=1e-9)


def test_pinv_sqrt_and_op_norm(rng):
    a = random_psd(4, rng, rank=2)
    s = la.pinv_sqrt_psd(a)
    p = la.support_proj(a)
    assert np.allclose(s @ a @ s, p, atol=1e-8)
    v = np.diag([3.0, 1.0]) @ la.range_isometry(np.eye(2))
    assert la.op_norm(v) == pytest.approx(3.0)


def test_range_isometry_is_phase_fixed(rng):
    a = random_psd(4, rng, rank=2)
    u = la.range_isometry(a)
    assert u.shape == (4, 2)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-10)
    for k in range(2):
        first = u[np.nonzero(np.abs(u[:, k]) > 1e-10)[0][0], k]
        assert abs(first.imag) <= 1e-12 and first.real > 0


def test_nullspace_of_gram(rng):
    v = rng.ginibre(5, 2)
    null = la.nullspace_hermitian(v @ v.conj().T)
    assert null.shape == (5, 3)
    assert np.max(np.abs(v.conj().T @ null)) <= 1e-9


def test_json_roundtrip(rng):
    m = rng.ginibre(3, 2)
    assert np.array_equal(la.from_json(la.to_json(m)), m)


def test_loewner_and_projection_predicates():
    assert la.loewner_leq(np.diag([0.2, 0.3]), np.eye(2))
    assert not la.loewner_leq(np.eye(2), np.diag([0.2, 0.3]))
    assert la.is_projection_matrix(np.diag([1.0, 0.0]))
    assert not la.is_projection_matrix(np.diag([0.5, 0.0]))
