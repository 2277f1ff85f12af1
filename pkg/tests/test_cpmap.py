import numpy as np
import pytest
from hypothesis import given, strategies as st

from effectus_lab import cpmap as cp
from effectus_lab import vnalg
from effectus_lab.cpmap import CpMap
from effectus_lab.errors import NotPSD, NotSummable, ShapeMismatch
from effectus_lab.rng import Xoshiro256
from effectus_lab.vnalg import FdAlgebra

ALGS = [FdAlgebra((2,)), FdAlgebra((3,)), FdAlgebra((2, 1)), FdAlgebra((1, 1))]
algs = st.sampled_from(ALGS)
seeds = st.integers(0, 2 ** 40)


@given(algs, algs, seeds)
def test_choi_kraus_roundtrip(src, tgt, seed):
    phi = cp.random_cp_map(src, tgt, Xoshiro256(seed), k=2)
    table = {(i, j): cp.choi(phi, i, j) for i in range(len(src.blocks)) for j in range(len(tgt.blocks))}
    back = cp.from_choi(src, tgt, table)
    assert cp.max_deviation(phi, back) <= 1e-9
    assert cp.min_choi_eig(phi) >= -1e-9


@given(algs, algs, seeds)
def test_superop_roundtrip_and_function(src, tgt, seed):
    phi = cp.random_cp_map(src, tgt, Xoshiro256(seed))
    assert cp.max_deviation(cp.from_superop(cp.superop(phi), src, tgt), phi) <= 1e-9
    assert cp.max_deviation(cp.from_function(src, tgt, phi), phi) <= 1e-9


def test_transpose_is_not_completely_positive():
    M2 = FdAlgebra((2,))
    with pytest.raises(NotPSD):
        cp.from_function(M2, M2, lambda a: M2.element([a.mats[0].T]))


@given(algs, algs, algs, seeds)
def test_compose_is_heisenberg_composite(a, b, c, seed):
    rng = Xoshiro256(seed)
    g = cp.random_cp_map(a, b, rng)
    f = cp.random_cp_map(b, c, rng)
    x = vnalg.random_element(a, rng)
    assert cp.apply(cp.compose(f, g), x).dist(cp.apply(f, cp.apply(g, x))) <= 1e-9


def test_compose_shape_check():
    M2, M3 = FdAlgebra((2,)), FdAlgebra((3,))
    with pytest.raises(ShapeMismatch):
        cp.compose(cp.identity(M2), cp.identity(M3))


@given(algs, algs, seeds)
def test_tensor_on_product_elements(a, b, seed):
    rng = Xoshiro256(seed)
    f = cp.random_cp_map(a, a, rng)
    g = cp.random_cp_map(b, b, rng)
    x, y = vnalg.random_element(a, rng), vnalg.random_element(b, rng)
    lhs = cp.apply(cp.tensor(f, g), x.tensor(y))
    rhs = cp.apply(f, x).tensor(cp.apply(g, y))
    assert lhs.dist(rhs) <= 1e-9


@given(algs, algs, seeds)
def test_normalizations(src, tgt, seed):
    rng = Xoshiro256(seed)
    assert cp.is_unital(cp.random_cp_map(src, tgt, rng, normalize="unital"), 1e-9)
    assert cp.is_subunital(cp.random_cp_map(src, tgt, rng, normalize="subunital"), 1e-9)


def test_identity_and_block_maps_are_nmiu():
    A = FdAlgebra((2, 3))
    assert cp.is_nmiu(cp.identity(A))
    assert cp.is_nmiu(cp.block_projection(A, [1]))
    assert not cp.is_nmiu(cp.scale(cp.identity(A), 0.5))


def test_ovee_and_pairing():
    rng = Xoshiro256(4)
    A, B = FdAlgebra((2,)), FdAlgebra((2, 1))
    f = cp.scale(cp.random_cp_map(A, B, rng, normalize="unital"), 0.4)
    g = cp.scale(cp.random_cp_map(A, B, rng, normalize="unital"), 0.6)
    s = cp.ovee_sum(f, g)
    assert cp.is_unital(s, 1e-9)
    pr = cp.pairing(f, g)
    assert cp.max_deviation(cp.compose(pr, cp.coprojection(A, A, 1)), g) <= 1e-12
    with pytest.raises(NotSummable):
        cp.ovee_sum(s, f)


def test_leq_ncp():
    rng = Xoshiro256(8)
    M2 = FdAlgebra((2,))
    phi = cp.random_cp_map(M2, M2, rng)
    assert cp.leq_ncp(cp.scale(phi, 0.3), phi)
    assert not cp.leq_ncp(cp.scale(phi, 1.5), phi)


def test_json_roundtrip():
    phi = cp.random_cp_map(FdAlgebra((2, 1)), FdAlgebra((3,)), Xoshiro256(2))
    assert cp.max_deviation(CpMap.from_json(phi.to_json()), phi) == 0.0


def test_kraus_shape_is_validated():
    with pytest.raises(ShapeMismatch):
        CpMap(FdAlgebra((2,)), FdAlgebra((3,)), {(0, 0): (np.eye(2),)})


def test_axiom_harness_passes():
    rep = cp.effectus_axiom_harness(seed=1, trials=30)
    assert rep["status"] == "pass"


def test_axiom_harness_catches_faulty_sum():
    def bad_sum(f, g):
        return cp.scale(cp.ovee_sum(f, g), 0.9)

    rep = cp.effectus_axiom_harness(seed=1, trials=10, ovee=bad_sum)
    failed = {l["law"] for l in rep["laws"] if l["status"] == "fail"}
    assert rep["status"] == "fail"
    assert "zero_one" in failed and "ovee_bilinear" in failed
