import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from effectus_lab import cpmap as cp
from effectus_lab import effectus as ef
from effectus_lab import vnalg
from effectus_lab.errors import NotPure, NotSharp, UniversalPropertyViolated
from effectus_lab.rng import Xoshiro256
from effectus_lab.vnalg import FdAlgebra

M2, A23 = FdAlgebra((2,)), FdAlgebra((2, 3))
algs = st.sampled_from([M2, A23, FdAlgebra((1, 2))])
seeds = st.integers(0, 2 ** 40)


def test_seqprod_on_commuting_diagonals():
    p = M2.element([np.diag([0.25, 1.0])])
    q = M2.element([np.diag([0.5, 0.3])])
    assert ef.seqprod(p, q).dist(M2.element([np.diag([0.125, 0.3])])) <= 1e-14


@given(algs, seeds)
def test_sqrt_effect_is_unique_root(alg, seed):
    p = vnalg.random_effect(alg, Xoshiro256(seed))
    q = ef.sqrt_effect(p)
    assert ef.seqprod(q, q).dist(p) <= 1e-9
    assert vnalg.is_effect(q)


@given(algs, seeds)
def test_asrt_value_at_one(alg, seed):
    p = vnalg.random_effect(alg, Xoshiro256(seed))
    assert cp.apply(ef.asrt(p), alg.one()).dist(p) <= 1e-9


@given(algs, seeds)
def test_comprehension_and_quotient(alg, seed):
    s = vnalg.random_projection(alg, Xoshiro256(seed))
    pi, zeta = ef.comprehension(s), ef.quotient(s)
    assert cp.max_deviation(cp.compose(zeta, pi), ef.asrt(s)) <= 1e-9
    assert cp.max_deviation(cp.compose(pi, zeta), cp.identity(pi.target)) <= 1e-9
    assert cp.is_nmiu(pi) or s.dist(alg.one()) > 0


def test_comprehension_needs_a_projection():
    with pytest.raises(NotSharp):
        ef.comprehension(M2.element([0.5 * np.eye(2)]))


@given(algs, seeds)
@settings(max_examples=25)
def test_corner_universal_property(alg, seed):
    rng = Xoshiro256(seed)
    p = vnalg.random_effect(alg, rng)
    pres = ef.standard_corner(p)
    assert max(pres.residuals().values()) <= 1e-9
    g = cp.random_cp_map(pres.corner_alg, M2, rng)
    f = cp.compose(g, pres.pi)
    fp = ef.corner_factor(f, pres)
    assert cp.max_deviation(fp, g) <= 1e-7


def test_corner_rejects_map_not_supported_on_p():
    p = M2.element([np.diag([1.0, 0.0])])
    with pytest.raises(UniversalPropertyViolated):
        ef.corner_factor(cp.identity(M2), p)


@given(algs, seeds)
@settings(max_examples=25)
def test_filter_universal_property(alg, seed):
    rng = Xoshiro256(seed)
    b = vnalg.random_effect(alg, rng)
    pres = ef.standard_filter(b)
    res = pres.residuals()
    assert res["c_one"] <= 1e-9 and res["kernel_dim"] == 0
    g = cp.random_cp_map(M2, pres.filter_alg, rng, normalize="subunital")
    f = cp.compose(pres.c, g)
    assert cp.max_deviation(ef.filter_factor(f, pres), g) <= 1e-7


def test_filter_rejects_map_above_b():
    b = M2.element([0.5 * np.eye(2)])
    with pytest.raises(UniversalPropertyViolated):
        ef.filter_factor(cp.identity(M2), b)


@given(seeds)
@settings(max_examples=20)
def test_pure_maps_factor(seed):
    rng = Xoshiro256(seed)
    f = ef.random_pure_map(2, 3, rng)
    assert ef.is_pure(f)
    fac = ef.pure_factor(f)
    assert fac.residual() <= 1e-8


def test_mixture_of_unitaries_is_not_pure():
    rng = Xoshiro256(2)
    u, w = vnalg.random_unitary(2, rng), vnalg.random_unitary(2, rng)
    mix = cp.ovee_sum(cp.scale(cp.ad(u), 0.5), cp.scale(cp.ad(w), 0.5))
    assert not ef.is_pure(mix)
    with pytest.raises(NotPure):
        ef.pure_factor(mix)


def test_dagger_of_ad_is_ad_of_adjoint():
    v = ef.random_contraction(2, 3, Xoshiro256(4))
    assert cp.max_deviation(ef.dagger_pure(cp.ad(v)), cp.ad(v.conj().T)) <= 1e-8


def test_pristine():
    p = vnalg.random_projection(A23, Xoshiro256(1))
    assert ef.pristine_check(ef.comprehension(p))
    assert not ef.pristine_check(ef.asrt(A23.element([0.5 * np.eye(2), 0.5 * np.eye(3)])))


def test_diamond_box_values():
    s = M2.element([np.diag([1.0, 0.0])])
    f = ef.asrt(s)
    assert ef.diamond(f, M2.one()).dist(s) <= 1e-12
    assert ef.box(f, M2.zero()).dist(M2.element([np.diag([0.0, 1.0])])) <= 1e-12


@given(algs, seeds)
def test_meet_matches_range_intersection(alg, seed):
    rng = Xoshiro256(seed)
    s, t = vnalg.random_projection(alg, rng), vnalg.random_projection(alg, rng)
    assert ef.meet(s, t).dist(ef.meet_oracle(s, t)) <= 1e-8
    assert ef.meet(s, s).dist(s) <= 1e-8


def test_sef_invariance():
    rho = cp.identity(M2)
    assert ef.inv_set_check(rho, M2.element([0.3 * np.eye(2)]))
    assert not ef.inv_set_check(rho, M2.element([np.diag([0.3, 0.8])]))


def test_dagger_law_suite_passes_and_detects_fault():
    assert ef.dagger_law_suite(M2, seed=3, trials=20)["status"] == "pass"

    def wrong(p, q):
        return (p @ q @ p).map_blocks(lambda m: (m + m.conj().T) / 2)

    bad = ef.dagger_law_suite(M2, seed=3, trials=20, seqprod_impl=wrong)
    assert bad["status"] == "fail"


def test_asrt_uniqueness():
    p = vnalg.random_effect(A23, Xoshiro256(6))
    assert ef.asrt_uniqueness_check(p, Xoshiro256(7), candidates=6)


def test_inv_commutant_small_sample():
    assert ef.inv_commutant_check(cp.identity(M2), samples=20, seed=4)["status"] == "pass"


def test_pure_laws_and_diamond_small():
    assert ef.dagger_pure_laws(seed=2, trials=3)["status"] == "pass"
    assert ef.diamond_suite(seed=2, samples=30)["status"] == "pass"
