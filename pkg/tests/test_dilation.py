import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from effectus_lab import cpmap as cp
from effectus_lab import dilation as dl
from effectus_lab import linalg as la
from effectus_lab import vnalg
from effectus_lab.errors import NotADilationTriple, NotPositive, TargetNotFactor
from effectus_lab.rng import Xoshiro256
from effectus_lab.vnalg import FdAlgebra

M2, M3, C = FdAlgebra((2,)), FdAlgebra((3,)), FdAlgebra((1,))
seeds = st.integers(0, 2 ** 40)


def test_gns_of_tracial_state_is_m4_sized():
    dim, rho, x = dl.gns(dl.functional(M2, [np.eye(2) / 2]))
    assert dim == 4
    for u in M2.matrix_units():
        a = M2.unit(*u)
        val = np.vdot(x, cp.apply(rho, a).mats[0] @ x)
        assert abs(val - np.trace(a.mats[0]) / 2) <= 1e-12


def test_gns_of_pure_state_is_two_dimensional():
    dim, _, x = dl.gns(dl.functional(M2, [np.diag([1.0, 0.0])]))
    assert dim == 2
    assert abs(np.linalg.norm(x) - 1) <= 1e-12


def test_gns_of_zero_functional_is_empty():
    dim, _, _ = dl.gns(cp.zero_map(M2, C))
    assert dim == 0


def test_functional_rejects_negative_density():
    with pytest.raises(NotPositive):
        dl.functional(M2, [np.diag([1.0, -0.5])])


def test_depolarizing_tensor_form_has_four_terms():
    def depol(a):
        return M2.element([np.trace(a.mats[0]) / 2 * np.eye(2)])

    phi = cp.from_function(M2, M2, depol)
    r, w = dl.stinespring_tensor_form(phi)
    assert r == 4
    for u in M2.matrix_units():
        a = M2.unit(*u).mats[0]
        assert np.max(np.abs(la.dag(w) @ np.kron(a, np.eye(r)) @ w - depol(M2.unit(*u)).mats[0])) <= 1e-12


def test_stinespring_requires_factor_target():
    with pytest.raises(TargetNotFactor):
        dl.stinespring_minimal(cp.identity(FdAlgebra((1, 1))))


@given(st.sampled_from([M2, M3, FdAlgebra((2, 1))]), seeds)
def test_stinespring_is_minimal_and_reconstructs(src, seed):
    phi = cp.random_cp_map(src, M2, Xoshiro256(seed), k=2, normalize="unital")
    s = dl.stinespring_minimal(phi)
    assert s.K_dim == la.rank_psd(dl.stinespring_gram(phi)) == s.minimality_rank()
    assert dl.as_triple(s).residual(phi) <= 1e-9
    assert np.max(np.abs(la.dag(s.V) @ s.V - np.eye(2))) <= 1e-9


def test_paschke_of_identity_is_itself():
    d = dl.paschke(cp.identity(M2))
    assert d.P == M2
    assert d.triple().residual(cp.identity(M2)) <= 1e-12


def test_paschke_of_faithful_state_is_m4():
    omega = dl.functional(M2, [np.diag([0.7, 0.3])])
    d = dl.paschke(omega)
    assert d.P == FdAlgebra((4,))


@given(seeds)
def test_nmiu_map_dilates_through_its_target(seed):
    # an nmiu map phi has the trivial dilation (B, phi, id)
    u = vnalg.random_unitary(2, Xoshiro256(seed))
    phi = cp.ad(u, M2, M2)
    d = dl.paschke(phi)
    triple = dl.DilationTriple(M2, phi, cp.identity(M2))
    assert dl.dilation_iso(triple, d).max_residual <= 1e-8


@given(st.sampled_from([M2, FdAlgebra((2, 1)), FdAlgebra((1, 1))]),
       st.sampled_from([M2, M3, FdAlgebra((2, 1))]), seeds)
@settings(max_examples=20)
def test_paschke_triple_and_module(src, tgt, seed):
    phi = cp.random_cp_map(src, tgt, Xoshiro256(seed), k=2, normalize="subunital")
    d = dl.paschke(phi)
    assert dl.check_triple(phi, d.triple()) <= 1e-8
    checks = dl.paschke_module_checks(d)
    assert checks["parseval"] <= 1e-9 and checks["basis_norm"] <= 1e-9
    for u in d.P.matrix_units():
        t = d.P.unit(*u)
        assert d.h_from_module(t).dist(cp.apply(d.h, t)) <= 1e-9


def test_mediating_map_to_itself_is_identity():
    phi = cp.random_cp_map(M2, M2, Xoshiro256(3), k=2, normalize="unital")
    d = dl.paschke(phi)
    sigma = dl.mediating_map(d, d)
    assert cp.max_deviation(sigma, cp.identity(d.P)) <= 1e-9
    assert max(dl.mediating_residuals(d, d, sigma).values()) <= 1e-9


def test_check_triple_rejects_wrong_factorization():
    phi = cp.random_cp_map(M2, M2, Xoshiro256(5), k=2, normalize="unital")
    d = dl.paschke(phi)
    with pytest.raises(NotADilationTriple):
        dl.check_triple(phi, dl.DilationTriple(d.P, d.rho, cp.scale(d.h, 0.5)))


def test_injectivity_when_a_summand_is_killed():
    A = FdAlgebra((2, 1))
    phi = cp.compose(cp.identity(M2), cp.block_projection(A, [0]))
    d = dl.paschke(phi)
    ceil_rho, cc, equal = dl.injectivity_check(d)
    assert equal
    assert np.allclose(cc.mats[1], 0)


def test_order_correspondence_on_random_map():
    phi = cp.random_cp_map(M2, M2, Xoshiro256(11), k=2, normalize="unital")
    rep = dl.order_correspondence(dl.paschke(phi), samples=10, seed=1)
    assert rep["status"] == "pass"


def test_ncp_extreme():
    assert dl.ncp_extreme_check(cp.identity(M2))
    def depol(a):
        return M2.element([np.trace(a.mats[0]) / 2 * np.eye(2)])
    mixed = cp.from_function(M2, M2, lambda a: M2.element([0.5 * a.mats[0]]) + 0.5 * depol(a))
    assert not dl.ncp_extreme_check(mixed)


def test_basics_scaling_and_pairing():
    rng = Xoshiro256(7)
    phi = cp.random_cp_map(M2, M2, rng, normalize="unital")
    psi = cp.random_cp_map(M2, C, rng, normalize="unital")
    res = dl.paschke_basics(phi, lam=0.3, other=psi)
    assert res["scaled"] <= 1e-7 and res["paired"] <= 1e-7


def test_tensor_of_dilations():
    rng = Xoshiro256(9)
    f = cp.random_cp_map(M2, M2, rng, k=1, normalize="unital")
    g = dl.functional(M2, [np.diag([0.6, 0.4])])
    _, direct, iso = dl.dilation_tensor(dl.paschke(f), dl.paschke(g))
    assert iso.max_residual <= 1e-7
    assert direct.P.dim == dl.paschke(f).P.tensor(dl.paschke(g).P).dim
