from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from effectus_lab import structs as S
from effectus_lab.errors import NotDefined, NotNormalized, NotSummable
from effectus_lab.rng import Xoshiro256
from effectus_lab.vnalg import FdAlgebra

Q = S.RationalInterval()
unit = st.fractions(min_value=0, max_value=1, max_denominator=50)


def _failed(rep):
    return {l["law"] for l in rep["laws"] if l["status"] == "fail"}


# effect algebras, monoids, divisoids

@given(unit, unit)
def test_rational_sum_and_complement(a, b):
    assert Q.ovee(a, b) == Q.ovee(b, a)
    assert Q.ovee(a, Q.perp(a)) == 1
    assert (Q.ovee(a, b) is None) == (a + b > 1)
    assert Q.leq(a, b) == (Q.minus(b, a) is not None)


@given(unit, unit)
def test_rational_division(a, b):
    if a <= b:
        c = Q.divide(a, b)
        assert 0 <= c <= 1
        if b:
            assert Q.odot(b, c) == a
    else:
        with pytest.raises(NotDefined):
            Q.divide(a, b)


def test_rational_zero_by_zero():
    assert Q.divide(Fraction(0), Fraction(0)) == 0


@pytest.mark.parametrize("k", range(5))
def test_boolean_algebras_exhaustive(k):
    B = S.boolean_algebra(k)
    assert len(B) == 1 << k
    for rep in (S.ea_harness(B, mode="exhaustive"), S.monoid_harness(B, mode="exhaustive"),
                S.divisoid_check(B, mode="exhaustive"), S.modularity_check(B)):
        assert rep["status"] == "pass", _failed(rep)
    assert S.ea_harness(B)["mode"] == "exhaustive"


def test_rational_harnesses():
    for rep in (S.ea_harness(Q, seed=1), S.monoid_harness(Q, seed=1), S.divisoid_check(Q, seed=1)):
        assert rep["status"] == "pass" and rep["mode"] == "random"


def test_exhaustive_mode_refused_on_infinite_algebra():
    with pytest.raises(ValueError):
        S.ea_harness(Q, mode="exhaustive")


def _broken_b4():
    t = S.boolean_algebra(2).to_table()
    # redirect 01 + 10 to 01: breaks the orthocomplement law
    t["ovee"] = [[i, j, (1 if {i, j} == {1, 2} else k)] for i, j, k in t["ovee"]]
    return S.FiniteEffectAlgebra.from_table(t)


def test_fault_injection_is_caught():
    rep = S.ea_harness(_broken_b4(), mode="exhaustive")
    assert rep["status"] == "fail"
    bad = [l for l in rep["laws"] if l["status"] == "fail"]
    assert all(l["witness"] is not None for l in bad)


def test_table_roundtrip_and_errors():
    B = S.boolean_algebra(2)
    B2 = S.FiniteEffectAlgebra.from_table(B.to_table())
    assert B2.to_table() == B.to_table()
    assert B.ovee(1, 1) is None
    with pytest.raises(NotSummable):
        B.combine(3, 1)
    with pytest.raises(NotDefined):
        B.divide(3, 1)
    assert B.divide(1, 3) == 1


def test_emonoid_lemma():
    assert S.emonoid_lemma_check(S.two(), max_len=3)["status"] == "pass"
    rep = S.emonoid_lemma_check(Q, seed=3, trials=200)
    assert rep["status"] == "pass" and rep["premise_hits"] > 0


# ortholattices

def test_benzene_is_not_orthomodular():
    rep = S.oml_check(S.benzene())
    assert _failed(rep) == {"orthomodular"}
    wit = [l["witness"] for l in rep["laws"] if l["law"] == "orthomodular"][0]
    assert wit == ["a", "b"]
    assert rep["bridge"]["induced_effect_algebra"] is False


@pytest.mark.parametrize("L", [S.mo2(), S.mo(3), S.boolean_ortholattice(3)], ids=str)
def test_orthomodular_lattices(L):
    rep = S.oml_check(L)
    assert rep["status"] == "pass", _failed(rep)


def test_projection_lattice_of_two_lines_is_mo2():
    p = np.array([[1.0, 0], [0, 0]])
    v = np.array([1.0, 1.0]) / np.sqrt(2)
    L = S.projection_ortholattice([p, np.outer(v, v)])
    assert len(L) == 6
    assert S.oml_check(L)["status"] == "pass"


def test_boolean_order_is_orthomodular():
    assert S.ea_ortholattice_bridge(S.boolean_algebra(3))["status"] == "pass"


# the distribution monad

def test_multiplication_flattens():
    half = Fraction(1, 2)
    inner = S.FormalDist(Q, [("x", half), ("y", half)])
    outer = S.FormalDist(Q, [(inner, Fraction(1))])
    assert S.dm_mu(outer) == inner
    mixed = S.FormalDist(Q, [(inner, half), (S.dm_eta(Q, "x"), half)])
    assert S.dm_mu(mixed) == S.FormalDist(Q, [("x", Fraction(3, 4)), ("y", Fraction(1, 4))])


def test_coefficients_must_sum_to_one():
    with pytest.raises(NotNormalized):
        S.FormalDist(Q, [("x", Fraction(1, 2))])
    with pytest.raises(NotNormalized):
        S.FormalDist(Q, [("x", Fraction(2, 3)), ("x", Fraction(2, 3))])


def test_repeated_points_merge():
    d = S.FormalDist(Q, [("x", Fraction(1, 4)), ("x", Fraction(1, 4)), ("y", Fraction(1, 2))])
    assert d("x") == Fraction(1, 2)


def test_join_scalars_give_subsets():
    M = S.JoinScalars(1)
    assert len(S.enumerate_dists(M, range(3))) == 7


@pytest.mark.parametrize("M", [Q, S.JoinScalars(1), S.JoinScalars(2)], ids=lambda m: m.name)
def test_monad_laws(M):
    assert S.monad_law_check(M, trials=100, seed=5)["status"] == "pass"


# convex sets, congruences, coproducts

def chain3():
    return S.semilattice_bridge([[0, 1, 2], [1, 1, 2], [2, 2, 2]], ["0", "a", "1"])


def test_semilattice_is_convex_set():
    assert chain3().check()["status"] == "pass"


def test_least_congruence_examples():
    X = chain3()
    assert S.least_congruence(X, [(1, 2)]) == [[0], [1, 2]]
    assert S.least_congruence(X, [(0, 2)]) == [[0, 1, 2]]
    assert S.least_congruence(X, []) == [[0], [1], [2]]


def test_quotient_is_well_defined():
    Qx, q, rep = S.quotient(chain3(), [[0], [1, 2]])
    assert rep["status"] == "pass"
    assert len(Qx) == 2 and q[1] == q[2] != q[0]


def test_one_plus_one_is_three_element_semilattice():
    one = S.semilattice_bridge([[0]])
    cop = S.aconv_coproduct(one, one)
    assert len(cop.C) == 3
    join = S.convex_to_semilattice(cop.C)
    a, b = cop.c1[0], cop.c2[0]
    assert S.is_semilattice(join) and join[a][b] not in (a, b)
    rep = S.universal_property_check(cop, one, one, S.all_convex_sets_over_two(3))
    assert rep["status"] == "pass"


def test_coproduct_with_empty_set():
    X = chain3()
    cop = S.aconv_coproduct(X, S.empty_convex_set(X.monoid))
    assert S.is_isomorphism(list(cop.c1), X, cop.C)


def test_two_chains_match_product_formula():
    chain = [[0, 1], [1, 1]]
    X = S.semilattice_bridge(chain)
    cop = S.aconv_coproduct(X, X)
    rep = S.coproduct_matches_oracle(cop, chain, chain)
    assert rep["coproduct_size"] == rep["oracle_size"] == 8
    assert rep["status"] == "pass"


def test_affine_maps_between_chains():
    X = S.semilattice_bridge([[0, 1], [1, 1]])
    maps = S.affine_maps(X, X)
    # monotone join-preserving self-maps of a 2-chain: id, both constants
    assert sorted(maps) == [(0, 0), (0, 1), (1, 1)]


def test_count_of_small_semilattices():
    assert [len(S.semilattices(n)) for n in range(1, 4)] == [1, 2, 9]


def test_semilattice_roundtrips():
    assert S.semilattice_roundtrip_check(3)["status"] == "pass"


@pytest.mark.slow
def test_semilattice_roundtrips_size_four():
    assert S.semilattice_roundtrip_check(4)["status"] == "pass"


# predicates as an effect module

@pytest.mark.parametrize("alg", [FdAlgebra((2,)), FdAlgebra((2, 1))], ids=str)
def test_predicates_form_a_module(alg):
    rep = S.predicates_as_module(alg, seed=2, trials=50)
    assert rep["status"] == "pass", _failed(rep)
