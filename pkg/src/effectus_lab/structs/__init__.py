"""Exact algebraic layer: effect algebras, monoids, divisoids, ortholattices,
the distribution monad and finite abstract convex sets."""
from .algebra import (FiniteEffectAlgebra, FiniteOrtholattice, JoinScalars, LawLog,
                      RationalInterval, benzene, boolean_algebra, boolean_ortholattice,
                      divisoid_check, ea_harness, ea_ortholattice_bridge, emonoid_lemma_check,
                      mo, mo2, modularity_check, monoid_harness, oml_check,
                      projection_ortholattice, two)
from .convex import (Coproduct, FiniteConvexSet, FormalDist, aconv_coproduct,
                     all_convex_sets_over_two, convex_to_semilattice, coproduct_matches_oracle,
                     dm_eta, dm_map, dm_mu, empty_convex_set, enumerate_dists,
                     affine_maps, is_affine, is_isomorphism, is_semilattice, least_congruence, monad_law_check, quotient, semilattice_bridge,
                     semilattice_roundtrip_check, semilattices, universal_property_check)
from .module import PredicateModule, predicates_as_module

__all__ = [name for name in dir() if not name.startswith("_")]
