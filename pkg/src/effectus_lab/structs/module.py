"""Predicates of a finite-dimensional algebra as an effect module over Q[0,1]."""
from fractions import Fraction

from .. import vnalg
from ..rng import as_rng
from .algebra import LawLog, RationalInterval


class PredicateModule:
    """Effects of ``algebra`` with scalar action lambda . p = lambda p."""

    def __init__(self, algebra, tol=1e-12):
        self.algebra = algebra
        self.scalars = RationalInterval()
        self.tol = tol

    def act(self, lam, p):
        return p * float(lam)

    def summable(self, p, q):
        return vnalg.is_effect(p + q, self.tol)

    def ovee(self, p, q):
        return p + q if self.summable(p, q) else None

    def sample_pair(self, rng):
        """An effect p and an effect q summable with it."""
        p = vnalg.random_effect(self.algebra, rng)
        s = vnalg.sqrt(self.algebra.one() - p)
        e = vnalg.random_effect(self.algebra, rng)
        return p, s @ e @ s


def predicates_as_module(algebra, seed=None, trials=200, tol=1e-12):
    """Check the effect module axioms on sampled rational scalars and effects.

    (lm).p = l.(m.p); l.(p + q) = l.p + l.q; (l + m).p = l.p + m.p for
    summable l, m; 1.p = p.  Summability of the results is checked too.
    """
    E = PredicateModule(algebra, tol)
    M = E.scalars
    rng = as_rng(seed)
    log = LawLog()
    for _ in range(trials):
        p, q = E.sample_pair(rng)
        lam = M.sample(rng)
        mu = M.sample(rng) * (1 - lam)  # mu <= 1 - lam, so lam and mu are summable
        mu = Fraction(mu)
        w = [str(lam), str(mu)]
        log.record("unit", E.act(M.one, p).dist(p) <= tol, w)
        log.record("action_associative",
                   E.act(M.odot(lam, mu), p).dist(E.act(lam, E.act(mu, p))) <= tol, w)
        lp, lq = E.act(lam, p), E.act(lam, q)
        s = E.ovee(lp, lq)
        log.record("additive_in_predicate",
                   s is not None and s.dist(E.act(lam, p + q)) <= tol, w)
        lm = M.ovee(lam, mu)
        s = E.ovee(E.act(lam, p), E.act(mu, p))
        log.record("additive_in_scalar",
                   lm is not None and s is not None and s.dist(E.act(lm, p)) <= tol, w)
        log.record("action_is_effect", vnalg.is_effect(lp, tol), w)
    return log.report(f"Pred({algebra})", "random", trials)
