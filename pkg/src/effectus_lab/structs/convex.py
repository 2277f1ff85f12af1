"""The distribution monad D_M and finite abstract M-convex sets.

A formal combination is stored as a frozenset of ``(point, coefficient)``
pairs with distinct points and nonzero coefficients, so equality is exact
and nested combinations hash.  Convex sets live on carriers ``0..n-1`` and
store their structure map ``h`` as a total table over ``D_M(carrier)``.
"""
from itertools import product

from ..errors import NotNormalized, NotSummable
from ..rng import as_rng
from .algebra import JoinScalars, LawLog

EXHAUSTIVE_LIMIT = 10 ** 5


class FormalDist:
    __slots__ = ("monoid", "support", "_hash")

    def __init__(self, monoid, pairs=(), check=True):
        acc = {}
        for x, lam in pairs:
            if x in acc:
                try:
                    acc[x] = monoid.combine(acc[x], lam)
                except NotSummable as exc:
                    raise NotNormalized(str(exc)) from None
            else:
                acc[x] = lam
        support = frozenset((x, lam) for x, lam in acc.items() if lam != monoid.zero)
        if check:
            total = monoid.zero
            for _, lam in sorted(support, key=lambda t: repr(t)):
                try:
                    total = monoid.combine(total, lam)
                except NotSummable as exc:
                    raise NotNormalized(str(exc)) from None
            if total != monoid.one:
                raise NotNormalized(f"coefficients sum to {total}, not {monoid.one}")
        self.monoid = monoid
        self.support = support
        self._hash = hash(support)

    def __eq__(self, other):
        return isinstance(other, FormalDist) and self.support == other.support

    def __hash__(self):
        return self._hash

    def __call__(self, x):
        for y, lam in self.support:
            if y == x:
                return lam
        return self.monoid.zero

    def items(self):
        return sorted(self.support, key=lambda t: repr(t))

    def points(self):
        return sorted({x for x, _ in self.support}, key=repr)

    def __repr__(self):
        return " + ".join(f"{lam}|{x}>" for x, lam in self.items()) or "0"


def dm_eta(monoid, x):
    return FormalDist(monoid, [(x, monoid.one)], check=False)


def dm_mu(Phi):
    """Flatten: mu(Phi)(x) = sum over phi of Phi(phi) . phi(x)."""
    M = Phi.monoid
    pairs = [(x, M.odot(sig, lam)) for phi, sig in Phi.items() for x, lam in phi.items()]
    return FormalDist(M, pairs)


def dm_map(f):
    """Pushforward D_M f."""
    def push(p):
        return FormalDist(p.monoid, [(f(x), lam) for x, lam in p.items()])
    return push


def enumerate_dists(monoid, points):
    """All formal combinations over ``points`` (finite monoid), in a fixed order."""
    points = list(points)
    els = monoid.elements()
    out = []

    def rec(i, acc, chosen):
        if i == len(points):
            if acc == monoid.one:
                out.append(FormalDist(monoid, [(points[j], c) for j, c in enumerate(chosen)], check=False))
            return
        for c in els:
            try:
                s = monoid.combine(acc, c)
            except NotSummable:
                continue
            chosen.append(c)
            rec(i + 1, s, chosen)
            chosen.pop()

    rec(0, monoid.zero, [])
    return out


def count_dists(monoid, n):
    """Size of D_M on an n-point set, by dynamic programming over partial sums."""
    counts = {monoid.zero: 1}
    for _ in range(n):
        nxt = {}
        for acc, k in counts.items():
            for c in monoid.elements():
                try:
                    s = monoid.combine(acc, c)
                except NotSummable:
                    continue
                nxt[s] = nxt.get(s, 0) + k
        counts = nxt
    return counts.get(monoid.one, 0)


def random_dist(monoid, points, rng, max_support=3):
    """Seeded formal combination with a small random support."""
    points = list(points)
    k = 1 + rng.integer(min(max_support, len(points)))
    chosen = []
    pool = list(points)
    for _ in range(k):
        chosen.append(pool.pop(rng.integer(len(pool))))
    if getattr(monoid, "finite", False):
        cands = enumerate_dists(monoid, range(k))
        base = cands[rng.integer(len(cands))]
        return FormalDist(monoid, [(chosen[j], lam) for j, lam in base.items()])
    # rational coefficients: random cut points of a common denominator
    from fractions import Fraction
    q = 1 + rng.integer(12)
    cuts = sorted(rng.integer(q + 1) for _ in range(k - 1))
    bounds = [0] + cuts + [q]
    return FormalDist(monoid, [(chosen[j], Fraction(bounds[j + 1] - bounds[j], q)) for j in range(k)])


def random_nested(monoid, points, rng, depth=2, max_support=3):
    """Random element of D_M^depth over ``points`` (depth >= 1)."""
    if depth == 1:
        return random_dist(monoid, points, rng, max_support)
    inner = [random_nested(monoid, points, rng, depth - 1, max_support)
             for _ in range(1 + rng.integer(max_support))]
    inner = list(dict.fromkeys(inner))
    return random_dist(monoid, inner, rng, max_support)


def monad_law_check(monoid, points=("x", "y", "z", "w"), trials=500, seed=None):
    """Unit and associativity laws of D_M on seeded nested combinations, exactly."""
    rng = as_rng(seed)
    log = LawLog()
    eta = lambda x: dm_eta(monoid, x)  # noqa: E731
    for _ in range(trials):
        PPhi = random_nested(monoid, points, rng, depth=3)
        Phi = next(iter(PPhi.support))[0]
        phi = next(iter(Phi.support))[0]
        log.record("mu_eta", dm_mu(eta(phi)) == phi, repr(phi))
        log.record("mu_D_eta", dm_mu(dm_map(eta)(phi)) == phi, repr(phi))
        log.record("mu_mu", dm_mu(dm_mu(PPhi)) == dm_mu(dm_map(dm_mu)(PPhi)), repr(PPhi))
        log.record("functor_identity", dm_map(lambda x: x)(Phi) == Phi, repr(Phi))
    return log.report(monoid.name, "random", trials)


# --------------------------------------------------------------------------
# finite convex sets


class FiniteConvexSet:
    """Carrier ``0..n-1`` with a total table h: D_M(carrier) -> carrier."""

    def __init__(self, monoid, labels, h):
        self.monoid = monoid
        self.labels = list(labels)
        self.h_table = dict(h)

    @classmethod
    def from_function(cls, monoid, labels, fn):
        dists = enumerate_dists(monoid, range(len(labels)))
        return cls(monoid, labels, {p: int(fn(p)) for p in dists})

    def __len__(self):
        return len(self.labels)

    @property
    def points(self):
        return list(range(len(self.labels)))

    def dists(self):
        return list(self.h_table)

    def h(self, p):
        return self.h_table[p]

    def combination(self, pairs):
        return self.h(FormalDist(self.monoid, pairs))

    def nested_count(self):
        return count_dists(self.monoid, len(self.h_table))

    def check(self, seed=None, trials=2000, limit=EXHAUSTIVE_LIMIT):
        """Unit law h(1|x>) = x and multiplicativity h . mu = h . D_M h.

        Exhaustive over D_M D_M(carrier) when it has at most ``limit``
        elements, otherwise seeded random nested combinations.
        """
        M = self.monoid
        log = LawLog()
        for x in self.points:
            log.record("unit", self.h(dm_eta(M, x)) == x, self.labels[x])
        log.touch("multiplicativity")
        if self.nested_count() <= limit:
            mode = "exhaustive"
            self._check_multiplicative_exhaustive(log)
        else:
            rng = as_rng(seed)
            mode = "random"
            push_h = dm_map(self.h)
            for _ in range(trials):
                Phi = random_nested(M, self.points, rng, depth=2)
                ok = self.h(dm_mu(Phi)) == self.h(push_h(Phi))
                log.record("multiplicativity", ok, repr(Phi))
        return log.report(f"ConvexSet[{len(self)}]", mode, None if mode == "exhaustive" else trials)

    def _check_multiplicative_exhaustive(self, log):
        """Depth-first over all outer coefficient vectors.

        Both sides of the law are accumulated along the way: the flattened
        combination of the chosen inner ones, and the pushforward of the
        outer coefficients along h.  Zero coefficients contribute nothing.
        """
        M = self.monoid
        n = len(self)
        dists = self.dists()
        vecs = [tuple(p(x) for x in range(n)) for p in dists]
        hvec = {v: self.h_table[p] for v, p in zip(vecs, dists)}
        hvals = [self.h_table[p] for p in dists]
        els = [c for c in M.elements() if c != M.zero]
        zero_vec = (M.zero,) * n

        def rec(i, total, flat, push, chosen):
            if i == len(vecs):
                if total == M.one:
                    ok = hvec[flat] == hvec[push]
                    wit = None if ok else repr(FormalDist(
                        M, [(dists[j], c) for j, c in chosen], check=False))
                    log.record("multiplicativity", ok, wit)
                return
            rec(i + 1, total, flat, push, chosen)
            v, hv = vecs[i], hvals[i]
            for c in els:
                try:
                    t = M.combine(total, c)
                except NotSummable:
                    continue
                f = tuple(M.combine(a, M.odot(c, b)) for a, b in zip(flat, v))
                p = list(push)
                p[hv] = M.combine(p[hv], c)
                chosen.append((i, c))
                rec(i + 1, t, f, tuple(p), chosen)
                chosen.pop()

        rec(0, M.zero, zero_vec, zero_vec, [])


def is_affine(f, X, Y):
    """h_Y . D_M f = f . h_X on every combination over X (f given as a list)."""
    push = dm_map(lambda x: f[x])
    return all(Y.h(push(p)) == f[X.h(p)] for p in X.dists())


def is_isomorphism(f, X, Y):
    """f is a bijection and both f and its inverse are affine."""
    if sorted(f) != list(Y.points) or len(X) != len(Y):
        return False
    inv = [None] * len(Y)
    for x, y in enumerate(f):
        inv[y] = x
    return is_affine(f, X, Y) and is_affine(inv, Y, X)


def affine_maps(X, Y):
    """All affine maps X -> Y as tuples (brute force)."""
    return [f for f in product(Y.points, repeat=len(X)) if is_affine(f, X, Y)]


def free_convex_set(monoid, labels):
    """D_M(labels) with h = mu; carrier points are the enumerated combinations."""
    dists = enumerate_dists(monoid, range(len(labels)))
    index = {p: i for i, p in enumerate(dists)}
    names = [repr(FormalDist(monoid, [(labels[x], lam) for x, lam in p.items()], check=False))
             for p in dists]
    h = {}
    for Phi in enumerate_dists(monoid, range(len(dists))):
        inner = FormalDist(monoid, [(dists[i], lam) for i, lam in Phi.items()], check=False)
        h[Phi] = index[dm_mu(inner)]
    return FiniteConvexSet(monoid, names, h), dists, index


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        lo, hi = min(ra, rb), max(ra, rb)
        self.parent[hi] = lo
        return True


def least_congruence(X, R):
    """Least congruence containing the relation R, as a sorted partition.

    Start from the equivalence closure of R, then repeat until stable: any
    two combinations whose pushforwards to the classes agree (the same
    coefficients on related points) have related h-values.  Combinations are
    visited in their fixed enumeration order.
    """
    uf = _UnionFind(len(X))
    for a, b in R:
        uf.union(a, b)
    dists = X.dists()
    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        seen = {}
        push = dm_map(uf.find)
        for p in dists:
            key = push(p)
            if key in seen:
                changed |= uf.union(seen[key], X.h(p))
            else:
                seen[key] = X.h(p)
    classes = {}
    for x in X.points:
        classes.setdefault(uf.find(x), []).append(x)
    return sorted(classes.values())


def quotient(X, partition):
    """Quotient convex set and the map q, with well-definedness verified.

    Returns ``(Q, q, report)``; ``report`` records whether h_Q . D_M q =
    q . h_X is consistent (well-defined) and q affine.
    """
    q = [None] * len(X)
    for k, cls in enumerate(partition):
        for x in cls:
            q[x] = k
    push = dm_map(lambda x: q[x])
    h = {}
    log = LawLog()
    for p in X.dists():
        key = push(p)
        val = q[X.h(p)]
        if key in h:
            log.record("well_defined", h[key] == val, repr(p))
        else:
            h[key] = val
    labels = ["{" + ",".join(str(X.labels[x]) for x in cls) + "}" for cls in partition]
    Q = FiniteConvexSet(X.monoid, labels, h)
    log.record("total", set(h) == set(enumerate_dists(X.monoid, range(len(partition)))), None)
    log.record("q_affine", is_affine(q, X, Q), None)
    log.touch("well_defined")
    return Q, q, log.report("quotient", "exhaustive")


# --------------------------------------------------------------------------
# coproducts


class Coproduct:
    def __init__(self, C, c1, c2, free, dists, q, report):
        self.C = C
        self.c1 = c1
        self.c2 = c2
        self.free = free
        self.dists = dists
        self.q = q
        self.report = report

    def mediator(self, Z, f, g):
        """The affine map C -> Z induced by f and g, from its forced values."""
        nx = len(self.c1)
        m = [None] * len(self.C)
        ok = True
        for i, p in enumerate(self.dists):
            val = Z.h(dm_map(lambda u: f[u] if u < nx else g[u - nx])(p))
            k = self.q[i]
            if m[k] is None:
                m[k] = val
            elif m[k] != val:
                ok = False
        return tuple(m), ok


def aconv_coproduct(X, Y):
    """Coproduct of finite convex sets over the same finite M.

    D_M(X + Y) with mu, divided by the least congruence relating
    D_M k1(phi) to eta(k1(h_X phi)) and likewise for Y.  Returns a
    :class:`Coproduct` with coprojections c_i = q . eta . k_i.
    """
    M = X.monoid
    nx = len(X)
    labels = [f"x{a}" for a in X.labels] + [f"y{b}" for b in Y.labels]
    free, dists, index = free_convex_set(M, labels)
    R = []
    for p in X.dists():
        R.append((index[p], index[dm_eta(M, X.h(p))]))
    for p in Y.dists():
        shifted = dm_map(lambda u: u + nx)(p)
        R.append((index[shifted], index[dm_eta(M, nx + Y.h(p))]))
    partition = least_congruence(free, R)
    C, q, rep = quotient(free, partition)
    c1 = tuple(q[index[dm_eta(M, a)]] for a in X.points)
    c2 = tuple(q[index[dm_eta(M, nx + b)]] for b in Y.points)
    return Coproduct(C, c1, c2, free, dists, q, rep)


def universal_property_check(cop, X, Y, candidates, brute_limit=4096):
    """For every Z and affine f: X -> Z, g: Y -> Z, exactly one affine
    mediator m with m c1 = f and m c2 = g.

    When |Z|^|C| <= ``brute_limit`` all maps C -> Z are enumerated and the
    mediators counted.  Otherwise the forced candidate is checked for being
    well defined and affine, and uniqueness follows from joint epicity,
    which is checked once: every point of C is h_C of a combination of
    coprojection images.
    """
    log = LawLog()
    C = cop.C
    nx = len(X)
    gen = [cop.c1[u] if u < nx else cop.c2[u - nx] for u in range(nx + len(Y))]
    reached = {C.h(dm_map(lambda u: gen[u])(p)) for p in cop.dists}
    log.record("jointly_epic", reached == set(C.points), sorted(set(C.points) - reached))
    log.record("c1_affine", is_affine(cop.c1, X, C), None)
    log.record("c2_affine", is_affine(cop.c2, Y, C), None)
    brute = 0
    for zi, Z in enumerate(candidates):
        fs, gs = affine_maps(X, Z), affine_maps(Y, Z)
        if len(Z) ** len(C) <= brute_limit:
            brute += 1
            meds = affine_maps(C, Z)
            for f in fs:
                for g in gs:
                    hits = [m for m in meds
                            if all(m[cop.c1[a]] == f[a] for a in X.points)
                            and all(m[cop.c2[b]] == g[b] for b in Y.points)]
                    log.record("unique_mediator", len(hits) == 1,
                               {"Z": zi, "f": list(f), "g": list(g), "count": len(hits)})
        else:
            for f in fs:
                for g in gs:
                    m, ok = cop.mediator(Z, f, g)
                    ok = ok and is_affine(m, C, Z)
                    ok = ok and all(m[cop.c1[a]] == f[a] for a in X.points)
                    ok = ok and all(m[cop.c2[b]] == g[b] for b in Y.points)
                    log.record("unique_mediator", ok, {"Z": zi, "f": list(f), "g": list(g)})
    log.touch("unique_mediator")
    return log.report("coproduct", "exhaustive", None, candidates=len(candidates), brute_forced=brute)


# --------------------------------------------------------------------------
# semilattices


def is_semilattice(join):
    n = len(join)
    r = range(n)
    return (all(join[a][a] == a for a in r)
            and all(join[a][b] == join[b][a] for a in r for b in r)
            and all(join[join[a][b]][c] == join[a][join[b][c]] for a in r for b in r for c in r))


def semilattices(n):
    """All join-semilattice tables on ``0..n-1`` (labelled)."""
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    out = []
    for vals in product(range(n), repeat=len(pairs)):
        t = [[a if a == b else None for b in range(n)] for a in range(n)]
        for (a, b), v in zip(pairs, vals):
            t[a][b] = t[b][a] = v
        if is_semilattice(t):
            out.append(t)
    return out


def semilattice_bridge(join, labels=None):
    """Semilattice -> convex set over 2: h(S) = join of the support."""
    M = JoinScalars(1)
    n = len(join)
    labels = labels or [str(i) for i in range(n)]

    def h(p):
        pts = [x for x, lam in p.items() if lam != M.zero]
        acc = pts[0]
        for x in pts[1:]:
            acc = join[acc][x]
        return acc

    return FiniteConvexSet.from_function(M, labels, h)


def convex_to_semilattice(X):
    """Convex set over 2 -> join table a v b = h(1|a> + 1|b>)."""
    M = X.monoid
    return [[X.combination([(a, M.one), (b, M.one)]) for b in X.points] for a in X.points]


def semilattice_roundtrip_check(max_size=4):
    """Both round trips are identities on every semilattice up to ``max_size``."""
    log = LawLog()
    total = 0
    for n in range(1, max_size + 1):
        for t in semilattices(n):
            total += 1
            X = semilattice_bridge(t)
            log.record("convex_laws", X.check()["status"] == "pass", t)
            log.record("semilattice_roundtrip", convex_to_semilattice(X) == t, t)
            X2 = semilattice_bridge(convex_to_semilattice(X))
            log.record("convex_roundtrip", X2.h_table == X.h_table, t)
    return log.report("semilattices", "exhaustive", None, count=total)


def all_convex_sets_over_two(max_size=4):
    """Every convex set over 2 with at most ``max_size`` points, via semilattices."""
    return [semilattice_bridge(t) for n in range(1, max_size + 1) for t in semilattices(n)]


def semilattice_coproduct_oracle(jx, jy):
    """Coproduct of join-semilattices: X + Y + X x Y with the evident join.

    Points are ``("x", a)``, ``("y", b)`` and ``("xy", a, b)``.
    """
    pts = [("x", a) for a in range(len(jx))] + [("y", b) for b in range(len(jy))]
    pts += [("xy", a, b) for a in range(len(jx)) for b in range(len(jy))]

    def parts(p):
        if p[0] == "x":
            return p[1], None
        if p[0] == "y":
            return None, p[1]
        return p[1], p[2]

    def j(u, v, tab):
        if u is None:
            return v
        if v is None:
            return u
        return tab[u][v]

    index = {p: i for i, p in enumerate(pts)}
    table = []
    for p in pts:
        row = []
        for r in pts:
            (a1, b1), (a2, b2) = parts(p), parts(r)
            a, b = j(a1, a2, jx), j(b1, b2, jy)
            row.append(index[("x", a)] if b is None else index[("y", b)] if a is None
                       else index[("xy", a, b)])
        table.append(row)
    return pts, table


def coproduct_matches_oracle(cop, jx, jy):
    """Compare with the oracle through the canonical comparison map.

    x -> c1(x), y -> c2(y), (x, y) -> c1(x) v c2(y); the map must be a
    bijection preserving joins.
    """
    pts, table = semilattice_coproduct_oracle(jx, jy)
    C = cop.C
    one = C.monoid.one

    def image(p):
        if p[0] == "x":
            return cop.c1[p[1]]
        if p[0] == "y":
            return cop.c2[p[1]]
        return C.combination([(cop.c1[p[1]], one), (cop.c2[p[2]], one)])

    phi = [image(p) for p in pts]
    cj = convex_to_semilattice(C)
    bijective = sorted(phi) == list(C.points)
    homomorphic = all(phi[table[u][v]] == cj[phi[u]][phi[v]]
                      for u in range(len(pts)) for v in range(len(pts)))
    return {"oracle_size": len(pts), "coproduct_size": len(C),
            "bijective": bijective, "join_preserving": homomorphic,
            "status": "pass" if bijective and homomorphic else "fail"}


def empty_convex_set(monoid):
    return FiniteConvexSet(monoid, [], {})
