"""Normal completely positive maps between FdAlgebras (Heisenberg direction).

A :class:`CpMap` from ``source`` (blocks ``n_i``) to ``target`` (blocks
``m_j``) stores, for each block pair ``(i, j)``, Kraus matrices ``V`` of
shape ``n_i x m_j``; the ``j``-th block of ``phi(a)`` is
``sum_i sum_V V^* a_i V``.

The Choi matrix of the ``(i, j)`` component is
``sum_{kl} E_kl (x) phi_ij(E_kl)``, indexed ``(k, p) -> k * m_j + p``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import NotPSD, NotSummable, ShapeMismatch
from .rng import as_rng
from .vnalg import AlgElement, FdAlgebra, is_effect, loewner_leq, random_effect

TOL = la.TOL


@dataclass(frozen=True, eq=False)
class CpMap:
    source: FdAlgebra
    target: FdAlgebra
    kraus: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), ops in self.kraus.items():
            n, m = self.source.blocks[i], self.target.blocks[j]
            ops = tuple(np.asarray(v, dtype=complex) for v in ops)
            for v in ops:
                if v.shape != (n, m):
                    raise ShapeMismatch(f"Kraus operator {v.shape} for block pair {(i, j)} should be {(n, m)}")
            if ops:
                clean[(int(i), int(j))] = ops
        object.__setattr__(self, "kraus", clean)

    def __call__(self, a):
        return apply(self, a)

    def kraus_count(self):
        return {k: len(v) for k, v in self.kraus.items()}

    def __repr__(self):
        return f"CpMap({self.source} -> {self.target}, kraus={self.kraus_count()})"

    def to_json(self):
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "kraus": {f"{i},{j}": [la.to_json(v) for v in ops]
                          for (i, j), ops in sorted(self.kraus.items())}}

    @classmethod
    def from_json(cls, obj):
        src = FdAlgebra.from_json(obj["source"])
        tgt = FdAlgebra.from_json(obj["target"])
        kraus = {}
        for key, ops in obj.get("kraus", {}).items():
            i, j = (int(t) for t in key.split(","))
            kraus[(i, j)] = tuple(la.from_json(v) for v in ops)
        return cls(src, tgt, kraus)


def apply(phi, a):
    if a.algebra != phi.source:
        raise ShapeMismatch(f"input lives in {a.algebra}, map expects {phi.source}")
    out = [np.zeros((m, m), dtype=complex) for m in phi.target.blocks]
    for (i, j), ops in phi.kraus.items():
        ai = a.mats[i]
        for v in ops:
            out[j] += la.dag(v) @ ai @ v
    return AlgElement(phi.target, tuple(out))


# --------------------------------------------------------------------------
# Choi / Kraus / superoperator conversions


def choi(phi, i, j):
    n, m = phi.source.blocks[i], phi.target.blocks[j]
    c = np.zeros((n * m, n * m), dtype=complex)
    for v in phi.kraus.get((i, j), ()):
        w = np.conj(v).reshape(-1)
        c += np.outer(w, np.conj(w))
    return c


def kraus_from_choi(c, n, m, tol=TOL, tol_rel=la.TOL_REL):
    """Canonical Kraus family: sqrt(lambda)-scaled Choi eigenvectors,
    descending eigenvalue, dropping eigenvalues below the rank cutoff."""
    c = np.asarray(c, dtype=complex)
    if c.shape != (n * m, n * m):
        raise ShapeMismatch(f"Choi matrix {c.shape} does not match {n}x{m}")
    if not np.any(c):
        return ()
    vals, vecs = la.herm_eig(c, tol=max(tol, 1e-9))
    top = max(float(np.max(np.abs(vals))), 1.0)
    if vals[0] < -tol * top:
        raise NotPSD(f"Choi matrix has eigenvalue {vals[0]:.3e}")
    cut = la.rank_cutoff(vals, tol_rel)
    ops = []
    for k in range(len(vals) - 1, -1, -1):
        if vals[k] > cut:
            ops.append(np.conj(np.sqrt(vals[k]) * vecs[:, k]).reshape(n, m))
    return tuple(ops)


def from_choi(source, target, table, tol=TOL):
    kraus = {}
    for (i, j), c in table.items():
        kraus[(i, j)] = kraus_from_choi(c, source.blocks[i], target.blocks[j], tol)
    return CpMap(source, target, kraus)


def choi_of_function(source, target, fn):
    """Choi table of an arbitrary linear map given as a Python function."""
    table = {}
    for i, n in enumerate(source.blocks):
        images = [[fn(source.unit(i, k, l)) for l in range(n)] for k in range(n)]
        for j, m in enumerate(target.blocks):
            c = np.zeros((n * m, n * m), dtype=complex)
            for k in range(n):
                for l in range(n):
                    c[k * m:(k + 1) * m, l * m:(l + 1) * m] = images[k][l].mats[j]
            table[(i, j)] = (c + la.dag(c)) / 2
    return table


def from_function(source, target, fn, tol=TOL):
    """CpMap realizing a linear function (raises NotPSD if it is not CP)."""
    return from_choi(source, target, choi_of_function(source, target, fn), tol)


def superop(phi):
    """Matrix of phi in the matrix-unit bases (target dim x source dim)."""
    cols = [apply(phi, phi.source.unit(*u)).vector() for u in phi.source.matrix_units()]
    if not cols:
        return np.zeros((phi.target.dim, 0), dtype=complex)
    return np.array(cols).T


def from_superop(mat, source, target, tol=TOL):
    mat = np.asarray(mat, dtype=complex)

    def fn(x):
        return target.from_vector(mat @ x.vector())

    return from_function(source, target, fn, tol)


def min_choi_eig(phi):
    """Smallest Choi eigenvalue over all components (CP certificate)."""
    out = 0.0
    for i in range(len(phi.source.blocks)):
        for j in range(len(phi.target.blocks)):
            c = choi(phi, i, j)
            if c.size:
                out = min(out, la.min_eig(c))
    return out


def choi_min_eig_of_superop(mat, source, target):
    def fn(x):
        return target.from_vector(np.asarray(mat) @ x.vector())
    table = choi_of_function(source, target, fn)
    return min((la.min_eig(c) for c in table.values() if c.size), default=0.0)


# --------------------------------------------------------------------------
# Constructors


def identity(alg):
    return CpMap(alg, alg, {(i, i): (np.eye(n),) for i, n in enumerate(alg.blocks)})


def zero_map(source, target):
    return CpMap(source, target, {})


def ad(v, source=None, target=None):
    """a -> V^* a V between single-block algebras."""
    v = np.asarray(v, dtype=complex)
    source = source or FdAlgebra((v.shape[0],))
    target = target or FdAlgebra((v.shape[1],))
    return CpMap(source, target, {(0, 0): (v,)})


def scale(phi, lam):
    if lam < 0:
        raise ValueError("scaling factor must be nonnegative")
    r = np.sqrt(lam)
    return CpMap(phi.source, phi.target, {k: tuple(r * v for v in ops) for k, ops in phi.kraus.items()})


def embedding_map(source, target, block_map):
    """Kraus-given map with arbitrary components: ``block_map[(i, j)]`` lists operators."""
    return CpMap(source, target, block_map)


def compose(f, g):
    """The composite f o g (g applied first)."""
    if g.target != f.source:
        raise ShapeMismatch(f"cannot compose: {g.target} vs {f.source}")
    kraus = {}
    for (i, j), vs in g.kraus.items():
        for (j2, k), ws in f.kraus.items():
            if j2 != j:
                continue
            kraus.setdefault((i, k), []).extend(v @ w for v in vs for w in ws)
    return CpMap(g.source, f.target, kraus)


def compose_all(*maps):
    """compose_all(f, g, h) = f o g o h."""
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = compose(m, out)
    return out


def tensor(f, g):
    src = f.source.tensor(g.source)
    tgt = f.target.tensor(g.target)
    nb_src, nb_tgt = len(g.source.blocks), len(g.target.blocks)
    kraus = {}
    for (i, j), vs in f.kraus.items():
        for (k, l), ws in g.kraus.items():
            kraus[(i * nb_src + k, j * nb_tgt + l)] = tuple(np.kron(v, w) for v in vs for w in ws)
    return CpMap(src, tgt, kraus)


def pair_target(f, g):
    """c -> (f(c), g(c)) into the direct sum of the targets."""
    if f.source != g.source:
        raise ShapeMismatch("pair_target needs a common source")
    shift = len(f.target.blocks)
    kraus = dict(f.kraus)
    for (i, j), ops in g.kraus.items():
        kraus[(i, j + shift)] = ops
    return CpMap(f.source, f.target.direct_sum(g.target), kraus)


def _summable(f, g, tol):
    total = apply(f, f.source.one()) + apply(g, g.source.one())
    return loewner_leq(total, f.target.one(), tol)


def ovee_sum(f, g, tol=TOL):
    """Partial sum of two maps with f(1) + g(1) <= 1."""
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch("ovee_sum needs maps with equal source and target")
    if not _summable(f, g, tol):
        raise NotSummable("f(1) + g(1) exceeds 1")
    kraus = {k: list(v) for k, v in f.kraus.items()}
    for k, ops in g.kraus.items():
        kraus.setdefault(k, []).extend(ops)
    return CpMap(f.source, f.target, kraus)


def pairing(f, g, tol=TOL):
    """(a, b) -> f(a) + g(b) on the direct sum of the sources; needs f(1) + g(1) <= 1."""
    if f.target != g.target:
        raise ShapeMismatch("pairing needs a common target")
    if not _summable(f, g, tol):
        raise NotSummable("f(1) + g(1) exceeds 1")
    shift = len(f.source.blocks)
    kraus = dict(f.kraus)
    for (i, j), ops in g.kraus.items():
        kraus[(i + shift, j)] = ops
    return CpMap(f.source.direct_sum(g.source), f.target, kraus)


def coprojection(left, right, k):
    """a -> (a, 0) (k = 0) or b -> (0, b) (k = 1) into left + right."""
    alg = left.direct_sum(right)
    part = left if k == 0 else right
    shift = 0 if k == 0 else len(left.blocks)
    return CpMap(part, alg, {(i, i + shift): (np.eye(n),) for i, n in enumerate(part.blocks)})


def block_projection(alg, keep):
    """Restriction to the blocks listed in ``keep`` (nmiu surjection)."""
    sub = FdAlgebra(tuple(alg.blocks[i] for i in keep))
    return CpMap(alg, sub, {(i, t): (np.eye(alg.blocks[i]),) for t, i in enumerate(keep)})


def block_inclusion(alg, keep):
    """Inverse direction of :func:`block_projection`: x -> (x on keep, 0 elsewhere)."""
    sub = FdAlgebra(tuple(alg.blocks[i] for i in keep))
    return CpMap(sub, alg, {(t, i): (np.eye(alg.blocks[i]),) for t, i in enumerate(keep)})


# --------------------------------------------------------------------------
# Predicates on maps


def max_deviation(f, g):
    """Largest entry deviation of f and g over all source matrix units."""
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch(f"{f} vs {g}")
    dev = 0.0
    for u in f.source.matrix_units():
        e = f.source.unit(*u)
        dev = max(dev, apply(f, e).dist(apply(g, e)))
    return dev


def equal_maps(f, g, tol=TOL):
    return max_deviation(f, g) <= tol


def is_unital(phi, tol=TOL):
    return apply(phi, phi.source.one()).dist(phi.target.one()) <= tol


def is_subunital(phi, tol=TOL):
    return loewner_leq(apply(phi, phi.source.one()), phi.target.one(), tol)


def nmiu_residual(phi):
    """max of unitality and Schwarz-equality defects on all matrix units.

    For a unital CP map, phi(a^* a) = phi(a)^* phi(a) puts ``a`` in the
    multiplicative domain; matrix units span the source.
    """
    res = apply(phi, phi.source.one()).dist(phi.target.one())
    for (i, k, l) in phi.source.matrix_units():
        e = phi.source.unit(i, k, l)
        fe = apply(phi, e)
        res = max(res, apply(phi, e.adj() @ e).dist(fe.adj() @ fe))
    return res


def is_nmiu(phi, tol=TOL):
    return nmiu_residual(phi) <= tol


def image(phi, tol=TOL):
    """Least projection e of the source with phi(1 - e) = 0."""
    mats = []
    for i, n in enumerate(phi.source.blocks):
        acc = np.zeros((n, n), dtype=complex)
        for (i2, j), ops in phi.kraus.items():
            if i2 == i:
                for v in ops:
                    acc += v @ la.dag(v)
        mats.append(la.support_proj(acc, tol))
    return AlgElement(phi.source, tuple(mats))


def leq_ncp(psi, phi, tol=TOL):
    """psi <=_ncp phi: phi - psi is completely positive."""
    diff = superop(phi) - superop(psi)
    return choi_min_eig_of_superop(diff, phi.source, phi.target) >= -tol


def random_cp_map(source, target, rng, k=2, normalize=None, components=None):
    """Ginibre-Kraus CP map; ``normalize`` is None, "unital" or "subunital"."""
    rng = as_rng(rng)
    kraus = {}
    for i, n in enumerate(source.blocks):
        for j, m in enumerate(target.blocks):
            if components is not None and (i, j) not in components:
                continue
            kraus[(i, j)] = tuple(rng.ginibre(n, m) for _ in range(k))
    phi = CpMap(source, target, kraus)
    if normalize is None:
        return phi
    one = apply(phi, source.one())
    fixes = [la.pinv_sqrt_psd(m) for m in one.mats]
    if normalize == "subunital":
        fixes = [f * np.sqrt(rng.uniform(0.3, 1.0)) for f in fixes]
    elif normalize != "unital":
        raise ValueError(f"unknown normalization {normalize!r}")
    return CpMap(source, target, {(i, j): tuple(v @ fixes[j] for v in ops)
                                  for (i, j), ops in phi.kraus.items()})


# --------------------------------------------------------------------------
# Effectus axiom harness (instance level)


def _report(law, ok, residual, witness=None):
    out = {"law": law, "status": "pass" if ok else "fail", "residual": float(residual)}
    if witness is not None and not ok:
        out["witness"] = witness
    return out


def effectus_axiom_harness(seed=0, trials=200, algebras=None, ovee=None, tol=1e-8):
    """Instance checks of the partial-sum structure on maps between fixed algebras.

    ``ovee`` overrides the partial sum of maps (fault injection hook).
    Returns a dict with one entry per law.
    """
    rng = as_rng(seed)
    algebras = algebras or (FdAlgebra((2,)), FdAlgebra((3, 1)))
    ovee = ovee or ovee_sum
    a_alg, b_alg = algebras
    worst = {name: (0.0, None) for name in
             ("predicates_effect_algebra", "ovee_bilinear", "pairing_projections", "zero_one")}

    def bump(name, res, witness):
        if res > worst[name][0]:
            worst[name] = (res, witness)

    for trial in range(trials):
        # predicates on the target algebra, made summable by halving
        p = 0.5 * random_effect(b_alg, rng)
        q = 0.5 * random_effect(b_alg, rng)
        r = 0.5 * random_effect(b_alg, rng)
        one = b_alg.one()
        res = (p + q).dist(q + p)
        if is_effect(p + q + r, tol):
            res = max(res, ((p + q) + r).dist(p + (q + r)))
        perp = one - p
        res = max(res, (p + perp).dist(one))
        if not is_effect(perp, tol):
            res = max(res, 1.0)
        # zero-one law: p + 1 is an effect only for p = 0
        if is_effect(p + one, tol) and p.norm() > tol:
            res = max(res, p.norm())
        bump("predicates_effect_algebra", res, {"trial": trial, "p": p.to_json()})

        f = random_cp_map(a_alg, b_alg, rng, k=1, normalize="subunital")
        g = random_cp_map(a_alg, b_alg, rng, k=1, normalize="subunital")
        f, g = scale(f, 0.5), scale(g, 0.5)
        h = random_cp_map(b_alg, a_alg, rng, k=2, normalize="subunital")
        k = random_cp_map(a_alg, a_alg, rng, k=2, normalize="subunital")
        fg = ovee(f, g)
        lhs = superop(compose(h, fg))
        rhs = superop(compose(h, f)) + superop(compose(h, g))
        lhs2 = superop(compose(fg, k))
        rhs2 = superop(compose(f, k)) + superop(compose(g, k))
        res = max(float(np.max(np.abs(lhs - rhs))), float(np.max(np.abs(lhs2 - rhs2))))
        bump("ovee_bilinear", res, {"trial": trial, "f": f.to_json(), "g": g.to_json()})

        # pairing <f', g'> : A + A -> B with coprojection equations
        pr = pairing(f, g)
        res = max(max_deviation(compose(pr, coprojection(a_alg, a_alg, 0)), f),
                  max_deviation(compose(pr, coprojection(a_alg, a_alg, 1)), g),
                  apply(pr, pr.source.one()).dist(apply(f, a_alg.one()) + apply(g, a_alg.one())))
        bump("pairing_projections", res, {"trial": trial})

        # zero-one law on maps: 1 o f = 0 forces f = 0; ovee with zero is identity
        z = zero_map(a_alg, b_alg)
        res = max_deviation(ovee(f, z), f)
        bump("zero_one", res, {"trial": trial})

    laws = []
    for name, (res, witness) in worst.items():
        laws.append(_report(name, res <= tol, res, witness))
    return {"trials": trials, "seed": seed, "laws": laws,
            "status": "pass" if all(l["status"] == "pass" for l in laws) else "fail"}


def direct_sum_maps(f, g):
    """f (+) g between the direct sums of sources and targets."""
    ss, ts = len(f.source.blocks), len(f.target.blocks)
    kraus = dict(f.kraus)
    for (i, j), ops in g.kraus.items():
        kraus[(i + ss, j + ts)] = ops
    return CpMap(f.source.direct_sum(g.source), f.target.direct_sum(g.target), kraus)
