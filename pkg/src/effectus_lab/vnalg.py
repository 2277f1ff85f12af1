"""Finite-dimensional von Neumann algebras as direct sums of matrix blocks.

An :class:`FdAlgebra` is the sequence of block sizes ``(n_1, ..., n_k)``;
an :class:`AlgElement` carries one ``n_i x n_i`` matrix per block.  The
empty sequence is allowed and stands for the zero algebra (it appears as
the corner of the zero projection).
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import linalg as la
from .errors import NotEffect, NotProjection, NotSubalgebra, ShapeMismatch
from .rng import DEFAULT_SEED, as_rng

TOL = la.TOL


@dataclass(frozen=True)
class FdAlgebra:
    blocks: Tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(n) for n in self.blocks)
        if any(n <= 0 for n in blocks):
            raise ShapeMismatch(f"block sizes must be positive: {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self):
        return sum(n * n for n in self.blocks)

    @property
    def offsets(self):
        out, acc = [], 0
        for n in self.blocks:
            out.append(acc)
            acc += n * n
        return out

    def matrix_units(self):
        """All ``(block, row, col)`` triples in flattening order."""
        return [(i, k, l) for i, n in enumerate(self.blocks)
                for k in range(n) for l in range(n)]

    def unit(self, i, k, l):
        mats = [np.zeros((n, n), dtype=complex) for n in self.blocks]
        mats[i][k, l] = 1.0
        return AlgElement(self, tuple(mats))

    def zero(self):
        return AlgElement(self, tuple(np.zeros((n, n), dtype=complex) for n in self.blocks))

    def one(self):
        return AlgElement(self, tuple(np.eye(n, dtype=complex) for n in self.blocks))

    def scalar(self, lam):
        return AlgElement(self, tuple(lam * np.eye(n, dtype=complex) for n in self.blocks))

    def element(self, mats):
        return AlgElement(self, tuple(np.asarray(m, dtype=complex) for m in mats))

    def from_vector(self, vec):
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (self.dim,):
            raise ShapeMismatch(f"vector of length {self.dim} expected")
        mats, acc = [], 0
        for n in self.blocks:
            mats.append(vec[acc:acc + n * n].reshape(n, n).copy())
            acc += n * n
        return AlgElement(self, tuple(mats))

    def central_projection(self, keep):
        """Projection that is 1 on blocks whose index is in ``keep``."""
        return AlgElement(self, tuple(
            (np.eye(n) if i in keep else np.zeros((n, n))).astype(complex)
            for i, n in enumerate(self.blocks)))

    def direct_sum(self, other):
        return FdAlgebra(self.blocks + other.blocks)

    def tensor(self, other):
        return FdAlgebra(tuple(n * m for n in self.blocks for m in other.blocks))

    def __str__(self):
        if not self.blocks:
            return "0"
        return " + ".join("C" if n == 1 else f"M{n}" for n in self.blocks)

    def to_json(self):
        return {"blocks": list(self.blocks)}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj["blocks"]))


def matrix_algebra(*blocks):
    return FdAlgebra(tuple(blocks))


@dataclass(frozen=True, eq=False)
class AlgElement:
    algebra: FdAlgebra
    mats: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=complex) for m in self.mats)
        if len(mats) != len(self.algebra.blocks) or any(
                m.shape != (n, n) for m, n in zip(mats, self.algebra.blocks)):
            raise ShapeMismatch(
                f"blocks {[m.shape for m in mats]} do not fit {self.algebra}")
        object.__setattr__(self, "mats", mats)

    def _check(self, other):
        if self.algebra != other.algebra:
            raise ShapeMismatch(f"{self.algebra} vs {other.algebra}")

    def __add__(self, other):
        self._check(other)
        return AlgElement(self.algebra, tuple(a + b for a, b in zip(self.mats, other.mats)))

    def __sub__(self, other):
        self._check(other)
        return AlgElement(self.algebra, tuple(a - b for a, b in zip(self.mats, other.mats)))

    def __neg__(self):
        return AlgElement(self.algebra, tuple(-a for a in self.mats))

    def __mul__(self, lam):
        return AlgElement(self.algebra, tuple(lam * a for a in self.mats))

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return AlgElement(self.algebra, tuple(a @ b for a, b in zip(self.mats, other.mats)))

    def adj(self):
        return AlgElement(self.algebra, tuple(la.dag(a) for a in self.mats))

    def map_blocks(self, fn):
        return AlgElement(self.algebra, tuple(fn(a) for a in self.mats))

    def vector(self):
        if not self.mats:
            return np.zeros(0, dtype=complex)
        return np.concatenate([m.reshape(-1) for m in self.mats])

    def norm(self):
        """Max-entry magnitude, the deviation measure used for tolerances."""
        return max((float(np.max(np.abs(m))) for m in self.mats if m.size), default=0.0)

    def op_norm(self):
        return max((la.op_norm(m) for m in self.mats), default=0.0)

    def dist(self, other):
        return (self - other).norm()

    def matrix(self):
        """Block-diagonal matrix realizing the element."""
        n = sum(self.algebra.blocks)
        out = np.zeros((n, n), dtype=complex)
        acc = 0
        for m in self.mats:
            k = m.shape[0]
            out[acc:acc + k, acc:acc + k] = m
            acc += k
        return out

    def tensor(self, other):
        alg = self.algebra.tensor(other.algebra)
        return AlgElement(alg, tuple(np.kron(a, b) for a in self.mats for b in other.mats))

    def to_json(self):
        return {"algebra": self.algebra.to_json(), "mats": [la.to_json(m) for m in self.mats]}

    @classmethod
    def from_json(cls, obj):
        alg = FdAlgebra.from_json(obj["algebra"])
        return cls(alg, tuple(la.from_json(m) for m in obj["mats"]))

    def __repr__(self):
        return f"AlgElement({self.algebra}, {[m.round(6).tolist() for m in self.mats]})"


def is_effect(x, tol=TOL):
    for m in x.mats:
        if not la.is_hermitian(m, tol):
            return False
        vals = la.herm_eig(m, tol=max(tol, 1e-9)).values
        if len(vals) and (vals[0] < -tol or vals[-1] > 1 + tol):
            return False
    return True


def is_projection(x, tol=TOL):
    return all(la.is_projection_matrix(m, tol) for m in x.mats)


def require_effect(x, tol=TOL):
    if not is_effect(x, tol):
        raise NotEffect("element is not an effect")


def require_projection(x, tol=TOL, exc=NotProjection):
    if not is_projection(x, tol):
        raise exc("element is not a projection")


def ceil(x, tol=TOL):
    return x.map_blocks(lambda m: la.support_proj(m, tol))


def floor(x, tol=TOL):
    return x.map_blocks(lambda m: la.floor_proj(m, tol))


def sqrt(x, tol=TOL):
    return x.map_blocks(lambda m: la.sqrt_psd(m, tol))


def orthocomplement(x):
    return x.algebra.one() - x


def is_central(x, tol=TOL):
    """In a direct sum of factors, central means scalar on each block."""
    return all(float(np.max(np.abs(m - np.trace(m) / m.shape[0] * np.eye(m.shape[0])))) <= tol
               for m in x.mats if m.size)


def central_carrier(p, tol=TOL):
    """Least central projection above an effect: 1 on every nonzero block."""
    require_effect(p, tol)
    keep = {i for i, m in enumerate(p.mats) if float(np.max(np.abs(m))) > tol}
    return p.algebra.central_projection(keep)


def mv_equivalent(p, q, tol=TOL):
    """Murray-von Neumann equivalence: equal rank in every block."""
    require_projection(p, tol)
    require_projection(q, tol)
    if p.algebra != q.algebra:
        raise ShapeMismatch("projections live in different algebras")
    return all(int(round(np.trace(a).real)) == int(round(np.trace(b).real))
               for a, b in zip(p.mats, q.mats))


def loewner_leq(x, y, tol=TOL):
    return all(la.loewner_leq(a, b, tol) for a, b in zip(x.mats, y.mats))


# --------------------------------------------------------------------------
# Concrete *-subalgebras of M_d and their block structure


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """A *-subalgebra of M_d presented as x -> sum_k W_k (x_k (x) 1_{mult_k}) W_k*.

    ``embed[k]`` is a ``d x (n_k * mult_k)`` isometry whose column
    ``c * mult_k + m`` is the image of ``|c> (x) |m>``.
    """
    ambient_dim: int
    structure: FdAlgebra
    embed: tuple
    mult: tuple
    unit: np.ndarray
    origin: tuple = ()  # block index of the represented algebra, when known

    @property
    def dim(self):
        return self.structure.dim

    def to_matrix(self, x):
        out = np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        for w, m, mat in zip(self.embed, self.mult, x.mats):
            out += w @ np.kron(mat, np.eye(m)) @ la.dag(w)
        return out

    def from_matrix(self, t):
        """Block coordinates of an ambient matrix (compression to the first copy)."""
        mats = []
        for w, m, n in zip(self.embed, self.mult, self.structure.blocks):
            first = w[:, ::m] if m > 1 else w
            mats.append(la.dag(first) @ t @ first)
        return AlgElement(self.structure, tuple(mats))

    def basis(self):
        return [self.to_matrix(self.structure.unit(*u)) for u in self.structure.matrix_units()]

    def membership_residual(self, t):
        return float(np.max(np.abs(self.to_matrix(self.from_matrix(t)) - t))) if t.size else 0.0

    def contains(self, t, tol=1e-8):
        return self.membership_residual(t) <= tol

    def block_dims(self):
        return list(self.structure.blocks)

    def to_json(self):
        return {"ambient_dim": self.ambient_dim, "structure": self.structure.to_json(),
                "multiplicities": list(self.mult),
                "embed": [la.to_json(w) for w in self.embed]}


def _orthonormal_span(mats, tol_rel=la.TOL_REL):
    """Hilbert-Schmidt orthonormal basis of span(mats)."""
    if not mats:
        return []
    d = mats[0].shape[0]
    stack = np.array([m.reshape(-1) for m in mats]).T  # d^2 x k
    gram = la.dag(stack) @ stack
    vals, vecs = la.herm_eig(gram, tol=1e-6)
    cut = la.rank_cutoff(vals, tol_rel)
    keep = vals > cut
    coords = vecs[:, keep] / np.sqrt(vals[keep])
    basis = stack @ coords
    return [basis[:, k].reshape(d, d) for k in range(basis.shape[1])]


def _span_residual(basis, t):
    if not basis:
        return float(np.linalg.norm(t))
    stack = np.array([b.reshape(-1) for b in basis]).T
    v = t.reshape(-1)
    return float(np.linalg.norm(v - stack @ (la.dag(stack) @ v)))


def _clusters(vals, gap):
    groups, current = [], [0]
    for k in range(1, len(vals)):
        if vals[k] - vals[k - 1] > gap:
            groups.append(current)
            current = [k]
        else:
            current.append(k)
    groups.append(current)
    return groups


def _spectral_projections(h, gap):
    """Spectral projections of a Hermitian matrix, eigenvalues ascending."""
    vals, vecs = la.herm_eig(h, tol=1e-6)
    out = []
    for g in _clusters(vals, gap):
        v = vecs[:, g]
        out.append((float(np.mean(vals[g])), v @ la.dag(v)))
    return out, vals


def _random_hermitian_combo(basis, rng):
    h = sum(rng.normal() * b for b in basis)
    return (h + la.dag(h)) / 2


def recognize_structure(basis, tol=1e-8, seed=DEFAULT_SEED, max_retries=16):
    """Wedderburn decomposition of a *-closed subalgebra of M_d.

    ``basis`` spans the subalgebra.  Minimal central projections come from
    the spectrum of a seeded random self-adjoint central element; matrix
    units from the spectrum of a random self-adjoint element in each block.
    Blocks are ordered by descending size, ties by first occurrence.
    """
    mats = [np.asarray(b, dtype=complex) for b in basis]
    if not mats:
        raise NotSubalgebra("empty basis")
    d = mats[0].shape[0]
    onb = _orthonormal_span(mats)
    dim = len(onb)
    if dim == 0:
        raise NotSubalgebra("basis spans the zero space")
    scale = max(la.op_norm(b) for b in onb)
    for b in onb:
        if _span_residual(onb, la.dag(b)) > tol * max(1.0, scale):
            raise NotSubalgebra("span is not closed under adjoint")
    for a in onb:
        for b in onb:
            if _span_residual(onb, a @ b) > tol * max(1.0, scale ** 2):
                raise NotSubalgebra("span is not closed under products")

    unit = la.support_proj(sum(b @ la.dag(b) for b in onb))

    # center: coefficient vectors c with sum_i c_i [b_i, b_k] = 0 for all k
    cols = []
    for bi in onb:
        cols.append(np.concatenate([(bi @ bk - bk @ bi).reshape(-1) for bk in onb]))
    system = np.array(cols).T
    null = la.nullspace_hermitian(la.dag(system) @ system)
    center = [sum(c * b for c, b in zip(null[:, k], onb)) for k in range(null.shape[1])]
    herm_center = _orthonormal_span(
        [(z + la.dag(z)) / 2 for z in center] + [(z - la.dag(z)) / 2j for z in center])
    zdim = len(herm_center)

    uiso = la.range_isometry(unit)
    rng = as_rng(seed)
    for _ in range(max_retries):
        z = _random_hermitian_combo(herm_center, rng)
        projs, vals = _spectral_projections(la.dag(uiso) @ z @ uiso, gap=1e-6)
        if len(projs) == zdim:
            break
    else:
        raise NotSubalgebra("could not separate the center with random draws")
    central = [uiso @ p @ la.dag(uiso) for _, p in projs]

    blocks = []
    for zproj in central:
        block_basis = _orthonormal_span([zproj @ b @ zproj for b in onb])
        n = int(round(np.sqrt(len(block_basis))))
        if n * n != len(block_basis):
            raise NotSubalgebra(f"central summand of dimension {len(block_basis)} is not a full matrix block")
        ziso = la.range_isometry(zproj)
        rank = ziso.shape[1]
        if rank % n:
            raise NotSubalgebra("block rank not divisible by block size")
        mult = rank // n
        for _ in range(max_retries):
            h = _random_hermitian_combo(block_basis, rng)
            sp, _ = _spectral_projections(la.dag(ziso) @ h @ ziso, gap=1e-6)
            if len(sp) == n and all(abs(np.trace(p).real - mult) < 0.5 for _, p in sp):
                break
        else:
            raise NotSubalgebra("could not split block into minimal projections")
        minimal = [ziso @ p @ la.dag(ziso) for _, p in sp]
        f11 = minimal[0]
        partial = [f11]
        for fcc in minimal[1:]:
            y = sum(rng.normal() * (fcc @ b @ f11) for b in block_basis)
            lam = float(np.real(np.trace(la.dag(y) @ y))) / mult
            partial.append(y / np.sqrt(lam))
        v = la.range_isometry(f11)
        w = np.zeros((d, n * mult), dtype=complex)
        for c in range(n):
            for m in range(mult):
                w[:, c * mult + m] = partial[c] @ v[:, m]
        blocks.append((n, mult, w))

    order = sorted(range(len(blocks)), key=lambda k: (-blocks[k][0], k))
    blocks = [blocks[k] for k in order]
    structure = FdAlgebra(tuple(b[0] for b in blocks))
    sub = Subalgebra(d, structure, tuple(b[2] for b in blocks), tuple(b[1] for b in blocks), unit)
    if structure.dim != dim:
        raise NotSubalgebra(f"recognized dimension {structure.dim} != {dim}")
    for b in onb:
        if sub.membership_residual(b) > 1e-6 * max(1.0, la.op_norm(b)):
            raise NotSubalgebra("recognized structure does not reproduce the input")
    return sub


def commutant_basis(gens, tol_rel=la.TOL_REL):
    """Orthonormal basis of {T : T g = g T for all g}, via the Gram matrix
    of the stacked commutator operator T -> (T g_i - g_i T)_i."""
    gens = [np.asarray(g, dtype=complex) for g in gens]
    d = gens[0].shape[0]
    eye = np.eye(d)
    gram = np.zeros((d * d, d * d), dtype=complex)
    for g in gens:
        # row-major vec: vec(T g) = (1 (x) g^T) vec(T), vec(g T) = (g (x) 1) vec(T)
        op = np.kron(eye, g.T) - np.kron(g, eye)
        gram += la.dag(op) @ op
    null = la.nullspace_hermitian(gram, tol_rel)
    return [null[:, k].reshape(d, d) for k in range(null.shape[1])]


def commutant(gens, tol=1e-8, seed=DEFAULT_SEED):
    """Commutant of a set of matrices (closed under * internally)."""
    gens = [np.asarray(g, dtype=complex) for g in gens]
    closed = gens + [la.dag(g) for g in gens if not la.is_hermitian(g, 1e-12)]
    return recognize_structure(commutant_basis(closed), tol=tol, seed=seed)


def representation_commutant(rep, algebra, ambient_dim, anti=False, tol=1e-8):
    """Commutant of the image of a unital *-(anti)representation of an FdAlgebra.

    ``rep(i, k, l)`` returns the ambient matrix of the matrix unit
    ``E^{(i)}_{kl}``.  With blocks of size ``m_i`` and ``R(E^{(i)}_{00})`` of
    rank ``k_i``, the commutant is ``sum_i M_{k_i}`` with multiplicity
    ``m_i``; it is assembled directly from the matrix units.
    """
    embeds, mults, sizes = [], [], []
    for i, m in enumerate(algebra.blocks):
        q = rep(i, 0, 0)
        y = la.range_isometry(q)
        k = y.shape[1]
        if k == 0:
            continue
        w = np.zeros((ambient_dim, k * m), dtype=complex)
        for p in range(m):
            # image of the p-th copy: x E_{0p} for anti, E_{p0} x otherwise
            move = rep(i, 0, p) if anti else rep(i, p, 0)
            w[:, p::m] = move @ y
        embeds.append(w)
        mults.append(m)
        sizes.append(k)
    order = sorted(range(len(sizes)), key=lambda j: (-sizes[j], j))
    unit = sum((embeds[j] @ la.dag(embeds[j]) for j in order),
               np.zeros((ambient_dim, ambient_dim), dtype=complex))
    origins = [i for i, m in enumerate(algebra.blocks) if la.rank_psd(rep(i, 0, 0)) > 0]
    sub = Subalgebra(ambient_dim, FdAlgebra(tuple(sizes[j] for j in order)),
                     tuple(embeds[j] for j in order), tuple(mults[j] for j in order), unit,
                     tuple(origins[j] for j in order))
    iso_res = max((float(np.max(np.abs(la.dag(w) @ w - np.eye(w.shape[1])))) for w in sub.embed),
                  default=0.0)
    if iso_res > tol:
        raise NotSubalgebra(f"commutant embedding is not isometric (residual {iso_res:.2e})")
    return sub


def double_commutant_contains(gens, tol=1e-8):
    """Residual of the inclusion gens'' contains *-alg(gens)."""
    first = commutant_basis(gens + [la.dag(g) for g in gens])
    second = commutant_basis(first + [la.dag(b) for b in first])
    onb = _orthonormal_span(second)
    return max(_span_residual(onb, g) for g in gens)


def random_element(algebra, rng):
    return algebra.element([rng.ginibre(n, n) for n in algebra.blocks])


def random_effect(algebra, rng, rank=None):
    """Effect with random eigenbasis and eigenvalues uniform in [0, 1]."""
    mats = []
    for n in algebra.blocks:
        u = random_unitary(n, rng)
        vals = np.array([rng.uniform() for _ in range(n)])
        if rank is not None:
            vals[min(rank, n):] = 0.0
        mats.append(u @ np.diag(vals) @ la.dag(u))
    return algebra.element([(m + la.dag(m)) / 2 for m in mats])


def random_projection(algebra, rng, ranks=None):
    mats = []
    for i, n in enumerate(algebra.blocks):
        r = rng.integer(n + 1) if ranks is None else ranks[i]
        u = random_unitary(n, rng)[:, :r]
        mats.append(u @ la.dag(u))
    return algebra.element(mats)


def random_unitary(n, rng):
    q, r = np.linalg.qr(rng.ginibre(n, n))
    d = np.diag(r)
    return q * (d / np.where(np.abs(d) > 0, np.abs(d), 1.0))
