"""GNS, Stinespring and Paschke dilations of ncp-maps between FdAlgebras.

For phi: A -> B with Choi blocks ``C_ij`` of rank ``r_ij`` the Paschke
module is presented concretely: its j-th summand is the space of
``k_j x m_j`` matrices with ``k_j = sum_i n_i r_ij``, the B-valued inner
product is ``<x, y> = x^* y`` and B acts by right multiplication.  The
generator ``E^i_kl (x) E^j_pq`` sits in column ``q`` at rows ``(i, k, s)``
with value ``W_ij[s, l m_j + p]``, where ``W_ij`` stacks the canonical Kraus
operators of the ``(i, j)`` component (so ``W^* W = C_ij``).  Adjointable
operators are then ``t (x) 1_{m_j}``, i.e. ``P = sum_j M_{k_j}``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import cpmap as cp
from . import linalg as la
from .cpmap import CpMap
from .errors import (NotADilationTriple, NotIsomorphic, NotPositive, ShapeMismatch,
                     TargetNotFactor)
from .rng import as_rng
from .vnalg import (FdAlgebra, Subalgebra, central_carrier, commutant_basis,
                    random_effect, recognize_structure, representation_commutant, sqrt)

TOL = la.TOL


@dataclass(frozen=True, eq=False)
class DilationTriple:
    """A factorization phi = h o rho through an algebra P."""
    P: FdAlgebra
    rho: CpMap
    h: CpMap

    def residual(self, phi):
        return cp.max_deviation(cp.compose(self.h, self.rho), phi)


def check_triple(phi, triple, tol=1e-8):
    """Raise NotADilationTriple unless rho is nmiu and h o rho = phi."""
    if triple.rho.source != phi.source or triple.h.target != phi.target:
        raise NotADilationTriple("triple does not match the source/target of phi")
    if triple.rho.target != triple.P or triple.h.source != triple.P:
        raise NotADilationTriple("rho and h do not meet at P")
    res = triple.residual(phi)
    if res > tol:
        raise NotADilationTriple(f"h o rho differs from phi by {res:.2e}")
    nm = cp.nmiu_residual(triple.rho)
    if nm > tol:
        raise NotADilationTriple(f"rho is not nmiu (residual {nm:.2e})")
    return max(res, nm)


# --------------------------------------------------------------------------
# Shared factorization data


def _choi_factors(phi, tol=TOL):
    """W_ij (r x n m) and its pseudoinverse for every block pair."""
    out = {}
    for i, n in enumerate(phi.source.blocks):
        for j, m in enumerate(phi.target.blocks):
            ops = cp.kraus_from_choi(cp.choi(phi, i, j), n, m, tol)
            w = np.array([v.reshape(-1) for v in ops]) if ops else np.zeros((0, n * m), dtype=complex)
            out[(i, j)] = (w, la.pinv(w) if len(ops) else np.zeros((n * m, 0), dtype=complex))
    return out


def _layout(phi, factors):
    """Row offsets of (i, k, s) inside each nonzero target summand."""
    sizes, offsets = {}, {}
    for j in range(len(phi.target.blocks)):
        acc = 0
        for i, n in enumerate(phi.source.blocks):
            offsets[(i, j)] = acc
            acc += n * factors[(i, j)][0].shape[0]
        sizes[j] = acc
    return sizes, offsets


def _left_kraus(phi, factors, offsets, live):
    """Kraus family of a -> (sum_i a_i (x) 1_{r_ij})_j."""
    kraus = {}
    for jj, j in enumerate(live):
        k_j = None
        for i, n in enumerate(phi.source.blocks):
            r = factors[(i, j)][0].shape[0]
            if r == 0:
                continue
            k_j = k_j or sum(phi.source.blocks[t] * factors[(t, j)][0].shape[0]
                             for t in range(len(phi.source.blocks)))
            ops = []
            for s in range(r):
                e = np.zeros((n, k_j), dtype=complex)
                for k in range(n):
                    e[k, offsets[(i, j)] + k * r + s] = 1.0
                ops.append(e)
            kraus[(i, jj)] = tuple(ops)
    return kraus


def _cyclic_kraus(phi, factors, offsets, sizes, live):
    """Xi_j with Xi_j[(i, k, s), p] = W_ij[s, k m + p], the image of 1 (x) 1."""
    out = []
    for j in live:
        m = phi.target.blocks[j]
        xi = np.zeros((sizes[j], m), dtype=complex)
        for i, n in enumerate(phi.source.blocks):
            w = factors[(i, j)][0]
            r = w.shape[0]
            for k in range(n):
                for s in range(r):
                    xi[offsets[(i, j)] + k * r + s, :] = w[s, k * m:(k + 1) * m]
        out.append(xi)
    return out


# --------------------------------------------------------------------------
# Stinespring and GNS


@dataclass(frozen=True, eq=False)
class StinespringDilation:
    """phi(a) = V^* rho(a) V with rho: A -> M_K nmiu and V a K x n matrix."""
    K_dim: int
    rho: CpMap
    V: np.ndarray

    def lifted(self):
        """The triple (M_K, rho, ad_V)."""
        big = FdAlgebra((self.K_dim,))
        return DilationTriple(big, self.rho, cp.ad(self.V, big, FdAlgebra((self.V.shape[1],))))

    def minimality_rank(self):
        """dim span{rho(a) V x}."""
        vecs = [cp.apply(self.rho, self.rho.source.unit(*u)).mats[0] @ self.V
                for u in self.rho.source.matrix_units()]
        if not vecs or self.K_dim == 0:
            return 0
        stack = np.hstack(vecs)
        return la.rank_psd(stack @ la.dag(stack))


def stinespring_gram(phi):
    """Gram matrix <a (x) x, b (x) y> = <x, phi(a^* b) y> over the generators
    E^i_kl (x) e_x, evaluated directly from phi."""
    if len(phi.target.blocks) != 1:
        raise TargetNotFactor(f"target {phi.target} is not a single block")
    n = phi.target.blocks[0]
    units = phi.source.matrix_units()
    elems = [phi.source.unit(*u) for u in units]
    gram = np.zeros((len(units) * n, len(units) * n), dtype=complex)
    for s, ea in enumerate(elems):
        for t, eb in enumerate(elems):
            prod = ea.adj() @ eb
            if prod.norm() == 0:
                continue
            gram[s * n:(s + 1) * n, t * n:(t + 1) * n] = cp.apply(phi, prod).mats[0]
    return gram


def stinespring_minimal(phi, tol=TOL):
    """Minimal Stinespring dilation of phi: A -> M_n built from the Gram form."""
    if len(phi.target.blocks) != 1:
        raise TargetNotFactor(f"target {phi.target} has {len(phi.target.blocks)} blocks; embed it first")
    factors = _choi_factors(phi, tol)
    sizes, offsets = _layout(phi, factors)
    k = sizes[0]
    big = FdAlgebra((k,)) if k else FdAlgebra(())
    live = [0] if k else []
    rho = CpMap(phi.source, big, _left_kraus(phi, factors, offsets, live))
    v = _cyclic_kraus(phi, factors, offsets, sizes, live)
    v = v[0] if v else np.zeros((0, phi.target.blocks[0]), dtype=complex)
    return StinespringDilation(k, rho, v)


def stinespring_tensor_form(phi, tol=TOL):
    """(r, W) with phi(a) = W^* (a (x) 1_r) W for phi between single blocks."""
    if len(phi.source.blocks) != 1 or len(phi.target.blocks) != 1:
        raise TargetNotFactor("source and target must be single blocks")
    n, m = phi.source.blocks[0], phi.target.blocks[0]
    ops = cp.kraus_from_choi(cp.choi(phi, 0, 0), n, m, tol)
    r = len(ops)
    w = np.zeros((n * r, m), dtype=complex)
    for s, v in enumerate(ops):
        w += np.kron(v, np.eye(r)[:, [s]])
    return r, w


def functional(alg, densities, tol=TOL):
    """The functional a -> sum_i tr(d_i a_i) as a map alg -> C."""
    kraus = {}
    for i, (n, d) in enumerate(zip(alg.blocks, densities)):
        d = np.asarray(d, dtype=complex)
        if d.shape != (n, n):
            raise ShapeMismatch(f"density {d.shape} for block of size {n}")
        if not la.is_hermitian(d, tol) or la.min_eig(d) < -tol:
            raise NotPositive(f"density for block {i} is not positive")
        ops = cp.kraus_from_choi(d.T, n, 1, tol)
        if ops:
            kraus[(i, 0)] = ops
    return CpMap(alg, FdAlgebra((1,)), kraus)


def gns(omega, tol=TOL):
    """GNS triple (H_dim, rho, x) with omega(a) = <x, rho(a) x>."""
    if omega.target.blocks != (1,):
        raise ShapeMismatch("a functional has target C")
    if cp.min_choi_eig(omega) < -tol:
        raise NotPositive("functional is not positive")
    st = stinespring_minimal(omega, tol)
    return st.K_dim, st.rho, st.V[:, 0] if st.K_dim else np.zeros(0, dtype=complex)


# --------------------------------------------------------------------------
# Paschke dilation


@dataclass(frozen=True, eq=False)
class PaschkeModule:
    """The Hilbert B-module X of phi in matrix coordinates.

    ``coords[g]`` is ``(jj, x)``: the generator ``gens[g]`` lives in the
    summand ``jj`` of P as the ``k x m`` matrix ``x``.  ``basis`` lists
    ``(jj, c)``: the vector with a single 1 at row c, column 0, whose norm
    is the projection ``E_00`` of the corresponding block of B.
    """
    A: FdAlgebra
    B: FdAlgebra
    phi: CpMap
    live: tuple
    gens: tuple
    coords: tuple
    basis: tuple
    shapes: tuple

    def inner(self, x, y):
        """B-valued inner product of vectors given as per-summand matrices."""
        mats = [np.zeros((m, m), dtype=complex) for m in self.B.blocks]
        for jj, j in enumerate(self.live):
            mats[j] = la.dag(x[jj]) @ y[jj]
        return self.B.element(mats)

    def vector(self, g):
        jj, x = self.coords[g]
        out = [np.zeros(s, dtype=complex) for s in self.shapes]
        if jj is not None:
            out[jj] = x
        return out

    def basis_vector(self, idx):
        jj, c = self.basis[idx]
        out = [np.zeros(s, dtype=complex) for s in self.shapes]
        out[jj][c, 0] = 1.0
        return out

    def gram(self, g1, g2):
        return self.inner(self.vector(g1), self.vector(g2))

    def gram_direct(self, g1, g2):
        """b^* phi(a^* alpha) beta recomputed from phi."""
        (i, k, l, j, p, q), (i2, k2, l2, j2, p2, q2) = self.gens[g1], self.gens[g2]
        a = self.A.unit(i, k, l)
        alpha = self.A.unit(i2, k2, l2)
        b = self.B.unit(j, p, q)
        beta = self.B.unit(j2, p2, q2)
        return b.adj() @ cp.apply(self.phi, a.adj() @ alpha) @ beta

    def parseval_residual(self):
        """max over generators of |<x,x> - sum_g <x,e_g><e_g,x>|."""
        worst = 0.0
        es = [self.basis_vector(t) for t in range(len(self.basis))]
        for g in range(len(self.gens)):
            x = self.vector(g)
            lhs = self.inner(x, x)
            rhs = self.B.zero()
            for e in es:
                xe = self.inner(x, e)
                rhs = rhs + xe @ xe.adj()
            worst = max(worst, lhs.dist(rhs))
        return worst

    def basis_norm_residual(self):
        """max |e <e, e> - e| over the basis."""
        worst = 0.0
        for t, (jj, _) in enumerate(self.basis):
            e = self.basis_vector(t)
            nrm = self.inner(e, e).mats[self.live[jj]]
            worst = max(worst, float(np.max(np.abs(e[jj] @ nrm - e[jj]))))
        return worst


@dataclass(frozen=True, eq=False)
class PaschkeDilation:
    phi: CpMap
    P: FdAlgebra
    sub: Subalgebra
    rho: CpMap
    h: CpMap
    module: PaschkeModule
    unit_vec: tuple
    factors: dict = field(repr=False)
    offsets: dict = field(repr=False)
    residuals: dict = field(default_factory=dict)

    def triple(self):
        return DilationTriple(self.P, self.rho, self.h)

    @property
    def live(self):
        return self.module.live

    def h_from_module(self, t):
        """h(T) = <1 (x) 1, T (1 (x) 1)> from module data."""
        x = [t.mats[jj] @ xi for jj, xi in enumerate(self.unit_vec)]
        return self.module.inner(list(self.unit_vec), x)

    def right_action(self, j, p, q):
        """Matrix on X (row-major vec per summand) of x -> x E^j_pq."""
        d = self.sub.ambient_dim
        out = np.zeros((d, d), dtype=complex)
        acc = 0
        for jj, jb in enumerate(self.live):
            k, m = self.module.shapes[jj]
            if jb == j:
                e = np.zeros((m, m))
                e[p, q] = 1.0
                out[acc:acc + k * m, acc:acc + k * m] = np.kron(np.eye(k), e.T)
            acc += k * m
        return out

    def left_action(self, t):
        return self.sub.to_matrix(t)


def paschke(phi, tol=TOL, verify=True):
    """Paschke dilation (P, rho, h) of phi."""
    A, B = phi.source, phi.target
    factors = _choi_factors(phi, tol)
    sizes, offsets = _layout(phi, factors)
    live = tuple(j for j in range(len(B.blocks)) if sizes[j] > 0)
    P = FdAlgebra(tuple(sizes[j] for j in live))
    rho = CpMap(A, P, _left_kraus(phi, factors, offsets, live))
    xis = _cyclic_kraus(phi, factors, offsets, sizes, live)
    h = CpMap(P, B, {(jj, j): (xis[jj],) for jj, j in enumerate(live)})

    shapes = tuple((sizes[j], B.blocks[j]) for j in live)
    pos = {j: jj for jj, j in enumerate(live)}
    gens, coords = [], []
    for i, n in enumerate(A.blocks):
        for k in range(n):
            for l in range(n):
                for j, m in enumerate(B.blocks):
                    w = factors[(i, j)][0]
                    r = w.shape[0]
                    for p in range(m):
                        for q in range(m):
                            gens.append((i, k, l, j, p, q))
                            if r == 0:
                                coords.append((None, None))
                                continue
                            x = np.zeros(shapes[pos[j]], dtype=complex)
                            x[offsets[(i, j)] + k * r:offsets[(i, j)] + (k + 1) * r, q] = w[:, l * m + p]
                            coords.append((pos[j], x))
    basis = tuple((jj, c) for jj, (k, _) in enumerate(shapes) for c in range(k))
    module = PaschkeModule(A, B, phi, live, tuple(gens), tuple(coords), basis, shapes)

    dim_x = sum(k * m for k, m in shapes)
    embeds, acc = [], 0
    for k, m in shapes:
        w = np.zeros((dim_x, k * m), dtype=complex)
        w[acc:acc + k * m, :] = np.eye(k * m)
        embeds.append(w)
        acc += k * m
    sub = Subalgebra(dim_x, P, tuple(embeds), tuple(m for _, m in shapes),
                     np.eye(dim_x, dtype=complex), live)
    d = PaschkeDilation(phi, P, sub, rho, h, module, tuple(xis), factors, offsets, {})
    if verify:
        d.residuals.update(_verify_paschke(d))
    return d


def _verify_paschke(d):
    """Residuals of the defining properties of a freshly built dilation."""
    phi, res = d.phi, {}
    res["h_rho"] = cp.max_deviation(cp.compose(d.h, d.rho), phi)
    res["rho_nmiu"] = cp.nmiu_residual(d.rho)
    gram = 0.0
    for (i, j), (w, _) in d.factors.items():
        if w.shape[0]:
            gram = max(gram, float(np.max(np.abs(la.dag(w) @ w - cp.choi(phi, i, j)))))
    res["gram"] = gram
    # P is the commutant of the right B-action (recomputed independently)
    if d.sub.ambient_dim:
        rights = {(j, p, q): d.right_action(j, p, q)
                  for j, m in enumerate(phi.target.blocks) for p in range(m) for q in range(m)}
        comm = representation_commutant(lambda j, p, q: rights[(j, p, q)], phi.target,
                                        d.sub.ambient_dim, anti=True)
        if sorted(comm.structure.blocks) != sorted(d.P.blocks):
            raise NotIsomorphic(f"commutant {comm.structure} differs from {d.P}")
        res["commutant"] = max(comm.membership_residual(t) for t in d.sub.basis())
        # trace-pairing adjoint equals the module adjoint for the P generators
        adj = 0.0
        for t in d.sub.basis():
            for rmat in rights.values():
                adj = max(adj, float(np.max(np.abs(t @ rmat - rmat @ t))))
        res["right_action_commutes"] = adj
    else:
        res["commutant"] = 0.0
        res["right_action_commutes"] = 0.0
    res["h_module"] = max((d.h_from_module(d.P.unit(*u)).dist(cp.apply(d.h, d.P.unit(*u)))
                           for u in d.P.matrix_units()), default=0.0)
    res["uniqueness_rank_defect"] = d.P.dim - _generation_rank(d)
    return res


def _generation_rank(d):
    """sum_j rank span{rho(a) Xi_j e_p}, equal to sum_j k_j iff X is generated by
    rho(A)(1 (x) 1)B, i.e. iff mediating maps into d are unique."""
    total = 0
    for jj, xi in enumerate(d.unit_vec):
        cols = [cp.apply(d.rho, d.phi.source.unit(*u)).mats[jj] @ xi
                for u in d.phi.source.matrix_units()]
        stack = np.hstack(cols)
        k = stack.shape[0]
        total += la.rank_psd(stack @ la.dag(stack)) ** 2 if k else 0
    return total


def paschke_module_checks(d):
    """Parseval identity and projection-valued basis norms."""
    return {"parseval": d.module.parseval_residual(),
            "basis_norm": d.module.basis_norm_residual()}


# --------------------------------------------------------------------------
# Mediating maps and isomorphisms


def as_triple(x):
    if isinstance(x, DilationTriple):
        return x
    if isinstance(x, PaschkeDilation):
        return x.triple()
    if isinstance(x, StinespringDilation):
        return x.lifted()
    raise TypeError(f"not a dilation: {type(x).__name__}")


def mediating_map(d, triple, tol=1e-8):
    """The unique ncp sigma: P' -> P with sigma o rho' = rho and h o sigma = h'.

    sigma(c) is the operator on X with
    <a (x) b, sigma(c) alpha (x) beta> = b^* h'(rho'(a)^* c rho'(alpha)) beta,
    which reduces to a Kraus family of sigma.
    """
    triple = as_triple(triple)
    check_triple(d.phi, triple, tol)
    A, Pp = d.phi.source, triple.P
    kraus = {}
    for jj, j in enumerate(d.live):
        k_j, m = d.module.shapes[jj]
        for b, d_b in enumerate(Pp.blocks):
            for kop in triple.h.kraus.get((b, j), ()):
                q = np.zeros((k_j, d_b), dtype=complex)
                for i, n in enumerate(A.blocks):
                    w, wp = d.factors[(i, j)]
                    r = w.shape[0]
                    if r == 0:
                        continue
                    off = d.offsets[(i, j)]
                    for rop in triple.rho.kraus.get((i, b), ()):
                        z = wp.T @ (rop @ kop).reshape(-1)  # length r
                        q[off:off + n * r, :] += np.einsum("s,kd->ksd", np.conj(z), rop).reshape(n * r, d_b)
                kraus.setdefault((b, jj), []).append(la.dag(q))
    return CpMap(Pp, d.P, kraus)


def mediating_residuals(d, triple, sigma):
    triple = as_triple(triple)
    return {"sigma_rho": cp.max_deviation(cp.compose(sigma, triple.rho), d.rho),
            "h_sigma": cp.max_deviation(cp.compose(d.h, sigma), triple.h)}


@dataclass(frozen=True, eq=False)
class DilationIso:
    theta: CpMap
    inverse: CpMap
    residuals: dict

    @property
    def max_residual(self):
        return max(self.residuals.values(), default=0.0)


def dilation_iso(d1, d2, tol=1e-7):
    """The nmiu isomorphism theta: P1 -> P2 with theta o rho1 = rho2, h2 o theta = h1.

    At least one of the two must be a constructed PaschkeDilation; the
    other may be any dilation triple of the same map.
    """
    t1, t2 = as_triple(d1), as_triple(d2)
    if isinstance(d2, PaschkeDilation):
        theta = mediating_map(d2, t1)
        back = mediating_map(d1, t2) if isinstance(d1, PaschkeDilation) else None
    elif isinstance(d1, PaschkeDilation):
        back = mediating_map(d1, t2)
        theta = None
    else:
        raise TypeError("dilation_iso needs a PaschkeDilation on one side")
    if theta is None:
        theta = _invert(back, tol)
    if back is None:
        back = _invert(theta, tol)
    res = {
        "theta_rho": cp.max_deviation(cp.compose(theta, t1.rho), t2.rho),
        "h_theta": cp.max_deviation(cp.compose(t2.h, theta), t1.h),
        "theta_nmiu": cp.nmiu_residual(theta),
        "inverse_nmiu": cp.nmiu_residual(back),
        "left_inverse": cp.max_deviation(cp.compose(back, theta), cp.identity(t1.P)),
        "right_inverse": cp.max_deviation(cp.compose(theta, back), cp.identity(t2.P)),
    }
    iso = DilationIso(theta, back, res)
    if iso.max_residual > tol:
        raise NotIsomorphic(f"mediating maps are not mutually inverse isomorphisms: {res}")
    return iso


def _invert(f, tol):
    if f.source.dim != f.target.dim:
        raise NotIsomorphic(f"{f.source} and {f.target} have different dimensions")
    mat = cp.superop(f)
    sv = la.svdvals(mat)
    if len(sv) and sv[-1] < 1e-8:
        raise NotIsomorphic(f"mediating map is singular (smallest singular value {sv[-1]:.2e})")
    try:
        return cp.from_superop(np.linalg.inv(mat), f.target, f.source, tol=max(tol, 1e-8))
    except ValueError as exc:
        raise NotIsomorphic(f"inverse is not completely positive: {exc}") from exc


# --------------------------------------------------------------------------
# Structural theorems


def injectivity_check(d, phi=None, tol=TOL):
    """(ceil rho, central carrier of ceil phi, equal) for audit."""
    phi = phi or d.phi
    ceil_rho = cp.image(d.rho, tol)
    cc = central_carrier(cp.image(phi, tol), tol)
    return ceil_rho, cc, ceil_rho.dist(cc) <= tol


def rho_commutant(d, tol=1e-8):
    """rho(A)' inside P as a list of (block index, Subalgebra of M_{k_j})."""
    out = []
    for jj, (k, _) in enumerate(d.module.shapes):
        gens = [cp.apply(d.rho, d.phi.source.unit(*u)).mats[jj] for u in d.phi.source.matrix_units()]
        basis = commutant_basis(gens + [la.dag(g) for g in gens])
        out.append((jj, recognize_structure(basis, tol=tol)))
    return out


def commutant_basis_in_P(d, comm=None):
    """Hilbert-Schmidt basis of rho(A)' as elements of P."""
    comm = comm if comm is not None else rho_commutant(d)
    out = []
    for jj, sub in comm:
        for mat in sub.basis():
            mats = [np.zeros((k, k), dtype=complex) for k, _ in d.module.shapes]
            mats[jj] = mat
            out.append(d.P.element(mats))
    return out


def random_commutant_effect(d, rng, comm=None):
    comm = comm if comm is not None else rho_commutant(d)
    mats = [np.zeros((k, k), dtype=complex) for k, _ in d.module.shapes]
    for jj, sub in comm:
        mats[jj] = sub.to_matrix(random_effect(sub.structure, rng))
    return d.P.element(mats)


def phi_t(d, t):
    """a -> h(t rho(a)) for an effect t in rho(A)'."""
    def fn(a):
        return cp.apply(d.h, t @ cp.apply(d.rho, a))
    return cp.from_function(d.phi.source, d.phi.target, fn, tol=1e-8)


def phi_t_superop(d, t):
    cols = [cp.apply(d.h, t @ cp.apply(d.rho, d.phi.source.unit(*u))).vector()
            for u in d.phi.source.matrix_units()]
    return np.array(cols).T


def commutant_from_map(d, psi):
    """The t in rho(A)' with psi = phi_t, via the Gram form of psi on X."""
    mats = []
    for jj, j in enumerate(d.live):
        k, _ = d.module.shapes[jj]
        t = np.zeros((k, k), dtype=complex)
        for i, n in enumerate(d.phi.source.blocks):
            w, wp = d.factors[(i, j)]
            r = w.shape[0]
            if r == 0:
                continue
            blk = la.dag(wp) @ cp.choi(psi, i, j) @ wp
            off = d.offsets[(i, j)]
            t[off:off + n * r, off:off + n * r] = np.kron(np.eye(n), blk)
        mats.append(t)
    return d.P.element(mats)


def order_correspondence(d, samples=50, seed=0, tol=1e-8):
    """Sampled check that t -> phi_t is an order isomorphism onto [0, phi]."""
    rng = as_rng(seed)
    phi = d.phi
    comm = rho_commutant(d)
    basis = commutant_basis_in_P(d, comm)
    worst = {"ncp": 0.0, "below_phi": 0.0, "order": 0.0, "round_trip": 0.0,
             "endpoint_one": cp.max_deviation(phi_t(d, d.P.one()), phi) if d.P.dim else 0.0}
    # injectivity of the linear map t -> phi_t on the commutant
    if basis:
        mat = np.array([phi_t_superop(d, t).reshape(-1) for t in basis]).T
        sv = la.svdvals(mat)
        inj_margin = float(sv[-1]) if len(sv) >= len(basis) else 0.0
    else:
        inj_margin = float("inf")
    pair_ratio = float("inf")
    prev = None
    one = d.P.one()
    for _ in range(samples):
        t1 = random_commutant_effect(d, rng, comm)
        r = random_commutant_effect(d, rng, comm)
        c = sqrt(one - t1, tol=1e-8)
        t2 = t1 + c @ r @ c
        s1, s2 = phi_t_superop(d, t1), phi_t_superop(d, t2)
        sp = cp.superop(phi)
        worst["ncp"] = max(worst["ncp"], -cp.choi_min_eig_of_superop(s1, phi.source, phi.target))
        worst["below_phi"] = max(worst["below_phi"], -cp.choi_min_eig_of_superop(sp - s1, phi.source, phi.target))
        worst["order"] = max(worst["order"], -cp.choi_min_eig_of_superop(s2 - s1, phi.source, phi.target))
        psi = cp.from_superop(s1, phi.source, phi.target, tol=1e-8)
        worst["round_trip"] = max(worst["round_trip"], commutant_from_map(d, psi).dist(t1))
        if prev is not None:
            dt = (t1 - prev[0]).norm()
            if dt > 1e-6:
                pair_ratio = min(pair_ratio, float(np.max(np.abs(s1 - prev[1]))) / dt)
        prev = (t1, s1)
    checks = {name: max(val, 0.0) for name, val in worst.items()}
    ok = all(v <= tol for k, v in checks.items() if k != "round_trip") and checks["round_trip"] <= 1e-7
    ok = ok and inj_margin > 1e-8 and pair_ratio > 0
    return {"samples": samples, "seed": seed, "commutant": [str(s.structure) for _, s in comm],
            "residuals": checks, "injectivity_margin": inj_margin,
            "min_pair_ratio": pair_ratio, "status": "pass" if ok else "fail"}


def ncp_extreme_check(phi, tol=1e-8):
    """phi is ncp-extreme iff h is injective on rho(A)'."""
    d = paschke(phi, verify=False)
    basis = commutant_basis_in_P(d)
    if not basis:
        return True
    mat = np.array([cp.apply(d.h, t).vector() for t in basis]).T
    sv = la.svdvals(mat)
    return len(sv) >= len(basis) and float(sv[len(basis) - 1]) > tol


def dilation_tensor(d1, d2, tol=1e-7):
    """(P1 (x) P2, rho1 (x) rho2, h1 (x) h2) and its iso to paschke(phi1 (x) phi2)."""
    phi = cp.tensor(d1.phi, d2.phi)
    triple = DilationTriple(d1.P.tensor(d2.P), cp.tensor(d1.rho, d2.rho), cp.tensor(d1.h, d2.h))
    direct = paschke(phi, verify=False)
    iso = dilation_iso(triple, direct, tol)
    return triple, direct, iso


def paschke_basics(phi, lam=0.5, other=None, tol=1e-7):
    """Residuals for: dilation of a scaled map, and of a paired map."""
    d = paschke(phi, verify=False)
    out = {}
    scaled = cp.scale(phi, lam)
    iso = dilation_iso(DilationTriple(d.P, d.rho, cp.scale(d.h, lam)), paschke(scaled, verify=False), tol)
    out["scaled"] = iso.max_residual
    if other is not None:
        d2 = paschke(other, verify=False)
        paired = cp.pair_target(phi, other)
        triple = DilationTriple(d.P.direct_sum(d2.P), cp.pair_target(d.rho, d2.rho),
                                cp.direct_sum_maps(d.h, d2.h))
        out["paired"] = dilation_iso(triple, paschke(paired, verify=False), tol).max_residual
    return out
