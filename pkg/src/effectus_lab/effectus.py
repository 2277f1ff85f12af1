"""Effectus operations on finite-dimensional von Neumann algebras.

Maps are CpMaps in the Heisenberg direction, so a composite written
``f o g`` in the effectus reads ``compose(g, f)`` here.  For a projection
``s`` with range isometry ``u``:

* ``comprehension(s)`` is ``pi_s``: ``b -> u^* b u`` (onto the corner),
* ``quotient(s)`` is ``zeta_s``: ``x -> u x u^*`` (from the corner),

so that ``compose(quotient(s), comprehension(s)) = asrt_s`` and
``compose(comprehension(s), quotient(s)) = id``.
"""
from dataclasses import dataclass

import numpy as np

from . import cpmap as cp
from . import linalg as la
from .cpmap import CpMap
from .errors import NotEffect, NotPure, NotSharp, UniversalPropertyViolated
from .rng import as_rng
from .vnalg import (FdAlgebra, ceil, commutant, floor, is_effect, is_projection, random_effect,
                    random_projection, random_unitary, require_effect, require_projection)

TOL = la.TOL


def asrt(p, tol=TOL):
    """b -> sqrt(p) b sqrt(p)."""
    require_effect(p, tol)
    alg = p.algebra
    return CpMap(alg, alg, {(i, i): (la.sqrt_psd(m, tol),) for i, m in enumerate(p.mats)})


def seqprod(p, q, tol=TOL):
    """p & q = sqrt(p) q sqrt(p)."""
    require_effect(p, tol)
    require_effect(q, tol)
    r = p.map_blocks(lambda m: la.sqrt_psd(m, tol))
    out = r @ q @ r
    return out.map_blocks(lambda m: (m + la.dag(m)) / 2)


def sqrt_effect(p, tol=TOL):
    """The unique effect q with q & q = p."""
    require_effect(p, tol)
    q = p.map_blocks(lambda m: la.sqrt_psd(m, tol))
    if (q @ p - p @ q).norm() > 1e-8:
        raise NotEffect("square root does not commute with its square")
    return q


def _range_isometries(proj):
    return [la.range_isometry(m) if m.size else np.zeros((0, 0), dtype=complex) for m in proj.mats]


def _corner_maps(alg, isos):
    keep = [i for i, u in enumerate(isos) if u.shape[1] > 0]
    corner = FdAlgebra(tuple(isos[i].shape[1] for i in keep))
    pi = CpMap(alg, corner, {(i, t): (isos[i],) for t, i in enumerate(keep)})
    zeta = CpMap(corner, alg, {(t, i): (la.dag(isos[i]),) for t, i in enumerate(keep)})
    return corner, pi, zeta


def comprehension(s, tol=TOL):
    """pi_s: b -> u^* b u onto the corner of a projection s."""
    require_projection(s, tol, NotSharp)
    return _corner_maps(s.algebra, _range_isometries(s))[1]


def quotient(s, tol=TOL):
    """zeta_s: x -> u x u^* from the corner of a projection s."""
    require_projection(s, tol, NotSharp)
    return _corner_maps(s.algebra, _range_isometries(s))[2]


# --------------------------------------------------------------------------
# Standard corners and filters


@dataclass(frozen=True, eq=False)
class CornerPresentation:
    p: object
    floor_p: object
    corner_alg: FdAlgebra
    pi: CpMap
    embed: tuple

    def residuals(self):
        alg = self.p.algebra
        one = self.corner_alg.one()
        return {"pi_total": cp.apply(self.pi, alg.one()).dist(one),
                "pi_p": cp.apply(self.pi, self.p).dist(cp.apply(self.pi, alg.one()))}


def standard_corner(p, tol=TOL):
    """b -> floor(p) b floor(p), presented on the corner algebra."""
    require_effect(p, tol)
    fp = floor(p, tol)
    isos = _range_isometries(fp)
    corner, pi, _ = _corner_maps(p.algebra, isos)
    return CornerPresentation(p, fp, corner, pi, tuple(isos))


def _solve_right(target_mat, known_mat, tol):
    """X with X @ known = target, plus residual and uniqueness flag."""
    x = target_mat @ la.pinv(known_mat)
    res = float(np.max(np.abs(x @ known_mat - target_mat))) if target_mat.size else 0.0
    rank = int(np.sum(la.svdvals(known_mat) > 1e-9)) if known_mat.size else 0
    return x, res, rank == known_mat.shape[0]


def corner_factor(f, corner, tol=1e-8):
    """The unique f' with f' o pi = f (needs f(p) = f(1))."""
    if isinstance(corner, CornerPresentation):
        pres = corner
    else:
        pres = standard_corner(corner)
    dev = cp.apply(f, pres.p).dist(cp.apply(f, pres.p.algebra.one()))
    if dev > tol:
        raise UniversalPropertyViolated(f"f(p) differs from f(1) by {dev:.2e}")
    x, res, unique = _solve_right(cp.superop(f), cp.superop(pres.pi), tol)
    if res > tol or not unique:
        raise UniversalPropertyViolated(f"no unique factorization (residual {res:.2e})")
    return cp.from_superop(x, pres.corner_alg, f.target, tol=tol)


@dataclass(frozen=True, eq=False)
class FilterPresentation:
    """c_b: x -> sqrt(b) u x u^* sqrt(b) from the corner of ceil(b)."""
    b: object
    ceil_b: object
    filter_alg: FdAlgebra
    c: CpMap
    embed: tuple

    def residuals(self):
        return {"c_one": cp.apply(self.c, self.filter_alg.one()).dist(self.b),
                "kernel_dim": self.filter_alg.dim - _rank(cp.superop(self.c))}


def _rank(mat):
    return int(np.sum(la.svdvals(mat) > 1e-9)) if mat.size else 0


def standard_filter(b, tol=TOL):
    require_effect(b, tol)
    cb = ceil(b, tol)
    isos = _range_isometries(cb)
    keep = [i for i, u in enumerate(isos) if u.shape[1] > 0]
    alg = FdAlgebra(tuple(isos[i].shape[1] for i in keep))
    c = CpMap(alg, b.algebra, {(t, i): (la.dag(isos[i]) @ la.sqrt_psd(b.mats[i], tol),)
                               for t, i in enumerate(keep)})
    return FilterPresentation(b, cb, alg, c, tuple(isos))


def filter_factor(f, filt, tol=1e-8):
    """The unique f' with c_b o f' = f (needs f(1) <= b)."""
    pres = filt if isinstance(filt, FilterPresentation) else standard_filter(filt)
    if not cp.loewner_leq(cp.apply(f, f.source.one()), pres.b, tol):
        raise UniversalPropertyViolated("f(1) is not below b")
    known = cp.superop(pres.c)
    target = cp.superop(f)
    x = la.pinv(known) @ target
    res = float(np.max(np.abs(known @ x - target))) if target.size else 0.0
    if res > tol or _rank(known) != pres.filter_alg.dim:
        raise UniversalPropertyViolated(f"no unique factorization (residual {res:.2e})")
    return cp.from_superop(x, f.source, pres.filter_alg, tol=tol)


# --------------------------------------------------------------------------
# Purity and the dagger


def is_pure(f, tol=TOL):
    """Pure iff the nmiu part of the Paschke dilation is surjective."""
    from .dilation import paschke
    d = paschke(f, verify=False)
    return _rank(cp.superop(d.rho)) == d.P.dim


@dataclass(frozen=True, eq=False)
class PureFactorization:
    """f = asrt_q o zeta_c o alpha o pi_e (Heisenberg composition),
    q = f(1), c = ceil(q), e = im f."""
    f: CpMap
    im_f: object
    one_f: object
    alpha: CpMap
    parts: tuple

    def recompose(self):
        pi_e, alpha, zeta_c, asrt_q = self.parts
        return cp.compose_all(asrt_q, zeta_c, alpha, pi_e)

    def residual(self):
        return cp.max_deviation(self.recompose(), self.f)


def _alpha(f, tol):
    """alpha(x) = u_c^* q^{+1/2} f(u_e x u_e^*) q^{+1/2} u_c between corners."""
    q = cp.apply(f, f.source.one())
    e = cp.image(f, tol)
    c = ceil(q, tol)
    ue, uc = _range_isometries(e), _range_isometries(c)
    qi = [la.pinv_sqrt_psd(m, tol) for m in q.mats]
    src_keep = [i for i, u in enumerate(ue) if u.shape[1]]
    tgt_keep = [j for j, u in enumerate(uc) if u.shape[1]]
    src = FdAlgebra(tuple(ue[i].shape[1] for i in src_keep))
    tgt = FdAlgebra(tuple(uc[j].shape[1] for j in tgt_keep))
    kraus = {}
    for si, i in enumerate(src_keep):
        for tj, j in enumerate(tgt_keep):
            ops = [la.dag(ue[i]) @ v @ qi[j] @ uc[j] for v in f.kraus.get((i, j), ())]
            if ops:
                kraus[(si, tj)] = tuple(ops)
    return q, e, c, CpMap(src, tgt, kraus)


def alpha_is_iso(f, tol=TOL):
    """Smallest singular value of alpha (> 1e-8 for pure maps) and its nmiu residual."""
    _, _, _, alpha = _alpha(f, tol)
    if alpha.source.dim != alpha.target.dim:
        return 0.0, float("inf")
    sv = la.svdvals(cp.superop(alpha))
    smin = float(sv[-1]) if len(sv) else float("inf")
    return smin, cp.nmiu_residual(alpha)


def pure_factor(f, tol=TOL):
    if not is_pure(f, tol):
        raise NotPure("map is not pure")
    q, e, c, alpha = _alpha(f, tol)
    smin, nm = alpha_is_iso(f, tol)
    if smin <= 1e-8 or nm > 1e-7:
        raise NotPure(f"compressed map is not an isomorphism (sigma_min {smin:.2e}, nmiu {nm:.2e})")
    parts = (comprehension(e, 1e-8), alpha, quotient(c, 1e-8), asrt(q, 1e-8))
    return PureFactorization(f, e, q, alpha, parts)


def dagger_pure(f, tol=TOL):
    """f^dagger(b) = u_e alpha^{-1}(u_c^* sqrt(q) b sqrt(q) u_c) u_e^*."""
    fac = pure_factor(f, tol)
    pi_e, alpha, zeta_c, asrt_q = fac.parts
    inv = cp.from_superop(np.linalg.inv(cp.superop(alpha)), alpha.target, alpha.source, tol=1e-8)
    comp_c = comprehension(ceil(fac.one_f, tol), 1e-8)
    quot_e = quotient(fac.im_f, 1e-8)
    return cp.compose_all(quot_e, inv, comp_c, asrt_q)


def pristine_check(f, tol=1e-8):
    return is_pure(f) and is_projection(cp.apply(f, f.source.one()), tol)


# --------------------------------------------------------------------------
# Diamond / box calculus on projections


def diamond(f, s, tol=TOL):
    """f^diamond(s) = ceil(f(s)) for a projection s of the source."""
    require_projection(s, 1e-8, NotSharp)
    return ceil(cp.apply(f, s), tol)


def box(f, t, tol=TOL):
    """f^box(t) = 1 - ceil(f(1 - t))."""
    require_projection(t, 1e-8, NotSharp)
    return f.target.one() - ceil(cp.apply(f, t.algebra.one() - t), tol)


def lower_diamond(f, s, tol=TOL):
    """f_diamond(s) = image of b -> pi_s(f(b)) for a projection s of the target."""
    return cp.image(cp.compose(comprehension(s, 1e-8), f), tol)


def meet(s, t, tol=TOL):
    """s /\\ t = (pi_s)_diamond((pi_s)^box(t)), read back into the algebra."""
    pi = comprehension(s, 1e-8)
    inner = box(pi, t, tol)
    return lower_diamond(pi, inner, tol)


def meet_oracle(s, t, tol=1e-9):
    """Projection onto range(s) & range(t): kernel of 2 - s - t."""
    mats = []
    for a, b in zip(s.mats, t.mats):
        n = a.shape[0]
        null = la.nullspace_hermitian(2 * np.eye(n) - a - b, tol_rel=tol) if n else np.zeros((0, 0))
        mats.append(null @ la.dag(null))
    return s.algebra.element(mats)


def proj_leq(s, t, tol=1e-8):
    """s <= t for projections: t s = s."""
    return (t @ s - s).norm() <= tol


# --------------------------------------------------------------------------
# sef and invariant predicates


def sef(p, tol=TOL):
    """sef_p = asrt_p (+) asrt_{1-p}."""
    return cp.ovee_sum(asrt(p, tol), asrt(p.algebra.one() - p, tol), tol=1e-8)


def inv_set_check(f, p, tol=1e-8):
    """p in Inv f: sef_p after f equals f."""
    return cp.max_deviation(cp.compose(sef(p), f), f) <= tol


def rho_image_commutant(rho, tol=1e-8):
    """Commutant of rho(A) inside the target, as a Subalgebra of its block-diagonal form."""
    gens = [cp.apply(rho, rho.source.unit(*u)).matrix() for u in rho.source.matrix_units()]
    keep = range(len(rho.target.blocks))
    gens += [rho.target.central_projection({j}).matrix() for j in keep]
    return commutant(gens, tol=tol)


def inv_commutant_check(rho, samples=200, seed=0, tol=1e-8):
    """Membership in Inv rho versus membership in rho(A)', on sampled effects
    (half generic, half drawn from the commutant)."""
    rng = as_rng(seed)
    if cp.nmiu_residual(rho) > tol:
        raise ValueError("inv_commutant_check needs an nmiu map")
    comm = rho_image_commutant(rho)
    alg = rho.target
    agree, witnesses = 0, []
    inside = 0
    for k in range(samples):
        if k % 2:
            x = comm.to_matrix(random_effect(comm.structure, rng))
            p = _from_block_matrix(alg, x)
        else:
            p = random_effect(alg, rng)
        in_comm = comm.membership_residual(p.matrix()) <= tol
        in_inv = inv_set_check(rho, p, tol)
        inside += in_comm
        if in_comm == in_inv:
            agree += 1
        elif len(witnesses) < 3:
            witnesses.append({"sample": k, "p": p.to_json(), "commutant": in_comm, "inv": in_inv})
    return {"samples": samples, "seed": seed, "agree": agree, "in_commutant": inside,
            "commutant": str(comm.structure), "witnesses": witnesses,
            "status": "pass" if agree == samples else "fail"}


def _from_block_matrix(alg, x):
    mats, acc = [], 0
    for n in alg.blocks:
        mats.append(x[acc:acc + n, acc:acc + n])
        acc += n
    return alg.element(mats)


# --------------------------------------------------------------------------
# Law suites


def asrt_uniqueness_check(p, rng, candidates=20, tol=1e-8):
    """Among maps b -> W^* b W with W^* W = p (W = U sqrt(p)), those that are
    diamond-self-adjoint on sampled projections all coincide with asrt_p."""
    rng = as_rng(rng)
    alg = p.algebra
    ref = asrt(p)
    root = p.map_blocks(la.sqrt_psd)
    projs = [random_projection(alg, rng) for _ in range(8)]
    bad = 0
    for k in range(candidates):
        if k == 0:
            us = [np.eye(n) for n in alg.blocks]
        else:
            us = [random_unitary(n, rng) for n in alg.blocks]
        f = CpMap(alg, alg, {(i, i): (u @ r,) for i, (u, r) in enumerate(zip(us, root.mats))})
        self_adj = all(diamond(f, s).dist(lower_diamond(f, s)) <= 1e-6 for s in projs)
        if self_adj and cp.max_deviation(f, ref) > tol:
            bad += 1
    return bad == 0


def _sea_observations(p, r):
    """S4/S5-style statements for the commuting pair (p, p^2); recorded only."""
    b = p @ p
    out = {"S4": seqprod(p, seqprod(b, r)).dist(seqprod(seqprod(p, b), r))}
    c = seqprod(p, b)
    out["S5"] = (c @ p - p @ c).norm()
    return out


def dagger_law_suite(algebra, seed=0, trials=200, seqprod_impl=None, tol=1e-8):
    """Randomized check of the three dagger conditions and S1-S3."""
    rng = as_rng(seed)
    seq = seqprod_impl or seqprod
    one = algebra.one()
    worst = {k: 0.0 for k in ("sqrt_unique", "asrt_squared", "zeta_sharp",
                              "S1_additive", "S2_unit", "S3_orthogonal")}
    witness = {}
    obs = {}

    def bump(name, val, wit):
        if val > worst[name]:
            worst[name] = val
            witness[name] = wit

    for trial in range(trials):
        p = random_effect(algebra, rng)
        q = random_effect(algebra, rng)
        root = sqrt_effect(p)
        bump("sqrt_unique", seqprod(root, root).dist(p), {"trial": trial})
        pq = seq(p, q)
        lhs = cp.compose(asrt(pq, 1e-7), asrt(pq, 1e-7))
        rhs = cp.compose_all(asrt(p), asrt(q), asrt(q), asrt(p))
        bump("asrt_squared", cp.max_deviation(lhs, rhs), {"trial": trial, "p": p.to_json(), "q": q.to_json()})

        s = random_projection(algebra, rng)
        z = quotient(s)
        t = random_projection(z.source, rng) if z.source.blocks else z.source.zero()
        img = cp.apply(z, t)
        bump("zeta_sharp", (img @ img - img).norm(), {"trial": trial})

        half_q, half_r = 0.5 * q, 0.5 * random_effect(algebra, rng)
        s1 = seqprod(p, half_q + half_r).dist(seqprod(p, half_q) + seqprod(p, half_r))
        bump("S1_additive", s1, {"trial": trial})
        bump("S2_unit", max(seqprod(one, q).dist(q), seqprod(p, one).dist(p)), {"trial": trial})
        # orthogonally supported effects have a & b = 0 in both orders
        a = seqprod(s, p)
        b = seqprod(one - s, q)
        ab = seqprod(a, b)
        if ab.norm() <= tol:
            bump("S3_orthogonal", ab.dist(seqprod(b, a)), {"trial": trial})
        else:
            bump("S3_orthogonal", ab.norm(), {"trial": trial})
        for key, val in _sea_observations(p, q).items():
            obs[key + "_max"] = max(obs.get(key + "_max", 0.0), val)

    laws = []
    for name, val in worst.items():
        lim = 1e-9 if name == "sqrt_unique" else tol
        entry = {"law": name, "status": "pass" if val <= lim else "fail", "residual": float(val)}
        if val > lim:
            entry["witness"] = witness.get(name)
        laws.append(entry)
    return {"algebra": str(algebra), "trials": trials, "seed": seed, "laws": laws,
            "observations": obs,
            "status": "pass" if all(l["status"] == "pass" for l in laws) else "fail"}


def random_contraction(rows, cols, rng):
    """Ginibre matrix scaled to operator norm in [0.5, 1)."""
    v = rng.ginibre(rows, cols)
    return v * (rng.uniform(0.5, 0.999) / la.op_norm(v))


def random_pure_map(source_dim, target_dim, rng):
    """ad_V with a contraction V (full rank almost surely), so ad_V is subunital."""
    rng = as_rng(rng)
    return cp.ad(random_contraction(source_dim, target_dim, rng))


def dagger_pure_laws(seed=0, trials=20, tol=1e-8):
    """(ad_V)^dagger = ad_{V^*}, f^dagger dagger = f, (f o g)^dagger = g^dagger o f^dagger,
    asrt_p^dagger = asrt_p, iso^dagger = iso^{-1}."""
    rng = as_rng(seed)
    worst = {k: 0.0 for k in ("ad_adjoint", "involution", "contravariant", "asrt_self", "iso_inverse")}
    for _ in range(trials):
        v = random_contraction(2, 3, rng)
        f = cp.ad(v)
        fd = dagger_pure(f)
        worst["ad_adjoint"] = max(worst["ad_adjoint"], cp.max_deviation(fd, cp.ad(la.dag(v))))
        worst["involution"] = max(worst["involution"], cp.max_deviation(dagger_pure(fd), f))
        g = cp.ad(random_contraction(3, 2, rng))
        fg = cp.compose(f, g)  # g first in Heisenberg order
        lhs = dagger_pure(fg)
        rhs = cp.compose(dagger_pure(g), dagger_pure(f))
        worst["contravariant"] = max(worst["contravariant"], cp.max_deviation(lhs, rhs))
        alg = FdAlgebra((2, 3))
        p = random_effect(alg, rng)
        worst["asrt_self"] = max(worst["asrt_self"], cp.max_deviation(dagger_pure(asrt(p)), asrt(p)))
        u = [random_unitary(n, rng) for n in alg.blocks]
        iso = CpMap(alg, alg, {(i, i): (m,) for i, m in enumerate(u)})
        inv = CpMap(alg, alg, {(i, i): (la.dag(m),) for i, m in enumerate(u)})
        worst["iso_inverse"] = max(worst["iso_inverse"], cp.max_deviation(dagger_pure(iso), inv))
    laws = [{"law": k, "status": "pass" if v <= tol else "fail", "residual": float(v)}
            for k, v in worst.items()]
    return {"trials": trials, "seed": seed, "laws": laws,
            "status": "pass" if all(l["status"] == "pass" for l in laws) else "fail"}


def diamond_suite(algebra=None, seed=0, samples=500, tol=1e-8):
    """Adjunction f_diamond -| f^box and functoriality on sampled maps and projections."""
    rng = as_rng(seed)
    algebra = algebra or FdAlgebra((2, 2))
    violations = {"adjunction": 0, "functor_upper": 0, "functor_lower": 0,
                  "zeta_pi": 0, "meet": 0}
    for k in range(samples):
        kind = k % 3
        f = _sample_map(algebra, rng, kind)
        g = _sample_map(algebra, rng, (kind + 1) % 3)
        s = random_projection(algebra, rng)
        t = random_projection(algebra, rng)
        left = proj_leq(lower_diamond(f, s), t, tol)
        right = proj_leq(s, box(f, t), tol)
        violations["adjunction"] += left != right
        chi = cp.compose(f, g)  # g first
        if diamond(chi, s).dist(diamond(f, diamond(g, s))) > tol:
            violations["functor_upper"] += 1
        if lower_diamond(chi, s).dist(lower_diamond(g, lower_diamond(f, s))) > tol:
            violations["functor_lower"] += 1
        zp = cp.compose(quotient(s), comprehension(s))
        pz = cp.compose(comprehension(s), quotient(s))
        if cp.max_deviation(zp, asrt(s)) > tol or cp.max_deviation(pz, cp.identity(pz.source)) > tol:
            violations["zeta_pi"] += 1
        if meet(s, t).dist(meet_oracle(s, t)) > tol:
            violations["meet"] += 1
    return {"samples": samples, "seed": seed, "violations": violations,
            "status": "pass" if not any(violations.values()) else "fail"}


def _sample_map(alg, rng, kind):
    """Low-rank CP maps so that supports are proper and the calculus is not trivial."""
    if kind == 0:
        return cp.random_cp_map(alg, alg, rng, k=1)
    if kind == 1:
        return asrt(random_projection(alg, rng))
    return cp.random_cp_map(alg, alg, rng, k=1, components={(0, 1), (1, 1)})
