"""Named verification scenarios.

Each scenario is a function ``(seed, tol) -> report`` whose report carries a
``status`` ("pass"/"fail"), the residual maxima it saw, and enough detail to
locate a failure.  Reports contain no timings, so they are reproducible.
"""
import numpy as np

from . import cpmap as cp
from . import dilation as dl
from . import effectus as ef
from . import linalg as la
from . import vnalg
from .cpmap import CpMap
from .errors import EffectusLabError
from .rng import DEFAULT_SEED, as_rng
from .vnalg import FdAlgebra, random_projection, random_unitary

M2, M3 = FdAlgebra((2,)), FdAlgebra((3,))


def _status(ok):
    return "pass" if ok else "fail"


def _rng(seed, salt):
    return as_rng((int(seed) * 0x9E3779B97F4A7C15 + salt) & ((1 << 64) - 1))


def swap_matrix():
    s = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            s[2 * b + a, 2 * a + b] = 1.0
    return s


def unordered_pair(seed=DEFAULT_SEED, tol=1e-9):
    """Commutant of the swap on C^2 (x) C^2 is M3 + C."""
    sub = vnalg.commutant([swap_matrix()], seed=seed)
    dims = [n * n for n in sub.structure.blocks]
    sw = swap_matrix()
    res = max(float(np.max(np.abs(sw @ b - b @ sw))) for b in sub.basis())
    return {"structure": str(sub.structure), "block_dims": dims,
            "residuals": {"commutes": res},
            "status": _status(dims == [9, 1] and res <= 1e-8)}


def stinespring_suite(seed=DEFAULT_SEED, tol=1e-8, count=50):
    """Minimal Stinespring dilations of seeded unital maps M2 -> M2 and M3 -> M2."""
    rng = _rng(seed, 2)
    worst = {"reconstruction": 0.0, "isometry": 0.0}
    rank_mismatch = []
    cases = 0
    for source in (M2, M3):
        for k in range(count):
            phi = cp.random_cp_map(source, M2, rng, k=1 + k % 3, normalize="unital")
            st = dl.stinespring_minimal(phi)
            for u in source.matrix_units():
                a = source.unit(*u)
                lhs = la.dag(st.V) @ cp.apply(st.rho, a).mats[0] @ st.V
                worst["reconstruction"] = max(worst["reconstruction"],
                                              float(np.max(np.abs(lhs - cp.apply(phi, a).mats[0]))))
            worst["isometry"] = max(worst["isometry"],
                                    float(np.max(np.abs(la.dag(st.V) @ st.V - np.eye(2)))))
            gram_rank = la.rank_psd(dl.stinespring_gram(phi))
            if gram_rank != st.K_dim or st.minimality_rank() != st.K_dim:
                rank_mismatch.append({"source": str(source), "case": k, "K": st.K_dim, "gram": gram_rank})
            cases += 1
    ok = all(v <= tol for v in worst.values()) and not rank_mismatch
    return {"cases": cases, "residuals": worst, "rank_mismatch": rank_mismatch, "status": _status(ok)}


def stinespring_is_paschke(seed=DEFAULT_SEED, tol=1e-7, count=20):
    """Lifted Stinespring triple is isomorphic to the Paschke dilation."""
    rng = _rng(seed, 3)
    sources = (M2, FdAlgebra((1, 1)), FdAlgebra((2, 1)))
    worst, failures = 0.0, []
    for k in range(count):
        source = sources[k % 3]
        target = FdAlgebra((2 + k % 2,))
        phi = cp.random_cp_map(source, target, rng, k=1 + k % 2, normalize="unital")
        try:
            iso = dl.dilation_iso(dl.stinespring_minimal(phi), dl.paschke(phi), tol)
            worst = max(worst, iso.max_residual)
        except EffectusLabError as exc:
            failures.append({"case": k, "error": str(exc)})
    return {"cases": count, "residuals": {"iso": worst}, "failures": failures,
            "status": _status(not failures and worst <= tol)}


def corner_triple(p):
    """(ceil-ceil(p) A, restriction, x -> p x p) for a projection p."""
    alg = p.algebra
    keep = [i for i, m in enumerate(p.mats) if float(np.max(np.abs(m))) > 1e-9]
    corner = FdAlgebra(tuple(alg.blocks[i] for i in keep))
    rho = CpMap(alg, corner, {(i, t): (np.eye(alg.blocks[i]),) for t, i in enumerate(keep)})
    h = CpMap(corner, alg, {(t, i): (p.mats[i],) for t, i in enumerate(keep)})
    return dl.DilationTriple(corner, rho, h)


def corner_dilation(seed=DEFAULT_SEED, tol=1e-7, count=10):
    """Paschke dilation of b -> p b p is the central-carrier corner."""
    rng = _rng(seed, 4)
    worst, failures, cases = 0.0, [], 0
    for alg in (FdAlgebra((2, 3)), M3):
        for k in range(count):
            p = random_projection(alg, rng)
            phi = ef.asrt(p)
            d = dl.paschke(phi)
            triple = corner_triple(p)
            cases += 1
            if sorted(d.P.blocks) != sorted(triple.P.blocks):
                failures.append({"algebra": str(alg), "case": k, "P": str(d.P), "expected": str(triple.P)})
                continue
            try:
                worst = max(worst, dl.dilation_iso(triple, d, tol).max_residual)
            except EffectusLabError as exc:
                failures.append({"algebra": str(alg), "case": k, "error": str(exc)})
    return {"cases": cases, "residuals": {"iso": worst}, "failures": failures,
            "status": _status(not failures and worst <= tol)}


def injectivity_battery(seed=DEFAULT_SEED):
    rng = _rng(seed, 5)
    a23 = FdAlgebra((2, 3))
    a22 = FdAlgebra((2, 2))
    p = vnalg.random_projection(a23, rng, ranks=[1, 0])
    return [
        ("identity", cp.identity(a22)),
        ("kill_summand", cp.random_cp_map(a23, M2, rng, k=2, components={(0, 0)})),
        ("kill_summand_unital", cp.random_cp_map(a23, M3, rng, k=1, normalize="unital",
                                                 components={(1, 0)})),
        ("corner_one_block", ef.asrt(p)),
        ("random_unital", cp.random_cp_map(a23, M2, rng, k=2, normalize="unital")),
        ("faithful_state", dl.functional(M2, [np.diag([0.7, 0.3])])),
        ("state_one_block", dl.functional(a22, [np.diag([0.5, 0.5]), np.zeros((2, 2))])),
        ("projection_of_sum", cp.block_projection(a23, {1})),
    ]


def injectivity_suite(seed=DEFAULT_SEED, tol=1e-9):
    """ceil(rho) equals the central carrier of ceil(phi)."""
    worst, rows = 0.0, []
    for name, phi in injectivity_battery(seed):
        d = dl.paschke(phi)
        ceil_rho, cc, _ = dl.injectivity_check(d)
        res = ceil_rho.dist(cc)
        worst = max(worst, res)
        rows.append({"map": name, "residual": res,
                     "carrier_blocks": [int(round(np.trace(m).real)) for m in cc.mats]})
    return {"cases": rows, "residuals": {"ceil": worst}, "status": _status(worst <= tol)}


def order_correspondence_suite(seed=DEFAULT_SEED, tol=1e-7, samples=50):
    rng = _rng(seed, 6)
    maps = [("identity", cp.identity(FdAlgebra((2, 2)))),
            ("random_unital", cp.random_cp_map(M2, M2, rng, k=2, normalize="unital")),
            ("faithful_state", dl.functional(M2, [np.diag([0.6, 0.4])]))]
    rows, ok, worst = [], True, 0.0
    for name, phi in maps:
        rep = dl.order_correspondence(dl.paschke(phi), samples=samples, seed=int(seed) + 6)
        rows.append({"map": name, **rep})
        ok = ok and rep["status"] == "pass" and rep["residuals"]["round_trip"] <= tol
        worst = max(worst, max(rep["residuals"].values()))
    return {"cases": rows, "residuals": {"max": worst}, "status": _status(ok)}


def tensor_suite(seed=DEFAULT_SEED, tol=1e-7):
    rng = _rng(seed, 7)
    pairs = [
        ("unital_x_unital", cp.random_cp_map(M2, M2, rng, k=2, normalize="unital"),
         cp.random_cp_map(M2, M2, rng, k=2, normalize="unital")),
        ("state_x_identity", dl.functional(M2, [np.diag([0.75, 0.25])]), cp.identity(M2)),
        ("corner_x_unital", ef.asrt(random_projection(FdAlgebra((1, 1)), rng, ranks=[1, 0])),
         cp.random_cp_map(M2, M2, rng, k=1, normalize="unital")),
    ]
    rows, worst, failures = [], 0.0, []
    for name, f, g in pairs:
        try:
            triple, direct, iso = dl.dilation_tensor(dl.paschke(f), dl.paschke(g), tol)
            worst = max(worst, iso.max_residual)
            rows.append({"pair": name, "P": str(direct.P), "residual": iso.max_residual})
        except EffectusLabError as exc:
            failures.append({"pair": name, "error": str(exc)})
    return {"cases": rows, "failures": failures, "residuals": {"iso": worst},
            "status": _status(not failures and worst <= tol)}


def dagger_suite(seed=DEFAULT_SEED, tol=1e-8, trials=200):
    reports = [ef.dagger_law_suite(M2, seed=seed, trials=trials, tol=tol),
               ef.dagger_law_suite(FdAlgebra((2, 3)), seed=int(seed) + 1, trials=trials, tol=tol),
               ef.dagger_pure_laws(seed=seed, tol=tol)]
    worst = max(l["residual"] for r in reports for l in r["laws"])
    return {"reports": reports, "residuals": {"max": worst},
            "status": _status(all(r["status"] == "pass" for r in reports))}


def diamond_calculus(seed=DEFAULT_SEED, tol=1e-8, samples=500):
    rep = ef.diamond_suite(FdAlgebra((2, 2)), seed=seed, samples=samples, tol=tol)
    return {**rep, "residuals": {"violations": sum(rep["violations"].values())}}


def purity_cases(seed=DEFAULT_SEED, count=20):
    """(label, expected purity, map) triples: ad_V samples, corners, filters,
    and proper mixtures of two distinct unitary conjugations."""
    rng = _rng(seed, 10)
    cases = []
    for k in range(count):
        n, m = (2, 2) if k % 2 == 0 else (3, 2)
        cases.append((f"ad_V_{k}", True, ef.random_pure_map(n, m, rng)))
    for k in range(4):
        alg = FdAlgebra((2, 3)) if k % 2 else M3
        p = random_projection(alg, rng)
        if not any(np.max(np.abs(x)) > 0 for x in p.mats):
            p = alg.one()
        cases.append((f"corner_{k}", True, ef.standard_corner(p).pi))
        b = vnalg.random_effect(alg, rng)
        cases.append((f"filter_{k}", True, ef.standard_filter(b).c))
    for k in range(count):
        n = 2 + k % 2
        u1, u2 = random_unitary(n, rng), random_unitary(n, rng)
        lam = rng.uniform(0.2, 0.8)
        mix = CpMap(FdAlgebra((n,)), FdAlgebra((n,)),
                    {(0, 0): (np.sqrt(lam) * u1, np.sqrt(1 - lam) * u2)})
        cases.append((f"mixture_{k}", False, mix))
    return cases


def alpha_oracle(f):
    """Independent purity test: the compressed map between corners is an nmiu iso."""
    smin, nm = ef.alpha_is_iso(f)
    return smin > 1e-8 and nm <= 1e-7


def purity_suite(seed=DEFAULT_SEED, count=20):
    rows, agree_label, agree_oracle = [], 0, 0
    cases = purity_cases(seed, count)
    for name, label, f in cases:
        got = ef.is_pure(f)
        oracle = alpha_oracle(f)
        agree_label += got == label
        agree_oracle += got == oracle
        if got != label or got != oracle:
            rows.append({"case": name, "expected": label, "is_pure": got, "oracle": oracle})
    n = len(cases)
    return {"cases": n, "agree_label": agree_label, "agree_oracle": agree_oracle,
            "disagreements": rows, "residuals": {"disagreements": n - min(agree_label, agree_oracle)},
            "status": _status(agree_label == n and agree_oracle == n)}


def structs_suite(seed=DEFAULT_SEED):
    from . import structs as st
    reports = {}
    for k in range(5):
        B = st.boolean_algebra(k)
        reports[f"ea_{B.name}"] = st.ea_harness(B, mode="exhaustive")
        reports[f"monoid_{B.name}"] = st.monoid_harness(B, mode="exhaustive")
        reports[f"divisoid_{B.name}"] = st.divisoid_check(B, mode="exhaustive")
        reports[f"modularity_{B.name}"] = st.modularity_check(B)
        reports[f"oml_B{1 << k}"] = st.oml_check(st.boolean_ortholattice(k))
    reports["emonoid_lemma_2"] = st.emonoid_lemma_check(st.two(), max_len=3)
    Q = st.RationalInterval()
    reports["ea_Q"] = st.ea_harness(Q, mode="random", seed=seed)
    reports["monoid_Q"] = st.monoid_harness(Q, mode="random", seed=seed)
    reports["divisoid_Q"] = st.divisoid_check(Q, mode="random", seed=seed)
    reports["emonoid_lemma_Q"] = st.emonoid_lemma_check(Q, seed=seed, trials=500)
    reports["oml_MO2"] = st.oml_check(st.mo2())
    o6 = st.oml_check(st.benzene())
    o6_fails = any(l["law"] == "orthomodular" and l["status"] == "fail" for l in o6["laws"])
    reports["monad_Q"] = st.monad_law_check(Q, trials=500, seed=seed)
    reports["monad_2"] = st.monad_law_check(st.JoinScalars(1), trials=500, seed=seed)
    one = st.semilattice_bridge([[0]])
    cop = st.aconv_coproduct(one, one)
    three = st.convex_to_semilattice(cop.C)
    a, b = cop.c1[0], cop.c2[0]
    is_three_semilattice = (len(cop.C) == 3 and st.is_semilattice(three) and a != b
                            and three[a][b] not in (a, b))
    reports["coproduct_1_1"] = st.universal_property_check(cop, one, one, st.all_convex_sets_over_two(4))
    passing = all(r["status"] == "pass" for r in reports.values())
    ok = passing and o6_fails and is_three_semilattice
    return {"reports": {k: {"status": r["status"], "mode": r.get("mode"),
                            "failed": [l["law"] for l in r.get("laws", []) if l["status"] == "fail"]}
                        for k, r in reports.items()},
            "o6_orthomodular_witness": next(l["witness"] for l in o6["laws"] if l["law"] == "orthomodular"),
            "coproduct_1_1": {"size": len(cop.C), "join_table": three,
                              "c1": list(cop.c1), "c2": list(cop.c2)},
            "residuals": {"failed_reports": sum(r["status"] != "pass" for r in reports.values())},
            "status": _status(ok)}


def inv_commutant_suite(seed=DEFAULT_SEED, tol=1e-8, samples=200):
    amp = CpMap(M2, FdAlgebra((4,)), {(0, 0): tuple(np.kron(np.eye(2), np.eye(2)[[s], :])
                                                   for s in range(2))})
    reps = [("identity", ef.inv_commutant_check(cp.identity(M2), samples, seed, tol)),
            ("ampliation", ef.inv_commutant_check(amp, samples, seed, tol))]
    return {"cases": [{"map": n, **r} for n, r in reps],
            "residuals": {"disagreements": sum(r["samples"] - r["agree"] for _, r in reps)},
            "status": _status(all(r["status"] == "pass" for _, r in reps))}


SUITES = {
    "unordered-pair": unordered_pair,
    "stinespring": stinespring_suite,
    "stinespring-is-paschke": stinespring_is_paschke,
    "corner": corner_dilation,
    "injectivity": injectivity_suite,
    "order-correspondence": order_correspondence_suite,
    "tensor": tensor_suite,
    "dagger": dagger_suite,
    "diamond": diamond_calculus,
    "purity": purity_suite,
    "structs": structs_suite,
    "inv-commutant": inv_commutant_suite,
}


def run_suite(name, seed=DEFAULT_SEED):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed=seed)
