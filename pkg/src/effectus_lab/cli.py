"""Command-line front end.

Every command writes one JSON report (to ``--out`` or stdout) with
``"schema": "effectus-lab/1"``, the full run configuration, the result and
the largest residual seen.  Exit codes: 0 all checks pass, 1 a verification
failed, 2 the input could not be used.
"""
import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import cpmap as cp
from . import dilation as dl
from . import effectus as ef
from . import linalg as la
from . import suites
from . import vnalg
from .cpmap import CpMap
from .errors import (EffectusLabError, NotEffect, NotHermitian, NotPositive, NotProjection, NotPSD,
                     ShapeMismatch, TargetNotFactor)
from .rng import DEFAULT_SEED
from .vnalg import AlgElement, FdAlgebra

SCHEMA = "effectus-lab/1"

# precondition failures on user data: the input is unusable, not a failed check
PRECONDITION_ERRORS = (ShapeMismatch, NotHermitian, NotPSD, NotPositive, NotEffect, NotProjection,
                       TargetNotFactor)


class InputError(Exception):
    """Unusable input; reported with exit code 2."""


# --------------------------------------------------------------------------
# JSON plumbing


def _clean(obj):
    """JSON-safe, deterministic rendering (floats to 12 significant digits)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return float(f"{x:.12g}") if x != 0 else 0.0
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return la.to_json(obj) if obj.ndim == 2 else _clean(obj.tolist())
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj if obj is None or isinstance(obj, str) else str(obj)


def dumps(report):
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _residual_max(obj):
    """Largest float found under any ``residual``-like key."""
    best = 0.0
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (float, int)) and not isinstance(v, bool) and "resid" in k:
                best = max(best, float(v))
            elif k in ("residuals",) and isinstance(v, dict):
                best = max([best] + [float(x) for x in v.values()
                                     if isinstance(x, (float, int)) and not isinstance(x, bool)
                                     and math.isfinite(float(x))])
            else:
                best = max(best, _residual_max(v))
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            best = max(best, _residual_max(v))
    return best


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON ({exc.msg})") from None


def _matrix(obj, where):
    try:
        if isinstance(obj, dict):
            return la.from_json(obj)
        m = np.array(obj, dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{where}: not a matrix ({exc})") from None
    if m.ndim != 2:
        raise InputError(f"{where}: expected a 2-d matrix")
    return m


def parse_algebra(obj, where="algebra"):
    if isinstance(obj, list):
        obj = {"blocks": obj}
    try:
        return FdAlgebra.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{where}: bad algebra ({exc})") from None


def parse_element(obj, where="element"):
    """``{"algebra": {"blocks": [...]}, "mats": [matrix, ...]}``; matrices as
    ``{"rows","cols","re","im"}`` or nested real lists."""
    if not isinstance(obj, dict) or "mats" not in obj:
        raise InputError(f"{where}: expected an object with 'mats'")
    alg_obj = obj.get("algebra", {"blocks": [len(m) if isinstance(m, list) else m["rows"]
                                             for m in obj["mats"]]})
    alg = parse_algebra(alg_obj, where + ".algebra")
    mats = [_matrix(m, f"{where}.mats[{k}]") for k, m in enumerate(obj["mats"])]
    try:
        return AlgElement(alg, tuple(mats))
    except EffectusLabError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_map(obj, where="map"):
    if not isinstance(obj, dict) or "source" not in obj or "target" not in obj:
        raise InputError(f"{where}: expected an object with 'source', 'target', 'kraus'")
    src = parse_algebra(obj["source"], where + ".source")
    tgt = parse_algebra(obj["target"], where + ".target")
    kraus = {}
    for key, ops in obj.get("kraus", {}).items():
        try:
            i, j = (int(t) for t in key.split(","))
        except ValueError:
            raise InputError(f"{where}.kraus: key {key!r} is not 'i,j'") from None
        kraus[(i, j)] = tuple(_matrix(v, f"{where}.kraus[{key}]") for v in ops)
    try:
        return CpMap(src, tgt, kraus)
    except (EffectusLabError, IndexError) as exc:
        raise InputError(f"{where}: {exc}") from None


def _inputs(args, n, what):
    paths = args.inp or []
    if len(paths) < n:
        raise InputError(f"{what} needs {n} --in file(s)")
    return [load_json(p) for p in paths[:n]]


def _map_arg(args, k=0):
    paths = args.map or []
    if len(paths) <= k:
        raise InputError("missing --map")
    return parse_map(load_json(paths[k]), paths[k])


def _subalgebra_report(sub):
    return {"structure": str(sub.structure), "blocks": list(sub.structure.blocks),
            "multiplicities": list(sub.mult), "dim": sub.structure.dim}


def _map_report(f):
    return {"source": str(f.source), "target": str(f.target), "kraus": f.to_json()["kraus"]}


# --------------------------------------------------------------------------
# dilate


def cmd_dilate(args):
    kind = args.kind
    if kind == "gns":
        omega = _map_arg(args)
        k, rho, x = dl.gns(omega, args.tol)
        res = max((abs(np.vdot(x, cp.apply(rho, omega.source.unit(*u)).mats[0] @ x)
                       - cp.apply(omega, omega.source.unit(*u)).mats[0][0, 0])
                   for u in omega.source.matrix_units()), default=0.0)
        return {"H_dim": k, "cyclic_vector": x, "residuals": {"state": float(res)}}, res <= 1e-8
    if kind == "stinespring":
        phi = _map_arg(args)
        st = dl.stinespring_minimal(phi, args.tol)
        res = dl.check_triple(phi, st.lifted(), 1.0)
        gram_rank = la.rank_psd(dl.stinespring_gram(phi))
        ok = res <= 1e-8 and gram_rank == st.K_dim
        return {"K_dim": st.K_dim, "gram_rank": gram_rank, "V": st.V,
                "rho": _map_report(st.rho), "residuals": {"reconstruction": res}}, ok
    if kind == "paschke":
        phi = _map_arg(args)
        d = dl.paschke(phi, args.tol)
        res = dict(d.residuals)
        defect = res.pop("uniqueness_rank_defect")
        ok = max(res.values(), default=0.0) <= 1e-7 and defect == 0
        return {"P": str(d.P), "P_blocks": list(d.P.blocks),
                "rho": _map_report(d.rho), "h": _map_report(d.h),
                "uniqueness_rank_defect": defect, "residuals": res,
                "module": dl.paschke_module_checks(d)}, ok
    if kind == "tensor":
        f, g = _map_arg(args, 0), _map_arg(args, 1)
        _, direct, iso = dl.dilation_tensor(dl.paschke(f), dl.paschke(g), 1e-7)
        return {"P": str(direct.P), "residuals": iso.residuals}, iso.max_residual <= 1e-7
    if kind == "order-corr":
        phi = _map_arg(args)
        rep = dl.order_correspondence(dl.paschke(phi), samples=args.trials, seed=args.seed)
        return rep, rep["status"] == "pass"
    if kind == "mediate":
        phi = _map_arg(args)
        d = dl.paschke(phi)
        st = dl.stinespring_minimal(phi) if len(phi.target.blocks) == 1 else None
        triple = st.lifted() if st else dl.DilationTriple(phi.target, phi, cp.identity(phi.target))
        sigma = dl.mediating_map(d, triple)
        res = dl.mediating_residuals(d, triple, sigma)
        return {"from": "stinespring" if st else "trivial", "P": str(d.P),
                "sigma": _map_report(sigma), "residuals": res}, max(res.values()) <= 1e-7
    raise InputError(f"unknown dilate kind {kind}")


# --------------------------------------------------------------------------
# effectus


def cmd_effectus(args):
    kind = args.kind
    if kind == "laws":
        alg = parse_algebra(json.loads(args.algebra) if args.algebra else [2])
        rep = ef.dagger_law_suite(alg, seed=args.seed, trials=args.trials)
        return rep, rep["status"] == "pass"
    if kind == "dagger" and not args.map:
        rep = ef.dagger_pure_laws(seed=args.seed, trials=min(args.trials, 20))
        return rep, rep["status"] == "pass"
    if kind == "diamond" and not args.map:
        rep = ef.diamond_suite(seed=args.seed, samples=args.trials)
        return rep, rep["status"] == "pass"
    if kind == "asrt":
        (p,) = [parse_element(o) for o in _inputs(args, 1, "asrt")]
        f = ef.asrt(p, args.tol)
        res = cp.apply(f, p.algebra.one()).dist(p)
        return {"map": _map_report(f), "residuals": {"asrt_one": res}}, res <= 1e-8
    if kind == "seqprod":
        p, q = [parse_element(o) for o in _inputs(args, 2, "seqprod")]
        out = ef.seqprod(p, q, args.tol)
        return {"result": out.to_json(), "is_effect": vnalg.is_effect(out)}, vnalg.is_effect(out)
    if kind == "dagger":
        f = _map_arg(args)
        fd = ef.dagger_pure(f, args.tol)
        res = cp.max_deviation(ef.dagger_pure(fd, args.tol), f)
        return {"dagger": _map_report(fd), "residuals": {"involution": res}}, res <= 1e-8
    if kind == "diamond":
        f = _map_arg(args)
        (s,) = [parse_element(o) for o in _inputs(args, 1, "diamond")]
        up = ef.diamond(f, s, args.tol)
        out = {"diamond": up.to_json()}
        if s.algebra == f.target:
            out["box"] = ef.box(f, s, args.tol).to_json()
            out["lower_diamond"] = ef.lower_diamond(f, s, args.tol).to_json()
        return out, True
    if kind == "corner":
        (p,) = [parse_element(o) for o in _inputs(args, 1, "corner")]
        c = ef.standard_corner(p, args.tol)
        res = c.residuals()
        return {"corner": str(c.corner_alg), "floor": c.floor_p.to_json(),
                "pi": _map_report(c.pi), "residuals": res}, max(res.values()) <= 1e-8
    if kind == "filter":
        (b,) = [parse_element(o) for o in _inputs(args, 1, "filter")]
        flt = ef.standard_filter(b, args.tol)
        res = flt.residuals()
        return {"filter": str(flt.filter_alg), "c": _map_report(flt.c),
                "residuals": {"c_one": res["c_one"]}, "kernel_dim": res["kernel_dim"]}, \
            res["c_one"] <= 1e-8 and res["kernel_dim"] == 0
    if kind == "sef":
        (p,) = [parse_element(o) for o in _inputs(args, 1, "sef")]
        s = ef.sef(p, args.tol)
        out = {"sef": _map_report(s)}
        ok = True
        if args.map:
            f = _map_arg(args)
            out["invariant"] = ef.inv_set_check(f, p)
        res = cp.apply(s, p.algebra.one()).dist(p.algebra.one())
        out["residuals"] = {"unital": res}
        return out, ok and res <= 1e-8
    raise InputError(f"unknown effectus kind {kind}")


# --------------------------------------------------------------------------
# algebra


def cmd_algebra(args):
    kind = args.kind
    (obj,) = _inputs(args, 1, f"algebra {kind}")
    if kind in ("commutant", "structure"):
        key = "generators" if kind == "commutant" else "basis"
        mats = obj.get(key) if isinstance(obj, dict) else obj
        if not isinstance(mats, list) or not mats:
            raise InputError(f"expected a nonempty list under '{key}'")
        mats = [_matrix(m, f"{key}[{k}]") for k, m in enumerate(mats)]
        if kind == "commutant":
            sub = vnalg.commutant(mats, tol=max(args.tol, 1e-8), seed=args.seed)
        else:
            sub = vnalg.recognize_structure(mats, tol=max(args.tol, 1e-8), seed=args.seed)
        return _subalgebra_report(sub), True
    if kind == "carrier":
        p = parse_element(obj)
        cc = vnalg.central_carrier(p, args.tol)
        return {"central_carrier": cc.to_json(), "ceil": vnalg.ceil(p).to_json()}, True
    raise InputError(f"unknown algebra kind {kind}")


# --------------------------------------------------------------------------
# structs


def _instance(name):
    from . import structs as st
    table = {"2": st.two, "B4": lambda: st.boolean_algebra(2), "B8": lambda: st.boolean_algebra(3),
             "B16": lambda: st.boolean_algebra(4), "Q": st.RationalInterval,
             "MO2": st.mo2, "O6": st.benzene}
    if name not in table:
        raise InputError(f"unknown instance {name!r}; choose from {sorted(table)}")
    return table[name]()


def _struct_input(args, default):
    from . import structs as st
    if args.inp:
        obj = load_json(args.inp[0])
        try:
            if "covers" in obj or "leq" in obj:
                if "leq" in obj:
                    return st.FiniteOrtholattice(obj["carrier"], obj["leq"], obj["perp"],
                                                 obj.get("name", "L"))
                return st.FiniteOrtholattice.from_covers(obj["carrier"], obj["covers"], obj["perp"],
                                                         obj.get("name", "L"))
            return st.FiniteEffectAlgebra.from_table(obj)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError(f"{args.inp[0]}: bad table ({exc})") from None
    return _instance(args.instance or default)


def cmd_structs(args):
    from . import structs as st
    kind = args.kind
    mode = "exhaustive" if args.exhaustive else "auto"
    if kind == "ea":
        E = _struct_input(args, "2")
        if isinstance(E, st.FiniteOrtholattice):
            E = E.to_effect_algebra()
        rep = st.ea_harness(E, mode=mode, seed=args.seed, trials=args.trials)
    elif kind == "oml":
        L = _struct_input(args, "O6")
        if not isinstance(L, st.FiniteOrtholattice):
            rep = st.ea_ortholattice_bridge(L)
        else:
            rep = st.oml_check(L)
    elif kind == "monoid":
        M = _struct_input(args, "2")
        if not M.is_monoid:
            raise InputError("structure has no odot table")
        rep = st.monoid_harness(M, mode=mode, seed=args.seed, trials=args.trials)
        rep["lemma"] = st.emonoid_lemma_check(M, seed=args.seed, trials=args.trials)
        if rep["lemma"]["status"] == "fail":
            rep["status"] = "fail"
    elif kind == "divisoid":
        M = _struct_input(args, "Q")
        if not M.has_division:
            raise InputError("structure has no division")
        rep = st.divisoid_check(M, mode=mode, seed=args.seed, trials=args.trials)
    elif kind == "dm":
        M = st.JoinScalars(1) if args.instance == "2" else _instance(args.instance or "Q")
        rep = st.monad_law_check(M, trials=args.trials, seed=args.seed)
    elif kind == "coproduct":
        tables = [o.get("join") if isinstance(o, dict) else o for o in _inputs(args, 2, "coproduct")] \
            if args.inp else [[[0]], [[0]]]
        for t in tables:
            if not isinstance(t, list) or not st.is_semilattice(t):
                raise InputError("coproduct inputs must be join-semilattice tables")
        X, Y = (st.semilattice_bridge(t) for t in tables)
        cop = st.aconv_coproduct(X, Y)
        rep = st.universal_property_check(cop, X, Y, st.all_convex_sets_over_two(4))
        oracle = st.coproduct_matches_oracle(cop, *tables)
        rep.update({"size": len(cop.C), "labels": cop.C.labels,
                    "join_table": st.convex_to_semilattice(cop.C),
                    "c1": list(cop.c1), "c2": list(cop.c2), "oracle": oracle})
        if oracle["status"] == "fail" or cop.report["status"] == "fail":
            rep["status"] = "fail"
    else:
        raise InputError(f"unknown structs kind {kind}")
    return rep, rep["status"] == "pass"


# --------------------------------------------------------------------------
# suite


def cmd_suite(args):
    names = list(suites.SUITES) if args.all or not args.name else args.name
    out = {}
    for name in names:
        if name not in suites.SUITES:
            raise InputError(f"unknown suite {name!r}; choose from {sorted(suites.SUITES)}")
        out[name] = suites.run_suite(name, seed=args.seed)
    summary = {n: r["status"] for n, r in out.items()}
    return {"summary": summary, "suites": out}, all(s == "pass" for s in summary.values())


# --------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--out", default=None, help="report path (default: stdout)")
    common.add_argument("--map", action="append", help="CP map JSON (repeatable)")
    common.add_argument("--in", dest="inp", action="append", help="input JSON (repeatable)")
    common.add_argument("--algebra", default=None, help="block sizes as JSON, e.g. [2,3]")

    parser = argparse.ArgumentParser(prog="effectus-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("dilate", parents=[common])
    p.add_argument("kind", choices=["gns", "stinespring", "paschke", "tensor", "order-corr", "mediate"])
    p = sub.add_parser("effectus", parents=[common])
    p.add_argument("kind", choices=["asrt", "seqprod", "dagger", "diamond", "corner", "filter", "laws", "sef"])
    p = sub.add_parser("algebra", parents=[common])
    p.add_argument("kind", choices=["commutant", "structure", "carrier"])
    p = sub.add_parser("structs", parents=[common])
    p.add_argument("kind", choices=["ea", "oml", "monoid", "divisoid", "dm", "coproduct"])
    p.add_argument("--instance", default=None, help="2, B4, B8, B16, Q, MO2 or O6")
    p.add_argument("--exhaustive", action="store_true")
    p = sub.add_parser("suite", parents=[common])
    p.add_argument("--all", action="store_true")
    p.add_argument("--name", action="append")
    return parser


COMMANDS = {"dilate": cmd_dilate, "effectus": cmd_effectus, "algebra": cmd_algebra,
            "structs": cmd_structs, "suite": cmd_suite}


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("out",)}
    cfg["in"] = cfg.pop("inp")
    return cfg


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    try:
        result, ok = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except PRECONDITION_ERRORS as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except EffectusLabError as exc:
        result, ok = {"error": type(exc).__name__, "message": str(exc)}, False
    report = {"schema": SCHEMA, "config": _config(args), "result": result,
              "residual_max": _residual_max(result), "status": "pass" if ok else "fail"}
    text = dumps(report)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"input error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        stdout.write(text)
    return 0 if ok else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
