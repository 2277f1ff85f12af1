"""End-to-end acceptance checks with their tolerances and time budgets.

Each test prints exactly one ``PASS``/``FAIL`` line to the terminal.
"""
import time

import numpy as np
import pytest

from effectus_lab import suites
from effectus_lab import structs as st

SEED = 20240601


def _report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})")
    return ok


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def test_01_unordered_pair(capsys):
    suites.unordered_pair(seed=SEED)  # warm import caches
    rep, dt = _timed(suites.unordered_pair, seed=SEED)
    ok = rep["block_dims"] == [9, 1] and rep["residuals"]["commutes"] <= 1e-8 and dt < 0.1
    assert _report(capsys, 1, "swap commutant is M3+C", ok, f"dims={rep['block_dims']}, {dt:.3f}s")


def test_02_stinespring(capsys):
    rep, dt = _timed(suites.stinespring_suite, seed=SEED, count=50)
    r = rep["residuals"]
    ok = (rep["cases"] == 100 and r["reconstruction"] <= 1e-8 and r["isometry"] <= 1e-8
          and not rep["rank_mismatch"] and dt < 5)
    assert _report(capsys, 2, "minimal Stinespring dilations", ok,
                   f"recon={r['reconstruction']:.1e}, iso={r['isometry']:.1e}, {dt:.2f}s")


def test_03_stinespring_is_paschke(capsys):
    rep, dt = _timed(suites.stinespring_is_paschke, seed=SEED, count=20)
    ok = not rep["failures"] and rep["residuals"]["iso"] <= 1e-7 and dt < 30
    assert _report(capsys, 3, "Stinespring triple is a Paschke dilation", ok,
                   f"iso={rep['residuals']['iso']:.1e}, {dt:.2f}s")


def test_04_corner(capsys):
    rep, dt = _timed(suites.corner_dilation, seed=SEED, count=10)
    ok = rep["cases"] == 20 and not rep["failures"] and rep["residuals"]["iso"] <= 1e-7 and dt < 20
    assert _report(capsys, 4, "dilation of a corner is the central carrier", ok,
                   f"cases={rep['cases']}, iso={rep['residuals']['iso']:.1e}, {dt:.2f}s")


def test_05_injectivity(capsys):
    rep, dt = _timed(suites.injectivity_suite, seed=SEED)
    names = [c["map"] for c in rep["cases"]]
    ok = rep["residuals"]["ceil"] <= 1e-9 and dt < 10 and len(names) >= 5
    assert _report(capsys, 5, "ceil(rho) equals central carrier of ceil(phi)", ok,
                   f"{len(names)} maps, res={rep['residuals']['ceil']:.1e}, {dt:.2f}s")


def test_06_order_correspondence(capsys):
    rep, dt = _timed(suites.order_correspondence_suite, seed=SEED, samples=50)
    ok = rep["status"] == "pass" and len(rep["cases"]) == 3 and dt < 30
    assert _report(capsys, 6, "commutant effects correspond to maps below phi", ok,
                   f"max={rep['residuals']['max']:.1e}, {dt:.2f}s")


def test_07_tensor(capsys):
    rep, dt = _timed(suites.tensor_suite, seed=SEED)
    ok = not rep["failures"] and rep["residuals"]["iso"] <= 1e-7 and dt < 60
    assert _report(capsys, 7, "tensor of dilations is the dilation of the tensor", ok,
                   f"pairs={len(rep['cases'])}, iso={rep['residuals']['iso']:.1e}, {dt:.2f}s")


def test_08_dagger(capsys):
    rep, dt = _timed(suites.dagger_suite, seed=SEED, trials=200)
    ok = rep["status"] == "pass" and rep["residuals"]["max"] <= 1e-8 and dt < 60
    assert _report(capsys, 8, "dagger laws on M2 and M2+M3", ok,
                   f"max={rep['residuals']['max']:.1e}, {dt:.2f}s")


def test_09_diamond(capsys):
    rep, dt = _timed(suites.diamond_calculus, seed=SEED, samples=500)
    ok = rep["residuals"]["violations"] == 0 and rep["status"] == "pass" and dt < 20
    assert _report(capsys, 9, "diamond/box adjunction and functoriality", ok,
                   f"violations={rep['residuals']['violations']}, {dt:.2f}s")


def test_10_purity(capsys):
    rep, dt = _timed(suites.purity_suite, seed=SEED, count=20)
    ok = rep["agree_label"] == rep["cases"] == rep["agree_oracle"] and dt < 60
    assert _report(capsys, 10, "purity agrees with surjectivity", ok,
                   f"{rep['agree_oracle']}/{rep['cases']} agree, {dt:.2f}s")


def test_11_abstract_layer(capsys):
    rep, dt = _timed(suites.structs_suite, seed=SEED)
    modes = {k: v["mode"] for k, v in rep["reports"].items() if k.startswith("ea_B")}
    cop = rep["coproduct_1_1"]
    ok = (rep["status"] == "pass" and all(m == "exhaustive" for m in modes.values())
          and cop["size"] == 3 and dt < 120)
    assert _report(capsys, 11, "effect algebras, lattices, monad, coproduct 1+1", ok,
                   f"{len(rep['reports'])} reports, |1+1|={cop['size']}, {dt:.2f}s")


def test_12_inv_commutant(capsys):
    rep, dt = _timed(suites.inv_commutant_suite, seed=SEED, samples=200)
    ok = rep["residuals"]["disagreements"] == 0 and all(c["samples"] == 200 for c in rep["cases"]) \
        and dt < 10
    assert _report(capsys, 12, "invariant effects are the commutant", ok,
                   f"disagreements={rep['residuals']['disagreements']}, {dt:.2f}s")
