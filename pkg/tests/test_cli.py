import io
import json
from pathlib import Path

import pytest

from effectus_lab.cli import SCHEMA, run

FIX = Path(__file__).resolve().parents[1] / "fixtures"


def call(*argv):
    buf = io.StringIO()
    code = run([str(a) for a in argv], stdout=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text else None), text


def test_paschke_of_corner_fixture():
    code, rep, _ = call("dilate", "paschke", "--map", FIX / "corner_p.json")
    assert code == 0
    assert rep["schema"] == SCHEMA and rep["status"] == "pass"
    assert rep["result"]["P_blocks"] == [2]
    assert rep["residual_max"] <= 1e-9


def test_gns_of_faithful_state():
    code, rep, _ = call("dilate", "gns", "--map", FIX / "faithful_state.json")
    assert code == 0 and rep["result"]["H_dim"] == 4


def test_stinespring_fixture():
    code, rep, _ = call("dilate", "stinespring", "--map", FIX / "unital_qubit.json")
    assert code == 0 and rep["result"]["K_dim"] >= 1


def test_swap_commutant():
    code, rep, _ = call("algebra", "commutant", "--in", FIX / "swap_generators.json")
    assert code == 0 and rep["result"]["blocks"] == [3, 1]


def test_seqprod_and_dagger():
    code, rep, _ = call("effectus", "seqprod", "--in", FIX / "effect_q.json", "--in", FIX / "effect_r.json")
    assert code == 0
    code, rep, _ = call("effectus", "dagger", "--map", FIX / "pure_map.json")
    assert code == 0 and rep["status"] == "pass"


def test_benzene_fails_with_witness():
    code, rep, _ = call("structs", "oml", "--instance", "O6")
    assert code == 1 and rep["status"] == "fail"
    bad = [l for l in rep["result"]["laws"] if l["status"] == "fail"]
    assert bad and bad[0]["law"] == "orthomodular" and bad[0]["witness"]


def test_benzene_from_file():
    code, _, _ = call("structs", "oml", "--in", FIX / "benzene.json")
    assert code == 1


@pytest.mark.parametrize("inst", ["2", "B4", "B8", "B16"])
def test_boolean_instances_pass(inst):
    code, rep, _ = call("structs", "ea", "--instance", inst, "--exhaustive")
    assert code == 0


def test_coproduct_of_chains():
    chain = FIX / "chain2.json"
    code, rep, _ = call("structs", "coproduct", "--in", chain, "--in", chain)
    assert code == 0 and len(rep["result"]["join_table"]) == 8


def test_missing_file_is_input_error(capsys):
    code, rep, _ = call("dilate", "paschke", "--map", FIX / "nope.json")
    assert code == 2 and rep is None
    assert "nope.json" in capsys.readouterr().err


def test_malformed_json_reports_location(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "source": [2,\n}\n')
    code, _, _ = call("dilate", "paschke", "--map", bad)
    assert code == 2
    assert "bad.json:3:1" in capsys.readouterr().err


def test_mismatched_inputs_are_input_errors():
    code, _, _ = call("effectus", "seqprod", "--in", FIX / "effect_p.json", "--in", FIX / "effect_q.json")
    assert code == 2


def test_bad_tolerance_and_unknown_suite():
    assert call("suite", "--name", "unordered-pair", "--tol", "0")[0] == 2
    assert call("suite", "--name", "no-such-suite")[0] == 2


def test_report_is_byte_reproducible(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert call("suite", "--name", "purity", "--name", "unordered-pair",
                    "--seed", "1", "--out", path)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_report_floats_are_rounded():
    _, _, text = call("dilate", "gns", "--map", FIX / "faithful_state.json")
    assert "0.836660026534" in text and "0.8366600265340756" not in text


@pytest.mark.slow
def test_suite_all_passes():
    code, rep, _ = call("suite", "--all", "--seed", "1")
    assert code == 0 and rep["status"] == "pass"
