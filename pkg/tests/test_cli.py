import io
import json
import subprocess
import sys

import pytest

from foliage.bound_catalog import InvariantRecord
from foliage.cli import run
from foliage.foliation_model import FoliatedSurface
from foliage.gallery import build_example


def call(*argv, env=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return _write


def test_gallery_verify_double_plane():
    code, out, _ = call("gallery", "--case", "ex3_3", "--params", "d=1", "--verify")
    assert code == 0
    data = json.loads(out)
    assert data["quantities"]["vol"] == {"engine": "18", "paper": "18", "status": "match", "route": "zariski"}
    assert data["ok"] is True


def test_gallery_lists_cases():
    code, out, _ = call("gallery")
    assert code == 0
    assert json.loads(out)["cases"]["ex6_5"] == ["gB", "m", "g"]


def test_chain_input(write):
    code, out, _ = call("zariski", write("chain.json", {"chain": [2, 2]}))
    assert code == 0
    assert json.loads(out)["N"] == {"C1": "2/3", "C2": "1/3"}


def test_zariski_on_model(write):
    case = build_example("ex6_4", {"g": 2, "n": 2})
    path = write("m.json", {"model": case.model.to_json(), "candidates": ["Ta", "Tb"]})
    code, out, _ = call("zariski", path)
    assert code == 0
    data = json.loads(out)
    assert data["vol"] == "8" and data["N"] == {"Ta": "1/2", "Tb": "1/2"}


def test_check_inequalities_trivial_record(write):
    code, out, _ = call("check-inequalities", write("r.json", {"vol": "1", "pg": 2}))
    assert code == 0
    data = json.loads(out)
    noether = next(b for b in data["bounds"] if b["id"] == "noether")
    assert noether["status"] == "holds" and noether["lhs"] == "1" and noether["rhs"] == "0"
    assert InvariantRecord.from_json(data["record"]) == InvariantRecord(1, 2)


def test_invariants_of_gallery_model(write):
    case = build_example("ex3_4", {"d": 2})
    code, out, _ = call("invariants", write("m.json", case.model.to_json()))
    assert code == 0
    data = json.loads(out)
    assert data["kf2"] == "81"
    assert data["chi_kf"] == "39"
    assert data["curves"]["E"] == {"Z": "2", "CS": "-1"}


def test_classify_with_field_flag(write):
    path = write("f.json", {"A": [[1, 0, "1"]], "B": [[0, 1, "-1"]]})
    code, out, _ = call("classify-sing", "--field", path)
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 3
    origin = data["singularities"][0]
    assert origin["quotient"] == "-1" and origin["classification"] == "reduced_nondegenerate"


def test_quadratic_coefficients_serialize_as_triples(write):
    field = {"A": [[1, 0, {"a": "0", "b": "1", "m": 2}]], "B": [[0, 1, "1"]], "ext": 2}
    code, out, _ = call("classify-sing", write("f.json", field))
    assert code == 0
    q = json.loads(out)["singularities"][0]["quotient"]
    assert q == {"a": "0", "b": "1", "m": 2}


def test_reduce_nilpotent_and_depth_cap(write, monkeypatch):
    path = write("n.json", {"local": True, "A": [[0, 1, "1"]], "B": [[2, 0, "1"]]})
    code, out, _ = call("reduce", path)
    assert code == 0
    data = json.loads(out)
    assert data["blowups"] == 3 and data["kf_coefficients"] == [0, 0, -1] and data["all_reduced"]
    monkeypatch.setenv("FOLIAGE_DEPTH_CAP", "1")
    code, _, err = call("reduce", path)
    assert code == 3
    e = json.loads(err)
    assert e["error_code"] == "bounded_reduction" and "partial" in e
    code, _, _ = call("reduce", "--depth-cap", "5", path)
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ("gallery", "--case", "ex3_3", "--params", "d=0"),
        ("gallery", "--case", "nope"),
        ("frobnicate",),
        ("zariski", "/nonexistent/file.json"),
        ("classify-sing",),
    ],
)
def test_input_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert out == ""
    assert json.loads(err)["error_code"] == "input_error"


def test_bad_json_exit_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = call("invariants", str(p))
    assert code == 2 and json.loads(err)["error_code"] == "input_error"


def test_inconsistent_model_exit_3(write):
    lattice = {"basis": ["H"], "gram": [[1]], "canonical": ["-3"], "chi": "1"}
    model = {"lattice": lattice, "kf": ["-3"], "curves": [{"label": "L", "class": ["1"], "invariant": False}]}
    code, _, err = call("invariants", write("m.json", model))
    assert code == 3
    assert json.loads(err)["error_code"] == "model_inconsistency"


def test_table_format():
    code, out, _ = call("--format", "table", "gallery", "--case", "ex3_3", "--params", "d=1", "--verify")
    assert code == 0
    assert "quantities.vol.engine" in out and "18" in out
    code2, out2, _ = call("gallery", "--case", "ex3_3", "--params", "d=1", "--verify", "--format", "table")
    assert out2 == out


def test_json_is_byte_identical_across_runs():
    a = call("gallery", "--case", "ex6_5", "--params", "gB=2,m=3,g=2", "--verify")[1]
    b = call("gallery", "--case", "ex6_5", "--params", "gB=2,m=3,g=2", "--verify")[1]
    assert a == b
    assert a == json.dumps(json.loads(a), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@pytest.mark.parametrize("cid,params", [("ex3_4", "d=3"), ("ex6_4", "g=2,n=2"), ("ex3_1", "m=4,n=1,k=2")])
def test_gallery_model_json_roundtrip(cid, params):
    code, out, _ = call("gallery", "--case", cid, "--params", params)
    data = json.loads(out)
    model = FoliatedSurface.from_json(data["model"])
    again = model.to_json()
    assert json.dumps(again, sort_keys=True) == json.dumps(data["model"], sort_keys=True)


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "foliage.cli", "gallery", "--case", "ex3_2", "--params", "d=0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error_code"] == "input_error"
