import json
import subprocess
import sys

import pytest

from covercalc.cli import run
from covercalc.ramification import descriptor_to_dict
from conftest import cover


def call(*argv):
    status, text, _ = run(list(argv))
    return status, text


def doc(*argv):
    status, text = call(*argv)
    return status, json.loads(text)


def test_genus_c0():
    status, out = doc("genus", "--superelliptic", "6; [0,-1,1]")
    assert status == 0 and out["genus"] == 2 and out["schema_version"] == 1


def test_genus_parse_error():
    status, out = doc("genus", "--superelliptic", "6; 0,1")
    assert status == 2 and out["error"] == "PARSE_ERROR"


def test_tower_verify():
    status, out = doc("tower", "--construction", "hyperelliptic-universal", "--genus", "2", "--p", "7", "--verify")
    assert status == 0 and out["verification"]["status"] == "ACCEPTED"


def test_wild_characteristic():
    status, out = doc("tower", "--construction", "main", "--p", "3")
    assert status == 1 and out["error"] == "WILD_RAMIFICATION"


def test_deterministic_bytes():
    argv = ("tower", "--construction", "main", "--p", "7", "--concrete")
    assert call(*argv) == call(*argv)


def test_verify_round_trip(tmp_path):
    _, text = call("tower", "--construction", "ccc-hypo", "--p", "7")
    path = tmp_path / "t.json"
    path.write_text(text, encoding="utf-8")
    status, out = doc("verify", "--tower", str(path))
    assert status == 0 and out["status"] == "ACCEPTED"
    # reparsing an emitted document gives the same document
    assert json.loads(text) == json.loads(call("tower", "--construction", "ccc-hypo", "--p", "7")[1])


def test_verify_tampered(tmp_path):
    _, text = call("tower", "--construction", "hyperelliptic-universal", "--p", "7")
    t = json.loads(text)
    tau = next(e for e in t["edges"] if e["id"] == "tau")
    tau["descriptor"]["branch"] = [{"point": "@b1", "profile": [2]}]
    path = tmp_path / "t.json"
    path.write_text(json.dumps(t), encoding="utf-8")
    status, out = doc("verify", "--tower", str(path))
    assert out["status"] == "REJECTED"
    assert [a["refs"] for a in out["assertions"] if a["verdict"] == "failed"] == [{"edge": "tau"}]


def test_descriptor_verbs(tmp_path):
    left = tmp_path / "l.json"
    right = tmp_path / "r.json"
    left.write_text(json.dumps(descriptor_to_dict(cover("C", "P1", 2, {f"@b{i}": [2] for i in range(6)}, src_genus=2), True)))
    right.write_text(json.dumps(descriptor_to_dict(cover("E", "P1", 2, {f"@b{i}": [2] for i in range(4)}, src_genus=1), True)))
    status, out = doc("fiber", "--left", str(left), "--right", str(right))
    assert status == 0 and out["product"]["genus"] == 3
    status, out = doc("classify", "--descriptor", str(left))
    assert out["generic"] and out["max_index"] == 2
    status, out = doc("genus", "--descriptor", str(left))
    assert out["genus"] == 2


def test_compose(tmp_path):
    inner = tmp_path / "i.json"
    outer = tmp_path / "o.json"
    inner.write_text(json.dumps(descriptor_to_dict(cover("C0", "E0", 2, {"0#0": [2], "1#0": [2]}, tgt_genus=1), True)))
    outer.write_text(json.dumps(descriptor_to_dict(cover("E0", "P1", 3, {"0": [3], "1": [3], "inf": [3]}), True)))
    status, out = doc("compose", "--inner", str(inner), "--outer", str(outer))
    branch = {e["point"]: e["profile"] for e in out["composite"]["branch"]}
    assert branch == {"0": [6], "1": [6], "inf": [3, 3]}


def test_missing_file():
    status, out = doc("classify", "--descriptor", "/nonexistent.json")
    assert status == 2


@pytest.mark.parametrize("argv,key,value", [
    (("ec-count", "--curve", "weierstrass:0,1", "--field", "GF(7)"), "count", 12),
    (("ec-order", "--curve", "weierstrass:0,1", "--field", "GF(7)", "--point", "3:0"), "order", 2),
    (("velu", "--curve", "weierstrass:0,1", "--field", "GF(7)", "--kernel", "3:0", "--extension", "2"),
     "codomain_count_ext", 48),
    (("self-cover", "--curve", "weierstrass:0,1", "--field", "GF(5)", "--points", "2:2"), "annihilated", True),
    (("hesse", "--field", "GF(7)", "--lam", "0"), "matches_printed", True),
    (("lattes", "--n", "3"), "max_index", 2),
    (("bound", "--chain", "2", "1", "3"), "bound", 6),
])
def test_verbs(argv, key, value):
    status, out = doc(*argv)
    assert status == 0 and out[key] == value


def test_summary_format():
    status, text = call("lattes", "--n", "3", "--format", "summary")
    assert status == 0 and "max_index" in text and not text.startswith("{")


def test_console_script(tmp_path):
    out = tmp_path / "g.json"
    proc = subprocess.run([sys.executable, "-m", "covercalc.cli", "genus", "--superelliptic", "3; [0,-1,1]",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(out.read_text())["genus"] == 1
