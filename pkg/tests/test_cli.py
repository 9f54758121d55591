import csv
import json

import pytest

from singcurve.cli import EXIT_CERT, EXIT_OK, EXIT_SCHEMA, EXIT_UNSUPPORTED, main
from singcurve.curvefile import (
    SCHEMA_TAG,
    SchemaError,
    curve_from_dict,
    curve_to_dict,
    divisors_from_dict,
    dumps,
    load_json,
)
from singcurve.fixtures import all_fixtures, fixture_divisors


@pytest.fixture(scope="module")
def fx(tmp_path_factory):
    d = tmp_path_factory.mktemp("fx")
    assert main(["fixtures", "--out", str(d)]) == EXIT_OK
    return d


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == EXIT_OK and out.out.lstrip().startswith("{") else out)


def test_fixture_files_exist(fx):
    assert sorted(p.stem for p in fx.glob("*.json")) == sorted(all_fixtures())


@pytest.mark.parametrize(
    "name, delta, genus, gorenstein",
    [("node", 1, 1, True), ("cusp", 1, 1, True), ("3pt", 2, 2, False)],
)
def test_analyze(capsys, fx, name, delta, genus, gorenstein):
    code, rep = run(capsys, "analyze", fx / f"{name}.json")
    assert code == EXIT_OK
    assert rep["schema"] == SCHEMA_TAG and rep["command"] == "analyze"
    assert rep["totals"]["delta"] == delta and rep["totals"]["arithmetic_genus"] == genus
    assert rep["singularities"][0]["gorenstein"] is gorenstein


def test_round_trip_gives_identical_reports(capsys, fx, tmp_path):
    for name in all_fixtures():
        code, first = run(capsys, "analyze", fx / f"{name}.json")
        text = (fx / f"{name}.json").read_text()
        again = tmp_path / f"{name}.json"
        again.write_text(dumps(load_json(text)))
        code2, second = run(capsys, "analyze", again)
        assert code == code2 == EXIT_OK and first == second


def test_in_memory_round_trip_is_byte_identical():
    for name, curve in all_fixtures().items():
        text = dumps(curve_to_dict(curve, fixture_divisors(name, curve)))
        data = load_json(text)
        c2 = curve_from_dict(data)
        assert dumps(curve_to_dict(c2, divisors_from_dict(c2, data))) == text


def test_divisor_report(capsys, fx):
    code, rep = run(capsys, "divisor", fx / "cusp.json", "obar")
    assert code == EXIT_OK
    st = rep["stalks"][0]
    assert rep["degree"] == 1 and st["free"] is False
    assert st["middleding"]["is_normalisation"] is True
    code, rep = run(capsys, "divisor", fx / "cusp.json", "O")
    assert rep["degree"] == 0


def test_rr_sweep(capsys, fx):
    code, rep = run(capsys, "rr", fx / "node.json", "--sweep", "w=2:-3..5")
    assert code == EXIT_OK
    assert rep["all_pass"] and len(rep["checks"]) == 9 and all(c["status"] == "PASS" for c in rep["checks"])
    code, rep = run(capsys, "rr", fx / "node.json")
    assert rep["checks"] == []


def test_serre(capsys, fx):
    code, rep = run(capsys, "serre", fx / "3pt.json")
    assert code == EXIT_OK
    assert rep["stalks"][0]["pairing_rank"] == 2 and rep["h0_omega"] == 2


def test_krichever_and_presets(capsys, fx, tmp_path):
    inp = tmp_path / "ml.json"
    inp.write_text(json.dumps({"marked": [{"component": "w", "value": "1"}], "parts": [["1", "1"]]}))
    code, rep = run(capsys, "krichever", fx / "node.json", "--input", inp)
    assert code == EXIT_OK and rep["solvable"] is True
    assert rep["solution"] == ["w/(1 - 2*w + w**2)"]
    inp.write_text(json.dumps({"marked": [{"component": "w", "value": "1"}]}))
    code, rep = run(capsys, "krichever", fx / "node.json", "--input", inp, "--preset", "kdv")
    assert code == EXIT_OK and rep["case"] == 3


def test_zero_flow_is_trivial(capsys, fx, tmp_path):
    inp = tmp_path / "zero.json"
    inp.write_text(json.dumps({"marked": [{"component": "w", "value": "1"}], "parts": [[]]}))
    code, rep = run(capsys, "krichever", fx / "node.json", "--input", inp)
    assert code == EXIT_OK and rep["flow"]["kind"] == "trivial"


def test_baker_run_and_csv(capsys, fx, tmp_path):
    inp = tmp_path / "ba.json"
    inp.write_text(json.dumps({
        "divisor": "pole-at-2",
        "marked": [{"component": "w", "value": "1"}],
        "times": [[0, 0], [0.3, -0.2]],
        "samples": ["0.5+0.25*i", "-2"],
        "heat_check": True,
    }))
    out_csv = tmp_path / "ba.csv"
    code, rep = run(capsys, "baker", fx / "node.json", "--input", inp, "--csv", out_csv)
    assert code == EXIT_OK
    assert all(not r["exceptional"] for r in rep["runs"])
    assert all(float(r["max_relative_residual"]) < 1e-9 for r in rep["runs"])
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["t", "w", "j", "re", "im"] and len(rows) == 5


def test_eigencurve(capsys):
    code, rep = run(capsys, "eigencurve")
    assert code == EXIT_OK
    st = rep["stalks"][0]
    assert st["delta"] == 3 and st["value_rank"] == 2 and st["middleding"]["free"] is False


def test_text_output(capsys, fx):
    code = main(["analyze", str(fx / "node.json"), "--text"])
    out = capsys.readouterr().out
    assert code == EXIT_OK and out.startswith("schema")


def test_out_flag(capsys, fx, tmp_path):
    target = tmp_path / "rep.json"
    assert main(["analyze", str(fx / "cusp.json"), "--out", str(target)]) == EXIT_OK
    assert json.loads(target.read_text())["totals"]["delta"] == 1


def test_exit_codes(capsys, fx, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{bad")
    assert main(["analyze", str(bad)]) == EXIT_SCHEMA
    assert main(["analyze", str(tmp_path / "missing.json")]) == EXIT_SCHEMA
    data = json.loads((fx / "node.json").read_text())
    data["components"] = []
    bad.write_text(json.dumps(data))
    assert main(["analyze", str(bad)]) == EXIT_SCHEMA
    assert main(["divisor", str(fx / "node.json"), "nope"]) == EXIT_SCHEMA
    # a ring generated by a coordinate of one branch never certifies
    data = json.loads((fx / "node.json").read_text())
    data["singularities"][0]["ring"] = {"generators": ["(t, 0)"]}
    bad.write_text(json.dumps(data))
    assert main(["analyze", str(bad)]) == EXIT_CERT
    inp = tmp_path / "p.json"
    inp.write_text(json.dumps({"marked": [{"component": "w", "value": "1"}], "parts": [["1"]], "period": "1"}))
    assert main(["krichever", str(fx / "cusp.json"), "--input", str(inp)]) == EXIT_UNSUPPORTED
    capsys.readouterr()


def test_schema_errors_carry_positions():
    text = '{\n  "schema": "singcurve/1",\n  "components": [],\n  "points": []\n}'
    with pytest.raises(SchemaError) as e:
        load_json(text)
    assert e.value.line == 3
