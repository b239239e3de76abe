import json
import subprocess
import sys

import pytest

from opp.cli import EXIT_FINDINGS, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_embedded(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == EXIT_OK and "accepted (0 errors, 0 warnings)" in out


def test_validate_broken_framework(tmp_path, capsys, framework):
    from opp.formats import serialize

    doc = json.loads(serialize(framework))
    doc["payload"]["linkages"][0]["target"] = "ghost"
    path = tmp_path / "fw.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", "--framework", str(path), "--format", "data")
    assert code == EXIT_INPUT
    assert "dangling-reference" in out


def test_adequacy_fdd(capsys):
    code, out, _ = run(capsys, "adequacy", "--method", "fdd")
    assert code == EXIT_OK
    assert "weighted 7/8 (87.5%)" in out


def test_strict_exit_on_discrepancies(capsys):
    assert run(capsys, "consistency", "--method", "method-a")[0] == EXIT_OK
    assert run(capsys, "consistency", "--method", "method-a", "--strict")[0] == EXIT_FINDINGS
    assert run(capsys, "consistency", "--method", "xp", "--strict")[0] == EXIT_OK


def test_rank(capsys):
    code, out, _ = run(capsys, "rank", "fdd", "xp", "method-a", "--format", "data")
    assert code == EXIT_OK
    assert [e["method"] for e in json.loads(out)["entries"]] == ["xp", "method-a", "fdd"]


def test_usage_errors(capsys):
    assert run(capsys, "rank", "xp")[0] == EXIT_USAGE
    assert run(capsys, "adequacy", "--method", "xp", "--method", "fdd")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["adequacy", "--format", "yaml", "--method", "xp"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "adequacy", "--method", str(bad))
    assert code == EXIT_INPUT and "line 1" in err
    assert run(capsys, "adequacy", "--method", "no-such-method")[0] == EXIT_INPUT
    assert run(capsys, "explain", "no-such-objective")[0] == EXIT_INPUT


def test_output_file(tmp_path, capsys):
    target = tmp_path / "report.csv"
    code, out, _ = run(capsys, "adequacy", "--method", "xp", "--format", "csv", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert target.read_text().startswith("element-id,numerator")


def test_repeat_runs_are_byte_identical(tmp_path):
    cmd = [sys.executable, "-m", "opp.cli", "rank", "xp", "fdd", "method-a", "--format", "data"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first


def test_explain(capsys):
    code, out, _ = run(capsys, "explain", "maximal-adaptability", "--method", "fdd")
    assert code == EXIT_OK
    assert "accommodating-change" in out and "weight 2" in out


def test_capability_with_measurements(tmp_path, capsys):
    method = tmp_path / "pp.json"
    method.write_text(json.dumps({"kind": "method", "version": "opp/1", "payload": {
        "id": "pp", "name": "Pairing only", "objectives": ["human-centric"],
        "principles": ["technical-excellence"], "practices": ["pair-programming"]}}))
    data = tmp_path / "m.json"
    data.write_text(json.dumps({"kind": "measurements", "version": "opp/1", "payload": {"measurements": [
        {"practice": "pair-programming", "property": "one-terminal-per-pair", "kind": "boolean", "raw": True},
        {"practice": "pair-programming", "property": "single-driver", "kind": "boolean", "raw": False},
        {"practice": "pair-programming", "property": "willingness-to-share-knowledge", "kind": "likert5", "raw": 5},
    ]}}))
    code, out, _ = run(capsys, "capability", "--method", str(method), "--measurements", str(data),
                       "--format", "data", "--policy", "strict")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["evidence"] == "1/1" and report["missing"] == []
    # (1 + 0 + 1) / 3 down a single-child chain
    assert report["nodes"][0]["score"] == "2/3"

    code, _, err = run(capsys, "effectiveness", "--method", str(method), "--measurements", str(data))
    assert code == EXIT_INPUT and "willingness" in err
