from __future__ import annotations

import json
import math

import numpy as np
import pytest

from nevlab.cli import main
from nevlab.scenario import ScenarioError, parse


def _write(tmp_path, data, name="s.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data, indent=2))
    return str(path)


SWEEP = {
    "seed": 0,
    "grid": {"eps0": 0.125, "count": 10},
    "gauges": {"sq": {"power": 2}, "half": {"power": 0.5}},
    "tasks": [
        {"op": "sweep", "function": "z", "kappa": "half", "lam": "sq", "output": "z.csv"},
        {"op": "augur", "function": "mixed", "lam": "sq", "output": "aug.csv"},
        {"op": "classify", "function": "-1/z", "taus": [0, 0.5], "output": "cls.json"},
        {"op": "horocycle", "function": "z", "gamma": {"power": 1.5}, "betas": [2, 4, 8], "output": "h.csv"},
        {"op": "layer_cake", "measure": "lebesgue", "gamma": "half", "output": "lc.json"},
        {"op": "sub_density", "measure": "cantor", "F": {"power": -0.36907024642854247}, "output": "sd.json"},
    ],
}


def _read_csv(path):
    lines = open(path).read().splitlines()
    return lines[0].split(","), [row.split(",") for row in lines[1:]]


def test_run_sweep_of_identity(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--scenario", _write(tmp_path, SWEEP), "--out-dir", str(out)]) == 0
    header, rows = _read_csv(out / "z.csv")
    assert header == ["epsilon", "value", "lower", "upper_density", "upper_tail", "method"]
    for row in rows:
        eps, val = float(row[0]), float(row[1])
        lam = eps ** 2
        assert val == pytest.approx(lam / math.sqrt(lam), rel=1e-14)
        assert len(row[1].split("e")[0].replace("-", "").replace(".", "")) == 17
    summary = capsys.readouterr().out
    assert "sweep" in summary and "ok" in summary


def test_augur_csv_is_a_sandwich(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--scenario", _write(tmp_path, SWEEP), "--out-dir", str(out)]) == 0
    _, rows = _read_csv(out / "aug.csv")
    for row in rows:
        val, lo, dens, tail = (float(x) for x in row[1:5])
        assert lo <= val <= dens + tail


def test_classify_and_horocycle_outputs(tmp_path):
    out = tmp_path / "out"
    main(["run", "--scenario", _write(tmp_path, SWEEP), "--out-dir", str(out)])
    verdicts = json.loads((out / "cls.json").read_text())
    assert [v["class"] for v in verdicts] == ["Julia", "Julia"]
    header, rows = _read_csv(out / "h.csv")
    assert header == ["beta", "sup"] and len(rows) == 3
    assert json.loads((out / "sd.json").read_text())["holds"] is True


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    path = _write(tmp_path, SWEEP)
    assert main(["run", "--scenario", path, "--out-dir", str(a)]) == 0
    assert main(["run", "--scenario", path, "--out-dir", str(b), "--jobs", "2"]) == 0
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_malformed_json_exit_1(tmp_path, capsys):
    path = _write(tmp_path, '{"tasks": [\n  {"op": "sweep",}\n]}')
    assert main(["run", "--scenario", path]) == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_precondition_exit_2(tmp_path, capsys):
    data = {"tasks": [{"op": "augur", "function": "mixed", "lam": {"power": 0.5}, "output": "a.csv"}]}
    assert main(["run", "--scenario", _write(tmp_path, data), "--out-dir", str(tmp_path)]) == 2
    assert "lam is O(t)" in capsys.readouterr().out


def test_missing_file_exit_1(tmp_path):
    assert main(["run", "--scenario", str(tmp_path / "nope.json")]) == 1


def test_unknown_suite_exit_1(capsys):
    assert main(["verify", "nonexistent"]) == 1


def test_verify_single_suite(capsys):
    assert main(["verify", "closed-form"]) == 0
    assert "[PASS]" in capsys.readouterr().out


def test_classify_subcommand_stdout(capsys):
    assert main(["classify", "--function", "cantor", "--tau", "0", "--tau", "2"]) == 0
    verdicts = json.loads(capsys.readouterr().out)
    assert [v["class"] for v in verdicts] == ["Crypto", "Julia"]


def test_sweep_subcommand_direct(capsys):
    assert main(["sweep", "--function=-1/z", "--method", "direct", "--eps0", "0.125", "--count", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    eps, val = (float(x) for x in lines[1].split(",")[:2])
    assert val == pytest.approx(math.pi / (4 * eps), rel=1e-9)


def test_horocycle_subcommand_classification_error(capsys):
    assert main(["horocycle", "--function=-1/z", "--gamma", '{"power": 2}']) == 2


def test_foliate_subcommand(capsys, monkeypatch):
    monkeypatch.setenv("NEVLAB_JOBS", "2")
    assert main(["foliate", "--function", "z", "--kappa", "one", "--lam", "id"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out[0]["enigma"]["member"] is True


def test_usage_error_exit_1():
    with pytest.raises(SystemExit) as info:
        main(["sweep"])
    assert info.value.code == 1


# -- scenario schema -----------------------------------------------------------------------------

def test_scenario_rejects_duplicate_outputs():
    data = {"tasks": [{"op": "classify", "function": "z", "output": "a"},
                      {"op": "classify", "function": "z", "output": "a"}]}
    with pytest.raises(ScenarioError, match="duplicate"):
        parse(data)


def test_scenario_rejects_bad_grid():
    with pytest.raises(ScenarioError, match="grid"):
        parse({"grid": {"values": [0.1, 0.2]}, "tasks": [{"op": "classify", "function": "z"}]})


def test_scenario_locates_bad_component():
    text = '{\n "measures": {\n  "bad": {"components": [{"kind": "atoms", "atoms": [[0, -1]]}]}\n },\n' \
           ' "tasks": [{"op": "classify", "function": "z"}]\n}'
    with pytest.raises(ScenarioError) as info:
        parse(json.loads(text), text)
    assert info.value.line == 3 and "measures.bad" in str(info.value)


def test_scenario_builds_all_function_forms():
    data = {
        "measures": {"m": {"components": [{"kind": "density", "breakpoints": [-1, 1], "pieces": [[1]]},
                                          {"kind": "power", "exponent": 0.5},
                                          {"kind": "cantor"},
                                          {"kind": "self_similar", "maps": [[0.4, 0], [0.4, 0.6]],
                                           "weights": [0.5, 0.5]}]}},
        "functions": {
            "f": {"form": "triple", "a": 0.1, "b": 1, "measure": "m"},
            "r": {"form": "resolvent", "diagonal": [0, 1, 2], "off_diagonal": [1, 1]},
            "g": {"form": "mobius", "map": [2, 1, 1, 3], "inner": "f"},
            "h": {"form": "neg_reciprocal", "inner": "r"},
            "k": {"form": "aronszajn_krein", "inner": "r", "alpha": 0.5},
        },
        "tasks": [{"op": "classify", "function": "f"}],
    }
    scen = parse(data)
    for name in "frghk":
        assert scen.function(name)(0.1 + 1j).imag > 0
    assert scen.measure("m").total_mass() == pytest.approx(2 + 2 * 2 / 3 + 1 + 1)


def test_scenario_rejects_non_pick_function():
    data = {"functions": {"bad": {"form": "triple", "b": -1}}, "tasks": [{"op": "classify", "function": "bad"}]}
    with pytest.raises(ScenarioError):
        parse(data)
