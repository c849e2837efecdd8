import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hambraid import cli
from hambraid.report import Bundle, Table, dumps_csv, emit_report, fmt_float, to_jsonable
from hambraid.scenario import ScenarioError, load_scenario, validate


def write(tmp_path, data, name="sc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_validation_paths():
    with pytest.raises(ScenarioError) as e:
        validate({"stability": {"amplitudes": [0.0, "x"]}})
    assert e.value.path == "scenario.stability.amplitudes[1]"
    with pytest.raises(ScenarioError) as e:
        validate({"gf2": {"instancez": 3}})
    assert e.value.path == "scenario.gf2.instancez" and "unknown key" in str(e.value)
    with pytest.raises(ScenarioError):
        validate({"seed": -1})


def test_toml_and_json_agree(tmp_path):
    (tmp_path / "a.toml").write_text('seed = 3\n[gf2]\ninstances = 5\n')
    a = load_scenario(tmp_path / "a.toml")
    b = load_scenario(write(tmp_path, {"seed": 3, "gf2": {"instances": 5}}))
    assert a.config_hash() == b.config_hash()


def test_parse_error_is_scenario_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    with pytest.raises(ScenarioError):
        load_scenario(p)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_formatting_round_trips_12_digits(x):
    y = float(fmt_float(x))
    assert y == pytest.approx(x, rel=1e-11, abs=0)


def test_non_finite_json():
    assert to_jsonable([float("inf"), float("nan")]) == ["inf", "nan"]


def test_empty_table_has_header(tmp_path):
    b = Bundle("orbits", {"orbits": Table(["index", "x", "y"], [])})
    emit_report(b, tmp_path, "csv")
    assert (tmp_path / "orbits.csv").read_text() == "index,x,y\n"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert "orbits.csv" in manifest["artifacts"]


def test_unknown_verdict_not_coerced():
    text = dumps_csv(["verdict"], [{"verdict": "unknown"}, {"verdict": "yes"}])
    assert text.splitlines()[1:] == ["unknown", "yes"]


def test_same_bundle_same_bytes(tmp_path):
    b = Bundle("x", {"t": Table(["a"], [{"a": 1.0 / 3}])}, {"d": {"v": [1, 2.5]}})
    emit_report(b, tmp_path / "1", timings={"total_seconds": 1.0})
    emit_report(b, tmp_path / "2", timings={"total_seconds": 2.0})
    for name in ("t.csv", "t.json", "d.json", "manifest.json"):
        assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "2" / name).read_bytes()


def test_entropy_command(tmp_path, capsys):
    sc = write(tmp_path, {"entropy": {"words": [{"n": 3, "word": "1 -2"}], "N": 18}})
    assert cli.main(["entropy", "--scenario", str(sc), "--out", str(tmp_path / "o")]) == 0
    rows = json.loads((tmp_path / "o" / "entropy.json").read_text())
    assert rows[0]["rate"] == pytest.approx(0.9624, abs=0.01)
    assert "gamma(1 -2)" in capsys.readouterr().out


def test_symbolic_command(tmp_path):
    sc = write(tmp_path, {"symbolic": {"m_values": [4]}})
    assert cli.main(["symbolic-check", "--scenario", str(sc), "--out", str(tmp_path / "o"), "--quiet"]) == 0
    rows = json.loads((tmp_path / "o" / "q_checks.json").read_text())
    assert rows and all(r["ok"] for r in rows)


def test_gf2_command_seed_override(tmp_path):
    sc = write(tmp_path, {"gf2": {"instances": 20, "max_dim": 4}})
    out = tmp_path / "o"
    assert cli.main(["gf2-corpus", "--scenario", str(sc), "--out", str(out), "--seed", "7",
                     "--format", "csv", "--quiet"]) == 0
    assert (out / "gf2_corpus.csv").exists() and not (out / "gf2_corpus.json").exists()
    assert json.loads((out / "manifest.json").read_text())["seed"] == 7


def test_orbits_command(tmp_path):
    sc = write(tmp_path, {"hamiltonian": {"preset": "pendulum"}, "orbits": {"k": 1, "grid": 8, "epsilon": 0.01}})
    out = tmp_path / "o"
    assert cli.main(["orbits", "--scenario", str(sc), "--out", str(out), "--quiet"]) == 0
    rows = json.loads((out / "orbits.json").read_text())
    assert sorted(r["kind"] for r in rows) == ["elliptic", "hyperbolic"]
    assert (out / "trajectory_000.csv").exists()
    assert json.loads((out / "orbits_report.json").read_text())["isolation"]["isolated"]


def test_braid_command_on_constant_orbits(tmp_path):
    sc = write(tmp_path, {"hamiltonian": {"preset": "rotation", "params": {"c": 1.0}},
                          "orbits": {"k": 1, "grid": 6}, "braid": {"invariance_angles": [0.3, 1.2]}})
    out = tmp_path / "o"
    assert cli.main(["braid", "--scenario", str(sc), "--out", str(out), "--quiet"]) == 0
    row = json.loads((out / "braid.json").read_text())[0]
    assert row["n"] == 1 and row["word"] == ""


@pytest.mark.parametrize("data", [
    {"bogus": 1},
    {"entropy": {"words": [{"n": 1, "word": ""}]}},
    {"hamiltonian": {"preset": "nope"}, "orbits": {}},
])
def test_malformed_scenarios_exit_2(tmp_path, data, capsys):
    sc = write(tmp_path, data)
    cmd = "orbits" if "hamiltonian" in data else "entropy"
    assert cli.main([cmd, "--scenario", str(sc), "--out", str(tmp_path / "o")]) == 2
    assert capsys.readouterr().err.startswith("error: scenario")


def test_missing_section_exit_2(tmp_path):
    sc = write(tmp_path, {"seed": 1})
    assert cli.main(["stability", "--scenario", str(sc), "--out", str(tmp_path / "o")]) == 2


def test_stability_without_target_exit_2(tmp_path, capsys):
    sc = write(tmp_path, {"stability": {"hamiltonian": "bump-perturbed", "hamiltonian_params": {"amplitude": 0.0},
                                        "k": 1, "grid": 4, "step": 0.01, "coarse_step": None, "target_period": 1,
                                        "target_kind": "hyperbolic", "amplitudes": [0.0]}})
    assert cli.main(["stability", "--scenario", str(sc), "--out", str(tmp_path / "o")]) == 2
    assert "scenario.stability" in capsys.readouterr().err


def test_stability_command_small(tmp_path):
    sc = write(tmp_path, {"stability": {"hamiltonian": "bump-perturbed", "hamiltonian_params": {"amplitude": 0.0},
                                        "k": 1, "grid": 6, "step": 0.01, "coarse_step": None, "target_period": 1,
                                        "target_kind": "elliptic", "amplitudes": [0.0, 1e-4],
                                        "bump_center": [0.35, 0.2], "samples_per_period": 64}})
    out = tmp_path / "o"
    assert cli.main(["stability", "--scenario", str(sc), "--out", str(out), "--quiet"]) == 0
    text = (out / "stability.csv").read_text().splitlines()
    assert text[0].startswith("amplitude,hofer") and len(text) == 3
