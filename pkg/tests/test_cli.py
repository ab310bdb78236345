"""CLI surface: commands, exit codes, config handling, artifact determinism."""

import json
import subprocess
import sys

import pytest

from assurekit.cli import main

RUN = [sys.executable, "-m", "assurekit.cli"]


def run_cli(args, **kw):
    return subprocess.run(RUN + args, capture_output=True, text=True, **kw)


def test_solve_reports_equilibrium(tmp_path, capsys):
    rc = main(["solve", "--preset", "baseline", "--T", "47", "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["q_high"] == pytest.approx(0.468, abs=0.0005)
    assert report["success_prob"] == pytest.approx(0.521, abs=0.01)
    assert (tmp_path / "solve_T47.csv").exists()


def test_unknown_preset_is_config_error(tmp_path, capsys):
    rc = main(["solve", "--preset", "nope", "--T", "5", "--out", str(tmp_path)])
    assert rc == 2


def test_bad_threshold_is_config_error(tmp_path):
    assert main(["solve", "--preset", "baseline", "--T", "0",
                 "--out", str(tmp_path)]) == 2
    assert main(["design", "--preset", "baseline", "--T-range", "90:5",
                 "--out", str(tmp_path)]) == 2


def test_design_truncated_range(tmp_path, capsys):
    rc = main(["design", "--preset", "baseline", "--T-range", "40:55",
               "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["argmax_T"] == 47
    body = (tmp_path / "conditional_baseline.csv").read_text()
    assert body.splitlines()[0] == "T,tau,q_high,success_prob,delta,objective,flags"
    assert "\r" not in body


def test_durable_uses_preset_floor(tmp_path, capsys):
    rc = main(["durable", "--preset", "durable_60", "--T-range", "45:65",
               "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["argmax_T"] == 60


def test_ex_ante_with_seed_model(tmp_path, capsys):
    rc = main(["ex-ante", "--preset", "baseline", "--T-range", "45:50",
               "--seed-model", "deterministic:100", "--out", str(tmp_path)])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["argmax_T"] == 47


def test_compare_reports_region(tmp_path, capsys):
    rc = main(["compare", "--e", "1.5", "--alpha", "3", "--pi", "0.6",
               "--mu", "0.2", "--k", "0.01", "--xi", "3", "--N", "100",
               "--out", str(tmp_path)])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["region"] == "coordination_gap"
    assert rep["assurance_interval"] == [13, 60]
    assert 0 < rep["p_assurance"] < rep["p_survey"] <= 1


def test_scalar_cutoff_command(tmp_path, capsys):
    rc = main(["scalar-cutoff", "--preset", "finite_n_benchmark", "--T", "53",
               "--out", str(tmp_path)])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["x_star"] < 0
    assert rep["dx_ds"] < 0 and rep["dx_deta"] < 0


def test_self_audit_clean(capsys):
    assert main(["self-audit"]) == 0
    assert json.loads(capsys.readouterr().out)["clean"] is True


def test_config_file_inline_params(tmp_path, capsys):
    cfg = {
        "model_params": {"N": 100, "pi": 0.65, "lam": 0.4, "alpha_L": 0.5,
                         "alpha_H": 2.0, "s": 0.8, "w_bar": 0.35, "k": 0.065,
                         "safety": {"kind": "exponential", "xi": 3.0}},
        "T": 47,
        "out_dir": str(tmp_path),
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    rc = main(["solve", "--config", str(path)])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["q_high"] == pytest.approx(0.468,
                                                                          abs=0.0005)


def test_malformed_config(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["solve", "--config", str(path)]) == 2


def test_print_config_schema(capsys):
    assert main(["--print-config-schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert schema["title"].startswith("assurekit")


def test_env_var_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ASSUREKIT_OUT", str(tmp_path / "envout"))
    rc = main(["solve", "--preset", "baseline", "--T", "47"])
    assert rc == 0
    assert (tmp_path / "envout" / "solve_T47.csv").exists()


def test_unknown_figure(tmp_path):
    assert main(["replicate", "--figure", "fig_nope", "--out", str(tmp_path)]) == 2


def test_replicate_design_objective(tmp_path, capsys):
    rc = main(["replicate", "--figure", "fig_design_objective",
               "--out", str(tmp_path), "--emit", "csv,svg"])
    assert rc == 0
    csv_path = tmp_path / "fig_design_objective.csv"
    svg_path = tmp_path / "fig_design_objective.svg"
    assert csv_path.exists() and svg_path.exists()
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "T,tau,q_high,success_prob,delta,objective,flags"
    assert len(lines) == 1 + 98          # T = 2..99
    assert svg_path.read_text().startswith("<svg")


def test_replicate_determinism_and_parallelism(tmp_path):
    outs = {}
    for tag, degree in (("a", 1), ("b", 1), ("c", 4)):
        d = tmp_path / tag
        rc = main(["replicate", "--figure", "fig_design_objective",
                   "--out", str(d), "--parallel", str(degree)])
        assert rc == 0
        outs[tag] = (d / "fig_design_objective.csv").read_bytes()
    assert outs["a"] == outs["b"] == outs["c"]


EXPECTED_PANELS = {
    "fig_participation_success": ["fig_participation_success_participation.csv",
                                  "fig_participation_success_success.csv",
                                  "fig_participation_success_type_shares.csv"],
    "fig_both_selections": ["fig_both_selections.csv"],
    "fig_multiplicity": ["fig_multiplicity_selections.csv",
                         "fig_multiplicity_count.csv"],
    "fig_safety_comparison": ["fig_safety_comparison_participation.csv",
                              "fig_safety_comparison_objective.csv"],
    "fig_alt_safety": ["fig_alt_safety_participation.csv",
                       "fig_alt_safety_objective.csv"],
    "fig_overton": ["fig_overton.csv"],
    "fig_overton_prior_sensitivity": ["fig_overton_prior_sensitivity_shift.csv",
                                      "fig_overton_prior_sensitivity_objective.csv"],
    "fig_finite_n_threshold": ["fig_finite_n_threshold.csv"],
    "fig_finite_n_durable": ["fig_finite_n_durable.csv"],
}


def _read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


@pytest.mark.parametrize("figure", sorted(EXPECTED_PANELS))
def test_replicate_every_exhibit(figure, tmp_path, capsys):
    rc = main(["replicate", "--figure", figure, "--out", str(tmp_path)])
    assert rc == 0
    for name in EXPECTED_PANELS[figure]:
        path = tmp_path / name
        assert path.exists(), name
        header, rows = _read_csv(path)
        assert header[0] == "T" and len(rows) == 98

    if figure == "fig_multiplicity":
        _, rows = _read_csv(tmp_path / "fig_multiplicity_count.csv")
        counts = {int(r[1]) for r in rows}
        assert counts <= {1, 2, 3}
    if figure == "fig_finite_n_durable":
        header, rows = _read_csv(tmp_path / "fig_finite_n_durable.csv")
        dur = [(int(r[0]), float(r[2])) for r in rows]
        assert max(dur, key=lambda t: t[1])[0] == 60
    if figure == "fig_finite_n_threshold":
        header, rows = _read_csv(tmp_path / "fig_finite_n_threshold.csv")
        fn = [(int(r[0]), float(r[1])) for r in rows]
        red = [(int(r[0]), float(r[2])) for r in rows]
        assert abs(max(fn, key=lambda t: t[1])[0] - 56) <= 1
        assert abs(max(red, key=lambda t: t[1])[0] - 53) <= 1
    if figure == "fig_overton_prior_sensitivity":
        _, rows = _read_csv(tmp_path / "fig_overton_prior_sensitivity_objective.csv")
        for r in rows:
            diffuse, concentrated = float(r[1]), float(r[3])
            assert concentrated <= diffuse + 1e-12
    if figure == "fig_both_selections":
        _, rows = _read_csv(tmp_path / "fig_both_selections.csv")
        assert max(float(r[2]) for r in rows) < 0.2 * max(float(r[1]) for r in rows)


def test_cli_entry_point_subprocess(tmp_path):
    res = run_cli(["solve", "--preset", "baseline", "--T", "47",
                   "--out", str(tmp_path)])
    assert res.returncode == 0
    assert json.loads(res.stdout)["T"] == 47
    bad = run_cli(["overton", "--preset", "finite_n_benchmark",
                   "--out", str(tmp_path)])
    assert bad.returncode == 2
    assert json.loads(bad.stderr)["error"] == "config"
