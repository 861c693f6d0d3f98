import csv
import json
import math

import pytest

from stratlab.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


# ---------------------------------------------------------------------------
# model resolution


def test_classify_catalog_model(capsys):
    code, out = run_json(capsys, ["classify", "--model", "spindle_half",
                                  "--K", "1", "--N", "2"])
    assert code == EXIT_OK
    assert out["verdict"]["holds"] is True
    assert out["verdict"]["condition"] == "rcd"
    assert out["hash"]


def test_classify_model_file_with_sectional(capsys, tmp_path):
    spec = {"schema": 1, "family": "cone",
            "params": {"link": {"kind": "circle", "radius": 0.75},
                       "radius": 1.0}}
    path = tmp_path / "cone.json"
    path.write_text(json.dumps(spec))
    code, out = run_json(capsys, ["classify", "--model", f"@{path}",
                                  "--K", "0", "--N", "2",
                                  "--sectional", "0.0"])
    assert code == EXIT_OK
    assert out["verdict"]["holds"] is True
    assert out["cbb"]["holds"] is True
    assert out["cbb"]["condition"] == "cbb"


def test_classify_indeterminate_with_estimate(capsys):
    code, out = run_json(capsys, ["classify", "--model", "fermi_narrow",
                                  "--K", "2", "--N", "3", "--estimate"])
    assert code == EXIT_OK
    assert out["verdict"]["holds"] is None
    assert math.isfinite(out["verdict"]["diagnostics"]["ricci_estimate"])


def test_unknown_model_is_config_error(capsys):
    assert main(["classify", "--model", "nonsense",
                 "--K", "1", "--N", "2"]) == EXIT_CONFIG
    assert "unknown model" in capsys.readouterr().err


def test_bad_model_files_are_config_errors(capsys, tmp_path):
    missing = tmp_path / "missing.json"
    assert main(["classify", "--model", f"@{missing}",
                 "--K", "1", "--N", "2"]) == EXIT_CONFIG
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["classify", "--model", f"@{junk}",
                 "--K", "1", "--N", "2"]) == EXIT_CONFIG


def test_missing_arguments_exit_config(capsys):
    assert main([]) == EXIT_CONFIG
    assert main(["classify", "--model", "spindle_half"]) == EXIT_CONFIG


# ---------------------------------------------------------------------------
# distance / volume / spectrum


def test_distance_json_coordinates(capsys):
    code, out = run_json(capsys, ["distance", "--model", "round_sphere_2",
                                  "--p", "[0, 0, 1]", "--q", "[1, 0, 0]"])
    assert code == EXIT_OK
    assert out["distance"] == pytest.approx(math.pi / 2, rel=1e-12)


def test_distance_named_points(capsys):
    code, out = run_json(capsys, ["distance", "--model", "spindle_half",
                                  "--p", "pole", "--q", "north"])
    assert code == EXIT_OK
    assert out["distance"] == pytest.approx(math.pi, rel=1e-12)


def test_distance_bad_point_name(capsys):
    assert main(["distance", "--model", "round_sphere_2",
                 "--p", "pole", "--q", "nowhere"]) == EXIT_CONFIG


def test_volume_matches_analytic(capsys):
    code, out = run_json(capsys, ["volume", "--model", "spindle_half",
                                  "--samples", "20000", "--seed", "3"])
    assert code == EXIT_OK
    assert out["analytic"] == pytest.approx(2 * math.pi, rel=1e-12)
    assert abs(out["mc_estimate"] - out["analytic"]) <= 4 * out["mc_stderr"]


def test_spectrum_output_shape(capsys):
    code, out = run_json(capsys, ["spectrum", "--model", "spindle_half",
                                  "--samples", "1500", "--eps", "0.25",
                                  "--seed", "4", "--count", "5"])
    assert code == EXIT_OK
    vals = out["eigenvalues"]
    assert len(vals) == 5
    assert vals[0] == pytest.approx(0.0, abs=1e-8)
    assert vals == sorted(vals)
    assert out["fidelity_max"] > 0


def test_spectrum_beyond_fidelity_is_config_error(capsys):
    # the sixth spindle eigenvalue sits past the kernel's resolvable
    # range at this bandwidth
    code = main(["spectrum", "--model", "spindle_half", "--samples", "1500",
                 "--eps", "0.25", "--seed", "4", "--count", "6"])
    assert code == EXIT_CONFIG
    assert "resolvable" in capsys.readouterr().err


def test_spectrum_disconnected_graph_is_numeric_failure(capsys):
    code = main(["spectrum", "--model", "spindle_half", "--samples", "300",
                 "--eps", "0.002", "--seed", "4"])
    assert code == EXIT_NUMERIC
    assert "numerical failure" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# checks through the CLI


def test_compare_writes_csv(tmp_path):
    out_file = tmp_path / "rows.csv"
    code = main(["compare", "--model", "flat_cone_075", "--check", "ahlfors",
                 "--samples", "4000", "--seed", "6",
                 "--format", "csv", "--out", str(out_file)])
    assert code == EXIT_OK
    with open(out_file, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["check"] == "ahlfors_regularity"
    assert rows[0]["passed"] == "True"
    assert float(rows[0]["margin"]) > 0.0


def test_bochner_subcommand(capsys):
    code, out = run_json(capsys, ["bochner", "--model", "spindle_half",
                                  "--samples", "3000", "--eps", "0.2",
                                  "--seed", "2"])
    assert code == EXIT_OK
    assert out["rows"][0]["passed"] is True


def test_bochner_requires_bound_for_blended_model(capsys):
    code = main(["bochner", "--model", "fermi_narrow", "--samples", "800",
                 "--eps", "0.35", "--seed", "2"])
    assert code == EXIT_CONFIG
    assert "--K" in capsys.readouterr().err


def test_catalog_agrees_with_expectations(capsys):
    code, out = run_json(capsys, ["catalog"])
    assert code == EXIT_OK
    rows = out["rows"]
    assert len(rows) >= 15
    for row in rows:
        assert row["computed_rcd"] == row["expected_rcd"], row["name"]
        assert row["computed_cbb"] == row["expected_cbb"], row["name"]


# ---------------------------------------------------------------------------
# report runner


def test_report_runs_config(capsys, tmp_path):
    config = {
        "seed": 9,
        "samples": 3000,
        "checks": ["ahlfors"],
        "models": [
            "spindle_half",
            {"schema": 1, "family": "cone",
             "params": {"link": {"kind": "circle", "radius": 0.75},
                        "radius": 1.0}},
        ],
    }
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(config))
    out_file = tmp_path / "report.json"
    code = main(["report", "--config", str(cfg), "--out", str(out_file)])
    assert code == EXIT_OK
    payload = json.loads(out_file.read_text())
    assert payload["schema"] == 1
    assert len(payload["rows"]) == 2
    assert all(row["passed"] for row in payload["rows"])
    assert payload["config"]["seed"] == 9


def test_report_config_validation(capsys, tmp_path):
    missing = tmp_path / "nope.json"
    assert main(["report", "--config", str(missing)]) == EXIT_CONFIG

    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["report", "--config", str(bad)]) == EXIT_CONFIG

    no_seed = tmp_path / "no_seed.json"
    no_seed.write_text(json.dumps({"models": ["spindle_half"]}))
    assert main(["report", "--config", str(no_seed)]) == EXIT_CONFIG

    no_models = tmp_path / "no_models.json"
    no_models.write_text(json.dumps({"seed": 1}))
    assert main(["report", "--config", str(no_models)]) == EXIT_CONFIG
