"""Smoke tests for the python bindings."""

import math

import mfglg


def test_defaults_expose_resolved_configuration():
    cfg = mfglg.defaults("lq-1d")
    assert cfg["test"] == "lq-1d"
    assert float(cfg["T"]) == 0.25
    assert cfg["dx_list"].startswith("0.2,")
    # every named study resolves
    for test in ("lq-1d", "lq-2d", "local-1d", "fp-only-ou"):
        assert mfglg.defaults(test)["test"] == test


def test_oracle_point_evaluations():
    # the gradient vanishes at the stationary mean, so the value is minimal there
    v_at_mean = mfglg.lq_value(0.0, [0.3])
    assert mfglg.lq_value(0.0, [0.9]) > v_at_mean
    assert mfglg.lq_value(0.0, [-0.4]) > v_at_mean
    # terminal cost is zero
    assert abs(mfglg.lq_value(0.25, [0.7])) < 1e-12
    # density is a probability density peaked at the mean
    assert mfglg.lq_density(0.0, [0.3]) > mfglg.lq_density(0.0, [0.8])
    assert mfglg.lq_density(0.25, [0.3]) > 0.0


def test_tiny_study_runs_and_converges(tmp_path):
    report = mfglg.run_study(
        {"test": "fp-only-ou", "dx_list": "0.2,0.1", "out_dir": str(tmp_path)},
        emit=True,
    )
    rows = report["rows"]
    assert len(rows) == 2
    for row in rows:
        assert not row["failed"]
        assert row["mass_drift"] <= 1e-12
    # refinement reduces the density error
    e_coarse = rows[0]["fields"]["m"]["e_2"]
    e_fine = rows[1]["fields"]["m"]["e_2"]
    assert e_fine < e_coarse
    # observed order of the pure transport solver is at least two
    rate = math.log(e_coarse / e_fine) / math.log(2.0)
    assert rate > 2.0
    # artifacts land where requested
    assert (tmp_path / "errors_m.csv").exists()
    assert (tmp_path / "run_manifest.txt").exists()
    assert (tmp_path / "plot_finest.dat").exists()


def test_error_csv_shape(tmp_path):
    mfglg.run_study(
        {"test": "fp-only-ou", "dx_list": "0.2,0.1", "out_dir": str(tmp_path)},
        emit=True,
    )
    lines = (tmp_path / "errors_m.csv").read_text().strip().splitlines()
    assert lines[0] == "dx,dt,e_inf,e_2,p_inf,p_2,positivity_error,iterations,wall_time_s"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[4] == "" and first[5] == ""  # no rate on the first row
    second = lines[2].split(",")
    assert float(second[5]) > 0.0
