"""Experiment harness: configs, reports, determinism, self-consistency."""

import json
import math

import pytest

from permcycles import (
    ExperimentConfig,
    ExperimentReport,
    run_avoidance_experiment,
    run_cdf_experiment,
    run_counts_experiment,
    run_experiment,
)
from permcycles.harness import write_replicates_csv


def _cfg(**kwargs):
    base = dict(kind="counts", weights="ewens:2", n=40, replicates=50, seed=7)
    base.update(kwargs)
    return ExperimentConfig(**base)


# ------------------------------------------------------------------- config


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(kind="bogus")
    with pytest.raises(ValueError):
        _cfg(compare="exactly")
    with pytest.raises(ValueError):
        _cfg(n=0)
    with pytest.raises(ValueError):
        _cfg(replicates=0)
    with pytest.raises(ValueError):
        _cfg(seed=-1)
    with pytest.raises(ValueError):
        _cfg(workers=0)
    with pytest.raises(ValueError):
        _cfg(k_max=0)
    with pytest.raises(ValueError):
        _cfg(grid_points=5)
    with pytest.raises(ValueError):
        _cfg(mixture_draws=-1)
    with pytest.raises(ValueError):
        _cfg(kind="cdf")  # statistic missing
    with pytest.raises(ValueError):
        _cfg(weights="gauss:1")  # weight grammar failure surfaces at once
    with pytest.raises(ValueError):
        _cfg(kind="avoidance", boxes="box:k=2;0,1")  # malformed union


def test_config_from_mapping():
    cfg = ExperimentConfig.from_mapping(
        {"kind": "counts", "weights": "uniform", "n": "25", "replicates": "10"}
    )
    assert cfg.n == 25 and cfg.replicates == 10
    with pytest.raises(ValueError) as err:
        ExperimentConfig.from_mapping(
            {"kind": "counts", "weights": "uniform", "n": 5, "replicates": 5, "colour": "red"}
        )
    assert "colour" in str(err.value)
    with pytest.raises(ValueError) as err:
        ExperimentConfig.from_mapping(
            {"kind": "counts", "weights": "uniform", "n": "five", "replicates": 5}
        )
    assert "'n'" in str(err.value)


def test_config_from_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "# counts demo\n"
        "\n"
        "kind = counts\n"
        "weights = poly:1,0.5\n"
        "n = 30\n"
        "replicates = 12\n"
        "k_max = 2\n"
    )
    cfg = ExperimentConfig.from_file(path)
    assert cfg.kind == "counts"
    assert cfg.weights == "poly:1,0.5"
    assert cfg.n == 30 and cfg.replicates == 12 and cfg.k_max == 2

    bad = tmp_path / "bad.cfg"
    bad.write_text("kind=counts\nnot a key value line\n")
    with pytest.raises(ValueError) as err:
        ExperimentConfig.from_file(bad)
    assert ":2:" in str(err.value)


def test_config_echo_hides_workers():
    echo = _cfg(workers=8).echo()
    assert "workers" not in echo
    assert echo["kind"] == "counts"
    assert echo["weights"] == "ewens:2"


# ------------------------------------------------------------------- counts


def test_counts_experiment_report_shape():
    cfg = _cfg(n=60, replicates=400, k_max=3)
    report = run_counts_experiment(cfg)
    assert set(report.results["per_count"]) == {"1", "2", "3"}
    for k in ("1", "2", "3"):
        entry = report.results["per_count"][k]
        assert entry["flag"] == "ok"
        assert 0.0 <= entry["tv_distance"] <= 1.0
        assert entry["chi_square"]["p_value"] > 1e-4
        theta_over_k = 2.0 / int(k)
        se = math.sqrt(theta_over_k / cfg.replicates)
        assert abs(entry["empirical_mean"] - entry["theory_mean"]) < 5 * se
        assert entry["theory_mean"] == pytest.approx(theta_over_k)
    assert set(report.results["correlations"]) == {"C_1_C_2", "C_1_C_3", "C_2_C_3"}
    assert len(report.replicates) == 400
    assert report.csv_columns == ["C_1", "C_2", "C_3"]

    payload = json.loads(report.to_json())
    assert set(payload) == {"config", "metadata", "results"}
    assert "workers" not in payload["config"]
    assert payload["metadata"]["weights"] == "ewens:2.0"
    assert "no_fixed_point" in payload["metadata"]["conventions"]

    text = report.summary()
    assert "per_count.1.tv_distance" in text
    assert "mode" in text


def test_counts_single_replicate_is_flagged():
    report = run_counts_experiment(_cfg(replicates=1, k_max=2))
    for entry in report.results["per_count"].values():
        assert entry["flag"] == "insufficient-sample"
        assert entry["chi_square"]["p_value"] is None  # NaN serialized as None
    assert report.results["correlations"]["C_1_C_2"] is None
    json.loads(report.to_json())  # still valid JSON


def test_counts_against_oracle_self_consistency():
    # sampler vs enumeration on S_6 at half a million draws
    cfg = _cfg(
        weights="ewens:1.5", n=6, replicates=500_000, compare="oracle", k_max=2, seed=3
    )
    report = run_counts_experiment(cfg)
    for entry in report.results["per_count"].values():
        assert entry["flag"] == "ok"
        assert entry["chi_square"]["p_value"] > 1e-3
        assert entry["tv_distance"] < 0.005


def test_counts_kind_guard():
    with pytest.raises(ValueError):
        run_counts_experiment(_cfg(kind="cdf", statistic="S1"))
    with pytest.raises(ValueError):
        run_avoidance_experiment(_cfg())
    with pytest.raises(ValueError):
        run_cdf_experiment(_cfg())


# ---------------------------------------------------------------- avoidance


def test_avoidance_empty_union_is_certain():
    cfg = _cfg(kind="avoidance", boxes="", replicates=100, n=30)
    report = run_avoidance_experiment(cfg)
    assert report.results["intensity"] == 0.0
    assert report.results["limit_probability"] == 1.0
    assert report.results["empirical"]["probability"] == 1.0
    assert report.results["limit_simulation"]["probability"] == 1.0


def test_avoidance_full_level_one():
    # avoiding all of level 1 = having no fixed point; limit e^{-theta_1}
    cfg = _cfg(
        kind="avoidance",
        weights="uniform",
        boxes="box:k=1;0,1",
        n=250,
        replicates=3000,
        seed=11,
        limit_draws=3000,
    )
    report = run_avoidance_experiment(cfg)
    want = math.exp(-1.0)
    emp = report.results["empirical"]
    assert emp["replicates"] == 3000
    assert abs(emp["probability"] - want) < 3 * emp["se"] + 0.01
    sim = report.results["limit_simulation"]
    assert sim["draws"] == 3000
    assert sim["truncation_level"] == 1
    assert sim["truncated_tail_mass"] == "infinite"
    assert abs(sim["probability"] - want) < 3 * sim["se"] + 0.01
    assert report.csv_columns == ["points_in_union"]


# ---------------------------------------------------------------------- cdf


def test_cdf_experiment_report_shape():
    cfg = _cfg(kind="cdf", weights="ewens:1", statistic="S1", n=150, replicates=800)
    report = run_cdf_experiment(cfg)
    res = report.results
    assert res["law"] == "S1"
    assert res["statistic"] == "S1"
    assert res["grid_ks"] < 0.1
    assert res["dkw_epsilon_95"] == pytest.approx(math.sqrt(math.log(40.0) / 1600.0))
    assert "0" in res["atoms"]
    atom = res["atoms"]["0"]
    assert atom["theory_mass"] == pytest.approx(math.exp(-1.0))
    assert atom["abs_error"] < 3 * atom["binomial_se"] + 0.02
    assert len(report.replicates) == 800


def test_cdf_forbidden_fixed_points_degenerate_law():
    # theta_1 = 0 means no fixed points ever: every draw reports the
    # (n+1)/n convention, the interior grid sees nothing, and the atom at 1
    # carries all the mass
    cfg = _cfg(
        kind="cdf", weights="list:0,1", statistic="m", n=51, replicates=200
    )
    report = run_cdf_experiment(cfg)
    res = report.results
    assert res["grid_ks"] == 0.0
    assert res["atoms"]["1"]["theory_mass"] == 1.0
    assert res["atoms"]["1"]["empirical_mass"] == 1.0


def test_cdf_statistic_without_closed_form():
    with pytest.raises(ValueError) as err:
        run_cdf_experiment(_cfg(kind="cdf", statistic="sum:2", n=50, replicates=20))
    assert "Laplace" in str(err.value)
    with pytest.raises(ValueError):
        run_cdf_experiment(_cfg(kind="cdf", statistic="median", n=50, replicates=20))


def test_cdf_mixture_channel():
    cfg = _cfg(
        kind="cdf",
        weights="uniform",
        statistic="delta",
        n=300,
        replicates=1500,
        mixture_draws=4000,
        seed=21,
    )
    report = run_cdf_experiment(cfg)
    mix = report.results["mixture"]
    assert mix["draws"] == 4000
    assert mix["grid_ks_two_sample"] < 0.08
    assert abs(mix["atom_mass"] - math.exp(-1.0)) < 0.05


# ------------------------------------------------------------- determinism


def test_reports_identical_across_worker_counts():
    for kind_kwargs in (
        dict(kind="counts", n=30, replicates=240, k_max=2),
        dict(kind="cdf", statistic="M", n=80, replicates=240),
        dict(kind="avoidance", boxes="box:k=1;0,0.5", n=40, replicates=240),
    ):
        texts = []
        for workers in (1, 2, 8):
            report = run_experiment(_cfg(workers=workers, seed=5, **kind_kwargs))
            texts.append(report.to_json())
        assert texts[0] == texts[1] == texts[2]


def test_rerun_is_reproducible():
    cfg = _cfg(n=25, replicates=100)
    assert run_experiment(cfg).to_json() == run_experiment(cfg).to_json()


# ------------------------------------------------------------------ exports


def test_write_replicates_csv(tmp_path):
    report = run_counts_experiment(_cfg(replicates=40, k_max=2))
    path = tmp_path / "reps.csv"
    write_replicates_csv(report, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "replicate,C_1,C_2"
    assert len(lines) == 41
    first = lines[1].split(",")
    assert first[0] == "0"
    assert all(int(v) >= 0 for v in first[1:])


def test_report_json_round_trip(tmp_path):
    report = run_counts_experiment(_cfg(replicates=30, k_max=2))
    path = tmp_path / "report.json"
    report.write_json(path)
    payload = json.loads(path.read_text())
    assert payload["results"]["replicates"] == 30
    assert isinstance(report, ExperimentReport)
