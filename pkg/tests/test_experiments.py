import csv
import io
import json

import numpy as np
import pytest

from doptdesign.experiments import (
    ExperimentConfig,
    boxplot_stats,
    child_seed,
    design_size,
    run_accuracy_experiment,
    run_lebesgue_sweep,
    write_experiment,
)

SMALL = dict(model="gaussian", terms=10, repetitions=4, n_test=2000, seed=7)


def test_child_seed_pure_and_distinct():
    assert child_seed(1, 2, "gd") == child_seed(1, 2, "gd")
    seeds = {child_seed(1, r, arm) for r in range(20) for arm in ("gd", "lhs", "sobol", "maxvol")}
    assert len(seeds) == 80
    assert child_seed(1, 0, "gd") != child_seed(2, 0, "gd")
    assert 0 <= child_seed(123, 4, "x") < 2**64


def test_design_size():
    assert design_size(40, 1.1) == 44
    assert design_size(40, 2.5) == 100
    assert design_size(36) == 36
    assert design_size(10, n=12) == 12
    with pytest.raises(ValueError):
        design_size(10, n=9)
    with pytest.raises(ValueError):
        design_size(10, 0.9)


def test_boxplot_stats():
    st = boxplot_stats([1, 2, 3, 4, 100])
    assert st["median"] == 3 and st["q1"] == 2 and st["q3"] == 4
    assert st["whisker_high"] == 4 and st["max"] == 100
    assert boxplot_stats([float("nan")]) == {"count": 0}


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({**SMALL, "bogus": 1})
    with pytest.raises(ValueError):
        ExperimentConfig(model="gaussian", dim=3, terms=10)
    with pytest.raises(ValueError):
        ExperimentConfig(model="gaussian")
    assert ExperimentConfig(model="piston", degree=2).index_set().dimension == 7


@pytest.mark.parametrize("sampler", ["gd", "lhs", "sobol", "maxvol"])
def test_deterministic_and_aggregates_match_csv(sampler, tmp_path):
    cfg = ExperimentConfig(sampler=sampler, **SMALL)
    a = run_accuracy_experiment(cfg)
    b = run_accuracy_experiment(cfg)
    assert a.records_csv() == b.records_csv()
    write_experiment([a], tmp_path)
    rows = list(csv.DictReader(io.StringIO((tmp_path / f"{sampler}_records.csv").read_text())))
    assert len(rows) == 4 and "wall_time" not in rows[0]
    vals = [float(r["delta_inf"]) for r in rows if r["status"] == "ok"]
    summary = json.loads((tmp_path / "summary.json").read_text())
    agg = summary["arms"][sampler]["aggregates"]
    assert agg["median"] == np.median(vals)
    assert agg["count"] + agg["failures"] == 4
    assert summary["arms"][sampler]["config"]["seed"] == 7


def test_parallel_matches_serial():
    cfg = ExperimentConfig(sampler="lhs", **SMALL)
    par = ExperimentConfig(sampler="lhs", workers=2, **SMALL)
    assert run_accuracy_experiment(cfg).records_csv() == run_accuracy_experiment(par).records_csv()


def test_all_failed_raises(monkeypatch):
    import doptdesign.experiments as ex

    def boom(*_):
        raise ex.RankDeficient("forced")

    monkeypatch.setattr(ex, "fit", boom)
    with pytest.raises(RuntimeError):
        run_accuracy_experiment(ExperimentConfig(sampler="lhs", **SMALL))


def test_failures_recorded_not_aggregated(monkeypatch):
    import doptdesign.experiments as ex

    orig = ex.fit
    calls = []

    def flaky(A, y):
        calls.append(1)
        if len(calls) == 2:
            raise ex.RankDeficient("forced")
        return orig(A, y)

    monkeypatch.setattr(ex, "fit", flaky)
    res = run_accuracy_experiment(ExperimentConfig(sampler="lhs", **SMALL))
    assert res.aggregates["failures"] == 1 and res.aggregates["count"] == 3
    assert res.records[1]["status"] == "RankDeficient"


def test_timings_column():
    cfg = ExperimentConfig(sampler="lhs", timings=True, **SMALL)
    header = run_accuracy_experiment(cfg).records_csv().splitlines()[0]
    assert header.endswith("wall_time")


def test_lebesgue_sweep_shape():
    sweep = run_lebesgue_sweep([2, 3], sampler="lhs", repetitions=3, n_test=1001)
    arms = [(a["l"], a["sampler"]) for a in sweep["aggregates"]]
    assert arms == [(2, "lhs"), (2, "chebyshev_roots"), (3, "lhs"), (3, "chebyshev_roots")]
    ref = [r for r in sweep["records"] if r["sampler"] == "chebyshev_roots" and r["l"] == 2][0]
    assert ref["lebesgue"] == pytest.approx(np.sqrt(2), abs=1e-12)
