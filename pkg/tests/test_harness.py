import json
import math

import pytest

from census.harness import (
    CSV_COLUMNS,
    ConfigError,
    SweepConfig,
    generate_instance,
    report_csv,
    report_json,
    run_compare_sweep,
)


def test_regular_instance_has_no_randomness():
    cfg = SweepConfig(family="regular", sizes=[(8, 8)], density="1/2", seed=7)
    inst = generate_instance(cfg, 0)
    assert list(inst.s) == [4] * 8 and list(inst.t) == [4] * 8 and not inst.forbidden
    assert inst.to_json() == generate_instance(cfg, 0).to_json()


def test_near_regular_deterministic_and_balanced():
    cfg = SweepConfig(family="near_regular", sizes=[(6, 6)], density="1/2", seed=1)
    a = generate_instance(cfg, 0)
    assert a == generate_instance(cfg, 0)
    assert sum(a.s) == sum(a.t) == 18
    assert all(1 <= v <= 5 for v in list(a.s) + list(a.t))


def test_index_independence():
    cfg = SweepConfig(family="near_regular", sizes=[(10, 12)] * 3, density="1/2",
                      seed=99, pattern="matching_k", k=3)
    alone = generate_instance(cfg, 2)
    [generate_instance(cfg, i) for i in range(3)]
    assert generate_instance(cfg, 2) == alone
    assert len(alone.forbidden) == 3
    rows = {j for j, _ in alone.forbidden}
    cols = {k for _, k in alone.forbidden}
    assert len(rows) == len(cols) == 3


def test_seeds_differ():
    base = dict(family="near_regular", sizes=[(20, 20)], density="1/2")
    a = generate_instance(SweepConfig(seed=1, **base), 0)
    b = generate_instance(SweepConfig(seed=2, **base), 0)
    assert a != b


def test_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig(family="regular", sizes=[(5, 5)], density="1/2")
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"family": "bogus"})
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"sizes": [[4, 4]], "colour": "red"})
    with pytest.raises(ConfigError):
        SweepConfig(density=1)
    cfg = SweepConfig.from_dict({"sizes": [[4, 4]], "density": "0.5"})
    assert SweepConfig.from_dict(cfg.to_dict()) == cfg


def test_custom_family():
    cfg = SweepConfig(family="custom", sizes=[(2, 3)], margins=[([2, 1], [1, 1, 1])],
                      pattern="custom", edges=[(0, 0)])
    inst = generate_instance(cfg, 0)
    assert list(inst.s) == [2, 1] and inst.forbidden == {(0, 0)}


def test_empty_sweep():
    cfg = SweepConfig(sizes=[])
    assert run_compare_sweep(cfg) == []
    assert report_csv([]) == ",".join(CSV_COLUMNS) + "\n"


def test_sweep_rows_and_ratio():
    cfg = SweepConfig(family="regular", sizes=[(6, 6), (8, 8)], density="1/2",
                      pattern="single_edge", seed=3)
    rows = run_compare_sweep(cfg)
    assert [(r.m, r.n) for r in rows] == [(6, 6), (8, 8)]
    for r in rows:
        assert not r.errors
        assert r.log_ratio == r.exact_log - r.estimate_log
        assert r.saddle_residual < 1e-10
        assert r.ms_exact is None


def test_resource_limit_is_recorded():
    cfg = SweepConfig(family="regular", sizes=[(20, 20)], density="1/2")
    [row] = run_compare_sweep(cfg)
    assert row.exact_log is None and row.log_ratio is None
    assert row.estimate_log is not None and math.isfinite(row.estimate_log)
    assert any("ResourceLimitError" in e for e in row.errors)


def test_reports_byte_identical_across_workers():
    cfg = SweepConfig(family="near_regular", sizes=[(6, 6), (6, 8), (8, 8)], density="1/2",
                      pattern="single_edge", seed=11, instances_per_size=2)
    serial = run_compare_sweep(cfg)
    parallel = run_compare_sweep(cfg, workers=3)
    assert report_csv(serial) == report_csv(parallel)
    assert report_json(serial, cfg) == report_json(parallel, cfg)
    assert report_csv(serial) == report_csv(run_compare_sweep(cfg))
    doc = json.loads(report_json(serial, cfg))
    assert doc["version"] == 1 and len(doc["rows"]) == 6


def test_timing_is_opt_in():
    cfg = SweepConfig(sizes=[(4, 4)], record_timing=True)
    [row] = run_compare_sweep(cfg)
    assert row.ms_exact is not None and row.ms_exact >= 0
