import math

import numpy as np
import pytest

from atomopt import measures, model, sweep
from atomopt.errors import ConfigError, EmptyInput


def small_config(ref_params, **kw):
    base = dict(gamma_range=(50e3, 54e3, 3), g_range=(20e3, 20.5e3, 2))
    base.update(kw)
    return sweep.SweepConfig(base=ref_params, **base)


def test_grid_order(ref_params):
    cfg = small_config(ref_params)
    cells = cfg.cells()
    assert len(cells) == 6
    assert cells[0] == (50e3, 20e3) and cells[1] == (50e3, 20.5e3) and cells[2] == (52e3, 20e3)


def test_unit_scale(ref_params):
    cfg = small_config(ref_params, angular_units=False)
    assert cfg.gamma_values()[0] == pytest.approx(2 * math.pi * 50e3)


@pytest.mark.parametrize("rng", [(1.0, 1.0, 3), (2.0, 1.0, 3), (-1.0, 1.0, 3), (0.0, 1.0, 1), (0.0, 1.0, 2.5)])
def test_config_validation(ref_params, rng):
    with pytest.raises(ConfigError):
        small_config(ref_params, gamma_range=rng)


def test_unknown_measure_group(ref_params):
    with pytest.raises(ConfigError):
        small_config(ref_params, measures_enabled={"entanglement", "bogus"})


def test_run_records(ref_params):
    recs = sweep.run_sweep(small_config(ref_params))
    assert len(recs) == 6
    for r in recs:
        assert r.stable and r.physical and r.error is None
        assert r.max_real_eig < 0
        assert set(r.report.columns()) == set(measures.MEASURE_COLUMNS)


def test_unstable_cells_have_no_report(ref_params):
    cfg = small_config(ref_params, g_range=(20e3, 1e6, 2))
    recs = sweep.run_sweep(cfg)
    assert [r.stable for r in recs] == [True, False] * 3
    for r in recs[1::2]:
        assert r.report is None and r.physical is None and r.max_real_eig > 0
    s = sweep.summarize(recs)
    assert s["counts"]["unstable"] == 3 and s["counts"]["stable"] == 3


def test_disabled_groups_are_nan(ref_params):
    recs = sweep.run_sweep(small_config(ref_params, measures_enabled={"steering"}))
    cols = recs[0].report.columns()
    assert math.isnan(cols["n_MA"]) and cols["s_M_CA"] > 0
    recs = sweep.run_sweep(small_config(ref_params, measures_enabled=set()))
    assert recs[0].report is None and recs[0].physical


def test_deterministic_and_parallel(ref_params):
    cfg = small_config(ref_params, gamma_range=(50e3, 54e3, 5), g_range=(20e3, 20.5e3, 3))
    a = sweep.run_sweep(cfg)
    b = sweep.run_sweep(cfg)
    c = sweep.run_sweep(cfg, workers=2)
    assert a == b == c


def test_cell_errors_are_captured(ref_params):
    # a NaN smuggled past validation is rejected when the cell rebuilds its params
    bad = model.SystemParams.__new__(model.SystemParams)
    for k, v in ref_params.__dict__.items():
        object.__setattr__(bad, k, v)
    object.__setattr__(bad, "nbar", math.nan)
    rec = sweep.evaluate_cell(bad, 52e3, 20.2e3)
    assert rec.error is not None and rec.report is None
    s = sweep.summarize([rec])
    assert s["counts"]["failed"] == 1


def test_stability_map(ref_params):
    rows = sweep.stability_map(small_config(ref_params))
    recs = sweep.run_sweep(small_config(ref_params))
    assert [(r.gamma, r.g, r.stable, r.max_real_eig) for r in recs] == rows


def test_pure_damping_grid_stable(ref_params):
    cfg = small_config(ref_params, gamma_range=(0.0, 1e-6, 2), g_range=(0.0, 1e-6, 2))
    assert all(row[2] for row in sweep.stability_map(cfg))


def test_summary_flags(ref_params):
    s = sweep.summarize(sweep.run_sweep(small_config(ref_params)))
    assert s["one_way_steering_present"]
    assert "M->CA" in s["one_way_directions"]
    m = s["measures"]["n_MA"]
    assert m["min"] <= m["max"]
    assert len(m["argmax"]) == 2


def test_summary_vacuum_grid():
    base = model.SystemParams(omega_m=1.0, gamma_m=1.0, kappa=1.0, gamma_a=1.0)
    cfg = sweep.SweepConfig(base, gamma_range=(0.0, 1e-9, 2), g_range=(0.0, 1e-9, 2))
    s = sweep.summarize(sweep.run_sweep(cfg))
    assert all(v["max"] < 1e-12 for v in s["measures"].values())
    assert not s["one_way_steering_present"]
    assert not s["two_way_steering_present"]


def test_summary_empty():
    with pytest.raises(EmptyInput):
        sweep.summarize([])
