"""Smoke tests for the _wabc extension module."""

import json
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

import _wabc


def shifted_clouds(n=30, shift=2.0):
    rng = np.random.default_rng(7)
    x = rng.normal(size=(n, 2))
    y = x.copy()
    y[:, 0] += shift
    return x, y


def test_wasserstein_translation_is_exact():
    x, y = shifted_clouds()
    res = _wabc.wasserstein(x, y)
    assert res["method"] == "wasserstein"
    assert res["value"] == pytest.approx(2.0, abs=1e-12)
    assert res["converged"]


def test_distance_ordering_chain():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(40, 2))
    y = rng.normal(size=(40, 2)) + 0.5
    w = _wabc.wasserstein(x, y)["value"]
    s = _wabc.swapping_distance(x, y)["value"]
    h = _wabc.hilbert_distance(x, y)["value"]
    assert w <= s + 1e-12
    assert s <= h + 1e-12


def test_sinkhorn_upper_bounds_the_exact_cost():
    x, y = shifted_clouds(n=25)
    exact = _wabc.wasserstein(x, y, p=1.0)["value"]
    ent = _wabc.sinkhorn(x, y, zeta=0.05, p=1.0)
    assert ent["converged"]
    assert ent["value"] >= exact - 1e-9


def test_mmd_separates_distributions():
    x, y = shifted_clouds()
    assert _wabc.mmd_squared(x, x) == pytest.approx(0.0, abs=1e-12)
    assert _wabc.mmd_squared(x, y) > 0.01


def test_hilbert_index_pinned_value():
    idx = _wabc.hilbert_index([0.3, 0.7], [0.0, 0.0], [1.0, 1.0], bits=16)
    assert idx == 1979053557


def test_embeddings():
    series = np.arange(1.0, 7.0).reshape(-1, 1)
    curve = _wabc.embed(series, "curve")
    assert curve.shape == (6, 2)
    assert curve[0, 0] == 1.0 and curve[0, 1] == 1.0
    delay = _wabc.embed(series, "delay", lags=[1], stride=2)
    assert delay.shape == (3, 2)
    with pytest.raises(ValueError):
        _wabc.embed(series, "spiral")


def test_models_simulate_and_prior():
    names = _wabc.model_names()
    assert "normal_location" in names and "gandk" in names
    data = _wabc.simulate("normal_location", [1.0, -1.0], 200, seed=4)
    assert data.shape == (200, 2)
    assert abs(data[:, 0].mean() - 1.0) < 0.5
    draws = _wabc.prior_sample("gandk", 100, seed=1)
    assert draws.shape == (100, 4)
    assert draws.min() >= 0.0 and draws.max() <= 10.0
    with pytest.raises(ValueError):
        _wabc.simulate("gandk", [11.0, 1.0, 2.0, 0.5], 10)


def test_smc_run_and_evaluate_round_trip():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = {
            "model": "normal_location",
            "n": 15,
            "theta_true": [1.0, 1.0],
            "method": "wasserstein",
            "particles": 16,
            "budget": 600,
            "trial_cap": 200,
            "seed": 3,
            "output_dir": tmp,
        }
        out = _wabc.smc_run(json.dumps(cfg))
        assert math.isfinite(out["final_epsilon"])
        assert out["steps"] >= 1
        assert out["particles"].shape == (16, 2)
        assert (Path(tmp) / "particles.csv").exists()
        assert (Path(tmp) / "meta.json").exists()

        rerun = _wabc.smc_run(json.dumps(cfg))
        assert rerun["final_epsilon"] == out["final_epsilon"]
        assert rerun["total_simulations"] == out["total_simulations"]
        assert np.array_equal(rerun["particles"], out["particles"])

        reference = _wabc.prior_sample("normal_location", 64, seed=9)
        gap = _wabc.cloud_w1(out["particles"], reference)
        assert gap > 0.0


def test_mh_reference_sampler():
    data = _wabc.simulate("normal_location", [0.0, 0.0], 30, seed=2)
    draws = _wabc.mh("normal_location", data, iterations=300, burnin=100, chains=2)
    assert draws.shape == (600, 2)
    with pytest.raises(ValueError):
        _wabc.mh("mg1", data)
