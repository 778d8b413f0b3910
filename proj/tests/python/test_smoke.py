import math

import pytest

import belltest


def test_theorem():
    r = belltest.verify_theorem()
    assert len(r["functional_values"]) == 81
    assert r["min_functional_value"] == -1
    assert r["case_bounds"] == [-1, -1, -3, -3, -2, -2, -2, -2, -1]
    assert r["all_satisfied"]


def test_ideal_violation():
    axes = belltest.quad_from_differences(120, 120, 120)
    r = belltest.evaluate("ardehali10", axes)
    assert abs(r["lhs"] + 1.5) < 1e-12
    assert r["violated"]
    assert belltest.differences(axes) == [120, 120, 120, 0]


def test_real_experiment():
    axes = belltest.quad_from_differences(120, 120, 120)
    assert abs(belltest.evaluate("ardehali28", axes, "qm-real", F=1.0)["lhs"] + 1.5) < 1e-12
    F = belltest.depolarization(30.0)
    r = belltest.evaluate("ardehali31", axes, "qm-real")
    assert abs(r["lhs"] - (1 - 2.5 * F)) < 1e-9


def test_geometry():
    assert belltest.solid_angle(30.0) == pytest.approx(2 * math.pi * (1 - math.cos(math.pi / 6)))
    assert belltest.angular_correlation(90.0) == pytest.approx(1.0)
    rates = belltest.detection_rates(0.0, 120.0)
    total = rates["pp"] + rates["pm"] + rates["mp"] + rates["mm"]
    assert total == pytest.approx(belltest.T0(), rel=1e-15)
    assert rates["plus1"] + rates["minus1"] == pytest.approx(belltest.t0(), rel=1e-15)


def test_chsh_and_ratio():
    r = belltest.evaluate("chsh", [0, 22.5, 45, 67.5])
    assert r["violation_factor"] == pytest.approx(math.sqrt(2), abs=1e-9)
    assert belltest.excess_violation_ratio(1.5, math.sqrt(2)) == pytest.approx(1.2071, abs=1e-4)


def test_local_model():
    w = belltest.random_model(3)
    assert len(w) == 81
    assert sum(w) == pytest.approx(1.0, abs=1e-12)
    r = belltest.evaluate("ardehali10", [0, 60, 120, 120], "lhv", weights=w)
    assert r["margin"] >= -1e-12


def test_monte_carlo_is_deterministic():
    axes = belltest.quad_from_differences(120, 120, 120)
    a = belltest.run_mc(axes, 1_000_000, seed=7, F=1.0)
    b = belltest.run_mc(axes, 1_000_000, seed=7, F=1.0, workers=4)
    assert a == b
    assert abs(a["lhs"] + 1.5) <= 5 * a["std_error"]
    assert a["counters"]["a_b"]["n_emitted"] == 1_000_000


def test_scan():
    r = belltest.grid_scan(workers=2)
    assert r["best_lhs"] == pytest.approx(-1.5, abs=1e-6)
    assert r["best_differences"] == pytest.approx([120, 120, 120, 0], abs=0.5)


def test_errors():
    with pytest.raises(ValueError):
        belltest.quad_from_differences(90, 90, 90)
    with pytest.raises(ValueError):
        belltest.grid_scan(step_deg=60)
    with pytest.raises(ValueError):
        belltest.evaluate("nope", [0, 0, 0, 0])
