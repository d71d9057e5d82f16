import math

import pytest

from conftest import ideal_duration

macopt = pytest.importorskip("macopt")

LN2 = math.log(2.0)


def users(n, r, b=1.25, gamma=0.5):
    return [macopt.UserParams(b, gamma, macopt.DischargeModel.quadratic(r)) for _ in range(n)]


def test_discharge_model():
    q = macopt.DischargeModel.quadratic(0.3)
    assert macopt.eval_discharge(q, 1.25) == pytest.approx(1.0416667, abs=1e-7)
    assert macopt.peak_discharge(q) == pytest.approx(3.75)
    assert math.isinf(macopt.peak_discharge(macopt.DischargeModel.ideal()))
    t = macopt.DischargeModel.tabulated([(1.0, 0.9), (2.0, 1.5), (3.0, 1.7)])
    assert macopt.eval_discharge(t, 0.5) == pytest.approx(0.45)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        macopt.DischargeModel.quadratic(-1.0)
    with pytest.raises(macopt.MacoptError):
        macopt.UserParams(-1.0)
    with pytest.raises(ValueError):
        macopt.trace_region(users(3, 0.3))


def test_single_user():
    u = macopt.UserParams(1.25, 0.5, macopt.DischargeModel.ideal())
    s = macopt.solve_single_user(u, 1.0)
    assert s.feasible
    assert s.duration == pytest.approx(ideal_duration(), abs=1e-9)
    g = macopt.grid_single_user(u, 1.0, 400)
    assert g.rate <= s.rate + 1e-12


def test_three_user_sum_rates():
    three = users(3, 0.3)
    assert macopt.noma_sum_rate(three) / LN2 == pytest.approx(1.392317, abs=1e-6)
    assert macopt.tdma_sum_rate(three) / LN2 == pytest.approx(1.247928, abs=1e-5)
    assert macopt.hybrid_sum_rate(three) / LN2 == pytest.approx(1.491853, abs=1e-4)


def test_region():
    region = macopt.trace_region(users(2, 0.3), strategy="hybrid", points=10)
    assert set(region["labels"]) == {"A", "B", "C", "D"}
    best = max(r1 + r2 for r1, r2 in region["points"])
    assert best / LN2 == pytest.approx(1.127923, abs=1e-3)


def test_suite():
    assert "prop1" in macopt.suite_names()
    report = macopt.run_suite("prop1")
    assert report["passed"] is True
