import csv
import io
import json

import pytest

from conftest import CONFIGS, ideal_duration, quad_user


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_single_user_reports_schedule(cli):
    out = cli("single-user", "--config", CONFIGS / "single_user.json")
    assert out.returncode == 0, out.stderr
    values = dict(line.split(" ", 1) for line in out.stdout.strip().splitlines())
    assert abs(float(values["duration_s"]) - ideal_duration()) < 1e-6
    assert abs(float(values["duration_s"]) - 0.757) < 3e-3
    assert float(values["stationarity_residual"]) < 1e-6


def test_single_user_infeasible(cli, scenario):
    path = scenario([{"battery_energy": 1.0, "circuit_cost": 5.0,
                      "model": {"kind": "quadratic", "resistance": 1.0}}])
    assert cli("single-user", "--config", path).returncode == 2


def test_single_user_free_circuit_uses_whole_frame(cli, scenario):
    path = scenario([{"battery_energy": 1.0, "circuit_cost": 0.0}])
    out = cli("single-user", "--config", path)
    assert out.returncode == 0
    assert "duration_s 1\n" in out.stdout


def test_bad_config_exits_1(cli, scenario, tmp_path):
    path = scenario([quad_user(0.3)], colour="blue")
    assert cli("sum-rate", "--config", path).returncode == 1
    assert cli("sum-rate", "--config", tmp_path / "missing.json").returncode == 1
    assert cli("single-user", "--config", CONFIGS / "two_users.json").returncode == 1


def test_sum_rate_table(cli, tmp_path):
    out_csv = tmp_path / "rates.csv"
    out = cli("sum-rate", "--config", CONFIGS / "three_users.json", "--out", out_csv)
    assert out.returncode == 0, out.stderr
    assert "dominance hybrid >= max(noma, tdma): ok" in out.stdout
    table = {r["strategy"]: float(r["rate_bits"]) for r in rows(out_csv.read_text())}
    assert abs(table["noma"] - 1.392317) < 1e-6
    assert abs(table["hybrid"] - 1.491853) < 1e-3


def test_sum_rate_edges(cli, scenario):
    out = cli("sum-rate", "--config", scenario([quad_user(0.0)] * 3))
    lines = dict(l.split(" ")[:2] for l in out.stdout.splitlines() if not l.startswith("dom"))
    assert abs(float(lines["tdma"]) - 2.087463) < 1e-4
    assert abs(float(lines["hybrid"]) - 2.087463) < 1e-3
    out = cli("sum-rate", "--config", scenario([quad_user(1.0)] * 3))
    lines = dict(l.split(" ")[:2] for l in out.stdout.splitlines() if not l.startswith("dom"))
    assert abs(float(lines["hybrid"]) - 0.247928) < 1e-3


def test_sweep_rows_and_determinism(cli, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--config", CONFIGS / "three_users.json", "--r-list", "0,0.2,0.6,1.0,0.6"]
    assert cli(*args, "--out", a).returncode == 0
    assert cli(*args, "--out", b).returncode == 0
    assert a.read_bytes() == b.read_bytes()
    table = rows(a.read_text())
    assert list(table[0]) == ["r", "noma_bits", "tdma_bits", "hybrid_bits"]
    assert [float(r["tdma_bits"]) for r in table[:4]] == \
        pytest.approx([2.087463, 1.584962, 0.523562, 0.087463], abs=1e-4)
    assert table[2] == table[4]


def test_sweep_range_and_empty(cli, tmp_path):
    out = cli("sweep", "--config", CONFIGS / "three_users.json", "--r-range", "0:0.2:0.1",
              "--unit", "nats")
    assert out.returncode == 0
    table = rows(out.stdout)
    assert [r["r"] for r in table] == ["0", "0.1", "0.2"]
    assert "noma_nats" in table[0]
    empty = tmp_path / "empty.csv"
    assert cli("sweep", "--config", CONFIGS / "three_users.json", "--out", empty).returncode == 0
    assert empty.read_text() == "r,noma_bits,tdma_bits,hybrid_bits\n"
    assert cli("sweep", "--config", CONFIGS / "three_users.json",
               "--r-range", "1:0:0.1").returncode == 1


def test_region_outputs(cli, scenario, tmp_path):
    path = scenario([quad_user(0.5)] * 2, strategy="all")
    out = tmp_path / "region.csv"
    res = cli("region", "--config", path, "--out", out, "--points", 10)
    assert res.returncode == 0, res.stderr
    noma = rows((tmp_path / "region_noma.csv").read_text())
    assert abs(float(noma[2]["r1_bits"]) - 0.488286) < 1e-4
    assert abs(float(noma[2]["r2_bits"]) - 0.364156) < 1e-4
    hybrid = json.loads((tmp_path / "region_hybrid.json").read_text())
    assert set(hybrid["labels"]) == {"A", "B", "C", "D"}
    pts = hybrid["points"]
    assert abs(max(x + y for x, y in pts) - 0.864521) < 1e-3
    # Identical users give a mirror-symmetric boundary.
    for x, y in pts:
        assert any(abs(x - v) < 1e-5 and abs(y - u) < 1e-5 for u, v in pts)
    labels = [r["label"] for r in rows((tmp_path / "region_hybrid.csv").read_text())]
    assert {"A", "B", "C", "D"} <= set(labels)


def test_region_needs_two_users(cli):
    assert cli("region", "--config", CONFIGS / "three_users.json").returncode == 1


def test_verify(cli, tmp_path):
    out = tmp_path / "prop1.json"
    res = cli("verify", "prop1", "--out", out)
    assert res.returncode == 0
    assert json.loads(out.read_text())["passed"] is True
    assert cli("verify", "nonsense").returncode == 1
