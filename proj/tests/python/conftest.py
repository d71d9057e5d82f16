import json
import math
import os
import shutil
import subprocess
from pathlib import Path

import pytest


def _cli_path():
    path = os.environ.get("MACOPT_CLI") or shutil.which("macopt")
    if not path:
        pytest.skip("macopt executable not found (set MACOPT_CLI)")
    return path


@pytest.fixture
def cli():
    exe = _cli_path()

    def run(*args):
        return subprocess.run([exe, *map(str, args)], capture_output=True, text=True)

    return run


@pytest.fixture
def scenario(tmp_path):
    def write(users, horizon=1.0, **extra):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps({"users": users, "horizon": horizon, **extra}))
        return path

    return write


def quad_user(r, b=1.25, gamma=0.5):
    return {"battery_energy": b, "circuit_cost": gamma,
            "model": {"kind": "quadratic", "resistance": r}}


def ideal_duration(b=1.25, gamma=0.5):
    """Optimal transmit time for an ideal battery: the drain x solves
    (1 - gamma + x) ln(1 - gamma + x) = x, found here by bisection."""
    lo, hi = 1e-9, 100.0
    for _ in range(200):
        x = 0.5 * (lo + hi)
        f = (1 - gamma + x) * math.log(1 - gamma + x) - x
        lo, hi = (x, hi) if f < 0 else (lo, x)
    return b / x


CONFIGS = Path(__file__).resolve().parents[2] / "configs"
