"""Shared fixtures: the reference ball problem and one full CLI solve run.

The reference problem (N = 2, R = 10, lambda = 5, q = 1, g = u^3) is solved
once per session through the command-line entry point; several acceptance
tests read the resulting JSON/CSV artifacts instead of re-running the scan.
"""

import json
import time

import pytest

from minkshoot.cli import main as cli_main
from minkshoot.integrate import ShotInput, shoot_rk
from minkshoot.model import build_truncation, problem_from_dict
from minkshoot.phase import lift_angle

FIG_PROBLEM = {
    "dimension": 2,
    "geometry": {"ball": {"R": 10.0}},
    "lambda": 5.0,
    "bc": "dirichlet",
    "q": "1",
    "g": "u^3",
    "delta": 1.0,
}


@pytest.fixture(scope="session")
def fig_spec():
    return problem_from_dict(FIG_PROBLEM)


@pytest.fixture(scope="session")
def fig_system(fig_spec):
    return build_truncation(fig_spec)


@pytest.fixture(scope="session")
def solve_run(tmp_path_factory):
    """Single-threaded CLI solve of the reference problem, wall-clock timed."""
    base = tmp_path_factory.mktemp("fig_solve")
    cfg = base / "config.json"
    cfg.write_text(json.dumps({"problem": FIG_PROBLEM, "targets": [0, 1, 2, 3]}))
    out = base / "run"
    t0 = time.perf_counter()
    status = cli_main(["solve", "--config", str(cfg), "--out", str(out), "--threads", "1"])
    elapsed = time.perf_counter() - t0
    doc = json.loads((out / "solutions.json").read_text())
    return {
        "status": status,
        "elapsed": elapsed,
        "doc": doc,
        "out": out,
        "config": cfg,
    }


@pytest.fixture(scope="session")
def fig_trajectories(fig_system, solve_run):
    """Re-shot trajectories with lifted angles, keyed (sign, j)."""
    by_key = {}
    for rec in solve_run["doc"]["solutions"]:
        traj = shoot_rk(ShotInput(fig_system, rec["eta"], (0.0, 10.0)))
        lift = lift_angle(traj)
        by_key.setdefault((rec["sign"], rec["j"]), []).append((rec, traj, lift))
    return by_key
