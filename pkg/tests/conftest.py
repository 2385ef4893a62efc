"""Shared fixtures: one lazily filled cache of 2000-replication experiment
runs, so the acceptance criteria and the harness property tests never repeat
a simulation."""

import time

import pytest

from copulascore.sim_harness import SETTINGS, DgpSpec, run_experiment

MASTER_SEED = 20260809
REPS = 2000
ALPHA = 0.05

_cache: dict = {}
_seconds: dict = {}


def _get(setting: str, n: int):
    key = (setting, n)
    if key not in _cache:
        start = time.perf_counter()
        table = run_experiment(
            DgpSpec(n=n), SETTINGS[setting], reps=REPS, alpha=ALPHA, seed=MASTER_SEED
        )
        _seconds[key] = time.perf_counter() - start
        _cache[key] = {row.hypothesis: row for row in table.rows}
    return _cache[key]


_get.seconds = _seconds


@pytest.fixture(scope="session")
def freq():
    return _get
