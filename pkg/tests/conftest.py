import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from blocked_bandits.harness import preset_config, run_experiment

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []
# every arm-index sequence produced during the acceptance run
TRACES = []


def record_traces(summary):
    for run in summary["_runs"]:
        TRACES.append((run["run_id"], list(run["arm_indices"])))


@pytest.fixture(scope="session")
def report():
    def emit(number, ok, detail):
        line = f"ACCEPTANCE {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return emit


@pytest.fixture(scope="session")
def preset_runs(tmp_path_factory):
    """Run each named preset once per session; results are cached."""
    cache = {}

    def get(name):
        if name not in cache:
            out = tmp_path_factory.mktemp(f"preset-{name}")
            cache[name] = run_experiment(preset_config(name), output_dir=out, workers=1)
            record_traces(cache[name])
        return cache[name]
    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
