from __future__ import annotations

import pytest

from hydrodp import bench, cli
from hydrodp.flow import build_mean_profile
from hydrodp.synth import synth_flows

SEED = 1
HISTORY = range(1980, 2015)
TEST_YEARS = tuple(range(2015, 2023))

# every BenchResult produced anywhere in the session, for the dominance check
SWEEP_CELLS: list = []
# acceptance criterion -> (passed, detail), reported at the end of the run
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session", autouse=True)
def _record_sweep_cells():
    original = bench.run_sweep

    def recording(*args, **kwargs):
        results = original(*args, **kwargs)
        SWEEP_CELLS.extend(results)
        return results

    mp = pytest.MonkeyPatch()
    mp.setattr(bench, "run_sweep", recording)
    mp.setattr(cli, "run_sweep", recording)
    yield
    mp.undo()


@pytest.fixture(scope="session")
def synthetic():
    """43 synthetic years: 1980-2014 history, 2015-2022 test years."""
    series = synth_flows(SEED, 43, 1980)
    years = series.split_years()
    profile = build_mean_profile([years[y] for y in HISTORY], 7)
    return {"series": series, "years": years, "profile": profile, "test_years": TEST_YEARS}


@pytest.fixture
def acceptance_report():
    def report(name: str, passed: bool, detail: str = ""):
        ACCEPTANCE[name] = (passed, detail)
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")

    return report


def pytest_collection_modifyitems(config, items):
    # acceptance last, so the dominance check sees every sweep cell of the session
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split(".")[0])):
        passed, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
