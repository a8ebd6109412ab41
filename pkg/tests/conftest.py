import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from impactlab.gas import GasModel, PrimitiveState  # noqa: E402
from impactlab.solver import FixedCfl, RunConfig, ShockLocked, run  # noqa: E402

GAMMA = 1.4
LEFT = PrimitiveState(1.0, 2.0, 1.0 / GAMMA)
RIGHT = PrimitiveState(1.0, -2.0, 1.0 / GAMMA)


@pytest.fixture
def gas():
    return GasModel(GAMMA)


@pytest.fixture(scope="session")
def runs_401():
    """CFL 0.9, N=5 and N=5.5 runs at m=401, computed once."""
    return {
        "cfl": run(RunConfig(m=401, policy=FixedCfl(0.9))),
        "n5": run(RunConfig(m=401, policy=ShockLocked(5))),
        "n55": run(RunConfig(m=401, policy=ShockLocked(5.5))),
    }


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one summary line per criterion; shown after the test session."""

    def record(label, ok, detail):
        status = "PASS" if ok else "FAIL"
        if ok is None:
            status = "INFO"
        ACCEPTANCE_LINES.append(f"{status}  {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
