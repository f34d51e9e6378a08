import numpy as np
import pytest

from gevmiss import BlockRecord

# Acceptance results collected by tests/test_acceptance.py; printed as a
# block at the end of the run so every criterion shows one line.
# ok=None marks a criterion skipped for missing external data.
ACCEPTANCE_RESULTS: list[tuple[str, bool | None, str]] = []


def record_acceptance(name: str, ok: bool | None, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((name, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        line = f"{status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


def blocks_from_maxima(maxima, n_obs: int = 100, n_miss: int = 0):
    """Complete blocks carrying the given maxima."""
    return [BlockRecord(max=float(m), n_obs=n_obs, n_miss=n_miss) for m in maxima]


@pytest.fixture
def gumbel_maxima():
    rng = np.random.default_rng(42)
    return rng.gumbel(1.0, 0.5, size=200)
