import numpy as np
import pytest

from cadlag_limits import StepFunction


def random_step(rng: np.random.Generator, max_jumps: int = 4, dim: int = 1, scale: float = 2.0) -> StepFunction:
    """Random step path with up to ``max_jumps`` jumps at distinct times in (0, 1]."""
    k = int(rng.integers(0, max_jumps + 1))
    times = np.sort(rng.choice(np.arange(1, 1000), size=k, replace=False)) / 1000.0
    values = np.round(rng.uniform(-scale, scale, (k, dim)), 3)
    initial = np.round(rng.uniform(-scale, scale, dim), 3)
    return StepFunction(initial, times, values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance criteria report one line each; printed at the end of the session
ACCEPTANCE = []


def record(criterion: str, passed: bool, detail: str) -> None:
    line = f"{criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
