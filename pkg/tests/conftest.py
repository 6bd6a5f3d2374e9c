import numpy as np
import pytest

from paretogof.distributions import pareto_sample

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "tables"
    monkeypatch.setenv("PARETOGOF_CACHE_DIR", str(d))
    return d


@pytest.fixture
def write_sample(tmp_path):
    def write(values, name="sample.txt"):
        path = tmp_path / name
        path.write_text("".join(f"{float(v)!r}\n" for v in values))
        return path

    return write


@pytest.fixture
def pareto():
    return lambda n, seed=0, lam=1.0: np.sort(pareto_sample(n, lam, seed))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[num])
