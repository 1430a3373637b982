import numpy as np
import pytest

from ddjitter.decoherence import BathConfig
from ddjitter.quadrature import QuadratureSettings


@pytest.fixture
def hot_bath():
    return BathConfig(10.0)


@pytest.fixture
def tight():
    """Relative tolerance only, for comparisons of very small exponents."""
    return QuadratureSettings(rel_tol=1e-11, abs_tol=1e-300, max_subdivisions=5000)


def midpoint(f, a, b, nodes=10**6, chunk=200_000):
    """Composite midpoint rule with ``nodes`` uniform cells."""
    h = (b - a) / nodes
    total = 0.0
    for start in range(0, nodes, chunk):
        k = np.arange(start, min(start + chunk, nodes))
        total += float(np.sum(f(a + (k + 0.5) * h)))
    return total * h


_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion for the run summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, {})

    def record(criterion: int, ok: bool, detail: str):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[criterion] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
