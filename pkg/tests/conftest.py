import pytest

from dessins import kernels
from dessins.group_core import enumerate_specs

# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []

SWEEP_PRIMES = (3, 5)
SWEEP_MAX_DE = 5


def sweep_grid(primes=SWEEP_PRIMES, max_de=SWEEP_MAX_DE):
    return [(p, d, e) for p in primes for e in range(max_de + 1) for d in range(e + 1)
            if d + e <= max_de]


def sweep_specs(max_order=None, primes=SWEEP_PRIMES, max_de=SWEEP_MAX_DE):
    out = []
    for p, d, e in sweep_grid(primes, max_de):
        for spec in enumerate_specs(p, d, e):
            if max_order is None or spec.order <= max_order:
                out.append(spec)
    return out


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel implementation."""
    ns = kernels.get_backend(request.param)
    monkeypatch.setattr(kernels, "K", ns)
    return ns


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
