import pytest

from eckhaus_lab.glsim import SimConfig, simulate


@pytest.fixture(scope="session")
def eckhaus_run():
    """The desk-scale run at the Eckhaus boundary (delta=0.05, L=400, n=2048, T=1e4)."""
    cfg = SimConfig(n=2048, length=400.0, dt=0.5, t_end=1e4, delta=0.05, store_states=True)
    return simulate(cfg)


ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one result line per acceptance criterion."""

    def _record(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
