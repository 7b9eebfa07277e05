import pytest
from hypothesis import HealthCheck, settings

from bqplane.fields import PrimeField, Q, QuadExt

# Exact-fraction arithmetic makes single examples slow; cap the example
# count and drop the per-example deadline instead of thinning assertions.
settings.register_profile(
    "exact",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


@pytest.fixture(scope="session")
def gf13():
    return PrimeField(13)


@pytest.fixture(scope="session")
def gf17():
    return PrimeField(17)


@pytest.fixture(scope="session")
def qi():
    return QuadExt(Q, -1)


@pytest.fixture(scope="session")
def qs2():
    return QuadExt(Q, 2)


@pytest.fixture(scope="session")
def qs2i(qs2):
    return QuadExt(qs2, -1)


# ------------------------------------------------- acceptance reporting
#
# Acceptance tests record one line each through this fixture; the hook
# reprints them as a block at the end of the run so the verdict per
# criterion is visible in plain `pytest -v` output.

_acceptance_lines: list[tuple[int, str]] = []


@pytest.fixture
def acceptance():
    def record(n: int, ok: bool, detail: str) -> str:
        line = f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}: {detail}"
        _acceptance_lines.append((n, line))
        return line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_acceptance_lines):
        terminalreporter.write_line(line)
