import os

import pytest
from hypothesis import HealthCheck, settings

from spherical_an import derived_objects as do
from spherical_an.chain_core import SubchainLineBundle

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "40")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")

S = SubchainLineBundle


def a5_object() -> do.DerivedObject:
    """The length-15 spherical object on a chain of five curves."""
    return do.DerivedObject.make(
        5,
        {
            0: [S.on(1, 5, -1, 0, 0, 0, 0)],
            1: [S.on(1, 4, -1, 0, 0, 0), S.on(1, 3, 0, 0, -1)],
            2: [S.on(1, 3, 0, -1, 0)],
        },
        {2: {(0, 0): [1], (1, 0): [1]}, 1: {(0, 1): [1]}},
    )


@pytest.fixture(scope="session")
def a5():
    return a5_object()


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(k: int, ok: bool, detail: str, seconds: float) -> None:
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}"
        lines.append(line)
        print(line, flush=True)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
