import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from loyaltygame import MechanismStrengths, TeamConfig

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Acceptance tests append (criterion, passed, detail) here; printed at the end.
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def acceptance():
    def record(num: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append((num, bool(ok), detail))
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}", file=sys.stderr)

    return record


@st.composite
def team_configs(draw, max_size: int = 8):
    return TeamConfig(
        productivity=draw(st.floats(5.0, 40.0)),
        returns_exponent=draw(st.floats(0.2, 0.9)),
        effort_cost=draw(st.floats(0.5, 4.0)),
        team_size=draw(st.integers(2, max_size)),
        effort_cap=draw(st.floats(1.0, 20.0)),
    )


mechanisms = st.builds(
    MechanismStrengths, st.floats(0.0, 1.0), st.floats(0.0, 0.9)
)
loyalty_values = st.floats(0.0, 1.0)
