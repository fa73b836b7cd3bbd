from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from quasichoice import Profile, read_profile
from quasichoice.generators import default_labels

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def fixture_profile(name: str) -> Profile:
    return read_profile(FIXTURES / f"{name}.prof")


@pytest.fixture
def load():
    return fixture_profile


@st.composite
def profiles(draw, min_m=1, max_m=5, min_n=1, max_n=5):
    """Arbitrary reflexive profiles."""
    m = draw(st.integers(min_m, max_m))
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * m * m, max_size=n * m * m))
    stack = np.array(bits, dtype=bool).reshape(n, m, m)
    stack[:, np.arange(m), np.arange(m)] = True
    return Profile(default_labels(m), stack)


@st.composite
def profiles_with_set(draw, **kw):
    p = draw(profiles(**kw))
    S = draw(st.sets(st.sampled_from(p.labels), min_size=1))
    return p, frozenset(S)



ACCEPTANCE_LINES: list[str] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    # a test may pass while reporting that the criterion as stated does not hold
    forced = [v for k, v in item.user_properties if k == "verdict"]
    verdict = "PASS" if rep.passed and not forced else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number}: {verdict} {title}" + (f" ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
