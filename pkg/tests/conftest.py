import math

import numpy as np
import pytest
from hypothesis import strategies as st

from gtele import GaussianState


@pytest.fixture
def coherent():
    return GaussianState.coherent()


@st.composite
def one_mode_states(draw, min_var=0.2, max_var=3.0):
    vq = draw(st.floats(min_var, max_var))
    vp = draw(st.floats(min_var, max_var))
    rho = draw(st.floats(-0.9, 0.9))
    mq = draw(st.floats(-3, 3))
    mp = draw(st.floats(-3, 3))
    c = rho * math.sqrt(vq * vp)
    return GaussianState([mq, mp], [[vq, c], [c, vp]])


def random_state(rng: np.random.Generator, dim: int) -> GaussianState:
    a = rng.normal(size=(dim, dim))
    return GaussianState(rng.normal(size=dim), a @ a.T + 0.3 * np.eye(dim))


_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of an acceptance criterion under ``name``.

    The test body runs inside the returned context manager; a failure is
    recorded and then re-raised so pytest still reports it.
    """
    from contextlib import contextmanager

    @contextmanager
    def record(name: str):
        try:
            yield
        except BaseException as exc:
            first = next((ln.strip() for ln in str(exc).splitlines() if ln.strip()), "")
            _CRITERIA[name] = (False, f"{type(exc).__name__}: {first}")
            print(f"FAIL  {name}")
            raise
        _CRITERIA[name] = (True, "")
        print(f"PASS  {name}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, why) in _CRITERIA.items():
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        terminalreporter.write_line(line + (f"  ({why})" if why else ""))
