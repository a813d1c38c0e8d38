import numpy as np
import pytest

from bnpsched.instance import GenConfig, Instance, generate


def tiny(w=(3,), p=((10,),), s=None, elig=None):
    """Instance from nested job lists; machines 0-based, jobs 1-based."""
    w = np.asarray(w)
    p = np.asarray(p)
    m, n = p.shape
    elig = np.ones((m, n), bool) if elig is None else np.asarray(elig, bool)
    s = np.zeros((m, n + 1, n), int) if s is None else np.asarray(s)
    return Instance.from_job_arrays(w, elig, p, s)


@pytest.fixture
def one_job():
    # s_01 = 2, p_1 = 10, w_1 = 3
    return tiny(w=(3,), p=((10,),), s=[[[2], [0]]])


@pytest.fixture
def two_jobs():
    # s_01 = 2, p_1 = 10, w_1 = 3, s_12 = 1, p_2 = 5, w_2 = 2
    s = np.zeros((1, 3, 2), int)
    s[0, 0] = (2, 2)
    s[0, 1, 1] = 1
    s[0, 2, 0] = 1
    return tiny(w=(3, 2), p=((10, 5),), s=s)


def small_instance(seed, n=None, m=None, scaled=False):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9)) if n is None else n
    m = int(rng.integers(1, 4)) if m is None else m
    p_range = (1, 10) if scaled else (10, 100)
    return generate(GenConfig(n=n, m=m, p_range=p_range, s_range=(0, 10), w_range=(1, 10), prob=0.5, seed=seed))


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
