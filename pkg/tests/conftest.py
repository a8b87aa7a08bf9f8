import numpy as np
import pytest

from credal_chain import MassFunction, PrevisionConstraints, ProbabilityIntervals, UpperTransitionOperator, load_fixture


def random_mass(rng, n, sparsity=0.0):
    p = rng.dirichlet(np.ones(n))
    if sparsity:
        p[rng.random(n) < sparsity] = 0.0
        if p.sum() == 0:
            p[rng.integers(n)] = 1.0
        p /= p.sum()
    return p


def random_intervals(rng, n, k=None):
    """Envelope of a few random distributions; reachable by construction."""
    k = k or int(rng.integers(1, 5))
    P = np.array([random_mass(rng, n, sparsity=0.2 * rng.random()) for _ in range(k)])
    lo, hi = P.min(axis=0), P.max(axis=0)
    return ProbabilityIntervals(tuple(np.round(lo, 12)), tuple(np.round(hi, 12)))


def random_constraints(rng, n, m=None):
    """Upper assessments dominating a random sample, so the set is non-empty."""
    m = m or int(rng.integers(1, 4))
    P = np.array([random_mass(rng, n) for _ in range(3)])
    items = []
    for _ in range(m):
        h = rng.uniform(-1, 1, n)
        items.append((tuple(h), float(np.max(P @ h) + 0.05 * rng.random())))
    return PrevisionConstraints(tuple(items))


def random_operator(rng, n):
    return UpperTransitionOperator(tuple(random_intervals(rng, n) for _ in range(n)))


def perturb_intervals(rng, iv, scale=0.05):
    """Shift the bounds of an interval model while keeping it reachable."""
    n = len(iv.lower)
    p = random_mass(rng, n)
    mix = float(rng.uniform(0, scale))
    lo = (1 - mix) * iv.lo + mix * p
    hi = (1 - mix) * iv.hi + mix * p
    return ProbabilityIntervals(tuple(lo), tuple(hi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240615)


@pytest.fixture(scope="session")
def example1():
    return load_fixture("example1")


@pytest.fixture(scope="session")
def example52():
    return load_fixture("example52")


@pytest.fixture(scope="session")
def precise():
    return load_fixture("precise")


__all__ = ["MassFunction", "random_mass", "random_intervals", "random_constraints", "random_operator",
           "perturb_intervals"]


# -- acceptance reporting --------------------------------------------------------

ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])
