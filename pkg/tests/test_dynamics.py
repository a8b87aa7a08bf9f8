import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from credal_chain.core import CredalError, MassFunction
from credal_chain.dynamics import (
    UpperTransitionOperator,
    apply_lower,
    apply_upper,
    distribution_bounds,
    iterate_lower,
    iterate_upper,
    nstep_event_bounds,
    nstep_mass_bounds,
    vacuous_operator,
)
from credal_chain.extension import credal_vertices

from conftest import random_intervals, random_operator

P3_LOWER = (0.1966, 0.2672, 0.1513)
P3_UPPER = (0.5293, 0.5799, 0.3903)
M3_LOWER = ((0.2195, 0.2500, 0.1040), (0.2195, 0.2583, 0.1533), (0.1650, 0.3067, 0.2205))
M3_UPPER = ((0.5898, 0.5992, 0.3350), (0.5383, 0.5730, 0.4175), (0.4239, 0.5609, 0.4175))


def vertex_matrices(T):
    rows = [[v.p for v in credal_vertices(r)] for r in T.rows]
    return [np.array(m) for m in itertools.product(*rows)]


def test_one_step_indicator(example1):
    assert apply_upper(example1.transition, [0, 1, 0]) == pytest.approx([0.67, 0.42, 0.58])


@pytest.mark.parametrize("method", ["auto", "lp"])
def test_three_step_bounds(example1, method):
    T = UpperTransitionOperator(example1.transition.rows, method)
    lo, up = nstep_mass_bounds(example1.initial, T, 3)
    assert lo == pytest.approx(P3_LOWER, abs=5e-4)
    assert up == pytest.approx(P3_UPPER, abs=5e-4)
    mlo, mup = nstep_event_bounds(T, 3)
    assert mlo == pytest.approx(np.array(M3_LOWER), abs=5e-4)
    assert mup == pytest.approx(np.array(M3_UPPER), abs=5e-4)


def test_precise_chain_is_matrix_power(precise):
    M = np.array([r.p for r in precise.transition.rows])
    p0 = precise.initial.p
    f = np.array([1.0, -2.0, 0.5])
    for n in range(5):
        expected = np.linalg.matrix_power(M, n) @ f
        assert iterate_upper(precise.transition, f, n) == pytest.approx(expected)
        assert iterate_lower(precise.transition, f, n) == pytest.approx(expected)
        lo, up = nstep_mass_bounds(precise.initial, precise.transition, n)
        assert lo == pytest.approx(p0 @ np.linalg.matrix_power(M, n))
        assert up == pytest.approx(lo)


def test_vacuous_operator():
    V = vacuous_operator(3)
    f = np.array([0.2, -1.0, 3.0])
    assert apply_upper(V, f).tolist() == [3.0] * 3
    assert apply_lower(V, f).tolist() == [-1.0] * 3


def test_dimension_checks():
    with pytest.raises(CredalError):
        UpperTransitionOperator((MassFunction((0.5, 0.5)),) * 3)
    with pytest.raises(CredalError):
        UpperTransitionOperator.from_bounds(np.zeros((2, 3)), np.ones((2, 3)))
    with pytest.raises(ValueError):
        nstep_event_bounds(vacuous_operator(2), 0)


def test_two_steps_match_vertex_products():
    rng = np.random.default_rng(7)
    for _ in range(5):
        T = random_operator(rng, 3)
        f = rng.uniform(-1, 1, 3)
        mats = vertex_matrices(T)
        one = np.max([M @ f for M in mats], axis=0)
        assert apply_upper(T, f) == pytest.approx(one, abs=1e-9)
        two = np.max([A @ (B @ f) for A in mats for B in mats], axis=0)
        assert iterate_upper(T, f, 2) == pytest.approx(two, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 4), steps=st.integers(0, 4))
def test_random_products_stay_within_bounds(seed, n, steps):
    rng = np.random.default_rng(seed)
    T = random_operator(rng, n)
    E0 = random_intervals(rng, n)
    f = rng.uniform(-1, 1, n)
    lo, up = distribution_bounds(E0, T, steps, f)
    assert lo <= up + 1e-9
    p = credal_vertices(E0)[rng.integers(len(credal_vertices(E0)))].p
    for _ in range(steps):
        M = np.array([credal_vertices(r)[rng.integers(len(credal_vertices(r)))].p for r in T.rows])
        p = p @ M
    assert lo - 1e-9 <= p @ f <= up + 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5))
def test_operator_properties(seed, n):
    rng = np.random.default_rng(seed)
    T = random_operator(rng, n)
    f, g = rng.uniform(-1, 1, (2, n))
    c = float(rng.uniform(-2, 2))
    assert apply_lower(T, f) == pytest.approx(-apply_upper(T, -f), abs=1e-12)
    assert apply_upper(T, f + c) == pytest.approx(apply_upper(T, f) + c, abs=1e-9)
    assert np.all(apply_upper(T, np.maximum(f, g)) >= apply_upper(T, f) - 1e-9)
    # non-expansive in the sup norm
    assert np.max(np.abs(apply_upper(T, f) - apply_upper(T, g))) <= np.max(np.abs(f - g)) + 1e-9
