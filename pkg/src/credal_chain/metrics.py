"""Distances between imprecise models, degrees of imprecision and
coefficients of ergodicity.

Distances between upper expectations are maxima over gambles with values in
[0, 1]. For models induced by 2-monotone lower probabilities that maximum is
attained on indicators, so an event sweep is exact; for general models the
event sweep is only a lower bound and is reported as such.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    CredalError,
    MassFunction,
    ProbabilityIntervals,
    UnsupportedError,
    Vacuous,
    event_masks,
    total_variation,
)
from .dynamics import UpperTransitionOperator, iterate_lower, iterate_upper
from .extension import (
    MAX_CAPACITY_STATES,
    credal_vertices,
    is_two_monotone_induced,
    lower_natural_extension,
    lower_set_function,
    upper_natural_extension,
    upper_probabilities,
)

EXACT = "exact"
EVENT_LOWER_BOUND = "event_lower_bound"

MAX_UNIFORM_STATES = 5
MAX_EXTREME_MATRICES = 200_000


class Estimate(NamedTuple):
    value: float
    flag: str

    @property
    def exact(self) -> bool:
        return self.flag == EXACT


@dataclass(frozen=True)
class ErgodicityProfile:
    """Weak coefficient ``rho`` of the ``r``-step operator."""

    r: int
    rho: float
    flag: str = EXACT

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r}")
        if not 0.0 <= self.rho <= 1.0 + 1e-12:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.flag not in (EXACT, EVENT_LOWER_BOUND, "user"):
            raise ValueError(f"unknown profile flag {self.flag!r}")


def _check_size(n: int) -> None:
    if n > MAX_CAPACITY_STATES:
        raise UnsupportedError(f"event sweeps are limited to {MAX_CAPACITY_STATES} states, got {n}")


def _max_with_event(diff: np.ndarray) -> tuple[float, int]:
    # argmax returns the first hit, i.e. the smallest bitmask among ties
    k = int(np.argmax(diff))
    return float(diff[k]), k


def dobrushin(M) -> float:
    """Largest total variation distance between two rows of a stochastic matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or np.any(M < -1e-9) or np.any(np.abs(M.sum(axis=1) - 1.0) > 1e-9):
        raise CredalError("dobrushin coefficient needs a row-stochastic matrix")
    n = M.shape[0]
    if n < 2:
        return 0.0
    return max(total_variation(M[i], M[j]) for i in range(n) for j in range(i + 1, n))


def distance_two_monotone(a, b, with_event: bool = False):
    """Exact distance between two models induced by 2-monotone lower probabilities.

    Equals the largest difference of their lower probabilities over all events.
    With ``with_event`` the maximizing event (smallest bitmask on ties) is
    returned as well.
    """
    if a.size != b.size:
        raise CredalError(f"models live on {a.size} and {b.size} states")
    _check_size(a.size)
    for s in (a, b):
        if not is_two_monotone_induced(s):
            raise UnsupportedError(
                f"{type(s).__name__} is not 2-monotone-induced; use distance_event_lower_bound")
    diff = np.abs(lower_set_function(a).values - lower_set_function(b).values)
    value, event = _max_with_event(diff)
    return (value, event) if with_event else value


def distance_event_lower_bound(a, b, method: str = "auto") -> float:
    """Largest difference of upper probabilities over events.

    Always a lower bound on the distance of the upper expectations; exact
    when both models are 2-monotone-induced.
    """
    if a.size != b.size:
        raise CredalError(f"models live on {a.size} and {b.size} states")
    _check_size(a.size)
    return float(np.max(np.abs(upper_probabilities(a, method) - upper_probabilities(b, method))))


def imprecision(spec, method: str = "auto") -> float:
    """Distance between the upper and lower expectation of one model.

    Attained on an indicator for every credal set, so the event sweep is exact.
    """
    _check_size(spec.size)
    up = upper_probabilities(spec, method)
    full = up.size - 1
    return float(np.max(up + up[full ^ np.arange(up.size)]) - 1.0)


def _rowwise(T: UpperTransitionOperator, S: UpperTransitionOperator):
    if T.size != S.size:
        raise CredalError(f"operators act on {T.size} and {S.size} states")
    return zip(T.rows, S.rows)


def operator_distance(T: UpperTransitionOperator, S: UpperTransitionOperator) -> float:
    """Largest row distance. Use :func:`operator_distance_estimate` for the exactness flag."""
    return operator_distance_estimate(T, S).value


def operator_distance_estimate(T: UpperTransitionOperator, S: UpperTransitionOperator) -> Estimate:
    exact = all(is_two_monotone_induced(r) for r in T.rows + S.rows)
    if exact:
        value = max(distance_two_monotone(a, b) for a, b in _rowwise(T, S))
        return Estimate(value, EXACT)
    value = max(distance_event_lower_bound(a, b, T.method) for a, b in _rowwise(T, S))
    return Estimate(value, EVENT_LOWER_BOUND)


def operator_imprecision(T: UpperTransitionOperator) -> float:
    return max(imprecision(row, T.method) for row in T.rows)


def _row_event_spread(P: np.ndarray) -> float:
    # P[x, A]: upper probability of event A in row x
    return float(np.max(P.max(axis=0) - P.min(axis=0)))


def weak_ergodicity_coefficient(T: UpperTransitionOperator) -> float:
    """Largest distance between two rows of the operator (exact for 2-monotone rows)."""
    _check_size(T.size)
    for x, row in enumerate(T.rows):
        if not is_two_monotone_induced(row):
            raise UnsupportedError(
                f"row {x} is not 2-monotone-induced; use weak_ergodicity_n for a flagged estimate")
    P = np.array([lower_set_function(row).values for row in T.rows])
    return _row_event_spread(P)


def iterated_upper_probabilities(T: UpperTransitionOperator, n: int) -> np.ndarray:
    """``out[x, A]`` is the upper probability of reaching ``A`` in ``n`` steps from ``x``."""
    _check_size(T.size)
    members = event_masks(T.size)
    return np.array([iterate_upper(T, e, n) for e in members]).T


def weak_ergodicity_n(T: UpperTransitionOperator, n: int) -> Estimate:
    """Weak coefficient of the ``n``-step operator.

    Exact for ``n = 1`` with 2-monotone rows. Otherwise the event-restricted
    value is returned, flagged as a lower bound: ``n``-step rows need not be
    2-alternating, so indicators may not attain the distance.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1 and all(is_two_monotone_induced(r) for r in T.rows):
        return Estimate(weak_ergodicity_coefficient(T), EXACT)
    return Estimate(_row_event_spread(iterated_upper_probabilities(T, n)), EVENT_LOWER_BOUND)


def uniform_ergodicity_coefficient(T: UpperTransitionOperator) -> float:
    """Largest Dobrushin coefficient over the extreme transition matrices."""
    if T.size > MAX_UNIFORM_STATES:
        raise UnsupportedError(f"uniform coefficient limited to {MAX_UNIFORM_STATES} states, got {T.size}")
    vertex_sets = []
    for x, row in enumerate(T.rows):
        if isinstance(row, MassFunction):
            vertex_sets.append([row.p])
        elif isinstance(row, ProbabilityIntervals):
            vertex_sets.append([v.p for v in credal_vertices(row)])
        elif isinstance(row, Vacuous):
            vertex_sets.append(list(np.eye(T.size)))
        else:
            raise UnsupportedError(f"row {x}: vertex enumeration needs intervals or precise rows")
    count = int(np.prod([len(v) for v in vertex_sets]))
    if count > MAX_EXTREME_MATRICES:
        raise UnsupportedError(f"{count} extreme matrices exceed the limit of {MAX_EXTREME_MATRICES}")
    best = 0.0
    for rows in itertools.product(*vertex_sets):
        best = max(best, dobrushin(np.array(rows)))
    return best


@dataclass(frozen=True)
class ConvergenceResult:
    converges: bool | None
    r: int | None
    profile: ErgodicityProfile | None
    estimates: tuple[Estimate, ...]


def convergence_check(T: UpperTransitionOperator, r_max: int = 5) -> ConvergenceResult:
    """Look for the smallest ``r <= r_max`` with weak coefficient of ``T**r`` below 1.

    ``converges`` is True only when that coefficient is exact. A flagged
    event estimate below 1 does not certify convergence (it may
    underestimate), and values equal to 1 certify nothing either way, so
    both yield ``None``.
    """
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    estimates = []
    for r in range(1, r_max + 1):
        est = weak_ergodicity_n(T, r)
        estimates.append(est)
        if est.value < 1.0 - 1e-12:
            profile = ErgodicityProfile(r, est.value, est.flag)
            return ConvergenceResult(True if est.exact else None, r, profile, tuple(estimates))
    return ConvergenceResult(None, None, None, tuple(estimates))


# -- chain-level measurements ----------------------------------------------

def chain_upper_probabilities(E0, T: UpperTransitionOperator, n: int) -> np.ndarray:
    """Upper probability of every event at time ``n``."""
    P = iterated_upper_probabilities(T, n)
    return np.array([upper_natural_extension(E0, P[:, A], T.method) for A in range(P.shape[1])])


def chain_lower_probabilities(E0, T: UpperTransitionOperator, n: int) -> np.ndarray:
    members = event_masks(T.size)
    return np.array([lower_natural_extension(E0, iterate_lower(T, e, n), T.method) for e in members])


def measured_distribution_distance(E0, T, E0b, Tb, n: int) -> float:
    """Event lower bound of the distance between the time-``n`` upper expectations."""
    a = chain_upper_probabilities(E0, T, n)
    b = chain_upper_probabilities(E0b, Tb, n)
    return float(np.max(np.abs(a - b)))


def measured_operator_distance(T, S, n: int) -> float:
    """Event lower bound of the distance between ``T**n`` and ``S**n``."""
    return float(np.max(np.abs(iterated_upper_probabilities(T, n) - iterated_upper_probabilities(S, n))))


def chain_imprecision(E0, T: UpperTransitionOperator, n: int) -> float:
    """Exact degree of imprecision of the time-``n`` distribution."""
    up = chain_upper_probabilities(E0, T, n)
    lo = chain_lower_probabilities(E0, T, n)
    return float(np.max(up - lo))


def operator_imprecision_n(T: UpperTransitionOperator, n: int) -> float:
    """Exact imprecision of the ``n``-step operator, row by row."""
    members = event_masks(T.size)
    up = np.array([iterate_upper(T, e, n) for e in members])
    lo = np.array([iterate_lower(T, e, n) for e in members])
    return float(np.max(up - lo))
