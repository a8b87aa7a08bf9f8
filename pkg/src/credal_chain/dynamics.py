"""Imprecise transition operators and their n-step iterates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CredalError,
    MassFunction,
    ProbabilityIntervals,
    Vacuous,
    as_gamble,
    indicator,
    validate,
)
from .extension import METHODS, lower_natural_extension, upper_natural_extension


@dataclass(frozen=True)
class UpperTransitionOperator:
    """One conditional credal model per state; row ``x`` describes ``X_{n+1} | X_n = x``."""

    rows: tuple
    method: str = "auto"

    def __post_init__(self):
        rows = tuple(self.rows)
        if not rows:
            raise CredalError("operator needs at least one row")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        for x, row in enumerate(rows):
            if row.size != len(rows):
                raise CredalError(f"row {x} has {row.size} states, operator has {len(rows)} rows")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    @classmethod
    def from_bounds(cls, lower, upper, method: str = "auto") -> UpperTransitionOperator:
        """Operator given by lower and upper transition matrices."""
        lo, hi = np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 2 or lo.shape[0] != lo.shape[1]:
            raise CredalError(f"transition bounds must be square and equal-shaped, got {lo.shape} and {hi.shape}")
        return cls(tuple(ProbabilityIntervals(a, b) for a, b in zip(lo, hi)), method)

    @classmethod
    def from_matrix(cls, M) -> UpperTransitionOperator:
        M = np.asarray(M, dtype=float)
        return cls(tuple(MassFunction(tuple(r)) for r in M))

    def problems(self) -> list[str]:
        out = []
        for x, row in enumerate(self.rows):
            out += [f"row {x}: {p}" for p in validate(row).problems]
        return out


def vacuous_operator(n: int) -> UpperTransitionOperator:
    if hasattr(n, "labels"):
        n = len(n)
    return UpperTransitionOperator(tuple(Vacuous(n) for _ in range(n)))


def apply_upper(T: UpperTransitionOperator, f) -> np.ndarray:
    g = as_gamble(f, T.size)
    return np.array([upper_natural_extension(row, g, T.method) for row in T.rows])


def apply_lower(T: UpperTransitionOperator, f) -> np.ndarray:
    g = as_gamble(f, T.size)
    return np.array([lower_natural_extension(row, g, T.method) for row in T.rows])


def iterate_upper(T: UpperTransitionOperator, f, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError("number of steps must be non-negative")
    g = as_gamble(f, T.size).copy()
    for _ in range(n):
        g = apply_upper(T, g)
    return g


def iterate_lower(T: UpperTransitionOperator, f, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError("number of steps must be non-negative")
    g = as_gamble(f, T.size).copy()
    for _ in range(n):
        g = apply_lower(T, g)
    return g


def distribution_bounds(E0, T: UpperTransitionOperator, n: int, f) -> tuple[float, float]:
    """Lower and upper expectation of ``f(X_n)``."""
    if E0.size != T.size:
        raise CredalError(f"initial model has {E0.size} states, operator has {T.size}")
    up = upper_natural_extension(E0, iterate_upper(T, f, n), T.method)
    lo = lower_natural_extension(E0, iterate_lower(T, f, n), T.method)
    return lo, up


def nstep_mass_bounds(E0, T: UpperTransitionOperator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper probability of each state at time ``n``."""
    bounds = [distribution_bounds(E0, T, n, indicator(T.size, [y])) for y in range(T.size)]
    lo, up = zip(*bounds)
    return np.array(lo), np.array(up)


def nstep_event_bounds(T: UpperTransitionOperator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper ``n``-step transition matrices.

    Entry ``(x, y)`` bounds ``P(X_{m+n} = y | X_m = x)``. These are marginal
    bounds only; they do not describe the ``n``-step operator completely.
    """
    if n < 1:
        raise ValueError("n-step event bounds need n >= 1")
    size = T.size
    lo = np.empty((size, size))
    up = np.empty((size, size))
    for y in range(size):
        e = indicator(size, [y])
        up[:, y] = iterate_upper(T, e, n)
        lo[:, y] = iterate_lower(T, e, n)
    return lo, up
