"""Upper and lower expectations of gambles under a credal model.

Natural extension is computed either by linear programming over the credal
set or, for probability intervals (whose induced lower probability is
2-monotone), by a discrete Choquet integral.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    Contaminated,
    CredalError,
    MassFunction,
    PrevisionConstraints,
    ProbabilityIntervals,
    UnsupportedError,
    Vacuous,
    as_gamble,
    event_masks,
)
from .simplex import EQ, LE, LinearProgram, Status, solve_lp

MAX_CAPACITY_STATES = 20
MAX_MONOTONE_CHECK_STATES = 12
MAX_VERTEX_STATES = 8

METHODS = ("auto", "lp", "choquet")


# -- set functions -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SetFunction:
    """Capacity on all subsets of ``{0..n-1}``, indexed by bitmask."""

    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in ("lower", "upper"):
            raise CredalError(f"kind must be 'lower' or 'upper', got {self.kind!r}")
        v = np.array(self.values, dtype=float)
        n = v.size.bit_length() - 1
        if v.ndim != 1 or v.size != 1 << n:
            raise CredalError("set function needs exactly 2**n values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.size.bit_length() - 1

    @property
    def full(self) -> int:
        return self.values.size - 1

    def __getitem__(self, mask: int) -> float:
        return float(self.values[mask])

    def __eq__(self, other) -> bool:
        return (isinstance(other, SetFunction) and self.kind == other.kind
                and np.array_equal(self.values, other.values))

    def problems(self, tol: float = 1e-9) -> list[str]:
        v, full = self.values, self.full
        out = []
        if abs(v[0]) > tol:
            out.append(f"value of the empty set is {v[0]:g}")
        if abs(v[full] - 1.0) > tol:
            out.append(f"value of the whole space is {v[full]:g}")
        if v.min() < -tol or v.max() > 1 + tol:
            out.append("values outside [0, 1]")
        for i in range(self.size):
            bit = 1 << i
            lo = np.arange(v.size)[(np.arange(v.size) & bit) == 0]
            if np.any(v[lo] > v[lo | bit] + tol):
                out.append(f"not monotone when adding state {i}")
                break
        return out


def conjugate(sf: SetFunction) -> SetFunction:
    """``P(A) -> 1 - P(complement A)``; maps lower capacities to upper ones and back."""
    v = sf.values
    comp = sf.full ^ np.arange(v.size)
    kind = "upper" if sf.kind == "lower" else "lower"
    return SetFunction(kind, 1.0 - v[comp])


def intervals_to_lower_set_function(iv: ProbabilityIntervals) -> SetFunction:
    """Lower probability of every event induced by reachable intervals."""
    if not iv.is_reachable():
        raise CredalError("probability intervals are not reachable: " + "; ".join(iv.problems()))
    _check_capacity_size(iv.size)
    members = event_masks(iv.size)
    in_lo = members @ iv.lo
    out_hi = (1.0 - members) @ iv.hi
    v = np.maximum(in_lo, 1.0 - out_hi)
    v[0], v[-1] = 0.0, 1.0
    return SetFunction("lower", v)


def additive_set_function(p, kind: str = "lower") -> SetFunction:
    w = p.p if isinstance(p, MassFunction) else np.asarray(p, dtype=float)
    _check_capacity_size(w.size)
    return SetFunction(kind, event_masks(w.size) @ w)


def vacuous_set_function(n: int, kind: str = "lower") -> SetFunction:
    _check_capacity_size(n)
    v = np.zeros(1 << n) if kind == "lower" else np.ones(1 << n)
    if kind == "lower":
        v[-1] = 1.0
    else:
        v[0] = 0.0
    return SetFunction(kind, v)


def _check_capacity_size(n: int) -> None:
    if n > MAX_CAPACITY_STATES:
        raise UnsupportedError(f"{n} states exceed the event-enumeration limit of {MAX_CAPACITY_STATES}")


def check_two_monotone(sf: SetFunction, tol: float = 1e-9) -> bool:
    """Exhaustive check of 2-monotonicity (lower) or 2-alternation (upper)."""
    n = sf.size
    if n > MAX_MONOTONE_CHECK_STATES:
        raise UnsupportedError(f"exhaustive check limited to {MAX_MONOTONE_CHECK_STATES} states, got {n}")
    v = sf.values
    masks = np.arange(v.size)
    sign = 1.0 if sf.kind == "lower" else -1.0
    for A in range(v.size):
        union = v[A | masks] + v[A & masks]
        if np.any(sign * (union - v[A] - v[masks]) < -tol):
            return False
    return True


def choquet(sf: SetFunction, f) -> float:
    """Discrete Choquet integral of ``f`` with respect to ``sf``."""
    g = as_gamble(f, sf.size)
    levels = np.unique(g)
    total = float(levels[0])
    weights = 1 << np.arange(g.size)
    for lo, hi in zip(levels[:-1], levels[1:]):
        mask = int(weights[g >= hi].sum())
        total += float(hi - lo) * sf[mask]
    return total


def choquet_upper(sf: SetFunction, f) -> float:
    if sf.kind != "upper":
        raise CredalError("choquet_upper expects an upper capacity")
    return choquet(sf, f)


def choquet_lower(sf: SetFunction, f) -> float:
    if sf.kind != "lower":
        raise CredalError("choquet_lower expects a lower capacity")
    return choquet(sf, f)


def _interval_choquet_upper(iv: ProbabilityIntervals, g: np.ndarray) -> float:
    # Upper probability of the top-j level set is min(sum of its uppers,
    # 1 - sum of the remaining lowers); ties get zero weight.
    order = np.argsort(-g, kind="stable")
    gs = g[order]
    cum_hi = np.cumsum(iv.hi[order])[:-1]
    rest_lo = iv.lo.sum() - np.cumsum(iv.lo[order])[:-1]
    cap = np.minimum(cum_hi, 1.0 - rest_lo)
    return float(gs[-1] + np.dot(gs[:-1] - gs[1:], cap))


# -- linear programming route --------------------------------------------

def natural_extension_lp(spec, f) -> LinearProgram:
    """LP whose optimum (maximized) is the upper natural extension of ``f``."""
    g = as_gamble(f, spec.size)
    n = g.size
    if isinstance(spec, ProbabilityIntervals):
        # substitute p = lower + q with 0 <= q <= upper - lower
        A = np.vstack([np.eye(n), np.ones(n)])
        b = np.append(spec.hi - spec.lo, 1.0 - spec.lo.sum())
        return LinearProgram(g, A, (LE,) * n + (EQ,), b)
    if isinstance(spec, PrevisionConstraints):
        rows = [(np.ones(n), EQ, 1.0)]
        rows += [(h, LE, c) for h, c in zip(spec.matrix, spec.bounds)]
        return LinearProgram.from_rows(g, rows)
    if isinstance(spec, MassFunction):
        return LinearProgram.from_rows(g, [(np.eye(n)[i], EQ, spec.p[i]) for i in range(n)])
    if isinstance(spec, Vacuous):
        return LinearProgram.from_rows(g, [(np.ones(n), EQ, 1.0)])
    raise CredalError(f"no linear program for {type(spec).__name__}")


def _lp_upper(spec, g: np.ndarray) -> float:
    res = solve_lp(natural_extension_lp(spec, g))
    if res.status is Status.INFEASIBLE:
        raise CredalError(f"{type(spec).__name__} defines an empty credal set")
    if res.status is not Status.OPTIMAL:
        raise CredalError(f"natural extension LP ended {res.status.value}")
    value = res.value
    if isinstance(spec, ProbabilityIntervals):
        value += float(g @ spec.lo)
    return value


def constraints_feasible(spec: PrevisionConstraints) -> bool:
    return solve_lp(natural_extension_lp(spec, np.zeros(spec.size))).status is Status.OPTIMAL


# -- public evaluation ----------------------------------------------------

def upper_natural_extension(spec, f, method: str = "auto") -> float:
    """Upper expectation of ``f`` over the credal set described by ``spec``.

    Parameters
    ----------
    spec : credal model
        Any of the model classes in :mod:`credal_chain.core`.
    f : array_like
        Gamble, one value per state.
    method : {'auto', 'lp', 'choquet'}
        ``'auto'`` uses the Choquet integral for probability intervals and
        linear programming for prevision constraints. ``'choquet'`` is only
        exact for 2-monotone models and is refused for constraint models.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    g = as_gamble(f, spec.size)
    top = float(g.max())
    if top == float(g.min()):
        return top
    if isinstance(spec, MassFunction):
        return float(spec.p @ g)
    if isinstance(spec, Vacuous):
        return top
    if isinstance(spec, Contaminated):
        return (1.0 - spec.eps) * upper_natural_extension(spec.inner, g, method) + spec.eps * top
    if isinstance(spec, ProbabilityIntervals):
        if method == "lp":
            return _lp_upper(spec, g)
        return _interval_choquet_upper(spec, g)
    if isinstance(spec, PrevisionConstraints):
        if method == "choquet":
            raise UnsupportedError("Choquet evaluation is not exact for general prevision constraints")
        return _lp_upper(spec, g)
    raise CredalError(f"unknown credal model type {type(spec).__name__}")


def lower_natural_extension(spec, f, method: str = "auto") -> float:
    return -upper_natural_extension(spec, -as_gamble(f), method)


def upper_probabilities(spec, method: str = "auto") -> np.ndarray:
    """Upper probability of every event (indexed by bitmask)."""
    n = spec.size
    _check_capacity_size(n)
    if isinstance(spec, ProbabilityIntervals) and method != "lp":
        return conjugate(intervals_to_lower_set_function(spec)).values.copy()
    members = event_masks(n)
    return np.array([upper_natural_extension(spec, members[m], method) for m in range(1 << n)])


# -- 2-monotone capacities of models ---------------------------------------

def is_two_monotone_induced(spec) -> bool:
    """Whether ``spec`` is known to be the natural extension of a 2-monotone capacity."""
    if isinstance(spec, Contaminated):
        return is_two_monotone_induced(spec.inner)
    return isinstance(spec, (ProbabilityIntervals, MassFunction, Vacuous))


def lower_set_function(spec) -> SetFunction:
    """Lower probability of a 2-monotone-induced model on all events."""
    if isinstance(spec, ProbabilityIntervals):
        return intervals_to_lower_set_function(spec)
    if isinstance(spec, MassFunction):
        return additive_set_function(spec)
    if isinstance(spec, Vacuous):
        return vacuous_set_function(spec.size)
    if isinstance(spec, Contaminated):
        inner = lower_set_function(spec.inner).values
        vac = vacuous_set_function(spec.size).values
        return SetFunction("lower", (1.0 - spec.eps) * inner + spec.eps * vac)
    raise UnsupportedError(f"{type(spec).__name__} is not known to induce a 2-monotone lower probability")


# -- vertices ------------------------------------------------------------

def greedy_vertex(iv: ProbabilityIntervals, order) -> np.ndarray:
    """Give each state in ``order`` as much mass as the later lower bounds allow."""
    lo, hi = iv.lo, iv.hi
    order = list(order)
    p = np.zeros(iv.size)
    remaining = 1.0
    reserved = float(lo.sum())
    for x in order:
        reserved -= lo[x]
        p[x] = max(lo[x], min(hi[x], remaining - reserved))
        remaining -= p[x]
    return p


def credal_vertices(iv: ProbabilityIntervals) -> list[MassFunction]:
    """Extreme points of the credal set of reachable probability intervals."""
    if iv.size > MAX_VERTEX_STATES:
        raise UnsupportedError(f"vertex enumeration limited to {MAX_VERTEX_STATES} states, got {iv.size}")
    if not iv.is_reachable():
        raise CredalError("probability intervals are not reachable: " + "; ".join(iv.problems()))
    found: list[np.ndarray] = []
    for order in itertools.permutations(range(iv.size)):
        v = greedy_vertex(iv, order)
        if not any(np.max(np.abs(v - w)) <= 1e-12 for w in found):
            found.append(v)
    return [MassFunction(tuple(v / v.sum())) for v in found]
