"""Finite state spaces, gambles and the credal-set models built on them.

A credal set is represented by one of a handful of immutable model classes:

* :class:`ProbabilityIntervals` -- per-state lower/upper probabilities,
* :class:`PrevisionConstraints` -- finitely many upper-prevision assessments,
* :class:`MassFunction` -- a single (precise) distribution,
* :class:`Vacuous` -- the set of all distributions,
* :class:`Contaminated` -- an epsilon-mixture of another model with the
  vacuous one.

Numeric code works on state indices; labels live in :class:`StateSpace`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

TOL = 1e-9


class CredalError(ValueError):
    """Raised for malformed or inconsistent credal models."""


class UnsupportedError(CredalError):
    """Raised when a request exceeds a size limit or an exactness guarantee."""


def _as_tuple(values: Iterable[float], name: str) -> tuple[float, ...]:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise CredalError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise CredalError(f"{name} has non-finite entries")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class StateSpace:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        if not labels:
            raise CredalError("state space must contain at least one state")
        if len(set(labels)) != len(labels):
            raise CredalError(f"duplicate state labels in {labels}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of_size(cls, n: int) -> StateSpace:
        return cls(tuple(str(i + 1) for i in range(n)))

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def event(self, labels: Iterable[str]) -> int:
        """Bitmask of the event containing ``labels``."""
        mask = 0
        for lab in labels:
            mask |= 1 << self.index(lab)
        return mask


# -- gambles -------------------------------------------------------------

def as_gamble(f, n: int | None = None) -> np.ndarray:
    """Coerce ``f`` to a finite float vector, optionally checking its length."""
    g = np.asarray(f, dtype=float)
    if g.ndim != 1:
        raise CredalError(f"gamble must be one-dimensional, got shape {g.shape}")
    if n is not None and g.size != n:
        raise CredalError(f"gamble has length {g.size}, expected {n}")
    if not np.all(np.isfinite(g)):
        raise CredalError("gamble has non-finite entries")
    return g


def is_unit_box(f) -> bool:
    g = as_gamble(f)
    return bool(np.all(g >= 0.0) and np.all(g <= 1.0))


def indicator(n: int, event) -> np.ndarray:
    """Indicator gamble of ``event``, given as a bitmask or an iterable of indices."""
    if isinstance(event, (int, np.integer)):
        idx = [i for i in range(n) if event >> i & 1]
    else:
        idx = list(event)
    g = np.zeros(n)
    g[idx] = 1.0
    return g


def event_masks(n: int) -> np.ndarray:
    """Membership matrix of all 2**n events: row ``mask``, column state."""
    masks = np.arange(1 << n)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


# -- models --------------------------------------------------------------

@dataclass(frozen=True)
class MassFunction:
    weights: tuple[float, ...]

    def __post_init__(self):
        w = _as_tuple(self.weights, "weights")
        if min(w) < -TOL:
            raise CredalError(f"negative probability mass in {w}")
        if abs(sum(w) - 1.0) > TOL:
            raise CredalError(f"masses sum to {sum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return len(self.weights)

    @cached_property
    def p(self) -> np.ndarray:
        return np.array(self.weights)

    @classmethod
    def uniform(cls, n: int) -> MassFunction:
        return cls((1.0 / n,) * n)


@dataclass(frozen=True)
class ProbabilityIntervals:
    """Lower and upper probabilities of the singletons.

    Construction only checks shapes and finiteness; use :func:`validate` or
    :meth:`problems` for the coherence conditions, so that invalid data can
    still be diagnosed.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = _as_tuple(self.lower, "lower")
        hi = _as_tuple(self.upper, "upper")
        if len(lo) != len(hi):
            raise CredalError(f"lower has {len(lo)} entries but upper has {len(hi)}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def size(self) -> int:
        return len(self.lower)

    @cached_property
    def lo(self) -> np.ndarray:
        return np.array(self.lower)

    @cached_property
    def hi(self) -> np.ndarray:
        return np.array(self.upper)

    @classmethod
    def precise(cls, p) -> ProbabilityIntervals:
        w = _as_tuple(p, "p")
        return cls(w, w)

    def problems(self, tol: float = TOL) -> list[str]:
        lo, hi = self.lo, self.hi
        out = []
        for x in range(self.size):
            if lo[x] < -tol:
                out.append(f"lower[{x}] = {lo[x]:g} < 0")
            if hi[x] > 1 + tol:
                out.append(f"upper[{x}] = {hi[x]:g} > 1")
            if lo[x] > hi[x] + tol:
                out.append(f"lower[{x}] = {lo[x]:g} > upper[{x}] = {hi[x]:g}")
        slo, shi = lo.sum(), hi.sum()
        if slo > 1 + tol:
            out.append(f"sum of lower bounds {slo:g} > 1")
        if shi < 1 - tol:
            out.append(f"sum of upper bounds {shi:g} < 1")
        if out:
            return out
        for x in range(self.size):
            if hi[x] + (slo - lo[x]) > 1 + tol:
                out.append(f"upper[{x}] not reachable: upper[{x}] + other lowers = "
                           f"{hi[x] + slo - lo[x]:g} > 1")
            if lo[x] + (shi - hi[x]) < 1 - tol:
                out.append(f"lower[{x}] not reachable: lower[{x}] + other uppers = "
                           f"{lo[x] + shi - hi[x]:g} < 1")
        return out

    def is_reachable(self, tol: float = TOL) -> bool:
        return not self.problems(tol)


@dataclass(frozen=True)
class PrevisionConstraints:
    """Upper-prevision assessments ``E(h) <= bound`` on a finite set of gambles.

    Lower assessments ``E(h) >= c`` are stored as ``E(-h) <= -c``.
    """

    items: tuple[tuple[tuple[float, ...], float], ...]

    def __post_init__(self):
        items = []
        for h, c in self.items:
            items.append((_as_tuple(h, "gamble"), float(c)))
        if not items:
            raise CredalError("at least one assessment is required")
        sizes = {len(h) for h, _ in items}
        if len(sizes) != 1:
            raise CredalError(f"assessed gambles have different lengths {sorted(sizes)}")
        if not all(np.isfinite(c) for _, c in items):
            raise CredalError("assessment bounds must be finite")
        object.__setattr__(self, "items", tuple(items))

    @classmethod
    def from_assessments(cls, upper: Sequence = (), lower: Sequence = ()) -> PrevisionConstraints:
        """Build from ``(gamble, value)`` pairs of upper and lower previsions."""
        items = [(tuple(h), c) for h, c in upper]
        items += [(tuple(-np.asarray(h, dtype=float)), -float(c)) for h, c in lower]
        return cls(tuple(items))

    @property
    def size(self) -> int:
        return len(self.items[0][0])

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array([h for h, _ in self.items])

    @cached_property
    def bounds(self) -> np.ndarray:
        return np.array([c for _, c in self.items])


@dataclass(frozen=True)
class Vacuous:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise CredalError("vacuous model needs at least one state")


@dataclass(frozen=True)
class Contaminated:
    """Mixture ``(1 - eps) * inner + eps * vacuous`` of upper expectations."""

    inner: "CredalSpec"
    eps: float

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise CredalError(f"contamination level must lie in (0, 1), got {self.eps}")

    @property
    def size(self) -> int:
        return self.inner.size


CredalSpec = Union[ProbabilityIntervals, PrevisionConstraints, MassFunction, Vacuous, Contaminated]
CREDAL_TYPES = (ProbabilityIntervals, PrevisionConstraints, MassFunction, Vacuous, Contaminated)


# -- elementary operations ----------------------------------------------

def expect(p, f) -> float:
    """Precise expectation ``sum_x p(x) f(x)``."""
    w = p.p if isinstance(p, MassFunction) else np.asarray(p, dtype=float)
    g = as_gamble(f)
    if w.shape != g.shape:
        raise CredalError(f"length mismatch: {w.size} masses, {g.size} gamble values")
    return float(w @ g)


def total_variation(p, q) -> float:
    """Total variation distance, computed as half the L1 norm."""
    a = p.p if isinstance(p, MassFunction) else np.asarray(p, dtype=float)
    b = q.p if isinstance(q, MassFunction) else np.asarray(q, dtype=float)
    if a.shape != b.shape:
        raise CredalError(f"length mismatch: {a.size} vs {b.size}")
    return 0.5 * float(np.abs(a - b).sum())


def chebyshev(f, g) -> float:
    a, b = as_gamble(f), as_gamble(g)
    if a.shape != b.shape:
        raise CredalError(f"length mismatch: {a.size} vs {b.size}")
    return float(np.max(np.abs(a - b)))


@dataclass(frozen=True)
class Diagnostics:
    ok: bool
    problems: tuple[str, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def validate(spec) -> Diagnostics:
    """Check a credal model for consistency without raising.

    Interval models are checked for reachability, constraint models for
    feasibility of the induced linear program.
    """
    problems: list[str] = []
    if isinstance(spec, ProbabilityIntervals):
        problems = spec.problems()
    elif isinstance(spec, PrevisionConstraints):
        from .extension import constraints_feasible

        if not constraints_feasible(spec):
            problems = ["assessments admit no probability mass function (LP infeasible)"]
    elif isinstance(spec, Contaminated):
        inner = validate(spec.inner)
        problems = [f"inner: {p}" for p in inner.problems]
    elif not isinstance(spec, (MassFunction, Vacuous)):
        problems = [f"unknown credal model type {type(spec).__name__}"]
    return Diagnostics(not problems, tuple(problems))
