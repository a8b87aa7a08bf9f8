"""Dense two-phase simplex for the small LPs behind natural extension.

Variables are non-negative. Pivoting follows Bland's rule, so the solver
never cycles and repeated solves of the same problem are bit-identical.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-12

LE, GE, EQ = "<=", ">=", "="


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``objective . x`` subject to ``A x (rel) b`` and ``x >= 0``."""

    objective: np.ndarray
    A: np.ndarray
    relations: tuple[str, ...]
    b: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        A = np.asarray(self.A, dtype=float).reshape(-1, c.size)
        b = np.asarray(self.b, dtype=float).ravel()
        if c.size == 0:
            raise ValueError("linear program needs at least one variable")
        if A.shape[0] != b.size or len(self.relations) != b.size:
            raise ValueError("constraint rows, relations and bounds disagree in length")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("linear program has non-finite coefficients")
        bad = set(self.relations) - {LE, GE, EQ}
        if bad:
            raise ValueError(f"unknown relations {sorted(bad)}")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "relations", tuple(self.relations))

    @classmethod
    def from_rows(cls, objective, rows: Sequence[tuple[Sequence[float], str, float]]) -> LinearProgram:
        c = np.asarray(objective, dtype=float)
        if rows:
            A = np.array([r[0] for r in rows], dtype=float)
        else:
            A = np.zeros((0, c.size))
        return cls(c, A, tuple(r[1] for r in rows), np.array([r[2] for r in rows], dtype=float))

    @property
    def n_vars(self) -> int:
        return self.objective.size


@dataclass(frozen=True)
class LPResult:
    status: Status
    value: float | None = None
    x: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T: np.ndarray, basis: list[int], n_cols: int) -> bool:
    """Maximize over the tableau; the last row holds negated reduced costs.

    Returns False if the problem is unbounded.
    """
    m = T.shape[0] - 1
    while True:
        neg = T[-1, :n_cols] < -FEAS_TOL
        if not neg.any():
            return True
        c = int(neg.argmax())
        col = T[:m, c]
        pos = col > PIVOT_TOL
        if not pos.any():
            return False
        rhs = T[:m, -1]
        ratios = np.full(m, np.inf)
        np.divide(rhs, col, out=ratios, where=pos)
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, abs(best)))
        r = int(ties[0]) if ties.size == 1 else int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, c)
        basis[r] = c


def solve_lp(lp: LinearProgram, sense: str = "max") -> LPResult:
    """Solve ``lp`` to optimality, or report it infeasible or unbounded.

    The basic solution found by the tableau is re-solved against the original
    constraint matrix, so the returned optimizer carries full precision.
    """
    if sense not in ("max", "min"):
        raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")
    c = lp.objective if sense == "max" else -lp.objective
    A, b = lp.A.copy(), lp.b.copy()
    rel = list(lp.relations)
    m, n = A.shape

    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    for i in np.flatnonzero(flip):
        rel[i] = {LE: GE, GE: LE, EQ: EQ}[rel[i]]

    n_slack = sum(r != EQ for r in rel)
    n_art = sum(r != LE for r in rel)
    n_struct = n + n_slack
    T = np.zeros((m + 1, n_struct + n_art + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = [0] * m
    s = a = 0
    for i, r in enumerate(rel):
        if r == LE:
            T[i, n + s] = 1.0
            basis[i] = n + s
            s += 1
        elif r == GE:
            T[i, n + s] = -1.0
            s += 1
        if r != LE:
            T[i, n_struct + a] = 1.0
            basis[i] = n_struct + a
            a += 1

    if n_art:
        # phase I: maximize -(sum of artificials)
        T[-1, n_struct:n_struct + n_art] = 1.0
        for i in range(m):
            if basis[i] >= n_struct:
                T[-1] -= T[i]
        _run(T, basis, n_struct + n_art)
        if T[-1, -1] < -FEAS_TOL:
            return LPResult(Status.INFEASIBLE)
        # drive remaining (zero-level) artificials out of the basis
        keep = []
        for i in range(m):
            if basis[i] >= n_struct:
                nz = np.flatnonzero(np.abs(T[i, :n_struct]) > PIVOT_TOL)
                if nz.size:
                    _pivot(T, i, int(nz[0]))
                    basis[i] = int(nz[0])
                    keep.append(i)
            else:
                keep.append(i)
        T = np.vstack([T[keep], T[-1:]])
        T = np.hstack([T[:, :n_struct], T[:, -1:]])
        basis = [basis[i] for i in keep]
        A_red, b_red = A[keep], b[keep]
    else:
        A_red, b_red = A, b

    # phase II
    cost = np.zeros(n_struct)
    cost[:n] = c
    T[-1, :] = 0.0
    T[-1, :n_struct] = -cost
    for i, j in enumerate(basis):
        if cost[j] != 0.0:
            T[-1] += cost[j] * T[i]
    if not _run(T, basis, n_struct):
        return LPResult(Status.UNBOUNDED)

    x = _refine(A_red, b_red, rel, keep if n_art else range(m), basis, n, T)
    value = float(lp.objective @ x)
    return LPResult(Status.OPTIMAL, value, x)


def _refine(A, b, rel, rows, basis, n, T) -> np.ndarray:
    """Recompute the basic variables from the original data."""
    rows = list(rows)
    m = len(rows)
    full = np.zeros((m, n + sum(r != EQ for r in rel)))
    full[:, :n] = A
    s = 0
    slack_col = {}
    for i, r in enumerate(rel):
        if r != EQ:
            slack_col[i] = n + s
            s += 1
    for k, i in enumerate(rows):
        if i in slack_col:
            full[k, slack_col[i]] = 1.0 if rel[i] == LE else -1.0
    B = full[:, basis]
    x = np.zeros(full.shape[1])
    try:
        x[basis] = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        x[basis] = T[:m, -1]
    if np.any(x < -FEAS_TOL):
        x[basis] = T[:m, -1]
    return np.clip(x[:n], 0.0, None)
