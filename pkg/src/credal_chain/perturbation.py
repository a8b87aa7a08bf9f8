"""Perturbation and imprecision bounds for uniquely convergent imprecise
Markov chains, and epsilon-contaminated models.

Step counts are non-negative integers or ``math.inf``. All bounds are
distances between expectation functionals and are clamped to [0, 1]; pass
``clamp=False`` to get the raw closed-form value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .core import Contaminated, Vacuous
from .dynamics import UpperTransitionOperator, vacuous_operator
from .extension import lower_set_function
from .metrics import (
    EXACT,
    ErgodicityProfile,
    distance_two_monotone,
    imprecision,
    operator_distance,
    operator_imprecision,
    weak_ergodicity_coefficient,
)

INF = math.inf


class UnverifiedProfileWarning(UserWarning):
    """An ergodicity profile that is not certified exact was used for a bound."""


class UnboundedError(ValueError):
    """The limit bound does not exist because the chain may not contract."""


def _check_steps(n) -> None:
    if n == INF:
        return
    if int(n) != n or n < 0:
        raise ValueError(f"step count must be a non-negative integer or inf, got {n!r}")


def _check_profile(profile: ErgodicityProfile, allow_unverified: bool) -> None:
    if profile.flag == EXACT:
        return
    if not allow_unverified:
        raise ValueError(
            f"profile flagged {profile.flag!r}; an underestimated rho invalidates the bound "
            "(pass allow_unverified=True to override)")
    warnings.warn(f"unverified-profile: bound uses rho={profile.rho} flagged {profile.flag!r}",
                  UnverifiedProfileWarning, stacklevel=3)


def _finish(raw: float, clamp: bool) -> float:
    return min(max(raw, 0.0), 1.0) if clamp else raw


def sum_rho_bound(n, profile: ErgodicityProfile) -> float:
    """Upper bound on ``rho_0 + ... + rho_{n-1}`` from ``rho(T^r) = rho``.

    With ``n = k r + m`` and ``m < r`` this is ``r (1 - rho^k) / (1 - rho) + m rho^k``,
    and ``r / (1 - rho)`` for ``n = inf``.
    """
    _check_steps(n)
    r, rho = profile.r, profile.rho
    if n == INF:
        if rho >= 1.0:
            raise UnboundedError(f"rho = {rho} >= 1: the series has no finite bound")
        return r / (1.0 - rho)
    k, m = divmod(int(n), r)
    rk = rho ** k
    head = r * k if rho == 1.0 else r * (1.0 - rk) / (1.0 - rho)
    return head + m * rk


def rho_n_bound(n, profile: ErgodicityProfile) -> float:
    """``rho^k`` with ``k = n // r``; the trivial bound 1 for ``n < r``."""
    _check_steps(n)
    if n == INF:
        return 0.0 if profile.rho < 1.0 else 1.0
    return profile.rho ** (int(n) // profile.r)


@dataclass(frozen=True)
class PerturbationInputs:
    """Distances feeding the bounds.

    ``E0`` is the distance between the initial models, ``D`` between the
    transition operators; ``I0`` and ``I_hat`` are the initial and operator
    imprecision, needed only for :func:`imprecision_bound`.
    """

    E0: float
    D: float
    profile: ErgodicityProfile
    I0: float | None = None
    I_hat: float | None = None

    def __post_init__(self):
        for name in ("E0", "D", "I0", "I_hat"):
            v = getattr(self, name)
            if v is not None and not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


def distribution_error_bound(inputs: PerturbationInputs, n, *, clamp: bool = True,
                             allow_unverified: bool = False) -> float:
    """Bound on the distance between the time-``n`` upper expectations of two chains."""
    _check_profile(inputs.profile, allow_unverified)
    if n == INF:
        raw = inputs.D * sum_rho_bound(INF, inputs.profile)
    else:
        raw = inputs.E0 * rho_n_bound(n, inputs.profile) + inputs.D * sum_rho_bound(n, inputs.profile)
    return _finish(raw, clamp)


def operator_error_bound(D1: float, n, profile: ErgodicityProfile, *, clamp: bool = True,
                         allow_unverified: bool = False) -> float:
    """Bound on the distance between the ``n``-step operators of two chains."""
    _check_profile(profile, allow_unverified)
    return _finish(D1 * sum_rho_bound(n, profile), clamp)


def imprecision_bound(inputs: PerturbationInputs, n, *, mode: str = "distribution",
                      clamp: bool = True, allow_unverified: bool = False) -> float:
    """Bound on the degree of imprecision at time ``n``.

    ``mode='distribution'`` bounds the imprecision of the time-``n``
    distribution from ``I0`` and ``I_hat``; ``mode='operator'`` bounds the
    imprecision of the ``n``-step operator from ``I_hat`` alone.
    """
    if mode not in ("distribution", "operator"):
        raise ValueError(f"mode must be 'distribution' or 'operator', got {mode!r}")
    if inputs.I_hat is None or (mode == "distribution" and inputs.I0 is None):
        raise ValueError("imprecision bound needs I_hat (and I0 for the distribution mode)")
    _check_profile(inputs.profile, allow_unverified)
    tail = inputs.I_hat * sum_rho_bound(n, inputs.profile)
    if mode == "operator" or n == INF:
        return _finish(tail, clamp)
    return _finish(inputs.I0 * rho_n_bound(n, inputs.profile) + tail, clamp)


# -- contamination ----------------------------------------------------------

def contaminate_functional(spec, eps: float) -> Contaminated:
    """Mix a model with the vacuous one: ``(1 - eps) E(f) + eps max f``."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in the open interval (0, 1), got {eps}")
    return Contaminated(spec, float(eps))


def contaminate_operator(T: UpperTransitionOperator, eps: float) -> UpperTransitionOperator:
    return UpperTransitionOperator(tuple(contaminate_functional(r, eps) for r in T.rows), T.method)


@dataclass(frozen=True)
class Identity:
    """A contamination identity: value measured on the contaminated model vs. closed form."""

    measured: float
    predicted: float

    @property
    def error(self) -> float:
        return abs(self.measured - self.predicted)


@dataclass(frozen=True)
class ContaminationMetrics:
    eps: float
    delta1: float
    delta2: float
    rho: float
    imprecision: float
    operator_imprecision: float
    spec_distance: Identity                       # d(E, E_eps) = eps d(E, V)
    operator_distance: Identity                   # d(T, T_eps) = eps d(T, T_V)
    other_spec_distance: Identity | None          # d(E'_eps, E_eps) = (1 - eps) d(E', E)
    other_operator_distance: Identity | None      # d(T_eps, T'_eps) = (1 - eps) d(T, T')
    rho_contaminated: Identity                    # rho(T_eps) = (1 - eps) rho(T)
    imprecision_contaminated: Identity            # d(E_eps, lower E_eps) = (1 - eps) I + eps
    operator_imprecision_contaminated: Identity   # I_hat(T_eps) = (1 - eps) I_hat + eps

    def identities(self) -> dict[str, Identity]:
        names = ("spec_distance", "operator_distance", "other_spec_distance",
                 "other_operator_distance", "rho_contaminated", "imprecision_contaminated",
                 "operator_imprecision_contaminated")
        return {k: getattr(self, k) for k in names if getattr(self, k) is not None}

    @property
    def max_error(self) -> float:
        return max(i.error for i in self.identities().values())


def contamination_metrics(spec, T: UpperTransitionOperator, eps: float,
                          other_spec=None, other_operator: UpperTransitionOperator | None = None
                          ) -> ContaminationMetrics:
    """Measure the contaminated models directly and pair each quantity with its closed form.

    The scaling identities for a second model are only evaluated when
    ``other_spec`` / ``other_operator`` are given.
    """
    lower_set_function(spec)  # raises early for models without an exact distance
    n = spec.size
    spec_eps = contaminate_functional(spec, eps)
    T_eps = contaminate_operator(T, eps)
    vac = Vacuous(n)
    delta1 = distance_two_monotone(spec, vac)
    delta2 = operator_distance(T, vacuous_operator(n))
    rho = weak_ergodicity_coefficient(T)
    imp = imprecision(spec)
    imp_op = operator_imprecision(T)

    other_spec_id = None
    if other_spec is not None:
        other_spec_id = Identity(
            distance_two_monotone(contaminate_functional(other_spec, eps), spec_eps),
            (1 - eps) * distance_two_monotone(other_spec, spec))
    other_op_id = None
    if other_operator is not None:
        other_op_id = Identity(
            operator_distance(T_eps, contaminate_operator(other_operator, eps)),
            (1 - eps) * operator_distance(T, other_operator))

    return ContaminationMetrics(
        eps=eps, delta1=delta1, delta2=delta2, rho=rho,
        imprecision=imp, operator_imprecision=imp_op,
        spec_distance=Identity(distance_two_monotone(spec, spec_eps), eps * delta1),
        operator_distance=Identity(operator_distance(T, T_eps), eps * delta2),
        other_spec_distance=other_spec_id,
        other_operator_distance=other_op_id,
        rho_contaminated=Identity(weak_ergodicity_coefficient(T_eps), (1 - eps) * rho),
        imprecision_contaminated=Identity(imprecision(spec_eps), (1 - eps) * imp + eps),
        operator_imprecision_contaminated=Identity(operator_imprecision(T_eps), (1 - eps) * imp_op + eps),
    )


@dataclass(frozen=True)
class ContaminationModel:
    """Inputs of the contamination bounds.

    ``delta1`` is the distance of the initial model to the vacuous one,
    ``delta2`` that of the operator to the vacuous operator; ``rho``,
    ``I0`` and ``I_hat`` describe the uncontaminated chain.
    """

    epsilon: float
    delta1: float
    delta2: float
    rho: float
    I0: float = 0.0
    I_hat: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        for name in ("delta1", "delta2", "rho", "I0", "I_hat"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def from_chain(cls, spec, T: UpperTransitionOperator, eps: float) -> ContaminationModel:
        return cls(eps, distance_two_monotone(spec, Vacuous(spec.size)),
                   operator_distance(T, vacuous_operator(T.size)),
                   weak_ergodicity_coefficient(T), imprecision(spec), operator_imprecision(T))


def contamination_bounds(model: ContaminationModel, n, *, clamp: bool = True) -> tuple[float, float]:
    """Bounds on ``d(E_eps,n, E_n)`` and on the imprecision of the contaminated chain at time ``n``."""
    _check_steps(n)
    eps = model.epsilon
    q = model.rho * (1.0 - eps)
    denom = 1.0 - q
    i_step = (1.0 - eps) * model.I_hat + eps
    if n == INF:
        e = eps * model.delta2 / denom
        i = i_step / denom
    else:
        qn = q ** int(n)
        e = eps * model.delta1 * qn + eps * model.delta2 * (1.0 - qn) / denom
        i = ((1.0 - eps) * model.I0 + eps) * qn + i_step * (1.0 - qn) / denom
    return _finish(e, clamp), _finish(i, clamp)
