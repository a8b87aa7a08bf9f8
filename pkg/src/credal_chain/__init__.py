"""Imprecise Markov chains on finite state spaces: credal models, natural
extension, upper transition operators, ergodicity coefficients and
perturbation bounds."""

from .core import (
    Contaminated,
    CredalError,
    Diagnostics,
    MassFunction,
    PrevisionConstraints,
    ProbabilityIntervals,
    StateSpace,
    UnsupportedError,
    Vacuous,
    validate,
)
from .dynamics import (
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
from .extension import (
    SetFunction,
    check_two_monotone,
    choquet,
    credal_vertices,
    lower_natural_extension,
    upper_natural_extension,
)
from .metrics import (
    ErgodicityProfile,
    Estimate,
    convergence_check,
    distance_two_monotone,
    imprecision,
    operator_distance,
    operator_imprecision,
    uniform_ergodicity_coefficient,
    weak_ergodicity_coefficient,
    weak_ergodicity_n,
)
from .perturbation import (
    ContaminationModel,
    PerturbationInputs,
    contamination_bounds,
    contamination_metrics,
    distribution_error_bound,
    imprecision_bound,
    operator_error_bound,
    sum_rho_bound,
)
from .specfile import ChainSpecFile, load_fixture, parse_chain_spec

__version__ = "0.1.0"
