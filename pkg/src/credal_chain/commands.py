"""Analyses behind the command-line interface, each producing a :class:`ReportTable`."""

from __future__ import annotations

import math
import warnings

from .core import CredalError
from .dynamics import nstep_event_bounds, nstep_mass_bounds
from .extension import is_two_monotone_induced
from .metrics import (
    EXACT,
    ErgodicityProfile,
    chain_imprecision,
    convergence_check,
    distance_event_lower_bound,
    distance_two_monotone,
    imprecision,
    measured_distribution_distance,
    measured_operator_distance,
    operator_distance_estimate,
    operator_imprecision,
    uniform_ergodicity_coefficient,
    weak_ergodicity_n,
)
from .perturbation import (
    INF,
    ContaminationModel,
    PerturbationInputs,
    UnverifiedProfileWarning,
    contaminate_functional,
    contaminate_operator,
    contamination_bounds,
    contamination_metrics,
    distribution_error_bound,
    imprecision_bound,
    operator_error_bound,
)
from .reports import (
    EXACT as F_EXACT,
    INPUT,
    LOWER_BOUND,
    REFERENCE,
    Cell,
    ReportTable,
    bound_cell,
    fmt_number,
    fmt_step,
)
from .specfile import ChainSpecFile, load_fixture, parse_chain_spec

LIMIT_TOL = 1e-12
MAX_LIMIT_STEPS = 5000

# Published values for the bundled worked examples.
REF_P3_LOWER = (0.1966, 0.2672, 0.1513)
REF_P3_UPPER = (0.5293, 0.5799, 0.3903)
REF_M3_LOWER = ((0.2195, 0.2500, 0.1040), (0.2195, 0.2583, 0.1533), (0.1650, 0.3067, 0.2205))
REF_M3_UPPER = ((0.5898, 0.5992, 0.3350), (0.5383, 0.5730, 0.4175), (0.4239, 0.5609, 0.4175))
REF_RHO, REF_RHO_PERTURBED, REF_D = 0.67, 0.60, 0.05
REF_E0 = 0.0248
REF_DIST_BOUND = {1: 0.0740, 2: 0.0889, 3: 0.1034, INF: 0.1250}
REF_DIST_MEASURED = {1: 0.0248, 2: 0.0387, 3: 0.0429, INF: 0.0467}
REF_OP_BOUND = {2: 0.0800, 3: 0.0980, 4: 0.1088, INF: 0.1250}
REF_OP_MEASURED = {2: 0.0454, 3: 0.0499, 4: 0.0484, INF: 0.0467}

TOL_LP = 5e-4
TOL_FORMULA = 5e-5
TOL_EXACT = 1e-9


def _load(spec) -> ChainSpecFile:
    return spec if isinstance(spec, ChainSpecFile) else parse_chain_spec(spec)


def limit_steps(*rhos: float) -> int | None:
    """Steps after which every chain with these coefficients is within ``LIMIT_TOL`` of its limit."""
    worst = max(rhos)
    if worst >= 1.0:
        return None
    if worst <= 0.0:
        return 1
    return min(MAX_LIMIT_STEPS, max(1, math.ceil(math.log(LIMIT_TOL) / math.log(worst))))


def _flag(exact: bool) -> str:
    return F_EXACT if exact else LOWER_BOUND


def _steps_columns(steps, allow_inf: bool) -> tuple[list, list[str]]:
    kept = [n for n in steps if n != INF or allow_inf]
    return kept, [fmt_step(n) for n in kept]


# -- analyze -----------------------------------------------------------------

def cmd_analyze(spec, steps=(1, 2, 3, INF)) -> ReportTable:
    """Per-step mass bounds and imprecision of one chain, with its ergodicity summary."""
    model = _load(spec)
    E0, T = model.initial, model.transition
    labels = model.states.labels

    rho = weak_ergodicity_n(T, 1)
    conv = convergence_check(T, r_max=3)
    i_hat = operator_imprecision(T)
    i0 = imprecision(E0)
    bounds_ok = rho.exact
    N = limit_steps(rho.value) if bounds_ok else None
    steps, columns = _steps_columns(steps, N is not None)

    table = ReportTable(f"Analysis of {model.name or 'chain'}", columns)
    table.add_summary("rho(T)", Cell(rho.value, _flag(rho.exact)))
    try:
        table.add_summary("tau(T) uniform", Cell(uniform_ergodicity_coefficient(T), F_EXACT))
    except CredalError:
        pass
    table.add_summary("I_hat = d(T, lower T)", Cell(i_hat, F_EXACT))
    table.add_summary("I_0 = d(E_0, lower E_0)", Cell(i0, F_EXACT))
    if conv.converges:
        verdict = f"yes (rho(T^{conv.r}) = {fmt_number(conv.profile.rho)} < 1)"
    elif conv.r is not None:
        verdict = f"unknown (event estimate of rho(T^{conv.r}) is below 1 but not certified)"
    else:
        verdict = "unknown (no certified contraction for r <= 3)"
    table.add_summary("unique convergence", Cell(verdict))

    profile = ErgodicityProfile(1, min(rho.value, 1.0), EXACT) if bounds_ok else None
    inputs = PerturbationInputs(0.0, 0.0, profile, i0, i_hat) if profile else None

    mass, imp, imp_bound = {}, [], []
    for n in steps:
        m = N if n == INF else n
        mass[n] = nstep_mass_bounds(E0, T, m)
        imp.append(Cell(chain_imprecision(E0, T, m), F_EXACT))
        if inputs is None:
            imp_bound.append(Cell(None))
        else:
            imp_bound.append(bound_cell(imprecision_bound(inputs, n),
                                        imprecision_bound(inputs, n, clamp=False)))
    for y, lab in enumerate(labels):
        table.add(f"lower P(X_n={lab})", [Cell(mass[n][0][y], F_EXACT) for n in steps])
    for y, lab in enumerate(labels):
        table.add(f"upper P(X_n={lab})", [Cell(mass[n][1][y], F_EXACT) for n in steps])
    table.add("I_n", imp)
    table.add("I_n bound", imp_bound)

    if INF in steps:
        table.annotations.append(f"inf column: measured values iterated {N} steps (within {LIMIT_TOL:g} of the limit)")
    elif N is None:
        table.annotations.append("no inf column: rho(T) is not a certified value below 1")
    if not bounds_ok:
        table.annotations.append("imprecision bounds omitted: rho(T) is only an event lower bound")
    return table


# -- compare -----------------------------------------------------------------

def _parse_profile(text: str) -> ErgodicityProfile:
    try:
        parts = dict(p.split("=", 1) for p in text.split(":"))
        return ErgodicityProfile(int(parts["r"]), float(parts["rho"]), "user")
    except (KeyError, ValueError) as exc:
        raise ValueError(f"profile must look like r=K:rho=V, got {text!r}") from exc


def cmd_compare(spec_a, spec_b, steps=(1, 2, 3, INF), profile: str = "perturbed",
                e0: float | None = None) -> ReportTable:
    """Measured distances between two chains next to the perturbation bounds.

    ``profile`` picks the ergodicity coefficient used by the bounds: the
    second ('perturbed') chain's, the first ('self') chain's, or a
    user-supplied ``r=K:rho=V`` which marks the bounds unverified. ``e0``
    overrides the computed initial distance.
    """
    a, b = _load(spec_a), _load(spec_b)
    if a.size != b.size:
        raise CredalError(f"chains have {a.size} and {b.size} states")
    notes = []

    if e0 is not None:
        E0 = Cell(float(e0), INPUT)
        e0_sound = True
        notes.append(f"E_0 = {fmt_number(e0)} supplied by the user instead of the computed initial distance")
    elif is_two_monotone_induced(a.initial) and is_two_monotone_induced(b.initial):
        E0 = Cell(distance_two_monotone(a.initial, b.initial), F_EXACT)
        e0_sound = True
    else:
        E0 = Cell(distance_event_lower_bound(a.initial, b.initial), LOWER_BOUND)
        e0_sound = False
    D = operator_distance_estimate(a.transition, b.transition)

    rho_a = weak_ergodicity_n(a.transition, 1)
    rho_b = weak_ergodicity_n(b.transition, 1)
    if profile in ("perturbed", "self"):
        chosen = rho_b if profile == "perturbed" else rho_a
        prof = ErgodicityProfile(1, min(chosen.value, 1.0), chosen.flag)
    else:
        prof = _parse_profile(profile)
        notes.append(f"unverified-profile: bounds use the user-supplied r={prof.r}, rho={prof.rho}")
    unverified = prof.flag != EXACT or not (e0_sound and D.exact)
    if prof.flag == "event_lower_bound":
        notes.append("unverified-profile: the chosen chain's rho is only an event lower bound")
    if not (e0_sound and D.exact):
        notes.append("E_0 or D is only an event lower bound, so the bounds are not certified")

    N = limit_steps(rho_a.value, rho_b.value) if rho_a.exact and rho_b.exact else None
    steps, columns = _steps_columns(steps, prof.rho < 1.0)
    table = ReportTable(f"Comparison of {a.name or 'A'} and {b.name or 'B'}", columns)
    table.add_summary("E_0 = d(E_0, E'_0)", E0)
    table.add_summary("D = d(T, T')", Cell(D.value, _flag(D.exact)))
    table.add_summary("rho(T)", Cell(rho_a.value, _flag(rho_a.exact)))
    table.add_summary("rho(T')", Cell(rho_b.value, _flag(rho_b.exact)))
    table.add_summary("bound profile", Cell(f"{profile}: r={prof.r}, rho={fmt_number(prof.rho)}"))

    inputs = PerturbationInputs(E0.value, D.value, prof)
    meas_e, bound_e, meas_d, bound_d = [], [], [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnverifiedProfileWarning)
        for n in steps:
            m = N if n == INF else n
            if m is None:
                meas_e.append(Cell(None))
                meas_d.append(Cell(None))
            else:
                meas_e.append(Cell(measured_distribution_distance(
                    a.initial, a.transition, b.initial, b.transition, m), LOWER_BOUND))
                meas_d.append(Cell(measured_operator_distance(a.transition, b.transition, m)
                                   if m > 0 else 0.0, LOWER_BOUND))
            bound_e.append(bound_cell(
                distribution_error_bound(inputs, n, allow_unverified=True),
                distribution_error_bound(inputs, n, clamp=False, allow_unverified=True), unverified))
            bound_d.append(bound_cell(
                operator_error_bound(D.value, n, prof, allow_unverified=True),
                operator_error_bound(D.value, n, prof, clamp=False, allow_unverified=True), unverified))
    table.add("d(E_n, E'_n) measured", meas_e)
    table.add("d(E_n, E'_n) bound", bound_e)
    table.add("d(T^n, T'^n) measured", meas_d)
    table.add("d(T^n, T'^n) bound", bound_d)
    notes.append("measured distances are maxima over events: lower bounds of the true distances")
    if INF in steps and N is not None:
        notes.append(f"inf column: measured values iterated {N} steps (within {LIMIT_TOL:g} of the limit)")
    table.annotations += notes
    return table


# -- contaminate ---------------------------------------------------------------

IDENTITY_LABELS = {
    "spec_distance": "d(E, E_eps) = eps d(E, V)",
    "operator_distance": "d(T, T_eps) = eps d(T, T_V)",
    "other_spec_distance": "d(E'_eps, E_eps) = (1-eps) d(E', E)",
    "other_operator_distance": "d(T_eps, T'_eps) = (1-eps) d(T, T')",
    "rho_contaminated": "rho(T_eps) = (1-eps) rho(T)",
    "imprecision_contaminated": "d(E_eps, lower E_eps) = (1-eps) I + eps",
    "operator_imprecision_contaminated": "I_hat(T_eps) = (1-eps) I_hat + eps",
}


def cmd_contaminate(spec, eps: float, steps=(1, 2, 3, INF), other=None) -> ReportTable:
    """Epsilon-contamination identities and bounds for one chain."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    model = _load(spec)
    other_model = _load(other) if other is not None else None
    E0, T = model.initial, model.transition
    cm = contamination_metrics(E0, T, eps,
                               other_model.initial if other_model else None,
                               other_model.transition if other_model else None)
    cmodel = ContaminationModel(eps, cm.delta1, cm.delta2, cm.rho, cm.imprecision, cm.operator_imprecision)
    E_eps, T_eps = contaminate_functional(E0, eps), contaminate_operator(T, eps)

    q = cm.rho * (1.0 - eps)
    N_imp = limit_steps(q)
    N_dist = limit_steps(q, cm.rho)
    table = ReportTable(f"Contamination of {model.name or 'chain'} with eps = {eps:g}", [fmt_step(n) for n in steps])
    table.summary_columns = ["measured", "closed form"]
    table.add_summary("Delta_1 = d(E, V)", Cell(cm.delta1, F_EXACT))
    table.add_summary("Delta_2 = d(T, T_V)", Cell(cm.delta2, F_EXACT))
    table.add_summary("rho(T)", Cell(cm.rho, F_EXACT))
    table.add_summary("I_0", Cell(cm.imprecision, F_EXACT))
    table.add_summary("I_hat", Cell(cm.operator_imprecision, F_EXACT))
    for key, ident in cm.identities().items():
        table.add_summary(IDENTITY_LABELS[key], Cell(ident.measured, F_EXACT), Cell(ident.predicted, F_EXACT))

    meas_e, bound_e, meas_i, bound_i = [], [], [], []
    for n in steps:
        e_b = contamination_bounds(cmodel, n)
        e_raw = contamination_bounds(cmodel, n, clamp=False)
        bound_e.append(bound_cell(e_b[0], e_raw[0]))
        bound_i.append(bound_cell(e_b[1], e_raw[1]))
        m_d = N_dist if n == INF else n
        m_i = N_imp if n == INF else n
        meas_e.append(Cell(measured_distribution_distance(E_eps, T_eps, E0, T, m_d), LOWER_BOUND)
                      if m_d is not None else Cell(None))
        meas_i.append(Cell(chain_imprecision(E_eps, T_eps, m_i), F_EXACT))
    table.add("d(E_eps_n, E_n) measured", meas_e)
    table.add("d(E_eps_n, E_n) bound", bound_e)
    table.add("I'_n measured", meas_i)
    table.add("I'_n bound", bound_i)
    table.annotations.append("measured d(E_eps_n, E_n) is a maximum over events: a lower bound of the true distance")
    if INF in steps:
        table.annotations.append("inf column: measured values iterated until within "
                                 f"{LIMIT_TOL:g} of the limit")
    return table


# -- reproduce -------------------------------------------------------------------

def _check(table: ReportTable, name: str, ref: float, computed: float, tol: float,
           flag: str = F_EXACT, status: str | None = None) -> None:
    if status is None:
        status = "pass" if abs(computed - ref) <= tol else "FAIL"
    table.add(name, [Cell(ref, REFERENCE), Cell(computed, flag), Cell(f"{tol:.0e}"), Cell(status)])


def _reproduce_example1() -> ReportTable:
    ex = load_fixture("example1")
    table = ReportTable("Reproduction of example1 (3-step bounds)", ["reference", "computed", "tol", "status"])
    lo, up = nstep_mass_bounds(ex.initial, ex.transition, 3)
    for y in range(3):
        _check(table, f"lower P_3[{y + 1}]", REF_P3_LOWER[y], lo[y], TOL_LP)
    for y in range(3):
        _check(table, f"upper P_3[{y + 1}]", REF_P3_UPPER[y], up[y], TOL_LP)
    mlo, mup = nstep_event_bounds(ex.transition, 3)
    for x in range(3):
        for y in range(3):
            _check(table, f"lower M_3[{x + 1},{y + 1}]", REF_M3_LOWER[x][y], mlo[x, y], TOL_LP)
    for x in range(3):
        for y in range(3):
            _check(table, f"upper M_3[{x + 1},{y + 1}]", REF_M3_UPPER[x][y], mup[x, y], TOL_LP)
    return table


def _reproduce_example52() -> ReportTable:
    a, b = load_fixture("example1"), load_fixture("example52")
    T, Tp = a.transition, b.transition
    table = ReportTable("Reproduction of example52 (perturbed chain)",
                        ["reference", "computed", "tol", "status"])
    rho = weak_ergodicity_n(T, 1)
    rho_p = weak_ergodicity_n(Tp, 1)
    D = operator_distance_estimate(T, Tp)
    _check(table, "rho(T)", REF_RHO, rho.value, TOL_EXACT)
    _check(table, "rho(T')", REF_RHO_PERTURBED, rho_p.value, TOL_EXACT)
    _check(table, "d(T, T')", REF_D, D.value, TOL_EXACT)

    e0 = distance_two_monotone(a.initial, b.initial)
    e1 = measured_distribution_distance(a.initial, T, b.initial, Tp, 1)
    _check(table, "d(E_0, E'_0)", REF_E0, e0, TOL_EXACT, status="discrepancy")
    table.annotations.append(
        f"d(E_0, E'_0): computed {e0:.4g} vs reference {REF_E0} (event {{2}}: 0.25 vs 0.21); "
        f"the reference value equals d(E_1, E'_1) = {fmt_number(e1, 4)}")

    prof = ErgodicityProfile(1, rho_p.value, EXACT)
    ref_inputs = PerturbationInputs(REF_E0, REF_D, prof)
    for n, ref in REF_DIST_BOUND.items():
        value = distribution_error_bound(ref_inputs, n)
        status = "discrepancy" if n == 1 else None
        _check(table, f"d(E_n) bound n={fmt_step(n)}", ref, value, TOL_FORMULA, bound_cell(value, value).flag, status)
    alt = distribution_error_bound(PerturbationInputs(e0, REF_D, prof), 1)
    table.annotations.append(
        f"d(E_n) bound n=1: the formula with E_0 = {REF_E0} gives "
        f"{fmt_number(distribution_error_bound(ref_inputs, 1), 5)}; the reference 0.0740 matches "
        f"E_0 = {fmt_number(e0, 2)} instead ({fmt_number(alt, 5)})")
    for n, ref in REF_OP_BOUND.items():
        value = operator_error_bound(REF_D, n, prof)
        _check(table, f"d(T^n) bound n={fmt_step(n)}", ref, value, TOL_FORMULA, bound_cell(value, value).flag)

    N = limit_steps(rho.value, rho_p.value)
    for n, ref in REF_DIST_MEASURED.items():
        m = N if n == INF else n
        value = measured_distribution_distance(a.initial, T, b.initial, Tp, m)
        _check(table, f"d(E_n) measured n={fmt_step(n)}", ref, value, TOL_LP, LOWER_BOUND)
    for n, ref in REF_OP_MEASURED.items():
        m = N if n == INF else n
        value = measured_operator_distance(T, Tp, m)
        _check(table, f"d(T^n) measured n={fmt_step(n)}", ref, value, TOL_LP, LOWER_BOUND)
    table.annotations.append(
        "measured rows are event maxima of the n-step models (lower bounds of the true distances)")
    return table


def cmd_reproduce(which: str) -> ReportTable:
    if which == "example1":
        return _reproduce_example1()
    if which == "example52":
        return _reproduce_example52()
    raise ValueError(f"unknown example {which!r}; choose example1 or example52")


def reproduction_failures(table: ReportTable) -> list[str]:
    return [r.name for r in table.rows if r.cells[-1].value == "FAIL"]

