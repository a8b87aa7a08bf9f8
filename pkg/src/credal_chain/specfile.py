"""Reading and writing chain specification files (JSON).

See ``fixtures/chain_spec.schema.json`` for the schema. Structural problems
raise :class:`SpecParseError`; dimension and coherence problems raise
:class:`SpecValidationError`. Both list every problem with its field path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .core import (
    CredalError,
    MassFunction,
    PrevisionConstraints,
    ProbabilityIntervals,
    StateSpace,
    Vacuous,
    validate,
)
from .dynamics import UpperTransitionOperator

FIXTURES = ("example1", "example52", "precise")


class SpecError(Exception):
    def __init__(self, message: str, problems=()):
        self.problems = list(problems)
        detail = "".join(f"\n  {p}" for p in self.problems)
        super().__init__(message + detail)


class SpecParseError(SpecError):
    """The file is not JSON or does not follow the schema."""


class SpecValidationError(SpecError):
    """Dimensions disagree or a model is not coherent."""


@dataclass(frozen=True)
class ChainSpecFile:
    states: StateSpace
    initial: object
    transition: UpperTransitionOperator
    name: str = ""

    @property
    def size(self) -> int:
        return len(self.states)


def _schema() -> dict:
    text = resources.files("credal_chain").joinpath("fixtures/chain_spec.schema.json").read_text("utf-8")
    return json.loads(text)


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out.lstrip(".") or "<root>"


def _model(block: dict, n: int, where: str, problems: list[str]):
    def need(vec, field):
        if len(vec) != n:
            problems.append(f"{where}.{field}: expected {n} entries, got {len(vec)}")
            return False
        return True

    try:
        if "lower" in block:
            if need(block["lower"], "lower") & need(block["upper"], "upper"):
                return ProbabilityIntervals(block["lower"], block["upper"])
        elif "mass" in block:
            if need(block["mass"], "mass"):
                return MassFunction(tuple(block["mass"]))
        elif "vacuous" in block:
            return Vacuous(n)
        else:
            ok = True
            for i, item in enumerate(block["constraints"]):
                ok &= need(item["gamble"], f"constraints[{i}].gamble")
            if ok:
                up = [(c["gamble"], c["upper"]) for c in block["constraints"] if "upper" in c]
                lo = [(c["gamble"], c["lower"]) for c in block["constraints"] if "lower" in c]
                return PrevisionConstraints.from_assessments(up, lo)
    except CredalError as exc:
        problems.append(f"{where}: {exc}")
    return None


def load_chain_spec(data: dict) -> ChainSpecFile:
    """Build a validated model from already-decoded JSON data."""
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise SpecParseError("chain specification does not follow the schema",
                             [f"{_path(e.absolute_path)}: {e.message}" for e in errors])

    problems: list[str] = []
    states = StateSpace(tuple(data["states"]))
    n = len(states)
    initial = _model(data["initial"], n, "initial", problems)

    tr = data["transition"]
    rows = []
    if "rows" in tr:
        if len(tr["rows"]) != n:
            problems.append(f"transition.rows: expected {n} rows, got {len(tr['rows'])}")
        else:
            rows = [_model(b, n, f"transition.rows[{x}]", problems) for x, b in enumerate(tr["rows"])]
    else:
        mats = {k: tr[k] for k in ("lower", "upper", "matrix") if k in tr}
        shapes_ok = True
        for key, mat in mats.items():
            if len(mat) != n or any(len(r) != n for r in mat):
                problems.append(f"transition.{key}: expected a {n}x{n} matrix, "
                                f"got {len(mat)}x{'/'.join(sorted({str(len(r)) for r in mat}))}")
                shapes_ok = False
        if shapes_ok:
            for x in range(n):
                block = ({"mass": tr["matrix"][x]} if "matrix" in tr
                         else {"lower": tr["lower"][x], "upper": tr["upper"][x]})
                rows.append(_model(block, n, f"transition.row[{x}]", problems))

    if problems:
        raise SpecValidationError("chain specification has inconsistent dimensions or values", problems)

    for where, model in [("initial", initial)] + [(f"transition.row[{x}]", r) for x, r in enumerate(rows)]:
        problems += [f"{where}: {p}" for p in validate(model).problems]
    if problems:
        raise SpecValidationError("chain specification is not coherent", problems)

    return ChainSpecFile(states, initial, UpperTransitionOperator(tuple(rows)), data.get("name", ""))


def parse_chain_spec(path) -> ChainSpecFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path} is not valid JSON", [f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    return load_chain_spec(data)


def _model_dict(model) -> dict:
    if isinstance(model, ProbabilityIntervals):
        return {"lower": list(model.lower), "upper": list(model.upper)}
    if isinstance(model, MassFunction):
        return {"mass": list(model.weights)}
    if isinstance(model, Vacuous):
        return {"vacuous": True}
    if isinstance(model, PrevisionConstraints):
        return {"constraints": [{"gamble": list(h), "upper": c} for h, c in model.items]}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def chain_spec_to_dict(spec: ChainSpecFile) -> dict:
    rows = spec.transition.rows
    if all(isinstance(r, ProbabilityIntervals) for r in rows):
        transition = {"lower": [list(r.lower) for r in rows], "upper": [list(r.upper) for r in rows]}
    elif all(isinstance(r, MassFunction) for r in rows):
        transition = {"matrix": [list(r.weights) for r in rows]}
    else:
        transition = {"rows": [_model_dict(r) for r in rows]}
    out = {"states": list(spec.states.labels), "initial": _model_dict(spec.initial), "transition": transition}
    if spec.name:
        out = {"name": spec.name, **out}
    return out


def dump_chain_spec(spec: ChainSpecFile, path) -> None:
    Path(path).write_text(json.dumps(chain_spec_to_dict(spec), indent=2) + "\n", encoding="utf-8")


def fixture_path(name: str):
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return resources.files("credal_chain").joinpath(f"fixtures/{name}.json")


def load_fixture(name: str) -> ChainSpecFile:
    return load_chain_spec(json.loads(fixture_path(name).read_text("utf-8")))
