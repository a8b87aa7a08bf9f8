import copy
import json

import pytest

from credal_chain.core import PrevisionConstraints, ProbabilityIntervals, Vacuous
from credal_chain.specfile import (
    FIXTURES,
    SpecParseError,
    SpecValidationError,
    chain_spec_to_dict,
    dump_chain_spec,
    fixture_path,
    load_chain_spec,
    load_fixture,
    parse_chain_spec,
)

BASE = json.loads(fixture_path("example1").read_text("utf-8"))


def test_fixtures_load():
    for name in FIXTURES:
        spec = load_fixture(name)
        assert spec.size == 3
    ex = load_fixture("example1")
    assert ex.initial == ProbabilityIntervals((0.33, 0.25, 0.25), (0.38, 0.38, 0.42))
    assert ex.transition.rows[2] == ProbabilityIntervals((0.0, 0.5, 0.42), (0.0, 0.58, 0.5))
    with pytest.raises(KeyError):
        fixture_path("example2")


@pytest.mark.parametrize("name", FIXTURES)
def test_round_trip(tmp_path, name):
    spec = load_fixture(name)
    path = tmp_path / "spec.json"
    dump_chain_spec(spec, path)
    assert parse_chain_spec(path) == spec


def test_round_trip_mixed_rows(tmp_path):
    data = {
        "states": ["x", "y"],
        "initial": {"constraints": [{"gamble": [1, 0], "upper": 0.7}, {"gamble": [1, 0], "lower": 0.2}]},
        "transition": {"rows": [{"vacuous": True}, {"lower": [0.1, 0.2], "upper": [0.8, 0.9]}]},
    }
    spec = load_chain_spec(data)
    assert isinstance(spec.initial, PrevisionConstraints)
    assert isinstance(spec.transition.rows[0], Vacuous)
    again = load_chain_spec(chain_spec_to_dict(spec))
    assert again == spec


def test_dimension_error_lists_path():
    data = copy.deepcopy(BASE)
    data["transition"] = {"matrix": [[0.5, 0.5], [0.5, 0.5]]}
    with pytest.raises(SpecValidationError) as err:
        load_chain_spec(data)
    assert any("transition.matrix" in p for p in err.value.problems)


def test_unreachable_row_is_validation_error():
    data = copy.deepcopy(BASE)
    data["transition"]["upper"][0] = [0.9, 0.67, 0.0]
    with pytest.raises(SpecValidationError) as err:
        load_chain_spec(data)
    assert any(p.startswith("transition.row[0]") for p in err.value.problems)


def test_schema_errors_are_parse_errors(tmp_path):
    data = copy.deepcopy(BASE)
    del data["initial"]
    with pytest.raises(SpecParseError):
        load_chain_spec(data)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(SpecParseError) as err:
        parse_chain_spec(bad)
    assert "line 1" in str(err.value)
    with pytest.raises(SpecParseError):
        parse_chain_spec(tmp_path / "missing.json")
