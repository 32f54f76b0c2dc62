"""Grid data model: parsing, validation, configuration overrides, round-trips."""
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridshield import (
    DomainError,
    GridCase,
    ParseError,
    UnknownIdError,
    apply_configuration,
    parse_grid,
    parse_override,
    serialize_grid,
    validate,
)
from gridshield.model import Branch, Bus, ConfigurationOverride, Generator

from oracles import random_grid

MINIMAL = json.dumps(
    {
        "name": "one",
        "reference_bus": "n1",
        "buses": [{"id": "n1", "demand_mw": 0.0}],
        "branches": [],
        "generators": [],
    }
)


def doc(**overrides):
    base = {
        "name": "pair",
        "reference_bus": "a",
        "buses": [{"id": "a", "demand_mw": 0.0}, {"id": "b", "demand_mw": 50.0}],
        "branches": [
            {
                "id": "a-b",
                "from": "a",
                "to": "b",
                "susceptance": 10.0,
                "flow_limit_mw": 100.0,
                "attackable": True,
                "in_service": True,
            }
        ],
        "generators": [
            {"id": "g1", "bus": "a", "p_max_mw": 100.0, "ict_controlled": False}
        ],
    }
    base.update(overrides)
    return json.dumps(base)


class TestParseGrid:
    def test_minimal_single_bus(self):
        grid = parse_grid(MINIMAL)
        assert len(grid.buses) == 1
        assert grid.branches == ()
        assert grid.generators == ()

    def test_ieee9_shape(self, ieee9):
        assert len(ieee9.buses) == 9
        assert len(ieee9.branches) == 9
        assert ieee9.ict_generator_ids == ("g2", "g3")

    def test_unknown_branch_endpoint_names_branch(self):
        bad = doc(
            branches=[
                {
                    "id": "a-z",
                    "from": "a",
                    "to": "z",
                    "susceptance": 10.0,
                    "flow_limit_mw": 100.0,
                    "attackable": True,
                    "in_service": True,
                }
            ]
        )
        with pytest.raises(UnknownIdError, match="a-z"):
            parse_grid(bad)

    def test_invalid_json_reports_position(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_grid('{"name": ')

    def test_non_object_document(self):
        with pytest.raises(ParseError, match="object"):
            parse_grid("[1, 2]")

    def test_missing_field(self):
        with pytest.raises(ParseError, match="demand_mw"):
            parse_grid(doc(buses=[{"id": "a"}, {"id": "b", "demand_mw": 1.0}]))

    def test_wrong_field_type(self):
        with pytest.raises(ParseError, match="demand_mw"):
            parse_grid(doc(buses=[{"id": "a", "demand_mw": "lots"},
                                  {"id": "b", "demand_mw": 1.0}]))

    def test_negative_limit_is_domain_error(self):
        bad = doc(
            branches=[
                {
                    "id": "a-b",
                    "from": "a",
                    "to": "b",
                    "susceptance": 10.0,
                    "flow_limit_mw": -5.0,
                    "attackable": True,
                    "in_service": True,
                }
            ]
        )
        with pytest.raises(DomainError, match="flow_limit_mw"):
            parse_grid(bad)

    def test_duplicate_id_rejected(self):
        bad = doc(
            generators=[
                {"id": "g1", "bus": "a", "p_max_mw": 10.0, "ict_controlled": False},
                {"id": "g1", "bus": "b", "p_max_mw": 10.0, "ict_controlled": True},
            ]
        )
        with pytest.raises(ParseError, match="duplicate"):
            parse_grid(bad)


class TestValidate:
    def test_shipped_grids_are_clean(self, toy_grid, ieee9, ieee30, cigre):
        for grid in (toy_grid, ieee9, ieee30, cigre):
            assert validate(grid) == []

    def test_duplicate_bus_id(self):
        grid = GridCase(
            name="dup",
            reference_bus="a",
            buses=(Bus("a", 0.0), Bus("a", 1.0)),
            branches=(),
            generators=(),
        )
        diags = validate(grid)
        assert len(diags) == 1
        assert diags[0].code == "duplicate-id"
        assert diags[0].component == "a"

    def test_zero_susceptance_is_domain_diagnostic(self):
        grid = GridCase(
            name="flat",
            reference_bus="a",
            buses=(Bus("a", 0.0), Bus("b", 1.0)),
            branches=(Branch("a-b", "a", "b", 0.0, 10.0),),
            generators=(),
        )
        diags = validate(grid)
        assert [d.code for d in diags] == ["domain"]
        assert diags[0].component == "a-b"

    def test_one_diagnostic_per_violation(self):
        grid = GridCase(
            name="mess",
            reference_bus="zz",
            buses=(Bus("a", -1.0),),
            branches=(Branch("loop", "a", "a", 5.0, 10.0),),
            generators=(Generator("g", "q", -2.0, False),),
        )
        codes = sorted(d.code for d in validate(grid))
        assert codes == sorted(
            ["domain", "structure", "domain", "unknown-reference", "unknown-reference"]
        )


class TestApplyConfiguration:
    def test_identity_changes_only_label(self, ieee9):
        identity = ConfigurationOverride("study", {}, {}, {})
        out = apply_configuration(ieee9, identity)
        assert out.configuration_label == "study"
        assert out == dataclass_replace_label(ieee9, "study")

    def test_zero_load_scale(self, ieee9):
        override = ConfigurationOverride(
            "dark", {b.id: 0.0 for b in ieee9.buses}, {}, {}
        )
        assert apply_configuration(ieee9, override).total_demand_mw == 0.0

    def test_switch_maps_differ_only_in_service_flags(self, cigre, cigre_overrides):
        opened = apply_configuration(
            cigre, cigre_overrides["cigre_open_switches.json"]
        )
        closed = apply_configuration(
            cigre, cigre_overrides["cigre_closed_switches.json"]
        )
        for a, b in zip(opened.branches, closed.branches):
            assert a == b or (
                a.id == b.id
                and a.in_service != b.in_service
                and (a.id, a.from_bus, a.to_bus, a.susceptance, a.flow_limit_mw, a.attackable)
                == (b.id, b.from_bus, b.to_bus, b.susceptance, b.flow_limit_mw, b.attackable)
            )
        flipped = [a.id for a, b in zip(opened.branches, closed.branches) if a != b]
        assert flipped == ["l6-7", "l4-11", "l8-14"]

    def test_pure_function(self, cigre, cigre_overrides):
        override = cigre_overrides["cigre_high_load.json"]
        first = apply_configuration(cigre, override)
        second = apply_configuration(cigre, override)
        assert first == second
        assert cigre.configuration_label == "base"  # input untouched

    def test_unknown_ids_rejected(self, ieee9):
        with pytest.raises(UnknownIdError, match="nope"):
            apply_configuration(ieee9, ConfigurationOverride("x", {"nope": 1.0}, {}, {}))
        with pytest.raises(UnknownIdError, match="ghost"):
            apply_configuration(
                ieee9, ConfigurationOverride("x", {}, {"ghost": 1.0}, {})
            )
        with pytest.raises(UnknownIdError, match="w1"):
            apply_configuration(
                ieee9, ConfigurationOverride("x", {}, {}, {"w1": False})
            )

    def test_scales_apply(self, ieee9):
        override = ConfigurationOverride("half", {"5": 0.5}, {"g2": 2.0}, {"1-4": False})
        out = apply_configuration(ieee9, override)
        assert out.bus_by_id["5"].demand_mw == pytest.approx(37.5)
        assert out.generator_by_id["g2"].p_max_mw == pytest.approx(600.0)
        assert not out.branch_by_id["1-4"].in_service

    def test_override_parsing(self, cigre_overrides):
        override = cigre_overrides["cigre_low_load.json"]
        assert override.label == "low-load"
        assert override.load_scale["1"] == 0.55

    def test_override_rejects_negative_scale(self):
        with pytest.raises(DomainError):
            parse_override(json.dumps({"label": "x", "load_scale": {"a": -1.0}}))


class TestRoundTrip:
    def test_shipped_files(self, data_dir):
        for path in sorted(data_dir.glob("*.json")):
            grid = parse_grid(path.read_text(encoding="utf-8"))
            assert parse_grid(serialize_grid(grid)) == grid

    def test_random_grids(self):
        rng = random.Random(2024)
        for _ in range(50):
            grid = random_grid(rng)
            assert parse_grid(serialize_grid(grid)) == grid

    @given(
        demand=st.floats(min_value=0, max_value=1e6, allow_nan=False),
        susceptance=st.floats(min_value=1e-3, max_value=1e6, allow_nan=False),
        limit=st.floats(min_value=1e-3, max_value=1e6, allow_nan=False),
        attackable=st.booleans(),
        in_service=st.booleans(),
        ict=st.booleans(),
    )
    @settings(max_examples=60, deadline=None)
    def test_field_round_trip(self, demand, susceptance, limit, attackable, in_service, ict):
        grid = GridCase(
            name="prop",
            reference_bus="a",
            buses=(Bus("a", 0.0), Bus("b", demand)),
            branches=(Branch("a-b", "a", "b", susceptance, limit, attackable, in_service),),
            generators=(Generator("g", "a", demand, ict),),
        )
        assert parse_grid(serialize_grid(grid)) == grid

    def test_validate_after_parse_is_empty(self):
        rng = random.Random(7)
        for _ in range(25):
            grid = random_grid(rng)
            reparsed = parse_grid(serialize_grid(grid))
            assert validate(reparsed) == []


def dataclass_replace_label(grid, label):
    import dataclasses

    return dataclasses.replace(grid, configuration_label=label)
