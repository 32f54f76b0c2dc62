"""Attack-scenario enumeration: oracle table equality, stop rules, merging."""
import random

import pytest

from gridshield import (
    AttackVector,
    CasList,
    DomainError,
    ExhaustedError,
    MergeError,
    StopRule,
    enumerate_cas,
    load_cas_list,
    merge_cas_lists,
    parse_cas_list,
    save_cas_list,
    serialize_cas_list,
    solve_dcopf,
    worst_case_attack,
)
from gridshield.enumeration import attackable_universe, validate_cas_list
from gridshield.model import Branch, Bus, Generator, GridCase

from oracles import exhaustive_attack_table, make_cas, random_grid


def assert_matches_table(cas, table):
    assert len(cas.records) == len(table)
    for rec, (keys, lost) in zip(cas.records, table):
        assert rec.components.component_keys() == keys
        assert rec.lost_load_mw == lost  # same engine, same floats
    assert [r.rank for r in cas.records] == list(range(1, len(table) + 1))


class TestEnumerate:
    def test_toy_single_record(self, toy_grid):
        cas = enumerate_cas(toy_grid, z_max=1, stop=StopRule.unbounded())
        assert len(cas.records) == 1
        assert cas.complete
        rec = cas.records[0]
        assert rec.components == AttackVector.of(branches=["a-b"])
        assert rec.lost_load_mw == pytest.approx(50.0, abs=1e-6)

    def test_zero_cap_gives_empty_list(self, ieee9):
        cas = enumerate_cas(ieee9, z_max=2, stop=StopRule(max_scenarios=0))
        assert cas.records == ()
        assert not cas.complete

    def test_ieee9_equals_exhaustive_table(self, ieee9):
        for z in (1, 2):
            cas = enumerate_cas(ieee9, z_max=z, stop=StopRule.unbounded())
            assert cas.complete
            assert_matches_table(cas, exhaustive_attack_table(ieee9, z))
        assert len(enumerate_cas(ieee9, 2, StopRule.unbounded()).records) == 55

    def test_random_grids_equal_exhaustive_table(self):
        rng = random.Random(12)
        done = 0
        while done < 15:
            grid = random_grid(rng)
            universe = attackable_universe(grid)
            if len(universe) < 2:
                continue
            cas = enumerate_cas(grid, z_max=2, stop=StopRule.unbounded())
            assert_matches_table(cas, exhaustive_attack_table(grid, 2))
            done += 1

    def test_cap_prefix_semantics(self, ieee9):
        full = enumerate_cas(ieee9, z_max=2, stop=StopRule.unbounded())
        capped = enumerate_cas(ieee9, z_max=2, stop=StopRule(max_scenarios=10))
        assert len(capped.records) == 10
        assert not capped.complete
        assert capped.records == full.records[:10]

    def test_min_lost_load_threshold(self, ieee9):
        full = enumerate_cas(ieee9, z_max=2, stop=StopRule.unbounded())
        cas = enumerate_cas(
            ieee9, z_max=2, stop=StopRule(max_scenarios=None, min_lost_load_mw=80.0)
        )
        expected = [r for r in full.records if r.lost_load_mw >= 80.0]
        assert [r.components for r in cas.records] == [r.components for r in expected]
        assert not cas.complete  # some candidates were dropped

    def test_nonincreasing_lost_load(self, ieee9, cigre):
        for grid in (ieee9, cigre):
            cas = enumerate_cas(grid, z_max=2, stop=StopRule.unbounded())
            losts = [r.lost_load_mw for r in cas.records]
            assert losts == sorted(losts, reverse=True)
            validate_cas_list(cas)

    def test_budget_monotonicity_of_top_record(self, ieee9, cigre):
        for grid in (ieee9, cigre):
            top1 = enumerate_cas(grid, 1, StopRule.unbounded()).records[0].lost_load_mw
            top2 = enumerate_cas(grid, 2, StopRule.unbounded()).records[0].lost_load_mw
            assert top2 >= top1 - 1e-6

    def test_parallel_execution_is_deterministic(self, ieee9):
        one = enumerate_cas(ieee9, z_max=2, stop=StopRule.unbounded(), jobs=1)
        two = enumerate_cas(ieee9, z_max=2, stop=StopRule.unbounded(), jobs=2)
        assert one == two
        assert serialize_cas_list(one) == serialize_cas_list(two)

    def test_z_max_bounds_checked(self, toy_grid):
        with pytest.raises(DomainError):
            enumerate_cas(toy_grid, z_max=0)
        with pytest.raises(DomainError):
            enumerate_cas(toy_grid, z_max=2)  # only one attackable component

    def test_saturating_singleton_pairs_stay_exact(self):
        # every pair containing the bridge saturates at total demand; the
        # shortcut that skips those LPs must yield the same numbers as the
        # exhaustive table
        grid = GridCase(
            name="bridge",
            reference_bus="a",
            buses=(Bus("a", 0.0), Bus("b", 60.0), Bus("c", 40.0)),
            branches=(
                Branch("a-b", "a", "b", 10.0, 200.0),
                Branch("b-c", "b", "c", 10.0, 200.0),
                Branch("b-c2", "b", "c", 10.0, 200.0),
            ),
            generators=(Generator("g1", "a", 200.0, False),),
        )
        cas = enumerate_cas(grid, z_max=2, stop=StopRule.unbounded())
        assert_matches_table(cas, exhaustive_attack_table(grid, 2))
        top = cas.records[0]
        assert top.lost_load_mw == grid.total_demand_mw

    def test_stop_rule_rejects_bad_values(self):
        with pytest.raises(DomainError):
            StopRule(max_scenarios=-1)
        with pytest.raises(DomainError):
            StopRule(min_lost_load_mw=-2.0)
        with pytest.raises(DomainError):
            StopRule(min_lost_load_mw=float("nan"))


class TestWorstCaseAttack:
    def test_matches_rank_one(self, ieee9):
        attack, lost = worst_case_attack(ieee9, 2)
        top = enumerate_cas(ieee9, 2, StopRule.unbounded()).records[0]
        assert attack == top.components
        assert lost == top.lost_load_mw

    def test_exclusion_cuts_walk_the_ranking(self, ieee9):
        cas = enumerate_cas(ieee9, 2, StopRule.unbounded())
        exclusions = []
        for expected in cas.records[:6]:
            attack, lost = worst_case_attack(ieee9, 2, exclusions=exclusions)
            assert attack == expected.components
            assert lost == expected.lost_load_mw
            exclusions.append(attack)

    def test_exhausted_when_everything_excluded(self, toy_grid):
        only = AttackVector.of(branches=["a-b"])
        with pytest.raises(ExhaustedError):
            worst_case_attack(toy_grid, 1, exclusions=[only])


class TestMerge:
    def test_merge_with_empty_reranks(self, ieee9):
        full = enumerate_cas(ieee9, 2, StopRule.unbounded())
        empty = CasList((), 2, "ieee9", complete=False)
        merged = merge_cas_lists([full, empty])
        assert [r.components for r in merged.records] == [
            r.components for r in full.records
        ]
        assert not merged.complete  # conjunction of complete flags

    def test_duplicate_sets_keep_max(self):
        a = make_cas([{"x", "y"}], [10.0], z_max=2)
        b = make_cas([{"x", "y"}], [30.0], z_max=2)
        merged = merge_cas_lists([a, b])
        assert len(merged.records) == 1
        assert merged.records[0].lost_load_mw == 30.0

    def test_cigre_switch_configurations(self, cigre, cigre_closed):
        opened = enumerate_cas(cigre, 2, StopRule.unbounded())
        closed = enumerate_cas(cigre_closed, 2, StopRule.unbounded())
        merged = merge_cas_lists([opened, closed])
        assert merged.records[0].lost_load_mw == max(
            opened.records[0].lost_load_mw, closed.records[0].lost_load_mw
        )
        assert merged.complete
        labels = {r.configuration_label for r in merged.records}
        assert "base+closed-switches" in labels
        validate_cas_list(merged)

    def test_mismatched_z_max_rejected(self):
        with pytest.raises(MergeError):
            merge_cas_lists([make_cas([{"x"}], z_max=1), make_cas([{"x"}], z_max=2)])

    def test_mismatched_universe_rejected(self):
        a = make_cas([{"x"}], z_max=1, source="grid-a")
        b = make_cas([{"x"}], z_max=1, source="grid-b")
        with pytest.raises(MergeError):
            merge_cas_lists([a, b])

    def test_empty_input_rejected(self):
        with pytest.raises(MergeError):
            merge_cas_lists([])


class TestSerialization:
    def test_round_trip(self, ieee9, tmp_path):
        cas = enumerate_cas(ieee9, 2, StopRule(max_scenarios=12))
        assert parse_cas_list(serialize_cas_list(cas)) == cas
        path = tmp_path / "cas.json"
        save_cas_list(cas, path)
        assert load_cas_list(path) == cas

    def test_parse_rejects_malformed_documents(self):
        with pytest.raises(Exception):
            parse_cas_list("not json")
        with pytest.raises(Exception):
            parse_cas_list("[]")
        with pytest.raises(Exception):
            parse_cas_list('{"source_grid": "g", "z_max": 2}')

    def test_import_of_externally_produced_list(self):
        # hand-written document in the interchange format, e.g. from a
        # graph-theoretic screening tool; sizes below z_max are fine
        text = """
        {
          "source_grid": "external",
          "z_max": 3,
          "complete": false,
          "records": [
            {"rank": 1,
             "components": {"branches": ["t1"], "generators": []},
             "lost_load_mw": 99.5,
             "configuration_label": "screening"},
            {"rank": 2,
             "components": {"branches": ["t2"], "generators": ["g7"]},
             "lost_load_mw": 42.0,
             "configuration_label": "screening"}
          ]
        }
        """
        cas = parse_cas_list(text)
        validate_cas_list(cas)
        assert cas.records[0].components.attacked_branches == frozenset({"t1"})
        assert cas.records[1].components.attacked_generators == frozenset({"g7"})

    def test_validate_rejects_broken_invariants(self):
        increasing = make_cas([{"a"}, {"b"}], [10.0, 20.0])
        with pytest.raises(DomainError, match="non-increasing"):
            validate_cas_list(increasing)
        duplicated = make_cas([{"a"}, {"a"}], [20.0, 10.0])
        with pytest.raises(DomainError, match="duplicate"):
            validate_cas_list(duplicated)


class TestDispatchAgreement:
    def test_record_values_recompute(self, cigre):
        cas = enumerate_cas(cigre, 2, StopRule(max_scenarios=8))
        for rec in cas.records:
            redo = solve_dcopf(cigre, rec.components).lost_load_mw
            assert redo == pytest.approx(rec.lost_load_mw, abs=1e-9)
