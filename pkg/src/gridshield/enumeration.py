"""Worst-case attack identification and critical-scenario enumeration.

An attacker with a budget of ``z_max`` simultaneous outages picks the
set of components whose loss maximizes the defender's minimum load
shedding.  Beyond the single worst case, the full ranked inventory of
*critical attack scenarios* is produced by repeatedly excluding every
scenario already found (a found set is excluded by requiring at least
one of its members to stay un-attacked) and re-solving.

Because excluded sets and candidate sets share the fixed size ``z_max``,
each exclusion cut removes exactly one candidate, so the iterative
scheme is equivalent to evaluating every size-``z_max`` candidate once
and sorting by harm.  That is what this module does — it is exact,
embarrassingly parallel, and needs no integer programming.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .dcopf import AttackVector, attack_from_component_keys, solve_dcopf
from .errors import DomainError, ExhaustedError, MergeError, ParseError
from .model import GridCase

ComponentKey = tuple[str, str]  # (id, "branch" | "generator")

#: Lost loads are compared exactly when ranking; this tolerance is only
#: used for contracts of the form "recomputed value matches stored value".
VALUE_TOL_MW = 1e-6


@dataclass(frozen=True)
class CasRecord:
    """One ranked critical attack scenario."""

    rank: int
    components: AttackVector
    lost_load_mw: float
    configuration_label: str


@dataclass(frozen=True)
class CasList:
    """Ranked scenario inventory for one grid (or a merge of its configurations)."""

    records: tuple[CasRecord, ...]
    z_max: int
    source_grid: str
    complete: bool  # true iff every admissible attack set was enumerated

    def __len__(self) -> int:
        return len(self.records)

    def component_sets(self) -> list[AttackVector]:
        return [r.components for r in self.records]


@dataclass(frozen=True)
class StopRule:
    """When to stop appending scenarios.

    ``max_scenarios=None`` means unbounded; ``min_lost_load_mw`` stops
    the walk when the next-best scenario falls strictly below it (so the
    default 0.0 never fires and only the count cap applies).  The
    candidate space is finite, so enumeration terminates under every
    rule; the validation below only rejects rules that could not bound
    anything even in principle.
    """

    max_scenarios: int | None = 500
    min_lost_load_mw: float = 0.0

    def __post_init__(self) -> None:
        if self.max_scenarios is not None and self.max_scenarios < 0:
            raise DomainError("max_scenarios must be >= 0 or None")
        if not math.isfinite(self.min_lost_load_mw) or self.min_lost_load_mw < 0:
            raise DomainError("min_lost_load_mw must be finite and >= 0")

    @classmethod
    def unbounded(cls) -> "StopRule":
        return cls(max_scenarios=None, min_lost_load_mw=0.0)


def attackable_universe(grid: GridCase) -> tuple[ComponentKey, ...]:
    """All components an attacker may target, as sorted canonical keys."""
    keys = [(bid, "branch") for bid in grid.attackable_branch_ids]
    keys += [(gid, "generator") for gid in grid.ict_generator_ids]
    return tuple(sorted(keys))


def _evaluate_batch(grid: GridCase, batch: Sequence[tuple[ComponentKey, ...]]) -> list[float]:
    """Worker task: lost load per candidate attack set."""
    return [
        solve_dcopf(grid, attack_from_component_keys(keys)).lost_load_mw
        for keys in batch
    ]


def evaluate_attack_sets(
    grid: GridCase,
    candidates: Sequence[tuple[ComponentKey, ...]],
    jobs: int | None = None,
) -> dict[tuple[ComponentKey, ...], float]:
    """Lost load for every candidate, with saturation pruning.

    Single-component outages are solved first; any candidate containing
    a component whose lone outage already sheds the whole system demand
    is assigned that saturation value without an LP solve (enlarging an
    attack cannot restore load here — see the package docs for the
    congestion-paradox caveat on why this relies on saturation, not on
    general monotonicity).

    Results are keyed by candidate, so the reduction is deterministic
    regardless of worker scheduling.
    """
    out: dict[tuple[ComponentKey, ...], float] = {}
    need_lp: list[tuple[ComponentKey, ...]] = []

    saturating: set[ComponentKey] = set()
    total = grid.total_demand_mw
    singles = sorted({key for keys in candidates if len(keys) > 1 for key in keys})
    if singles:
        single_lost = _run_batches(grid, [(key,) for key in singles], jobs)
        saturating = {key for (key,), lost in single_lost.items() if lost == total}

    for keys in candidates:
        if len(keys) > 1 and any(key in saturating for key in keys):
            out[keys] = total
        else:
            need_lp.append(keys)

    out.update(_run_batches(grid, need_lp, jobs))
    return out


def _run_batches(
    grid: GridCase,
    candidates: Sequence[tuple[ComponentKey, ...]],
    jobs: int | None,
) -> dict[tuple[ComponentKey, ...], float]:
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(candidates) < 2:
        return dict(zip(candidates, _evaluate_batch(grid, candidates)))
    chunk = max(1, math.ceil(len(candidates) / (4 * jobs)))
    batches = [candidates[i : i + chunk] for i in range(0, len(candidates), chunk)]
    out: dict[tuple[ComponentKey, ...], float] = {}
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_evaluate_batch, grid, batch) for batch in batches]
        for batch, fut in zip(batches, futures):
            for keys, lost in zip(batch, fut.result()):
                out[keys] = lost
    return out


def _admissible(
    candidate: tuple[ComponentKey, ...], exclusions: Sequence[frozenset[ComponentKey]]
) -> bool:
    cand = set(candidate)
    return not any(cut <= cand for cut in exclusions)


def _exclusion_keysets(exclusions: Iterable[AttackVector]) -> list[frozenset[ComponentKey]]:
    return [frozenset(a.component_keys()) for a in exclusions]


def worst_case_attack(
    grid: GridCase,
    z_max: int,
    exclusions: Sequence[AttackVector] = (),
    jobs: int | None = None,
) -> tuple[AttackVector, float]:
    """Most harmful attack of size exactly ``z_max`` honoring exclusion cuts.

    A cut derived from a previously found scenario admits a candidate
    only if at least one member of that scenario stays un-attacked.
    Ties in lost load go to the lexicographically smallest sorted
    component-key tuple.  Raises :class:`ExhaustedError` when every
    candidate is excluded (which is different from a zero-harm result).
    """
    universe = attackable_universe(grid)
    if z_max < 0:
        raise DomainError("z_max must be >= 0")
    if z_max > len(universe):
        raise DomainError(
            f"z_max={z_max} exceeds the {len(universe)} attackable components of {grid.name!r}"
        )
    cuts = _exclusion_keysets(exclusions)
    candidates = [c for c in combinations(universe, z_max) if _admissible(c, cuts)]
    if not candidates:
        raise ExhaustedError(
            f"no admissible attack set of size {z_max} remains after {len(cuts)} exclusions"
        )
    lost_by_candidate = evaluate_attack_sets(grid, candidates, jobs)
    best_keys = None
    best_lost = -math.inf
    for keys in candidates:  # lex order; first strict max wins ties
        lost = lost_by_candidate[keys]
        if lost > best_lost:
            best_keys, best_lost = keys, lost
    return attack_from_component_keys(best_keys), best_lost


def enumerate_cas(
    grid: GridCase,
    z_max: int,
    stop: StopRule = StopRule(),
    jobs: int | None = None,
) -> CasList:
    """Ranked inventory of critical attack scenarios of size ``z_max``.

    Equivalent to iterating :func:`worst_case_attack` with an exclusion
    cut per found scenario until the stop rule fires, but computed by
    evaluating all candidates once and sorting (descending lost load,
    lexicographic component order on ties).  ``complete`` is true iff
    every candidate ended up in the list.
    """
    if z_max < 1:
        raise DomainError("z_max must be >= 1 for scenario enumeration")
    universe = attackable_universe(grid)
    if z_max > len(universe):
        raise DomainError(
            f"z_max={z_max} exceeds the {len(universe)} attackable components of {grid.name!r}"
        )
    candidates = list(combinations(universe, z_max))
    lost_by_candidate = evaluate_attack_sets(grid, candidates, jobs)
    ranked = sorted(candidates, key=lambda keys: (-lost_by_candidate[keys], keys))

    records: list[CasRecord] = []
    for keys in ranked:
        if stop.max_scenarios is not None and len(records) >= stop.max_scenarios:
            break
        lost = lost_by_candidate[keys]
        if lost < stop.min_lost_load_mw:
            break
        records.append(
            CasRecord(
                rank=len(records) + 1,
                components=attack_from_component_keys(keys),
                lost_load_mw=lost,
                configuration_label=grid.configuration_label,
            )
        )
    return CasList(
        records=tuple(records),
        z_max=z_max,
        source_grid=grid.name,
        complete=len(records) == len(candidates),
    )


def _label_parts(label: str) -> list[str]:
    return label.split("+")


def merge_cas_lists(lists: Sequence[CasList]) -> CasList:
    """Combine scenario inventories from several configurations of one grid.

    Duplicate component sets collapse to a single record that keeps the
    maximum lost load and the union of contributing configuration
    labels (joined with ``+`` in sorted order).  Ranks are reassigned
    after re-sorting; the merge is complete only if every input was.
    """
    if not lists:
        raise MergeError("nothing to merge")
    z_max = lists[0].z_max
    source = lists[0].source_grid
    for cl in lists[1:]:
        if cl.z_max != z_max:
            raise MergeError(f"mixed z_max in merge: {z_max} vs {cl.z_max}")
        if cl.source_grid != source:
            raise MergeError(
                f"mixed component universes in merge: {source!r} vs {cl.source_grid!r}"
            )

    best: dict[tuple[ComponentKey, ...], float] = {}
    labels: dict[tuple[ComponentKey, ...], set[str]] = {}
    for cl in lists:
        for rec in cl.records:
            keys = rec.components.component_keys()
            if keys not in best or rec.lost_load_mw > best[keys]:
                best[keys] = rec.lost_load_mw
            labels.setdefault(keys, set()).update(_label_parts(rec.configuration_label))

    ranked = sorted(best, key=lambda keys: (-best[keys], keys))
    records = tuple(
        CasRecord(
            rank=i + 1,
            components=attack_from_component_keys(keys),
            lost_load_mw=best[keys],
            configuration_label="+".join(sorted(labels[keys])),
        )
        for i, keys in enumerate(ranked)
    )
    return CasList(
        records=records,
        z_max=z_max,
        source_grid=source,
        complete=all(cl.complete for cl in lists),
    )


def validate_cas_list(cas: CasList) -> None:
    """Enforce the inventory invariants (ordering, distinctness, ranks)."""
    seen: set[tuple[ComponentKey, ...]] = set()
    prev = math.inf
    for i, rec in enumerate(cas.records):
        if rec.rank != i + 1:
            raise DomainError(f"ranks must be 1..n consecutive; rank {rec.rank} at position {i}")
        if rec.lost_load_mw > prev:
            raise DomainError(
                f"lost load must be non-increasing; rank {rec.rank} has {rec.lost_load_mw} after {prev}"
            )
        prev = rec.lost_load_mw
        keys = rec.components.component_keys()
        if keys in seen:
            raise DomainError(f"duplicate component set at rank {rec.rank}")
        seen.add(keys)


def serialize_cas_list(cas: CasList) -> str:
    doc = {
        "source_grid": cas.source_grid,
        "z_max": cas.z_max,
        "complete": cas.complete,
        "records": [
            {
                "rank": rec.rank,
                "components": {
                    "branches": sorted(rec.components.attacked_branches),
                    "generators": sorted(rec.components.attacked_generators),
                },
                "lost_load_mw": rec.lost_load_mw,
                "configuration_label": rec.configuration_label,
            }
            for rec in cas.records
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_cas_list(text: str) -> CasList:
    """Read a scenario inventory, either our own output or an imported one.

    Imported inventories (produced by other assessment methods) may
    contain component sets smaller than ``z_max``; ordering/rank/
    distinctness invariants are still enforced.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError("scenario file must be a JSON object")
    for key, types in (("source_grid", str), ("z_max", int), ("complete", bool)):
        if key not in raw or isinstance(raw[key], bool) != (types is bool) or not isinstance(raw[key], types):
            raise ParseError(f"scenario file: missing or mistyped field {key!r}")
    entries = raw.get("records")
    if not isinstance(entries, list):
        raise ParseError("scenario file: 'records' must be an array")

    records = []
    for pos, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ParseError(f"record {pos}: must be an object")
        where = f"record {pos}"
        rank = entry.get("rank")
        if isinstance(rank, bool) or not isinstance(rank, int):
            raise ParseError(f"{where}: 'rank' must be an integer")
        lost = entry.get("lost_load_mw")
        if isinstance(lost, bool) or not isinstance(lost, (int, float)):
            raise ParseError(f"{where}: 'lost_load_mw' must be a number")
        if not math.isfinite(float(lost)) or lost < 0:
            raise DomainError(f"{where}: 'lost_load_mw' must be finite and >= 0")
        label = entry.get("configuration_label")
        if not isinstance(label, str):
            raise ParseError(f"{where}: 'configuration_label' must be a string")
        comps = entry.get("components")
        if not isinstance(comps, dict):
            raise ParseError(f"{where}: 'components' must be an object")
        branches = comps.get("branches", [])
        generators = comps.get("generators", [])
        for seq, name in ((branches, "branches"), (generators, "generators")):
            if not isinstance(seq, list) or not all(isinstance(s, str) for s in seq):
                raise ParseError(f"{where}: components.{name} must be an array of strings")
        records.append(
            CasRecord(
                rank=rank,
                components=AttackVector.of(branches, generators),
                lost_load_mw=float(lost),
                configuration_label=label,
            )
        )

    cas = CasList(
        records=tuple(records),
        z_max=raw["z_max"],
        source_grid=raw["source_grid"],
        complete=raw["complete"],
    )
    validate_cas_list(cas)
    return cas


def save_cas_list(cas: CasList, path: str | Path) -> None:
    Path(path).write_text(serialize_cas_list(cas), encoding="utf-8")


def load_cas_list(path: str | Path) -> CasList:
    return parse_cas_list(Path(path).read_text(encoding="utf-8"))
