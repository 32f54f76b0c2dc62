"""Protected-set selection from a ranked scenario inventory.

Given the scenario list and a hardening budget of ``x_max`` components,
choose which attackable components to protect.  A scenario is *excluded*
once at least one of its members is protected (a protected component
cannot be taken out of service, so that exact attack set is no longer
available to the attacker).  The objective maximizes the number of
**consecutively** excluded scenarios starting from the worst one — i.e.
the length of the excluded prefix of the ranked list — because the first
non-excluded scenario is what determines the remaining worst case.

Objective ties are resolved, by default, by also maximizing the total
number of excluded scenarios anywhere in the list and then by taking the
lexicographically smallest protected set; ``tie_break="paper"`` skips
the total-exclusions step and goes straight to the lexicographic rule.

The search is an exact depth-first branch and bound over bitmasks: a
scenario prefix can only be excluded by protecting one member of its
first non-excluded scenario, which keeps the branching factor at the
scenario size; coverage bounds (best reachable exclusion count given the
remaining budget) prune the rest.  No integer-programming engine is
involved.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .dcopf import attack_from_component_keys
from .enumeration import CasList, ComponentKey, attackable_universe, evaluate_attack_sets, validate_cas_list
from .errors import DomainError, ExhaustionWarning, ParseError, UnknownIdError
from .model import GridCase

#: Marker used when every listed scenario is excluded by the plan.
ALL_EXCLUDED = "all-excluded"

TIE_BREAK_MODES = ("extended", "paper")


@dataclass(frozen=True)
class ProtectionPlan:
    """A protected component set and the resilience it buys."""

    protected_branches: frozenset[str]
    protected_generators: frozenset[str]
    budget: int
    consecutive_excluded: int
    total_excluded: int
    remaining_worst_case_mw: float | str
    #: Minimum listed lost load, reported only when every scenario of an
    #: incomplete inventory is excluded: the true remaining worst case is
    #: then unknown but cannot exceed this value's rank neighborhood.
    upper_bound_hint_mw: float | None = None

    @property
    def size(self) -> int:
        return len(self.protected_branches) + len(self.protected_generators)

    def protected_keys(self) -> tuple[ComponentKey, ...]:
        pairs = [(b, "branch") for b in self.protected_branches]
        pairs += [(g, "generator") for g in self.protected_generators]
        return tuple(sorted(pairs))

    def as_dict(self) -> dict:
        doc = {
            "budget": self.budget,
            "protected": {
                "branches": sorted(self.protected_branches),
                "generators": sorted(self.protected_generators),
            },
            "consecutive_excluded": self.consecutive_excluded,
            "total_excluded": self.total_excluded,
            "remaining_worst_case_mw": self.remaining_worst_case_mw,
        }
        if self.upper_bound_hint_mw is not None:
            doc["upper_bound_hint_mw"] = self.upper_bound_hint_mw
        return doc


class _Done(Exception):
    """Internal: emission limit reached."""


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Search:
    """Bitmask workspace over one scenario inventory.

    Component j covers scenario w iff j is a member of scenario w.
    ``rec_masks[w]`` is the member set of scenario w over component
    bits; ``cover[j]`` is the scenario set of component j over scenario
    bits.  All searches below operate on these two arrays only.
    """

    def __init__(self, cas: CasList, x_max: int):
        records = cas.records
        self.keys: list[ComponentKey] = sorted(
            {k for rec in records for k in rec.components.component_keys()}
        )
        pos = {k: i for i, k in enumerate(self.keys)}
        self.n = len(self.keys)
        self.W = len(records)
        self.x_max = x_max
        self.rec_masks: list[int] = []
        self.cover: list[int] = [0] * self.n
        for w, rec in enumerate(records):
            m = 0
            for key in rec.components.component_keys():
                j = pos[key]
                m |= 1 << j
                self.cover[j] |= 1 << w
            self.rec_masks.append(m)

    # -- stage 1: longest excludable prefix ------------------------------
    def max_prefix(self) -> int:
        """Longest prefix of scenarios all hittable with <= x_max components."""
        best = 0
        visited: set[int] = set()
        rec_masks = self.rec_masks
        W = self.W
        x_max = self.x_max

        def dfs(smask: int, used: int, start: int) -> None:
            nonlocal best
            w = start
            while w < W and rec_masks[w] & smask:
                w += 1
            if w > best:
                best = w
            if w == W or used == x_max or best == W:
                return
            for j in _bits(rec_masks[w]):
                nm = smask | (1 << j)
                if nm not in visited:
                    visited.add(nm)
                    dfs(nm, used + 1, w + 1)

        dfs(0, 0, 0)
        return best

    # -- helpers shared by stages 2 and 3 --------------------------------
    def _first_unhit(self, smask: int, f1: int) -> int:
        for w in range(f1):
            if not (self.rec_masks[w] & smask):
                return w
        return -1

    def _can_hit(self, smask: int, f1: int, minpos: int, budget: int) -> bool:
        """Can the prefix still be fully hit with ``budget`` components
        drawn from positions >= minpos?"""
        w = self._first_unhit(smask, f1)
        if w < 0:
            return True
        if budget == 0:
            return False
        for j in _bits(self.rec_masks[w]):
            if j >= minpos and self._can_hit(smask | (1 << j), f1, minpos, budget - 1):
                return True
        return False

    def _gain_bound(self, covered: int, minpos: int, budget: int) -> int:
        """Coverage reachable from here: current + the ``budget`` largest gains."""
        count = covered.bit_count()
        if budget <= 0:
            return count
        gains = []
        for j in range(minpos, self.n):
            g = (self.cover[j] & ~covered).bit_count()
            if g:
                gains.append(g)
        gains.sort(reverse=True)
        return count + sum(gains[:budget])

    # -- stage 2: best total coverage among prefix-optimal plans ----------
    def max_total(self, f1: int) -> int:
        """Maximum number of scenarios excluded anywhere in the list, over
        all plans that exclude the length-``f1`` prefix."""
        best = -1
        visited: set[int] = set()
        x_max = self.x_max
        n = self.n
        cover = self.cover
        # Static order by raw coverage keeps the greedy bound tight.
        order = sorted(range(n), key=lambda j: (-cover[j].bit_count(), j))

        def extend(smask: int, covered: int, used: int, oi: int) -> None:
            nonlocal best
            count = covered.bit_count()
            if count > best:
                best = count
            budget = x_max - used
            if budget == 0 or best == self.W:
                return
            cands = []
            for t in range(oi, n):
                j = order[t]
                if smask >> j & 1:
                    continue
                g = (cover[j] & ~covered).bit_count()
                if g:
                    cands.append((t, j, g))
            if not cands:
                return
            top = sorted((g for _, _, g in cands), reverse=True)[:budget]
            if count + sum(top) <= best:
                return
            for t, j, g in cands:
                nm = smask | (1 << j)
                if nm in visited:
                    continue
                visited.add(nm)
                extend(nm, covered | cover[j], used + 1, t + 1)

        def hit_prefix(smask: int, covered: int, used: int) -> None:
            nonlocal best
            w = self._first_unhit(smask, f1)
            if w < 0:
                extend(smask, covered, used, 0)
                return
            if used == x_max:
                return
            for j in _bits(self.rec_masks[w]):
                nm = smask | (1 << j)
                if nm in visited:
                    continue
                visited.add(nm)
                hit_prefix(nm, covered | cover[j], used + 1)

        hit_prefix(0, 0, 0)
        return max(best, 0)

    # -- stage 3: ordered emission of achieving plans ---------------------
    def emit_tier(self, f1: int, tier: int, out: list[int], limit: int) -> None:
        """Append (in lexicographic order) every plan that excludes the
        length-``f1`` prefix with total coverage exactly ``tier``."""
        x_max = self.x_max
        n = self.n
        cover = self.cover

        def walk(smask: int, last: int, covered: int, used: int, achieved: bool) -> None:
            if achieved and covered.bit_count() == tier:
                out.append(smask)
                if len(out) >= limit:
                    raise _Done
            budget = x_max - used
            if budget == 0:
                return
            for j in range(last + 1, n):
                ncov = covered | cover[j]
                if ncov.bit_count() > tier:
                    continue
                nm = smask | (1 << j)
                nach = achieved or self._first_unhit(nm, f1) < 0
                if not nach and not self._can_hit(nm, f1, j + 1, budget - 1):
                    continue
                if self._gain_bound(ncov, j + 1, budget - 1) < tier:
                    continue
                walk(nm, j, ncov, used + 1, nach)

        walk(0, -1, 0, 0, self._first_unhit(0, f1) < 0)

    def emit_lex(self, f1: int, out: list[int], limit: int) -> None:
        """Append achieving plans in pure lexicographic order (no tiers)."""
        x_max = self.x_max
        n = self.n
        cover = self.cover

        def walk(smask: int, last: int, covered: int, used: int, achieved: bool) -> None:
            if achieved:
                out.append(smask)
                if len(out) >= limit:
                    raise _Done
            budget = x_max - used
            if budget == 0:
                return
            for j in range(last + 1, n):
                nm = smask | (1 << j)
                nach = achieved or self._first_unhit(nm, f1) < 0
                if not nach and not self._can_hit(nm, f1, j + 1, budget - 1):
                    continue
                walk(nm, j, covered | cover[j], used + 1, nach)

        walk(0, -1, 0, 0, self._first_unhit(0, f1) < 0)

    def coverage_of(self, smask: int) -> int:
        covered = 0
        for j in _bits(smask):
            covered |= self.cover[j]
        return covered.bit_count()

    def keys_of(self, smask: int) -> tuple[ComponentKey, ...]:
        return tuple(self.keys[j] for j in _bits(smask))


def _plan_from_mask(search: _Search, cas: CasList, smask: int, f1: int, x_max: int) -> ProtectionPlan:
    attack = attack_from_component_keys(search.keys_of(smask))
    total = search.coverage_of(smask)
    if f1 < len(cas.records):
        remaining: float | str = cas.records[f1].lost_load_mw
        hint = None
    else:
        remaining = ALL_EXCLUDED
        hint = cas.records[-1].lost_load_mw if (cas.records and not cas.complete) else None
    return ProtectionPlan(
        protected_branches=attack.attacked_branches,
        protected_generators=attack.attacked_generators,
        budget=x_max,
        consecutive_excluded=f1,
        total_excluded=total,
        remaining_worst_case_mw=remaining,
        upper_bound_hint_mw=hint,
    )


def _check_inputs(cas: CasList, x_max: int, tie_break: str) -> None:
    validate_cas_list(cas)
    if x_max < 0:
        raise DomainError("x_max must be >= 0")
    if tie_break not in TIE_BREAK_MODES:
        raise DomainError(f"tie_break must be one of {TIE_BREAK_MODES}, got {tie_break!r}")


def enumerate_optimal_protections(
    cas: CasList, x_max: int, limit: int, tie_break: str = "extended"
) -> list[ProtectionPlan]:
    """All plans achieving the maximum consecutive exclusions, up to ``limit``.

    Sorted by the tie-break chain: descending total exclusions (skipped
    in ``paper`` mode), then lexicographically smallest protected set.
    The first element always equals :func:`optimal_protection`'s result.
    """
    _check_inputs(cas, x_max, tie_break)
    if limit < 1:
        raise DomainError("limit must be >= 1")
    search = _Search(cas, x_max)
    f1 = search.max_prefix()
    masks: list[int] = []
    try:
        if tie_break == "paper":
            search.emit_lex(f1, masks, limit)
        else:
            f2max = search.max_total(f1)
            tier = f2max
            floor = min(f1, f2max)
            while len(masks) < limit and tier >= floor:
                search.emit_tier(f1, tier, masks, limit)
                tier -= 1
    except _Done:
        pass
    return [_plan_from_mask(search, cas, m, f1, x_max) for m in masks]


def optimal_protection(cas: CasList, x_max: int, tie_break: str = "extended") -> ProtectionPlan:
    """The unique best plan under the tie-break chain (see module docs)."""
    return enumerate_optimal_protections(cas, x_max, limit=1, tie_break=tie_break)[0]


def budget_sweep(
    cas: CasList, budgets: Sequence[int], tie_break: str = "extended"
) -> list[ProtectionPlan]:
    """One optimal plan per budget, in the order the budgets were given."""
    if not len(budgets):
        raise DomainError("budgets must be non-empty")
    return [optimal_protection(cas, b, tie_break) for b in budgets]


def evaluate_protection(
    grid: GridCase, plan: ProtectionPlan, z_max: int, jobs: int | None = None
) -> float:
    """Ground-truth remaining worst case: exhaustive max over all
    size-``z_max`` attacks that avoid the protected components.

    If fewer than ``z_max`` unprotected attackable components remain,
    the worst case over the largest admissible size is returned and an
    :class:`ExhaustionWarning` is issued.
    """
    if z_max < 0:
        raise DomainError("z_max must be >= 0")
    universe = attackable_universe(grid)
    protected = set(plan.protected_keys())
    for cid, kind in sorted(protected):
        if kind == "branch" and cid not in grid.branch_by_id:
            raise UnknownIdError(f"protected branch {cid!r} is not in grid {grid.name!r}")
        if kind == "generator" and cid not in grid.generator_by_id:
            raise UnknownIdError(f"protected generator {cid!r} is not in grid {grid.name!r}")
        if (cid, kind) not in universe:
            raise DomainError(f"protected {kind} {cid!r} is not attackable in grid {grid.name!r}")
    remaining = tuple(k for k in universe if k not in protected)
    size = z_max
    if len(remaining) < z_max:
        size = len(remaining)
        warnings.warn(
            f"only {size} unprotected attackable components remain; "
            f"evaluating attacks of size {size} instead of {z_max}",
            ExhaustionWarning,
            stacklevel=2,
        )
    candidates = list(combinations(remaining, size))
    lost = evaluate_attack_sets(grid, candidates, jobs)
    return max(lost.values())


# -- plan file round-trip --------------------------------------------------

def serialize_plan(plan: ProtectionPlan, alternatives: Sequence[ProtectionPlan] = ()) -> str:
    doc = plan.as_dict()
    if alternatives:
        doc["alternatives"] = [p.as_dict() for p in alternatives]
    return json.dumps(doc, indent=2) + "\n"


def _plan_from_dict(doc: dict, where: str) -> ProtectionPlan:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: plan must be a JSON object")
    try:
        protected = doc["protected"]
        budget = doc["budget"]
        consecutive = doc["consecutive_excluded"]
        total = doc["total_excluded"]
        remaining = doc["remaining_worst_case_mw"]
    except KeyError as exc:
        raise ParseError(f"{where}: missing plan field {exc.args[0]!r}") from exc
    if not isinstance(protected, dict):
        raise ParseError(f"{where}: 'protected' must be an object")
    branches = protected.get("branches", [])
    generators = protected.get("generators", [])
    for seq, name in ((branches, "branches"), (generators, "generators")):
        if not isinstance(seq, list) or not all(isinstance(s, str) for s in seq):
            raise ParseError(f"{where}: protected.{name} must be an array of strings")
    for val, name in ((budget, "budget"), (consecutive, "consecutive_excluded"), (total, "total_excluded")):
        if isinstance(val, bool) or not isinstance(val, int):
            raise ParseError(f"{where}: {name!r} must be an integer")
    if remaining != ALL_EXCLUDED and (
        isinstance(remaining, bool) or not isinstance(remaining, (int, float))
    ):
        raise ParseError(
            f"{where}: 'remaining_worst_case_mw' must be a number or {ALL_EXCLUDED!r}"
        )
    hint = doc.get("upper_bound_hint_mw")
    if hint is not None and (isinstance(hint, bool) or not isinstance(hint, (int, float))):
        raise ParseError(f"{where}: 'upper_bound_hint_mw' must be a number")
    return ProtectionPlan(
        protected_branches=frozenset(branches),
        protected_generators=frozenset(generators),
        budget=budget,
        consecutive_excluded=consecutive,
        total_excluded=total,
        remaining_worst_case_mw=remaining if remaining == ALL_EXCLUDED else float(remaining),
        upper_bound_hint_mw=None if hint is None else float(hint),
    )


def parse_plan(text: str) -> tuple[ProtectionPlan, list[ProtectionPlan]]:
    """Read a plan file; returns (plan, alternatives)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    plan = _plan_from_dict(raw, "plan")
    alts = raw.get("alternatives", [])
    if not isinstance(alts, list):
        raise ParseError("'alternatives' must be an array")
    return plan, [_plan_from_dict(a, f"alternatives[{i}]") for i, a in enumerate(alts)]


def save_plan(plan: ProtectionPlan, path: str | Path, alternatives: Sequence[ProtectionPlan] = ()) -> None:
    Path(path).write_text(serialize_plan(plan, alternatives), encoding="utf-8")


def load_plan(path: str | Path) -> tuple[ProtectionPlan, list[ProtectionPlan]]:
    return parse_plan(Path(path).read_text(encoding="utf-8"))
