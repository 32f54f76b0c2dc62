"""Brute-force reference solvers, deliberately slow and obviously correct.

These exist to certify the fast paths, not to be used at scale: the
exhaustive three-level solve checks the central claim that protecting
against the ranked scenario list is equivalent to solving the integrated
defender-attacker-defender problem, and the exhaustive protected-set
scan certifies the branch-and-bound search.  Hard input-size guards make
refusal explicit and reproducible — no wall-clock timeouts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .dcopf import AttackVector, attack_from_component_keys
from .enumeration import CasList, ComponentKey, attackable_universe, evaluate_attack_sets
from .errors import DomainError, ExhaustionWarning, GuardExceeded
from .model import GridCase

#: Maximum number of (protection, attack) pairs the trilevel scan accepts.
TRILEVEL_GUARD = 10_000_000
#: Protected-set scan accepts any inventory over at most this many components...
IP_GUARD_COMPONENTS = 12
#: ...or any candidate count up to this bound.
IP_GUARD_CANDIDATES = 1_000_000


@dataclass(frozen=True)
class TrilevelResult:
    """Exact optimum of the integrated protect-attack-redispatch problem."""

    protected: frozenset[ComponentKey]
    worst_case_lost_load_mw: float
    worst_attack: AttackVector


def _protection_candidates(universe: tuple[ComponentKey, ...], x_max: int):
    """All protected sets of size <= x_max, lexicographically sorted
    (so a set precedes its supersets)."""
    out: list[tuple[ComponentKey, ...]] = []
    for size in range(min(x_max, len(universe)) + 1):
        out.extend(combinations(universe, size))
    out.sort()
    return out


def brute_force_trilevel(
    grid: GridCase, x_max: int, z_max: int, jobs: int | None = None
) -> TrilevelResult:
    """Minimize, over protected sets of size <= x_max, the worst lost load
    over all size-z_max attacks avoiding the protected components.

    Every size-z_max attack is dispatched once; every protected set then
    scans the harm-sorted attack table for its first admissible row.
    Ties in value go to the lexicographically smallest protected set.
    """
    universe = attackable_universe(grid)
    n = len(universe)
    if x_max < 0 or z_max < 0:
        raise DomainError("x_max and z_max must be >= 0")
    if z_max > n:
        raise DomainError(
            f"z_max={z_max} exceeds the {n} attackable components of {grid.name!r}"
        )
    pairs = comb(n, min(x_max, n)) * comb(n, z_max)
    if pairs > TRILEVEL_GUARD:
        raise GuardExceeded(
            f"trilevel scan of C({n},{min(x_max, n)})*C({n},{z_max}) = {pairs} "
            f"pairs exceeds the {TRILEVEL_GUARD} guard"
        )

    attack_sets = list(combinations(universe, z_max))
    lost = evaluate_attack_sets(grid, attack_sets, jobs)
    table = sorted(attack_sets, key=lambda keys: (-lost[keys], keys))
    table_sets = [frozenset(keys) for keys in table]

    best_value = float("inf")
    best_protect: tuple[ComponentKey, ...] = ()
    best_attack: tuple[ComponentKey, ...] = ()
    for protect in _protection_candidates(universe, x_max):
        pset = set(protect)
        row = next(
            (i for i, aset in enumerate(table_sets) if not (aset & pset)), None
        )
        if row is not None:
            value = lost[table[row]]
            attack = table[row]
        else:
            # Fewer than z_max unprotected components remain; fall back to
            # the largest attack size still available to the attacker.
            remaining = tuple(k for k in universe if k not in pset)
            warnings.warn(
                f"protection {protect} leaves only {len(remaining)} attackable "
                f"components; evaluating attacks of size {len(remaining)}",
                ExhaustionWarning,
                stacklevel=2,
            )
            sub = list(combinations(remaining, len(remaining)))
            sub_lost = evaluate_attack_sets(grid, sub, jobs)
            attack = min(sub, key=lambda keys: (-sub_lost[keys], keys))
            value = sub_lost[attack]
        if value < best_value:
            best_value = value
            best_protect = protect
            best_attack = attack
    return TrilevelResult(
        protected=frozenset(best_protect),
        worst_case_lost_load_mw=best_value,
        worst_attack=attack_from_component_keys(best_attack),
    )


def brute_force_protection_ip(
    cas: CasList, x_max: int
) -> tuple[int, list[tuple[ComponentKey, ...]]]:
    """Exact maximum of consecutively excluded scenarios, by scanning every
    protected set of size <= x_max, plus all achieving sets (lex sorted).

    Implemented with plain set operations — no bitmasks, no shared code
    with the branch-and-bound it certifies.
    """
    if x_max < 0:
        raise DomainError("x_max must be >= 0")
    member_sets = [set(rec.components.component_keys()) for rec in cas.records]
    components = sorted({k for members in member_sets for k in members})
    n = len(components)
    candidates = sum(comb(n, s) for s in range(min(x_max, n) + 1))
    if n > IP_GUARD_COMPONENTS and candidates > IP_GUARD_CANDIDATES:
        raise GuardExceeded(
            f"protected-set scan over {candidates} candidates on {n} components "
            f"exceeds the guard ({IP_GUARD_COMPONENTS} components or "
            f"{IP_GUARD_CANDIDATES} candidates)"
        )

    def consecutive(pset: set[ComponentKey]) -> int:
        count = 0
        for members in member_sets:
            if members & pset:
                count += 1
            else:
                break
        return count

    objective = 0
    achieving: list[tuple[ComponentKey, ...]] = []
    for protect in _protection_candidates(tuple(components), x_max):
        value = consecutive(set(protect))
        if value > objective:
            objective = value
            achieving = [protect]
        elif value == objective:
            achieving.append(protect)
    achieving.sort()
    return objective, achieving
