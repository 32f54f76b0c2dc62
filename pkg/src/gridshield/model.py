"""Grid data model: buses, branches, generators, and study-case overrides.

A :class:`GridCase` is an immutable value object; configuration
overrides (load scaling, generation scaling, switch states) produce new
cases instead of mutating, so cases can be shared freely across worker
processes.

Grid files are UTF-8 JSON with top-level keys ``name``,
``reference_bus``, ``buses``, ``branches``, ``generators`` (see
:func:`parse_grid`); override files carry ``label``, ``load_scale``,
``generation_scale`` and ``switch_states``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DomainError, ParseError, UnknownIdError


@dataclass(frozen=True)
class Bus:
    id: str
    demand_mw: float


@dataclass(frozen=True)
class Branch:
    id: str
    from_bus: str
    to_bus: str
    susceptance: float  # MW per rad of angle difference (base power folded in)
    flow_limit_mw: float
    attackable: bool = True
    in_service: bool = True


@dataclass(frozen=True)
class Generator:
    id: str
    bus: str
    p_max_mw: float
    ict_controlled: bool = False


@dataclass(frozen=True)
class GridCase:
    """A concrete study case. Immutable; all lookups are cached."""

    name: str
    reference_bus: str
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    generators: tuple[Generator, ...]
    configuration_label: str = "base"

    @cached_property
    def bus_by_id(self) -> dict[str, Bus]:
        return {b.id: b for b in self.buses}

    @cached_property
    def branch_by_id(self) -> dict[str, Branch]:
        return {br.id: br for br in self.branches}

    @cached_property
    def generator_by_id(self) -> dict[str, Generator]:
        return {g.id: g for g in self.generators}

    @cached_property
    def total_demand_mw(self) -> float:
        return float(sum(b.demand_mw for b in self.buses))

    @cached_property
    def active_branches(self) -> tuple[Branch, ...]:
        """Branches carrying flow: open switches are dropped up front."""
        return tuple(br for br in self.branches if br.in_service)

    @cached_property
    def attackable_branch_ids(self) -> tuple[str, ...]:
        return tuple(
            sorted(br.id for br in self.branches if br.attackable and br.in_service)
        )

    @cached_property
    def ict_generator_ids(self) -> tuple[str, ...]:
        return tuple(sorted(g.id for g in self.generators if g.ict_controlled))


@dataclass(frozen=True)
class ConfigurationOverride:
    """Scaling factors and switch states that turn a base case into a study case."""

    label: str
    load_scale: Mapping[str, float]
    generation_scale: Mapping[str, float]
    switch_states: Mapping[str, bool]


@dataclass(frozen=True)
class Diagnostic:
    code: str       # "duplicate-id" | "unknown-reference" | "domain" | "structure"
    component: str  # offending component id ("" for case-level findings)
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.component}: {self.message}"


def validate(grid: GridCase) -> list[Diagnostic]:
    """Check every case invariant; empty result means the case is sound.

    One diagnostic is emitted per violation so callers can report all
    problems in a file at once instead of failing on the first.
    """
    out: list[Diagnostic] = []

    def bad(code: str, component: str, message: str) -> None:
        out.append(Diagnostic(code, component, message))

    if not grid.buses:
        bad("structure", "", "grid has no buses")

    for kind, items in (
        ("bus", [b.id for b in grid.buses]),
        ("branch", [br.id for br in grid.branches]),
        ("generator", [g.id for g in grid.generators]),
    ):
        seen: set[str] = set()
        for cid in items:
            if cid in seen:
                bad("duplicate-id", cid, f"duplicate {kind} id")
            seen.add(cid)

    bus_ids = {b.id for b in grid.buses}

    for b in grid.buses:
        if not math.isfinite(b.demand_mw) or b.demand_mw < 0:
            bad("domain", b.id, f"demand_mw must be finite and >= 0, got {b.demand_mw}")

    for br in grid.branches:
        if not math.isfinite(br.susceptance) or br.susceptance <= 0:
            bad("domain", br.id, f"susceptance must be finite and > 0, got {br.susceptance}")
        if not math.isfinite(br.flow_limit_mw) or br.flow_limit_mw <= 0:
            bad("domain", br.id, f"flow_limit_mw must be finite and > 0, got {br.flow_limit_mw}")
        if br.from_bus == br.to_bus:
            bad("structure", br.id, "branch connects a bus to itself")
        for end in (br.from_bus, br.to_bus):
            if end not in bus_ids:
                bad("unknown-reference", br.id, f"branch endpoint {end!r} is not a bus")

    for g in grid.generators:
        if not math.isfinite(g.p_max_mw) or g.p_max_mw < 0:
            bad("domain", g.id, f"p_max_mw must be finite and >= 0, got {g.p_max_mw}")
        if g.bus not in bus_ids:
            bad("unknown-reference", g.id, f"generator bus {g.bus!r} is not a bus")

    if grid.buses and grid.reference_bus not in bus_ids:
        bad("unknown-reference", grid.reference_bus, "reference_bus is not a bus")

    return out


def _require(obj: Mapping, key: str, types, where: str):
    if key not in obj:
        raise ParseError(f"{where}: missing required field {key!r}")
    val = obj[key]
    if types is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ParseError(f"{where}: field {key!r} must be a number, got {val!r}")
        return float(val)
    if not isinstance(val, types):
        raise ParseError(f"{where}: field {key!r} has wrong type ({type(val).__name__})")
    return val


def parse_grid(text: str) -> GridCase:
    """Parse and validate a grid case from its JSON text form."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError("grid file must be a JSON object")

    name = _require(raw, "name", str, "grid")
    reference_bus = _require(raw, "reference_bus", str, "grid")
    label = raw.get("configuration_label", "base")
    if not isinstance(label, str):
        raise ParseError("grid: configuration_label must be a string")

    buses = []
    for entry in _require(raw, "buses", list, "grid"):
        if not isinstance(entry, dict):
            raise ParseError("buses: each entry must be an object")
        bid = _require(entry, "id", str, "bus")
        buses.append(Bus(id=bid, demand_mw=_require(entry, "demand_mw", float, f"bus {bid!r}")))

    branches = []
    for entry in _require(raw, "branches", list, "grid"):
        if not isinstance(entry, dict):
            raise ParseError("branches: each entry must be an object")
        brid = _require(entry, "id", str, "branch")
        where = f"branch {brid!r}"
        branches.append(
            Branch(
                id=brid,
                from_bus=_require(entry, "from", str, where),
                to_bus=_require(entry, "to", str, where),
                susceptance=_require(entry, "susceptance", float, where),
                flow_limit_mw=_require(entry, "flow_limit_mw", float, where),
                attackable=_require(entry, "attackable", bool, where),
                in_service=_require(entry, "in_service", bool, where),
            )
        )

    generators = []
    for entry in _require(raw, "generators", list, "grid"):
        if not isinstance(entry, dict):
            raise ParseError("generators: each entry must be an object")
        gid = _require(entry, "id", str, "generator")
        where = f"generator {gid!r}"
        generators.append(
            Generator(
                id=gid,
                bus=_require(entry, "bus", str, where),
                p_max_mw=_require(entry, "p_max_mw", float, where),
                ict_controlled=_require(entry, "ict_controlled", bool, where),
            )
        )

    grid = GridCase(
        name=name,
        reference_bus=reference_bus,
        buses=tuple(buses),
        branches=tuple(branches),
        generators=tuple(generators),
        configuration_label=label,
    )
    problems = validate(grid)
    if problems:
        summary = "; ".join(str(p) for p in problems)
        kinds = {p.code for p in problems}
        if kinds == {"unknown-reference"}:
            raise UnknownIdError(summary)
        if kinds == {"domain"}:
            raise DomainError(summary)
        raise ParseError(summary)
    return grid


def parse_grid_file(path: str | Path) -> GridCase:
    return parse_grid(Path(path).read_text(encoding="utf-8"))


def serialize_grid(grid: GridCase) -> str:
    """Inverse of :func:`parse_grid` on valid cases (exact round-trip)."""
    doc = {
        "name": grid.name,
        "configuration_label": grid.configuration_label,
        "reference_bus": grid.reference_bus,
        "buses": [{"id": b.id, "demand_mw": b.demand_mw} for b in grid.buses],
        "branches": [
            {
                "id": br.id,
                "from": br.from_bus,
                "to": br.to_bus,
                "susceptance": br.susceptance,
                "flow_limit_mw": br.flow_limit_mw,
                "attackable": br.attackable,
                "in_service": br.in_service,
            }
            for br in grid.branches
        ],
        "generators": [
            {
                "id": g.id,
                "bus": g.bus,
                "p_max_mw": g.p_max_mw,
                "ict_controlled": g.ict_controlled,
            }
            for g in grid.generators
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_override(text: str) -> ConfigurationOverride:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError("override file must be a JSON object")
    label = _require(raw, "label", str, "override")

    def scale_map(key: str) -> dict[str, float]:
        out = {}
        for cid, val in raw.get(key, {}).items():
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ParseError(f"override {key}[{cid!r}] must be a number")
            if not math.isfinite(float(val)) or float(val) < 0:
                raise DomainError(f"override {key}[{cid!r}] must be finite and >= 0")
            out[cid] = float(val)
        return out

    switches = {}
    for cid, val in raw.get("switch_states", {}).items():
        if not isinstance(val, bool):
            raise ParseError(f"override switch_states[{cid!r}] must be a boolean")
        switches[cid] = val

    return ConfigurationOverride(
        label=label,
        load_scale=scale_map("load_scale"),
        generation_scale=scale_map("generation_scale"),
        switch_states=switches,
    )


def parse_override_file(path: str | Path) -> ConfigurationOverride:
    return parse_override(Path(path).read_text(encoding="utf-8"))


def apply_configuration(grid: GridCase, override: ConfigurationOverride) -> GridCase:
    """Produce the study case described by ``override``; the input is untouched."""
    for cid in override.load_scale:
        if cid not in grid.bus_by_id:
            raise UnknownIdError(f"load_scale refers to unknown bus {cid!r}")
    for cid in override.generation_scale:
        if cid not in grid.generator_by_id:
            raise UnknownIdError(f"generation_scale refers to unknown generator {cid!r}")
    for cid in override.switch_states:
        if cid not in grid.branch_by_id:
            raise UnknownIdError(f"switch_states refers to unknown branch {cid!r}")

    buses = tuple(
        replace(b, demand_mw=b.demand_mw * override.load_scale[b.id])
        if b.id in override.load_scale
        else b
        for b in grid.buses
    )
    generators = tuple(
        replace(g, p_max_mw=g.p_max_mw * override.generation_scale[g.id])
        if g.id in override.generation_scale
        else g
        for g in grid.generators
    )
    branches = tuple(
        replace(br, in_service=override.switch_states[br.id])
        if br.id in override.switch_states
        else br
        for br in grid.branches
    )
    return GridCase(
        name=grid.name,
        reference_bus=grid.reference_bus,
        buses=buses,
        branches=branches,
        generators=generators,
        configuration_label=override.label,
    )
