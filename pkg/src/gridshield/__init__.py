"""Power-grid attack-scenario enumeration and protected-set selection.

Workflow: model a grid (:mod:`gridshield.model`), rank the critical
attack scenarios an attacker with a fixed outage budget could cause
(:mod:`gridshield.enumeration`, each scenario scored by the minimum
load shedding dispatch of :mod:`gridshield.dcopf`), then choose which
components to protect so the longest possible prefix of that ranking is
excluded (:mod:`gridshield.protect`).  :mod:`gridshield.oracle` holds
exhaustive reference solvers used to certify the fast paths.
"""

from .dcopf import (
    EMPTY_ATTACK,
    AttackVector,
    DispatchResult,
    attack_from_component_keys,
    solve_dcopf,
    total_lost_load,
)
from .enumeration import (
    CasList,
    CasRecord,
    StopRule,
    attackable_universe,
    enumerate_cas,
    load_cas_list,
    merge_cas_lists,
    parse_cas_list,
    save_cas_list,
    serialize_cas_list,
    worst_case_attack,
)
from .errors import (
    DomainError,
    ExhaustedError,
    ExhaustionWarning,
    GridShieldError,
    GuardExceeded,
    InputError,
    MergeError,
    ParseError,
    SolverFailure,
    UnknownIdError,
)
from .model import (
    Branch,
    Bus,
    ConfigurationOverride,
    Diagnostic,
    Generator,
    GridCase,
    apply_configuration,
    parse_grid,
    parse_grid_file,
    parse_override,
    parse_override_file,
    serialize_grid,
    validate,
)
from .oracle import TrilevelResult, brute_force_protection_ip, brute_force_trilevel
from .protect import (
    ALL_EXCLUDED,
    ProtectionPlan,
    budget_sweep,
    enumerate_optimal_protections,
    evaluate_protection,
    load_plan,
    optimal_protection,
    parse_plan,
    save_plan,
    serialize_plan,
)
from .report import SweepReport, SweepRow, compute_metrics, report_to_csv, report_to_json

__version__ = "0.1.0"

__all__ = [
    "ALL_EXCLUDED",
    "AttackVector",
    "EMPTY_ATTACK",
    "Branch",
    "Bus",
    "CasList",
    "CasRecord",
    "ConfigurationOverride",
    "Diagnostic",
    "DispatchResult",
    "DomainError",
    "ExhaustedError",
    "ExhaustionWarning",
    "Generator",
    "GridCase",
    "GridShieldError",
    "GuardExceeded",
    "InputError",
    "MergeError",
    "ParseError",
    "ProtectionPlan",
    "SolverFailure",
    "StopRule",
    "SweepReport",
    "SweepRow",
    "TrilevelResult",
    "UnknownIdError",
    "apply_configuration",
    "attack_from_component_keys",
    "attackable_universe",
    "brute_force_protection_ip",
    "brute_force_trilevel",
    "budget_sweep",
    "compute_metrics",
    "enumerate_cas",
    "enumerate_optimal_protections",
    "evaluate_protection",
    "load_cas_list",
    "load_plan",
    "merge_cas_lists",
    "optimal_protection",
    "parse_cas_list",
    "parse_grid",
    "parse_grid_file",
    "parse_override",
    "parse_override_file",
    "parse_plan",
    "report_to_csv",
    "report_to_json",
    "save_cas_list",
    "save_plan",
    "serialize_cas_list",
    "serialize_grid",
    "serialize_plan",
    "solve_dcopf",
    "total_lost_load",
    "validate",
    "worst_case_attack",
]
