"""LP kernel selection: compiled simplex when available, numpy twin otherwise.

Set ``GRIDSHIELD_PURE_PYTHON=1`` in the environment to force the
fallback (useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

from . import pysimplex
from .pysimplex import (  # noqa: F401  (re-exported status codes)
    INFEASIBLE_START,
    ITERATION_LIMIT,
    OPTIMAL,
    SINGULAR,
    UNBOUNDED,
)

STATUS_NAMES = {
    OPTIMAL: "optimal",
    ITERATION_LIMIT: "iteration-limit",
    UNBOUNDED: "unbounded",
    SINGULAR: "singular-basis",
    INFEASIBLE_START: "infeasible-start",
}

try:
    from . import _simplex as _compiled
except ImportError:
    _compiled = None

if _compiled is not None and not os.environ.get("GRIDSHIELD_PURE_PYTHON"):
    _active = _compiled
    BACKEND = "compiled"
else:
    _active = pysimplex
    BACKEND = "python"


def available_backends() -> dict:
    """Importable kernels by name; used by tests and the benchmark."""
    out = {"python": pysimplex}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def set_backend(name: str) -> None:
    """Switch the process-wide kernel. Not thread safe; tests only."""
    global _active, BACKEND
    _active = available_backends()[name]
    BACKEND = name


def solve_bounded_lp(A, b, c, lb, ub, basis, max_iter=0):
    return _active.solve_bounded_lp(A, b, c, lb, ub, basis, max_iter)
