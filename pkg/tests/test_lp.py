"""Bounded-variable simplex kernels: agreement with scipy and with each other."""
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.optimize import linprog

from gridshield.lp import (
    INFEASIBLE_START,
    ITERATION_LIMIT,
    OPTIMAL,
    STATUS_NAMES,
    UNBOUNDED,
    available_backends,
)

BACKENDS = sorted(available_backends())
pytestmark = pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")


def kernels():
    return [available_backends()[name] for name in BACKENDS]


def random_problem(rng, m, n):
    """Random equality-constrained LP with a valid starting basis.

    Built as [G | I] x = b so the slack identity block is a feasible
    nonsingular basis; bounds are finite on structurals, loose on slacks.
    """
    G = rng.uniform(-2.0, 2.0, size=(m, n - m))
    A = np.hstack([G, np.eye(m)])
    lb = np.concatenate([rng.uniform(-5.0, 0.0, size=n - m), np.full(m, -500.0)])
    ub = np.concatenate([lb[: n - m] + rng.uniform(0.5, 6.0, size=n - m),
                         np.full(m, 500.0)])
    x0 = lb[: n - m] + (ub[: n - m] - lb[: n - m]) * rng.uniform(0, 1, size=n - m)
    slack_start = rng.uniform(-50.0, 50.0, size=m)
    b = G @ x0 + slack_start
    c = rng.uniform(-1.0, 1.0, size=n)
    basis = np.arange(n - m, n)
    return A, b, c, lb, ub, basis


def scipy_reference(A, b, c, lb, ub):
    res = linprog(
        c, A_eq=A, b_eq=b,
        bounds=list(zip(lb.tolist(), ub.tolist())),
        method="highs",
    )
    return res


@pytest.mark.parametrize("backend", BACKENDS)
def test_random_problems_match_scipy(backend):
    kernel = available_backends()[backend]
    rng = np.random.default_rng(42)
    solved = 0
    for trial in range(120):
        m = int(rng.integers(1, 7))
        n = m + int(rng.integers(1, 9))
        A, b, c, lb, ub, basis = random_problem(rng, m, n)
        status, x, obj, iters = kernel.solve_bounded_lp(A, b, c, lb, ub, basis.copy())
        ref = scipy_reference(A, b, c, lb, ub)
        if ref.status == 0:
            assert status == OPTIMAL, (trial, STATUS_NAMES[status])
            assert obj == pytest.approx(ref.fun, abs=1e-7, rel=1e-9)
            assert np.all(x >= lb - 1e-7) and np.all(x <= ub + 1e-7)
            assert np.max(np.abs(A @ x - b)) < 1e-6
            solved += 1
        elif ref.status == 3:
            assert status == UNBOUNDED, (trial, STATUS_NAMES[status])
    assert solved > 80  # the sample must be dominated by solvable instances


@pytest.mark.parametrize("backend", BACKENDS)
def test_unbounded_detected(backend):
    kernel = available_backends()[backend]
    # minimize -x1 with x1 free upward: A = [1, 1], slack basis
    A = np.array([[1.0, 1.0]])
    b = np.array([0.0])
    c = np.array([-1.0, 0.0])
    lb = np.array([0.0, -np.inf])
    ub = np.array([np.inf, np.inf])
    status, _, _, _ = kernel.solve_bounded_lp(A, b, c, lb, ub, np.array([1]))
    assert status == UNBOUNDED


@pytest.mark.parametrize("backend", BACKENDS)
def test_fixed_variables_respected(backend):
    kernel = available_backends()[backend]
    # x0 fixed at 3; minimize x1 subject to x0 + x1 + s = 10
    A = np.array([[1.0, 1.0, 1.0]])
    b = np.array([10.0])
    c = np.array([0.0, 1.0, 0.0])
    lb = np.array([3.0, 0.0, -100.0])
    ub = np.array([3.0, 50.0, 100.0])
    status, x, obj, _ = kernel.solve_bounded_lp(A, b, c, lb, ub, np.array([2]))
    assert status == OPTIMAL
    assert x[0] == pytest.approx(3.0)
    assert obj == pytest.approx(0.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_iteration_limit_status(backend):
    kernel = available_backends()[backend]
    rng = np.random.default_rng(3)
    A, b, c, lb, ub, basis = random_problem(rng, 4, 10)
    status, _, _, iters = kernel.solve_bounded_lp(A, b, c, lb, ub, basis, max_iter=1)
    assert status in (ITERATION_LIMIT, OPTIMAL)
    assert iters <= 1


@pytest.mark.parametrize("backend", BACKENDS)
def test_infeasible_start_reported(backend):
    kernel = available_backends()[backend]
    # basis solve puts the basic variable outside its bounds
    A = np.array([[1.0, 1.0]])
    b = np.array([50.0])
    c = np.array([1.0, 0.0])
    lb = np.array([0.0, 0.0])
    ub = np.array([1.0, 1.0])  # basic var would need value 50 > ub
    status, _, _, _ = kernel.solve_bounded_lp(A, b, c, lb, ub, np.array([1]))
    assert status == INFEASIBLE_START


@pytest.mark.parametrize("backend", BACKENDS)
def test_degenerate_problem_terminates(backend):
    kernel = available_backends()[backend]
    # classic highly degenerate corner: many constraints active at origin
    m, n = 6, 14
    rng = np.random.default_rng(11)
    G = rng.uniform(0.0, 1.0, size=(m, n - m))
    A = np.hstack([G, np.eye(m)])
    b = np.zeros(m)  # all slacks start at a degenerate vertex
    c = np.concatenate([-np.ones(n - m), np.zeros(m)])
    lb = np.zeros(n)
    ub = np.concatenate([np.ones(n - m), np.full(m, 0.0)])
    status, x, obj, _ = kernel.solve_bounded_lp(A, b, c, lb, ub, np.arange(n - m, n))
    ref = scipy_reference(A, b, c, lb, ub)
    assert status == OPTIMAL
    assert obj == pytest.approx(ref.fun, abs=1e-8)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel unavailable")
def test_kernel_parity():
    rng = np.random.default_rng(2025)
    py = available_backends()["python"]
    cy = available_backends()["compiled"]
    for trial in range(150):
        m = int(rng.integers(1, 6))
        n = m + int(rng.integers(1, 8))
        A, b, c, lb, ub, basis = random_problem(rng, m, n)
        s1, x1, o1, i1 = py.solve_bounded_lp(A, b, c, lb, ub, basis.copy())
        s2, x2, o2, i2 = cy.solve_bounded_lp(A, b, c, lb, ub, basis.copy())
        assert s1 == s2, trial
        if s1 == OPTIMAL:
            assert o1 == pytest.approx(o2, abs=1e-9, rel=1e-12)


def test_env_var_forces_python_backend():
    env = dict(os.environ, GRIDSHIELD_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from gridshield.lp import BACKEND; print(BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"


def test_compiled_backend_is_default_when_built():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernel unavailable")
    env = {k: v for k, v in os.environ.items() if k != "GRIDSHIELD_PURE_PYTHON"}
    out = subprocess.run(
        [sys.executable, "-c", "from gridshield.lp import BACKEND; print(BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "compiled"


def test_status_names_cover_all_codes():
    assert sorted(STATUS_NAMES) == sorted(
        {OPTIMAL, ITERATION_LIMIT, UNBOUNDED, INFEASIBLE_START} | set(STATUS_NAMES)
    )
    assert len(set(STATUS_NAMES.values())) == len(STATUS_NAMES)
