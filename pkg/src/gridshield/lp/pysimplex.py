"""Pure-Python bounded-variable primal simplex (dense, revised form).

Solves

    min  c @ x   s.t.   A @ x == b,   lb <= x <= ub

starting from a caller-supplied basis whose basic solution is feasible,
so no phase-1 is ever needed.  The dispatch problems this package builds
always have such a basis (shed everything, flow nothing).

Variable bounds may be infinite on either side; a variable with
``lb == ub`` is fixed and never enters the basis, a variable that is
free on both sides rests at 0 while nonbasic.  The basis matrix is
refactorized every iteration (LU), which is robust and plenty fast at
the problem sizes involved (a few hundred rows).

Pivoting: Dantzig rule (largest reduced-cost violation, lowest index on
ties) with a switch to Bland's rule after a run of degenerate steps so
cycling cannot occur.  The same rules are implemented by the compiled
twin in ``_simplex.pyx``; both must stay behaviourally aligned.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve

# Return codes, shared with the compiled kernel.
OPTIMAL = 0
ITERATION_LIMIT = 1
UNBOUNDED = 2
SINGULAR = 3
INFEASIBLE_START = 4

# Nonbasic/basic variable states.
_BASIC = 0
_AT_LOWER = 1
_AT_UPPER = 2
_FREE = 3
_FIXED = 4

_TOL_COST = 1e-9   # reduced-cost optimality threshold
_TOL_PIV = 1e-9    # |direction component| below this does not block
_TOL_STEP = 1e-11  # step lengths below this count as degenerate
_STALL_LIMIT = 60  # degenerate steps before switching to Bland's rule


def solve_bounded_lp(A, b, c, lb, ub, basis, max_iter=0):
    """Run the simplex; returns ``(status, x, objective, iterations)``.

    ``basis`` lists one column index per row; the implied basic solution
    (nonbasic variables at their bound, free ones at 0) must be feasible.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    m, n = A.shape
    if max_iter <= 0:
        max_iter = 200 * (m + n) + 1000

    basis = np.array(basis, dtype=np.intp)
    state = np.empty(n, dtype=np.int8)
    x = np.zeros(n)
    for j in range(n):
        if lb[j] == ub[j]:
            state[j] = _FIXED
            x[j] = lb[j]
        elif np.isinf(lb[j]) and np.isinf(ub[j]):
            state[j] = _FREE
            x[j] = 0.0
        elif np.isfinite(lb[j]):
            state[j] = _AT_LOWER
            x[j] = lb[j]
        else:
            state[j] = _AT_UPPER
            x[j] = ub[j]
    state[basis] = _BASIC

    nonbasic = np.ones(n, dtype=bool)
    nonbasic[basis] = False

    bland = False
    stall = 0
    iters = 0

    while True:
        B = A[:, basis]
        try:
            lu = lu_factor(B, check_finite=False)
        except Exception:
            return SINGULAR, x, np.nan, iters
        diag = np.abs(np.diag(lu[0]))
        if diag.min() <= 1e-12 * max(1.0, diag.max()):
            return SINGULAR, x, np.nan, iters

        # Basic values from scratch; keeps roundoff from accumulating.
        rhs = b - A[:, nonbasic] @ x[nonbasic]
        xB = lu_solve(lu, rhs, check_finite=False)
        x[basis] = xB

        if iters == 0:
            lo = lb[basis]
            hi = ub[basis]
            if np.any(xB < lo - 1e-7) or np.any(xB > hi + 1e-7):
                return INFEASIBLE_START, x, np.nan, iters

        # Reduced costs for every column (cheap at these sizes).
        y = lu_solve(lu, c[basis], trans=1, check_finite=False)
        d = c - A.T @ y

        enter = -1
        direction = 1.0
        best = _TOL_COST
        for j in range(n):
            if not nonbasic[j]:
                continue
            s = state[j]
            if s == _FIXED:
                continue
            dj = d[j]
            if s == _AT_LOWER:
                viol, sgn = -dj, 1.0
            elif s == _AT_UPPER:
                viol, sgn = dj, -1.0
            else:  # free
                viol, sgn = abs(dj), (1.0 if dj < 0 else -1.0)
            if viol > best:
                enter = j
                direction = sgn
                if bland:
                    break
                best = viol
        if enter < 0:
            x[basis] = xB
            return OPTIMAL, x, float(c @ x), iters

        w = lu_solve(lu, A[:, enter], check_finite=False)

        # Ratio test: smallest step at which a basic variable hits a bound,
        # against the entering variable's own bound-to-bound range.
        t_best = np.inf
        leave_pos = -1
        leave_to_upper = False
        coeff_best = 0.0
        for i in range(m):
            coeff = direction * w[i]
            bi = basis[i]
            if coeff > _TOL_PIV:
                bound = lb[bi]
                if np.isinf(bound):
                    continue
                t = (xB[i] - bound) / coeff
                hits_upper = False
            elif coeff < -_TOL_PIV:
                bound = ub[bi]
                if np.isinf(bound):
                    continue
                t = (bound - xB[i]) / (-coeff)
                hits_upper = True
            else:
                continue
            if t < 0.0:
                t = 0.0
            if leave_pos < 0:
                t_best, leave_pos, leave_to_upper = t, i, hits_upper
                coeff_best = abs(coeff)
                continue
            slack = 1e-12 * (1.0 + t_best)
            if t < t_best - slack:
                t_best, leave_pos, leave_to_upper = t, i, hits_upper
                coeff_best = abs(coeff)
            elif t <= t_best + slack:
                better = (
                    basis[i] < basis[leave_pos]
                    if bland
                    else abs(coeff) > coeff_best
                    or (abs(coeff) == coeff_best and basis[i] < basis[leave_pos])
                )
                if better:
                    t_best, leave_pos, leave_to_upper = min(t, t_best), i, hits_upper
                    coeff_best = abs(coeff)

        t_flip = np.inf
        if state[enter] in (_AT_LOWER, _AT_UPPER):
            rng = ub[enter] - lb[enter]
            if np.isfinite(rng):
                t_flip = rng

        if not np.isfinite(t_best) and not np.isfinite(t_flip):
            return UNBOUNDED, x, np.nan, iters

        if iters >= max_iter:
            return ITERATION_LIMIT, x, np.nan, iters
        iters += 1

        if t_flip <= t_best:
            # Bound-to-bound move, basis unchanged.
            x[basis] = xB - direction * t_flip * w
            if state[enter] == _AT_LOWER:
                state[enter] = _AT_UPPER
                x[enter] = ub[enter]
            else:
                state[enter] = _AT_LOWER
                x[enter] = lb[enter]
            step = t_flip
        else:
            leaving = basis[leave_pos]
            x[basis] = xB - direction * t_best * w
            start = 0.0
            if state[enter] == _AT_LOWER:
                start = lb[enter]
            elif state[enter] == _AT_UPPER:
                start = ub[enter]
            x[enter] = start + direction * t_best
            x[leaving] = ub[leaving] if leave_to_upper else lb[leaving]
            if lb[leaving] == ub[leaving]:
                state[leaving] = _FIXED
            else:
                state[leaving] = _AT_UPPER if leave_to_upper else _AT_LOWER
            state[enter] = _BASIC
            basis[leave_pos] = enter
            nonbasic[enter] = False
            nonbasic[leaving] = True
            step = t_best

        if step <= _TOL_STEP:
            stall += 1
            if stall > _STALL_LIMIT:
                bland = True
        else:
            stall = 0
