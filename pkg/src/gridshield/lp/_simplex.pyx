# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounded-variable primal simplex; behavioural twin of pysimplex.

Same pivot rules (Dantzig with a Bland fallback after degenerate
stalls), same tolerances, same return codes.  The basis is refactorized
every iteration with an in-house dense LU (partial pivoting) so the
kernel has no runtime dependency beyond numpy's allocator.
"""

import numpy as np

from libc.math cimport INFINITY, fabs, isfinite

OPTIMAL = 0
ITERATION_LIMIT = 1
UNBOUNDED = 2
SINGULAR = 3
INFEASIBLE_START = 4

cdef int _BASIC = 0
cdef int _AT_LOWER = 1
cdef int _AT_UPPER = 2
cdef int _FREE = 3
cdef int _FIXED = 4

cdef double _TOL_COST = 1e-9
cdef double _TOL_PIV = 1e-9
cdef double _TOL_STEP = 1e-11
cdef int _STALL_LIMIT = 60


cdef int _lu_factor(double[:, ::1] M, Py_ssize_t[::1] piv) noexcept:
    """In-place LU with partial pivoting; 0 on success, -1 if singular."""
    cdef Py_ssize_t m = M.shape[0]
    cdef Py_ssize_t k, i, j, p
    cdef double best, val, pivot, factor, dmin, dmax
    for k in range(m):
        p = k
        best = fabs(M[k, k])
        for i in range(k + 1, m):
            val = fabs(M[i, k])
            if val > best:
                best = val
                p = i
        piv[k] = p
        if p != k:
            for j in range(m):
                val = M[k, j]
                M[k, j] = M[p, j]
                M[p, j] = val
        pivot = M[k, k]
        if pivot == 0.0:
            return -1
        for i in range(k + 1, m):
            factor = M[i, k] / pivot
            M[i, k] = factor
            if factor != 0.0:
                for j in range(k + 1, m):
                    M[i, j] -= factor * M[k, j]
    dmin = INFINITY
    dmax = 1.0
    for k in range(m):
        val = fabs(M[k, k])
        if val < dmin:
            dmin = val
        if val > dmax:
            dmax = val
    if dmin <= 1e-12 * dmax:
        return -1
    return 0


cdef void _lu_solve(double[:, ::1] M, Py_ssize_t[::1] piv, double[::1] x) noexcept:
    """Solve B x = rhs in place (rhs passed in ``x``)."""
    cdef Py_ssize_t m = M.shape[0]
    cdef Py_ssize_t k, i
    cdef double acc
    for k in range(m):
        if piv[k] != k:
            acc = x[k]
            x[k] = x[piv[k]]
            x[piv[k]] = acc
    for k in range(m):          # L y = Pb, unit diagonal
        acc = x[k]
        for i in range(k):
            acc -= M[k, i] * x[i]
        x[k] = acc
    for k in range(m - 1, -1, -1):  # U x = y
        acc = x[k]
        for i in range(k + 1, m):
            acc -= M[k, i] * x[i]
        x[k] = acc / M[k, k]


cdef void _lu_solve_t(double[:, ::1] M, Py_ssize_t[::1] piv, double[::1] x) noexcept:
    """Solve B^T x = rhs in place (rhs passed in ``x``)."""
    cdef Py_ssize_t m = M.shape[0]
    cdef Py_ssize_t k, i
    cdef double acc
    for k in range(m):          # U^T z = rhs (forward, non-unit diagonal)
        acc = x[k]
        for i in range(k):
            acc -= M[i, k] * x[i]
        x[k] = acc / M[k, k]
    for k in range(m - 1, -1, -1):  # L^T w = z (backward, unit diagonal)
        acc = x[k]
        for i in range(k + 1, m):
            acc -= M[i, k] * x[i]
        x[k] = acc
    for k in range(m - 1, -1, -1):  # undo row swaps
        if piv[k] != k:
            acc = x[k]
            x[k] = x[piv[k]]
            x[piv[k]] = acc


def solve_bounded_lp(A, b, c, lb, ub, basis, max_iter=0):
    """Run the simplex; returns ``(status, x, objective, iterations)``."""
    cdef double[:, ::1] Am = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[::1] bm = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] cm = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] lo = np.ascontiguousarray(lb, dtype=np.float64)
    cdef double[::1] hi = np.ascontiguousarray(ub, dtype=np.float64)
    cdef Py_ssize_t m = Am.shape[0]
    cdef Py_ssize_t n = Am.shape[1]

    cdef long long limit = max_iter
    if limit <= 0:
        limit = 200 * (m + n) + 1000

    basis_arr = np.array(basis, dtype=np.intp)
    cdef Py_ssize_t[::1] bas = basis_arr
    x_arr = np.zeros(n)
    cdef double[::1] x = x_arr

    state_arr = np.empty(n, dtype=np.int32)
    cdef int[::1] state = state_arr
    cdef Py_ssize_t i, j, k
    for j in range(n):
        if lo[j] == hi[j]:
            state[j] = _FIXED
            x[j] = lo[j]
        elif not isfinite(lo[j]) and not isfinite(hi[j]):
            state[j] = _FREE
            x[j] = 0.0
        elif isfinite(lo[j]):
            state[j] = _AT_LOWER
            x[j] = lo[j]
        else:
            state[j] = _AT_UPPER
            x[j] = hi[j]
    for i in range(m):
        state[bas[i]] = _BASIC

    cdef double[:, ::1] B = np.empty((m, m))
    cdef Py_ssize_t[::1] piv = np.empty(m, dtype=np.intp)
    cdef double[::1] xB = np.empty(m)
    cdef double[::1] y = np.empty(m)
    cdef double[::1] w = np.empty(m)

    cdef bint bland = False
    cdef int stall = 0
    cdef long long iters = 0
    cdef double dj, viol, sgn, best, direction, acc, obj
    cdef double t, t_best, t_flip, bound, coeff, coeff_best, slack, rng, start, step
    cdef Py_ssize_t enter, leave_pos, leaving, bi
    cdef bint hits_upper, leave_to_upper, better
    cdef int s

    while True:
        for i in range(m):
            for k in range(m):
                B[i, k] = Am[i, bas[k]]
        if _lu_factor(B, piv) != 0:
            return SINGULAR, x_arr, float("nan"), iters

        # Basic values from scratch; keeps roundoff from accumulating.
        for i in range(m):
            acc = bm[i]
            for j in range(n):
                if state[j] != _BASIC:
                    acc -= Am[i, j] * x[j]
            xB[i] = acc
        _lu_solve(B, piv, xB)
        for i in range(m):
            x[bas[i]] = xB[i]

        if iters == 0:
            for i in range(m):
                if xB[i] < lo[bas[i]] - 1e-7 or xB[i] > hi[bas[i]] + 1e-7:
                    return INFEASIBLE_START, x_arr, float("nan"), iters

        for i in range(m):
            y[i] = cm[bas[i]]
        _lu_solve_t(B, piv, y)

        enter = -1
        direction = 1.0
        best = _TOL_COST
        for j in range(n):
            s = state[j]
            if s == _BASIC or s == _FIXED:
                continue
            dj = cm[j]
            for i in range(m):
                dj -= Am[i, j] * y[i]
            if s == _AT_LOWER:
                viol = -dj
                sgn = 1.0
            elif s == _AT_UPPER:
                viol = dj
                sgn = -1.0
            else:
                viol = fabs(dj)
                sgn = 1.0 if dj < 0 else -1.0
            if viol > best:
                enter = j
                direction = sgn
                if bland:
                    break
                best = viol
        if enter < 0:
            obj = 0.0
            for j in range(n):
                obj += cm[j] * x[j]
            return OPTIMAL, x_arr, obj, iters

        for i in range(m):
            w[i] = Am[i, enter]
        _lu_solve(B, piv, w)

        # Ratio test, identical tie handling to the reference kernel.
        t_best = INFINITY
        leave_pos = -1
        leave_to_upper = False
        coeff_best = 0.0
        for i in range(m):
            coeff = direction * w[i]
            bi = bas[i]
            if coeff > _TOL_PIV:
                bound = lo[bi]
                if not isfinite(bound):
                    continue
                t = (xB[i] - bound) / coeff
                hits_upper = False
            elif coeff < -_TOL_PIV:
                bound = hi[bi]
                if not isfinite(bound):
                    continue
                t = (bound - xB[i]) / (-coeff)
                hits_upper = True
            else:
                continue
            if t < 0.0:
                t = 0.0
            if leave_pos < 0:
                t_best = t
                leave_pos = i
                leave_to_upper = hits_upper
                coeff_best = fabs(coeff)
                continue
            slack = 1e-12 * (1.0 + t_best)
            if t < t_best - slack:
                t_best = t
                leave_pos = i
                leave_to_upper = hits_upper
                coeff_best = fabs(coeff)
            elif t <= t_best + slack:
                if bland:
                    better = bi < bas[leave_pos]
                else:
                    better = fabs(coeff) > coeff_best or (
                        fabs(coeff) == coeff_best and bi < bas[leave_pos]
                    )
                if better:
                    if t < t_best:
                        t_best = t
                    leave_pos = i
                    leave_to_upper = hits_upper
                    coeff_best = fabs(coeff)

        t_flip = INFINITY
        if state[enter] == _AT_LOWER or state[enter] == _AT_UPPER:
            rng = hi[enter] - lo[enter]
            if isfinite(rng):
                t_flip = rng

        if not isfinite(t_best) and not isfinite(t_flip):
            return UNBOUNDED, x_arr, float("nan"), iters

        if iters >= limit:
            return ITERATION_LIMIT, x_arr, float("nan"), iters
        iters += 1

        if t_flip <= t_best:
            for i in range(m):
                x[bas[i]] = xB[i] - direction * t_flip * w[i]
            if state[enter] == _AT_LOWER:
                state[enter] = _AT_UPPER
                x[enter] = hi[enter]
            else:
                state[enter] = _AT_LOWER
                x[enter] = lo[enter]
            step = t_flip
        else:
            leaving = bas[leave_pos]
            for i in range(m):
                x[bas[i]] = xB[i] - direction * t_best * w[i]
            start = 0.0
            if state[enter] == _AT_LOWER:
                start = lo[enter]
            elif state[enter] == _AT_UPPER:
                start = hi[enter]
            x[enter] = start + direction * t_best
            x[leaving] = hi[leaving] if leave_to_upper else lo[leaving]
            if lo[leaving] == hi[leaving]:
                state[leaving] = _FIXED
            else:
                state[leaving] = _AT_UPPER if leave_to_upper else _AT_LOWER
            state[enter] = _BASIC
            bas[leave_pos] = enter
            step = t_best

        if step <= _TOL_STEP:
            stall += 1
            if stall > _STALL_LIMIT:
                bland = True
        else:
            stall = 0
