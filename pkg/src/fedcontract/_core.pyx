# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_core_py``.

Same signatures, same operation order, same tie-breaking.  Any change here
must be mirrored there (and vice versa); ``tests/test_kernels.py`` holds the
two implementations to near bit-level agreement.
"""

from libc.math cimport log, INFINITY

import numpy as np

from .errors import ConvergenceError


cdef double _deriv(const double[::1] sat, const double[::1] a, double d, double quad, double f) noexcept:
    cdef double total = 0.0
    cdef Py_ssize_t i
    for i in range(sat.shape[0]):
        total += sat[i] * a[i] / (f * (d * f - a[i]))
    return total - 2.0 * quad * f


def stationary_point(const double[::1] sat, const double[::1] a, double d, double quad,
                     double rel_tol=1e-10, int max_iter=200):
    """See ``_core_py.stationary_point``."""
    if quad <= 0.0:
        raise ValueError("quad must be strictly positive")
    cdef double amax = a[0]
    cdef Py_ssize_t i
    for i in range(1, a.shape[0]):
        if a[i] > amax:
            amax = a[i]
    cdef double lo = (amax / d) * (1.0 + 1e-12)
    cdef double hi = 2.0 * lo if 2.0 * lo > 1.0 else 1.0
    cdef int expansions = 0
    while _deriv(sat, a, d, quad, hi) > 0.0:
        lo = hi
        hi = 2.0 * hi
        expansions += 1
        if expansions > 200:
            raise ConvergenceError("derivative stayed positive while expanding the bracket", residual=hi)
    cdef int it
    cdef double mid
    for it in range(max_iter):
        if hi - lo <= rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if _deriv(sat, a, d, quad, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def best_menu_on_grid(const double[::1] grid, const long long[::1] min_idx,
                      const double[::1] pot, const double[::1] cs,
                      const double[::1] sat, const double[::1] lin, const double[::1] npop,
                      double zeta, double mu, double d, double e_com, double r_max):
    """See ``_core_py.best_menu_on_grid``."""
    cdef Py_ssize_t m = pot.shape[0]
    cdef Py_ssize_t g = grid.shape[0]
    idx_arr = np.zeros(m, dtype=np.longlong)
    energy_arr = np.zeros(m)
    reward_arr = np.zeros(m)
    spent_arr = np.zeros(m)
    profit_arr = np.zeros(m)
    best_idx_arr = np.full(m, -1, dtype=np.longlong)
    cdef long long[::1] idx = idx_arr
    cdef double[::1] energy = energy_arr
    cdef double[::1] reward = reward_arr
    cdef double[::1] spent = spent_arr
    cdef double[::1] profit = profit_arr
    cdef long long[::1] best_idx = best_idx_arr
    cdef double best_profit = -INFINITY
    cdef double budget_cap = r_max * (1.0 + 1e-12)

    cdef Py_ssize_t level = 0
    cdef Py_ssize_t j
    cdef double f, e, r, s, p
    idx[0] = min_idx[0]
    while level >= 0:
        if idx[level] >= g:
            level -= 1
            if level >= 0:
                idx[level] += 1
            continue
        f = grid[idx[level]]
        e = zeta * cs[level] * f * f
        if level == 0:
            r = mu * (e_com + pot[0] * e)
            s = npop[0] * r
            p = sat[0] * log(d - pot[0] * cs[0] / f) - lin[0] * r
        else:
            r = reward[level - 1] + mu * pot[level] * (e - energy[level - 1])
            s = spent[level - 1] + npop[level] * r
            p = profit[level - 1] + sat[level] * log(d - pot[level] * cs[level] / f) - lin[level] * r
        if s > budget_cap:
            # Rewards only grow with the frequency index, so the rest of this
            # level is unaffordable too: back out and advance the parent.
            level -= 1
            if level >= 0:
                idx[level] += 1
            continue
        energy[level] = e
        reward[level] = r
        spent[level] = s
        profit[level] = p
        if level == m - 1:
            if p > best_profit:
                best_profit = p
                for j in range(m):
                    best_idx[j] = idx[j]
            idx[level] += 1
        else:
            level += 1
            idx[level] = idx[level - 1] if idx[level - 1] > min_idx[level] else min_idx[level]
    return best_profit, best_idx_arr
