"""Pure-Python reference kernels.

These are the numerical hot spots of the package: the stationary-point
bisection used by the menu solver and the exhaustive grid search used by the
verification oracle.  ``fedcontract._core`` is a compiled twin with the same
signatures and the same operation order; ``fedcontract.backend`` picks
whichever is available.  Keep the two implementations in lockstep.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError


def _deriv(sat, a, d, quad, f):
    total = 0.0
    for i in range(len(sat)):
        total += sat[i] * a[i] / (f * (d * f - a[i]))
    return total - 2.0 * quad * f


def stationary_point(sat, a, d, quad, rel_tol=1e-10, max_iter=200):
    """Root of ``sum_i sat[i]*a[i] / (f*(d*f - a[i])) - 2*quad*f`` on ``f > max(a)/d``.

    This is the first-order condition of a pooled per-type term of the reduced
    menu objective: ``sum_i sat[i]*log(d - a[i]/f) - quad*f**2``.  The
    derivative is strictly decreasing on the domain and spans +inf to -inf, so
    the root is unique; plain bisection on a doubling bracket finds it.

    All of ``sat``, ``a`` must be positive, ``d`` positive, ``quad`` strictly
    positive.  Returns the stationary frequency.
    """
    if quad <= 0.0:
        raise ValueError("quad must be strictly positive")
    amax = a[0]
    for i in range(1, len(a)):
        if a[i] > amax:
            amax = a[i]
    lo = (amax / d) * (1.0 + 1e-12)
    hi = 2.0 * lo if 2.0 * lo > 1.0 else 1.0
    expansions = 0
    while _deriv(sat, a, d, quad, hi) > 0.0:
        lo = hi
        hi = 2.0 * hi
        expansions += 1
        if expansions > 200:
            raise ConvergenceError("derivative stayed positive while expanding the bracket", residual=hi)
    for _ in range(max_iter):
        if hi - lo <= rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if _deriv(sat, a, d, quad, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def best_menu_on_grid(grid, min_idx, pot, cs, sat, lin, npop, zeta, mu, d, e_com, r_max):
    """Exhaustive search for the best monotone menu on a frequency grid.

    Enumerates every index tuple ``i_1 <= i_2 <= ... <= i_m`` with
    ``i_n >= min_idx[n]`` over the ascending ``grid``, prices each tuple with
    the minimal incentive-compatible reward ladder, discards tuples whose
    expected reward bill exceeds ``r_max``, and keeps the best expected
    publisher profit.  Ties go to the lexicographically smallest tuple.

    Per-type inputs: ``pot`` (iteration ratio), ``cs`` (cycles*samples),
    ``sat`` (population*share*satisfaction weight), ``lin``
    (population*share*reward unit cost), ``npop`` (population*share).
    Scalars: ``zeta`` capacitance, ``mu`` energy weight, ``d`` deadline slack
    budget, ``e_com`` per-update communication energy, ``r_max`` reward budget.

    Returns ``(best_profit, best_idx)``; ``best_profit`` is ``-inf`` and
    ``best_idx`` all ``-1`` when no tuple is affordable.
    """
    m = len(pot)
    g = len(grid)
    idx = np.zeros(m, dtype=np.longlong)
    energy = np.zeros(m)
    reward = np.zeros(m)
    spent = np.zeros(m)
    profit = np.zeros(m)
    best_idx = np.full(m, -1, dtype=np.longlong)
    best_profit = -math.inf
    budget_cap = r_max * (1.0 + 1e-12)

    level = 0
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
            p = sat[0] * math.log(d - pot[0] * cs[0] / f) - lin[0] * r
        else:
            r = reward[level - 1] + mu * pot[level] * (e - energy[level - 1])
            s = spent[level - 1] + npop[level] * r
            p = profit[level - 1] + sat[level] * math.log(d - pot[level] * cs[level] / f) - lin[level] * r
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
    return best_profit, best_idx
