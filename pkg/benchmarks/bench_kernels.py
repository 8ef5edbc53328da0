#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot spots behind the solver and the brute-force oracle:

* ``stationary_point`` — the per-type bisection the reduced program calls
  inside every budget-multiplier evaluation, and
* ``best_menu_on_grid`` — the monotone-tuple search the oracle runs.

Usage::

    python benchmarks/bench_kernels.py [--repeats N] [--grid-sizes 40,80,120]
"""

import argparse
import importlib
import time

import numpy as np

from fedcontract import ScenarioConfig, SystemParams, build_types
from fedcontract.costmodel import (
    effective_comm_energy,
    effective_comm_time,
)
from fedcontract.feasibility import _oracle_grid
from fedcontract.solver import g_coefficients


def load_backends():
    backends = {}
    for name, module in (("pure", "fedcontract._core_py"), ("compiled", "fedcontract._core")):
        try:
            backends[name] = importlib.import_module(module)
        except ImportError:
            print(f"note: {module} not importable, skipping the {name} backend")
    return backends


def market_arrays(type_count):
    params = SystemParams()
    profiles = build_types(ScenarioConfig(type_count=type_count), params)
    theta = np.array([p.type_value for p in profiles])
    probs = np.array([p.probability for p in profiles])
    pot = params.iteration_coeff / theta
    cs = np.array([p.cpu_cycles * p.samples for p in profiles])
    sat = params.population * probs * params.satisfaction_weight
    d = params.t_max - effective_comm_time(params)
    a = pot * cs
    g = g_coefficients(probs, theta, params.iteration_coeff)
    quad = params.population * params.reward_unit_cost * params.energy_weight * (
        params.capacitance * g * cs
    )
    return params, profiles, pot, cs, sat, d, a, quad


def timeit(fn, repeats):
    fn()  # warm up
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_stationary(backends, repeats):
    params, profiles, pot, cs, sat, d, a, quad = market_arrays(8)
    rows = []
    for name, mod in backends.items():
        def run():
            for n in range(len(profiles)):
                mod.stationary_point(sat[n : n + 1], a[n : n + 1], d, float(quad[n]), 1e-10)

        per_call = timeit(run, repeats) / len(profiles)
        rows.append((name, per_call))
    return rows


def bench_menu_search(backends, grid_size, repeats):
    params, profiles, pot, cs, sat, d, a, quad = market_arrays(3)
    grid = _oracle_grid(profiles, params, grid_size)
    min_idx = np.searchsorted(grid, a / d, side="right").astype(np.longlong)
    probs = np.array([p.probability for p in profiles])
    npop = params.population * probs
    lin = npop * params.reward_unit_cost
    rows = []
    for name, mod in backends.items():
        def run():
            mod.best_menu_on_grid(
                grid,
                min_idx,
                pot,
                cs,
                sat,
                lin,
                npop,
                params.capacitance,
                params.energy_weight,
                d,
                effective_comm_energy(params),
                params.r_max,
            )

        rows.append((name, timeit(run, max(1, repeats // 4))))
    return rows


def print_table(title, rows, unit_scale, unit):
    print(f"\n{title}")
    base = dict(rows).get("pure")
    for name, seconds in rows:
        speedup = f"  ({base / seconds:5.1f}x vs pure)" if base and name != "pure" else ""
        print(f"  {name:>8}: {seconds * unit_scale:10.2f} {unit}{speedup}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200, help="timing repetitions")
    parser.add_argument(
        "--grid-sizes", default="40,80", help="comma-separated oracle grid resolutions"
    )
    args = parser.parse_args()
    backends = load_backends()
    if not backends:
        raise SystemExit("no kernel backend importable; install the package first")

    print(f"backends under test: {', '.join(backends)}")
    print_table(
        "stationary_point (8-type market, per solve)",
        bench_stationary(backends, args.repeats),
        1e6,
        "us",
    )
    for grid_size in (int(tok) for tok in args.grid_sizes.split(",") if tok.strip()):
        rows = bench_menu_search(backends, grid_size, args.repeats)
        print_table(
            f"best_menu_on_grid (3 types, grid {grid_size})",
            rows,
            1e3,
            "ms",
        )


if __name__ == "__main__":
    main()
