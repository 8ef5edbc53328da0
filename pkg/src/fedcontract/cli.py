"""Command-line front end.

Subcommands cover the whole workflow: ``solve`` prices a market and audits
the result, ``verify`` re-audits a previously written menu, ``sweep-accuracy``
and ``sweep-types`` produce the two standard study CSVs, and ``oracle-check``
confronts the solver with the brute-force grid oracle.  All artifacts are
plain CSV/JSON/text with 12-significant-digit floats, so identical inputs
produce byte-identical outputs.  Exit codes: 0 success (and, where it
applies, feasible/within-bound), 1 a failed check or infeasible market,
2 bad configuration or usage.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .backend import backend_name
from .costmodel import ContractItem, SystemParams
from .errors import ConfigError, FedContractError
from .feasibility import brute_force_solve, feasibility_report, grid_resolution_bound
from .simulator import (
    ScenarioConfig,
    accuracy_sweep,
    build_types,
    run_scenario,
    type_count_sweep,
)
from .solver import solve

log = logging.getLogger("fedcontract")

_DEFAULT_LIMITS = "0.98,0.93,0.88,0.83,0.78"
_DEFAULT_COUNTS = "2,3,4,5,6,7,8,9,10"


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def _as_float(section: str, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _as_int(section: str, key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    return value


def parse_config(path: str | os.PathLike | None) -> tuple[ScenarioConfig, SystemParams]:
    """Load scenario and system settings from a JSON file.

    The file holds at most two objects, ``"scenario"`` and ``"params"``,
    whose keys mirror :class:`ScenarioConfig` and :class:`SystemParams`.
    Unknown sections or keys are rejected rather than ignored.  ``None``
    returns pure defaults.
    """
    if path is None:
        return ScenarioConfig(), SystemParams()
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - {"scenario", "params"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    def build(section: str, cls):
        data = raw.get(section, {})
        if not isinstance(data, dict):
            raise ConfigError(f"config section {section!r} must be a JSON object")
        fields = {f.name: f for f in dataclasses.fields(cls)}
        bad = set(data) - set(fields)
        if bad:
            raise ConfigError(f"unknown keys in {section!r}: {sorted(bad)}")
        kwargs = {}
        for key, value in data.items():
            tp = fields[key].type
            if value is None and "None" in str(tp):
                kwargs[key] = None
            elif str(tp).startswith("int") or key in ("type_count", "owner_count", "seed", "population"):
                kwargs[key] = _as_int(section, key, value)
            elif key == "assignment":
                if not isinstance(value, str):
                    raise ConfigError(f"{section}.{key} must be a string")
                kwargs[key] = value
            else:
                kwargs[key] = _as_float(section, key, value)
        try:
            return cls(**kwargs)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"invalid {section!r} settings: {exc}") from None

    return build("scenario", ScenarioConfig), build("params", SystemParams)


def dump_config(scenario: ScenarioConfig, params: SystemParams) -> dict:
    """The JSON-ready dictionary form of a configuration pair."""
    return {"scenario": dataclasses.asdict(scenario), "params": dataclasses.asdict(params)}


def emit_results(out_dir: str | os.PathLike, name: str, payload: dict) -> Path:
    """Write one deterministic JSON artifact and return its path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_feasibility(path: Path, report) -> None:
    lines = []
    for key in ("ir_ok", "ic_ok", "monotone_ok", "time_ok", "budget_ok"):
        lines.append(f"{key} {'true' if getattr(report, key) else 'false'}")
    for key in (
        "lowest_surplus",
        "ic_slack",
        "bottom_surplus",
        "ldic_max_abs_gap",
        "budget_spent",
        "expected_profit",
    ):
        lines.append(f"{key} {_fmt(getattr(report, key))}")
    lines.append(f"feasible {'true' if report.ok else 'false'}")
    path.write_text("\n".join(lines) + "\n")


def _apply_seed(scenario: ScenarioConfig, args) -> ScenarioConfig:
    if getattr(args, "seed", None) is not None:
        return dataclasses.replace(scenario, seed=args.seed)
    return scenario


def _cmd_solve(args) -> int:
    scenario, params = parse_config(args.config)
    scenario = _apply_seed(scenario, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run_scenario(scenario, params)
    audit = feasibility_report(result.menu.items, result.profiles, params, tol=args.tol)
    _write_csv(
        out / "menu.csv",
        ["type_index", "quality", "type_value", "probability", "cpu_freq", "reward"],
        [
            [
                str(profile.index),
                _fmt(profile.quality),
                _fmt(profile.type_value),
                _fmt(profile.probability),
                _fmt(item.cpu_freq),
                _fmt(item.reward),
            ]
            for profile, item in zip(result.profiles, result.menu.items)
        ],
    )
    _write_csv(
        out / "utilities.csv",
        ["type_index"] + [f"item_{k + 1}" for k in range(len(result.menu.items))],
        [
            [str(profile.index)] + [_fmt(u) for u in row]
            for profile, row in zip(result.profiles, result.utilities)
        ],
    )
    _write_feasibility(out / "feasibility.txt", audit)
    emit_results(
        out,
        "results.json",
        {
            "backend": backend_name(),
            "budget_spent": result.menu.budget_spent,
            "config": dump_config(scenario, params),
            "expected_profit": result.menu.expected_profit,
            "feasible": audit.ok,
            "realized_profit": result.realized_profit,
            "selections": [int(k) for k in result.selections],
            "shadow_price": result.menu.shadow_price,
            "type_counts": [int(k) for k in result.type_counts],
        },
    )
    log.info("solved %d-type market, profit %s", scenario.type_count, _fmt(result.menu.expected_profit))
    return 0 if audit.ok else 1


def _cmd_verify(args) -> int:
    scenario, params = parse_config(args.config)
    menu_path = Path(args.menu)
    if not menu_path.exists():
        raise ConfigError(f"menu file not found: {menu_path}")
    with open(menu_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError("menu file is empty")
    for required in ("cpu_freq", "reward"):
        if required not in rows[0]:
            raise ConfigError(f"menu file misses the {required!r} column")
    items = []
    for row in rows:
        try:
            items.append(ContractItem(cpu_freq=float(row["cpu_freq"]), reward=float(row["reward"])))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad menu row {row!r}: {exc}") from None
    profiles = build_types(scenario, params)
    if len(items) != len(profiles):
        raise ConfigError(
            f"menu has {len(items)} items but the configured market has {len(profiles)} types"
        )
    audit = feasibility_report(items, profiles, params, tol=args.tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_feasibility(out / "feasibility.txt", audit)
    return 0 if audit.ok else 1


def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"{what} must be a comma-separated list of numbers: {text!r}") from None
    if not values:
        raise ConfigError(f"{what} must not be empty")
    return values


def _cmd_sweep_accuracy(args) -> int:
    scenario, params = parse_config(args.config)
    scenario = _apply_seed(scenario, args)
    limits = _parse_float_list(args.limits, "--limits")
    try:
        rows = accuracy_sweep(limits, scenario, params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "accuracy_sweep.csv",
        ["quality_limit", "expected_profit", "realized_profit"],
        [
            [_fmt(row["quality_limit"]), _fmt(row["expected_profit"]), _fmt(row["realized_profit"])]
            for row in rows
        ],
    )
    return 0


def _cmd_sweep_types(args) -> int:
    scenario, params = parse_config(args.config)
    scenario = _apply_seed(scenario, args)
    try:
        counts = [int(tok) for tok in args.counts.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"--counts must be a comma-separated list of integers: {args.counts!r}") from None
    if not counts:
        raise ConfigError("--counts must not be empty")
    try:
        rows = type_count_sweep(counts, scenario, params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "type_count_sweep.csv",
        ["type_count", "contract_profit", "symmetric_profit", "asymmetric_profit"],
        [
            [
                str(row["type_count"]),
                _fmt(row["contract_profit"]),
                _fmt(row["symmetric_profit"]),
                _fmt(row["asymmetric_profit"]),
            ]
            for row in rows
        ],
    )
    return 0


def _cmd_oracle_check(args) -> int:
    scenario, params = parse_config(args.config)
    if args.types is not None:
        scenario = dataclasses.replace(scenario, type_count=args.types)
    profiles = build_types(scenario, params)
    menu = solve(profiles, params)
    try:
        oracle = brute_force_solve(profiles, params, grid_size=args.grid_size)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    bound = grid_resolution_bound(menu.freqs, oracle.grid, profiles, params)
    gap = abs(menu.expected_profit - oracle.expected_profit)
    # The bound and the gap evaluate the same menus through two different
    # summation routes, so allow relative float noise on top of the bound.
    tol = bound + 1e-9 * max(1.0, abs(menu.expected_profit))
    within = bool(gap <= tol)
    emit_results(
        Path(args.out),
        "oracle.json",
        {
            "backend": backend_name(),
            "gap": gap,
            "grid_bound": bound,
            "grid_size": int(args.grid_size),
            "oracle_profit": oracle.expected_profit,
            "solver_profit": menu.expected_profit,
            "tolerance": tol,
            "within_bound": within,
        },
    )
    return 0 if within else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fedcontract",
        description="Design, audit, and study contract menus for federated-learning data markets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, tol=True):
        p.add_argument("--config", default=None, help="JSON config with 'scenario'/'params' sections")
        p.add_argument("--out", default=".", help="directory for output artifacts")
        if seed:
            p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        if tol:
            p.add_argument("--tol", type=float, default=1e-9, help="feasibility check tolerance")

    p = sub.add_parser("solve", help="solve the configured market and audit the menu")
    common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="re-audit a previously written menu.csv")
    common(p, seed=False)
    p.add_argument("--menu", required=True, help="path to a menu.csv produced by 'solve'")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep-accuracy", help="profit versus top data-quality level")
    common(p, tol=False)
    p.add_argument("--limits", default=_DEFAULT_LIMITS, help="comma-separated quality ceilings, best first")
    p.set_defaults(func=_cmd_sweep_accuracy)

    p = sub.add_parser("sweep-types", help="compare schemes across menu sizes")
    common(p, tol=False)
    p.add_argument("--counts", default=_DEFAULT_COUNTS, help="comma-separated type counts")
    p.set_defaults(func=_cmd_sweep_types)

    p = sub.add_parser("oracle-check", help="confront the solver with the grid oracle")
    common(p, seed=False, tol=False)
    p.add_argument("--grid-size", type=int, default=220, help="frequency grid resolution")
    p.add_argument(
        "--types",
        type=int,
        default=3,
        help="confront on this many types (exhaustive search explodes with "
        "menu size); pass the configured market's size explicitly to use it",
    )
    p.set_defaults(func=_cmd_oracle_check)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    level = os.environ.get("FEDCONTRACT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"fedcontract: config error: {exc}", file=sys.stderr)
        return 2
    except FedContractError as exc:
        print(f"fedcontract: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
