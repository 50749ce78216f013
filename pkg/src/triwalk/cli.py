"""Command-line interface: simulate walks, tabulate the limit law, compare.

Subcommands
-----------
simulate    evolve a walk and write its position distribution
density     tabulate the closed-form limit density on a grid
compare     evolve, then report distances to the limit law (JSON)
sweep       distributions at a fixed time across a range of coin angles
three-coin  alias of ``simulate --three-coin``

Data files are deterministic: identical configuration yields byte-identical
output.  CSV files carry ``#``-prefixed header lines; JSON files are a
single document ``{"config": ..., "data": ...}`` (or ``"report"`` for
``compare``, whose timings are the one intentionally non-reproducible
field).  Floats are written with 17 significant digits, which round-trips
doubles exactly.  Angles are radians throughout.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .analysis import compare_distribution
from .coins import general_coin, rotation_coin
from .errors import WalkError
from .limit import ENDPOINT_EXCLUSION, LimitModel, limit_density, support_intervals
from .walk import (
    InitialSpin,
    StepProtocol,
    canonical_protocol,
    distribution,
    evolve,
    step,
    symmetric_spin,
    three_coin_protocol,
    three_period_protocol,
)

SPIN_PARSE_TOLERANCE = 1e-9

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

_WORKERS_ENV = "TRIWALK_SWEEP_WORKERS"


class ConfigError(Exception):
    """Invalid command-line configuration (exit code 2)."""


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise ConfigError(f"{what} must be finite, got {value!r}")
    return value


def _parse_pair(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected 're,im', got {text!r}")
    try:
        re, im = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"bad complex pair {text!r}: {exc}") from None
    return complex(_finite(re, "amplitude"), _finite(im, "amplitude"))


def _parse_coin_params(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"expected 'gamma,delta,xi,theta', got {text!r}")
    try:
        g, d, x, t = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad coin parameters {text!r}: {exc}") from None
    return tuple(_finite(v, "coin parameter") for v in (g, d, x, t))


def _parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected 'lo:hi:n', got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}: {exc}") from None
    _finite(lo, "sweep bound")
    _finite(hi, "sweep bound")
    if n < 2:
        raise ConfigError("sweep needs at least 2 angles")
    if not hi > lo:
        raise ConfigError("sweep range must have hi > lo")
    return lo, hi, n


def _resolve_spin(args) -> InitialSpin:
    if getattr(args, "spin", None) == "symmetric":
        if args.alpha is not None or args.beta is not None:
            raise ConfigError("give either --spin symmetric or --alpha/--beta")
        return symmetric_spin()
    if args.alpha is None and args.beta is None:
        return symmetric_spin()
    if args.alpha is None or args.beta is None:
        raise ConfigError("--alpha and --beta must be given together")
    alpha = _parse_pair(args.alpha)
    beta = _parse_pair(args.beta)
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if not math.isfinite(norm) or abs(norm - 1.0) > SPIN_PARSE_TOLERANCE:
        raise ConfigError(
            f"spin is not normalised: |alpha|^2+|beta|^2 = {norm!r}"
        )
    scale = math.sqrt(norm)
    return InitialSpin(alpha / scale, beta / scale)


def _spin_config(spin: InitialSpin) -> dict:
    return {
        "alpha": [spin.alpha.real, spin.alpha.imag],
        "beta": [spin.beta.real, spin.beta.imag],
    }


def _open_output(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path, command: str, config: dict, columns: list[str], rows) -> None:
    handle, close = _open_output(path)
    try:
        handle.write(f"# triwalk {command}\n")
        for key, value in config.items():
            handle.write(f"# {key}={json.dumps(value)}\n")
        handle.write(f"# columns: {','.join(columns)}\n")
        for row in rows:
            handle.write(
                ",".join(
                    str(v) if isinstance(v, int) else _fmt(v) for v in row
                )
                + "\n"
            )
    finally:
        if close:
            handle.close()


def _write_json(path, config: dict, payload_key: str, payload) -> None:
    handle, close = _open_output(path)
    try:
        json.dump({"config": config, payload_key: payload}, handle, indent=1)
        handle.write("\n")
    finally:
        if close:
            handle.close()


def _emit_table(args, command, config, columns, rows) -> int:
    if args.format == "csv":
        _write_csv(args.output, command, config, columns, rows)
    else:
        _write_json(
            args.output,
            config,
            "data",
            {"columns": columns, "rows": [list(r) for r in rows]},
        )
    return EXIT_OK


def _simulate_protocol(args) -> tuple[StepProtocol, dict]:
    three = getattr(args, "three_coin", False) or args.command == "three-coin"
    coins = getattr(args, "coin", None) or []
    if three:
        if args.theta is not None:
            raise ConfigError("--theta conflicts with three-coin mode")
        if len(coins) != 3:
            raise ConfigError("three-coin mode needs exactly three --coin options")
        params = [_parse_coin_params(c) for c in coins]
        protocol = three_coin_protocol(*(general_coin(*p) for p in params))
        return protocol, {"coins": [list(p) for p in params]}
    if coins:
        raise ConfigError("--coin here requires --three-coin (or the three-coin subcommand)")
    if args.theta is None:
        raise ConfigError("--theta is required")
    theta = _finite(args.theta, "--theta")
    return three_period_protocol(theta), {"theta": theta}


def _model_from(args) -> tuple[LimitModel, dict]:
    spin = _resolve_spin(args)
    if (args.theta is None) == (args.coin is None):
        raise ConfigError("give exactly one of --theta or --coin")
    if args.theta is not None:
        coin = rotation_coin(_finite(args.theta, "--theta"))
        coin_cfg = {"theta": args.theta}
    else:
        params = _parse_coin_params(args.coin)
        coin = general_coin(*params)
        coin_cfg = {"coin": list(params)}
    return LimitModel(coin, spin), coin_cfg


def _checkpoints(steps: int, every: int) -> list[int]:
    points = list(range(0, steps + 1, every))
    if points[-1] != steps:
        points.append(steps)
    return points


def cmd_simulate(args) -> int:
    if args.steps < 0:
        raise ConfigError("--steps must be nonnegative")
    if args.every is not None and args.every < 1:
        raise ConfigError("--every must be positive")
    if args.theta_sweep is not None:
        if getattr(args, "three_coin", False) or getattr(args, "coin", None):
            raise ConfigError("--theta-sweep conflicts with three-coin mode")
        return _run_sweep(args)
    spin = _resolve_spin(args)
    protocol, coin_cfg = _simulate_protocol(args)
    config = {
        "subcommand": "simulate",
        **coin_cfg,
        **_spin_config(spin),
        "steps": args.steps,
        "every": args.every,
        "format": args.format,
    }
    if args.every is None:
        dist = distribution(evolve(spin, protocol, args.steps))
        rows = [
            (int(x), float(p))
            for x, p in zip(dist.positions, dist.probabilities)
        ]
        return _emit_table(args, "simulate", config, ["x", "p"], rows)
    rows = []
    wanted = set(_checkpoints(args.steps, args.every))
    state = evolve(spin, protocol, 0)
    for t in range(args.steps + 1):
        if t:
            state = step(state, protocol.coins[(t - 1) % protocol.period])
        if t in wanted:
            dist = distribution(state)
            rows.extend(
                (t, int(x), float(p))
                for x, p in zip(dist.positions, dist.probabilities)
            )
    return _emit_table(args, "simulate", config, ["t", "x", "p"], rows)


def _density_rows(model: LimitModel, grid: int) -> list[tuple[float, float]]:
    """Midpoint grids per region between the support endpoints, over (-1, 1).

    Points are strictly inside each region, so the density is evaluated
    away from its endpoint singularities; regions off the support emit
    explicit zero rows.
    """
    endpoints = support_intervals(model).endpoint_values()
    boundaries = [-1.0, *endpoints.tolist(), 1.0]
    rows: list[tuple[float, float]] = []
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        length = hi - lo
        if length <= 2.0 * ENDPOINT_EXCLUSION:
            continue
        count = max(1, round(grid * length / 2.0))
        for i in range(count):
            x = lo + length * (i + 0.5) / count
            rows.append((x, float(limit_density(model, x))))
    return rows


def cmd_density(args) -> int:
    if args.grid < 2:
        raise ConfigError("--grid must be at least 2")
    model, coin_cfg = _model_from(args)
    intervals = support_intervals(model)
    config = {
        "subcommand": "density",
        **coin_cfg,
        **_spin_config(model.spin),
        "grid": args.grid,
        "format": args.format,
        "support": list(intervals.endpoint_values()),
    }
    rows = _density_rows(model, args.grid)
    return _emit_table(args, "density", config, ["x", "f"], rows)


def cmd_compare(args) -> int:
    if args.steps < 3:
        raise ConfigError("--steps must be at least 3")
    model, coin_cfg = _model_from(args)
    config = {
        "subcommand": "compare",
        **coin_cfg,
        **_spin_config(model.spin),
        "steps": args.steps,
    }
    protocol = canonical_protocol(model.coin)
    t0 = time.perf_counter()
    state = evolve(model.spin, protocol, args.steps)
    t_evolve = time.perf_counter() - t0
    t0 = time.perf_counter()
    report = compare_distribution(model, distribution(state), args.steps)
    t_analyse = time.perf_counter() - t0
    payload = {
        "time": report.time,
        "coin": report.coin_label,
        "spin": _spin_config(model.spin),
        "ks_distance": report.ks_distance,
        "moment_errors": [[r, e] for r, e in report.moment_errors],
        "gap_mass": report.gap_mass if report.gap_mass is not None else "no-gap",
        "mirror_asymmetry": report.mirror_asymmetry,
        "timings": {"evolve_s": t_evolve, "analysis_s": t_analyse},
    }
    _write_json(args.output, config, "report", payload)
    return EXIT_OK


def _run_sweep(args) -> int:
    lo, hi, count = _parse_range(args.theta_sweep)
    if args.steps < 0:
        raise ConfigError("--steps must be nonnegative")
    spin = _resolve_spin(args)
    thetas = [lo + (hi - lo) * i / (count - 1) for i in range(count)]
    config = {
        "subcommand": "sweep",
        "theta_sweep": [lo, hi, count],
        **_spin_config(spin),
        "steps": args.steps,
        "format": args.format,
    }

    def one(theta: float):
        dist = distribution(evolve(spin, three_period_protocol(theta), args.steps))
        return [
            (theta, int(x), float(p))
            for x, p in zip(dist.positions, dist.probabilities)
        ]

    workers = int(os.environ.get(_WORKERS_ENV, "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(one, thetas))
    else:
        chunks = [one(theta) for theta in thetas]
    rows = [row for chunk in chunks for row in chunk]
    return _emit_table(args, "sweep", config, ["theta", "x", "p"], rows)


def cmd_sweep(args) -> int:
    return _run_sweep(args)


def _add_spin_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", help="initial spin-0 amplitude as 're,im'")
    parser.add_argument("--beta", help="initial spin-1 amplitude as 're,im'")
    parser.add_argument(
        "--spin",
        choices=["symmetric"],
        help="shorthand: 'symmetric' is (1/sqrt(2), i/sqrt(2)), the default",
    )


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", help="output path (default: stdout)")
    parser.add_argument(
        "--format", choices=["csv", "json"], default="csv", help="output format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triwalk",
        description=(
            "Two-state quantum walk on the line under a periodic coin "
            "sequence, with its closed-form long-time law."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="evolve a walk and write (x, p) rows")
    sim.add_argument("--theta", type=float, help="rotation-coin angle (radians)")
    sim.add_argument(
        "--three-coin",
        action="store_true",
        help="use three general coins (give --coin three times)",
    )
    sim.add_argument(
        "--coin",
        action="append",
        help="general coin as 'gamma,delta,xi,theta' (three-coin mode)",
    )
    sim.add_argument("--steps", type=int, required=True, help="number of steps")
    sim.add_argument(
        "--every",
        type=int,
        help="also write intermediate times every N steps as (t, x, p) rows",
    )
    sim.add_argument(
        "--theta-sweep",
        help="sweep rotation angles 'lo:hi:n' at fixed --steps, rows (theta, x, p)",
    )
    _add_spin_options(sim)
    _add_output_options(sim)
    sim.set_defaults(func=cmd_simulate)

    three = sub.add_parser("three-coin", help="simulate with three general coins")
    three.add_argument(
        "--coin",
        action="append",
        required=True,
        help="general coin as 'gamma,delta,xi,theta'; give exactly three",
    )
    three.add_argument("--steps", type=int, required=True)
    three.add_argument("--every", type=int)
    _add_spin_options(three)
    _add_output_options(three)
    three.set_defaults(func=cmd_simulate, theta=None, theta_sweep=None, three_coin=True)

    dens = sub.add_parser("density", help="tabulate the limit density as (x, f) rows")
    dens.add_argument("--theta", type=float, help="rotation-coin angle (radians)")
    dens.add_argument("--coin", help="general coin as 'gamma,delta,xi,theta'")
    dens.add_argument(
        "--grid", type=int, default=400, help="approximate number of grid rows"
    )
    _add_spin_options(dens)
    _add_output_options(dens)
    dens.set_defaults(func=cmd_density)

    comp = sub.add_parser(
        "compare", help="evolve and report distances to the limit law (JSON)"
    )
    comp.add_argument("--theta", type=float, help="rotation-coin angle (radians)")
    comp.add_argument("--coin", help="general coin as 'gamma,delta,xi,theta'")
    comp.add_argument("--steps", type=int, required=True)
    _add_spin_options(comp)
    comp.add_argument("--output", "-o", help="output path (default: stdout)")
    comp.set_defaults(func=cmd_compare)

    swp = sub.add_parser(
        "sweep", help="distributions at fixed time across a range of angles"
    )
    swp.add_argument(
        "--theta-sweep", required=True, help="angles as 'lo:hi:n' (n inclusive points)"
    )
    swp.add_argument("--steps", type=int, required=True)
    _add_spin_options(swp)
    _add_output_options(swp)
    swp.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"triwalk: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (WalkError, ArithmeticError) as exc:
        print(f"triwalk: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"triwalk: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
