"""Command-line interface for the sweep experiments.

Subcommands map one-to-one onto the experiment runners; a flat key-value
config file can pre-set any option and CLI flags override it.  Exit
codes: 0 success, 1 configuration error, 2 numerical contract violation
(unitarity or oracle cross-check failure).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .experiments import (
    ConfigError,
    SweepConfig,
    run_cartesian_sweeps,
    run_fid_vs_time,
    run_mono_surface,
    run_solid_angle,
    run_sphere_surface,
    write_table,
)
from .propagator import NumericalContractError
from .selftest import run_selftest

CONFIG_SCHEMA = {
    "experiment": "experiment id (set implicitly by the subcommand)",
    "seed": "int, master seed for all randomness",
    "realizations": "int, noise realizations per grid point",
    "workers": "int, parallel worker processes (results identical for any value)",
    "fine": "bool, use the dense grid presets",
    "phi_max": "float, equatorial arc of the loop in radians (default pi/2)",
    "out": "path of the output CSV",
    "k": "int, optimal-time index (sphere-surface)",
    "k_list": "comma list of ints in 1..4 (cartesian-sweep)",
    "noise.amplitude": "float, monochromatic probe strength (fid-vs-time)",
    "noise.epsilon": "float, cartesian noise strength",
    "noise.eta_list": "comma list of probe frequencies (fid-vs-time)",
    "grid.time": "operational-time grid",
    "grid.eta": "probe-frequency grid (mono-surface)",
    "grid.amplitude": "probe-amplitude grid (mono-surface)",
    "grid.gamma_s": "re-scaled angular-noise amplitude grid (sphere-surface)",
    "grid.rate": "switching-rate grid, inverse tau_step",
    "grid.n": "fluctuation-count grid (solid-angle)",
}

_GRID_KEYS = {"grid.time", "grid.eta", "grid.amplitude", "grid.gamma_s", "grid.rate", "grid.n"}

_CONFIG_EPILOG = "config file keys (one `key = value` per line, '#' comments):\n" + "\n".join(
    f"  {key:18s} {help_}" for key, help_ in CONFIG_SCHEMA.items()
)


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ConfigError (exit code 1)."""

    def error(self, message):
        raise ConfigError(message)


def _parse_grid(raw: str) -> tuple[float, ...]:
    """Grid literal: `a,b,c` or `lo:hi:step` (hi inclusive within rounding)."""
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range syntax is lo:hi:step, got {raw!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ConfigError(f"bad range {raw!r}")
        n = int(round((hi - lo) / step))
        values = tuple(round(lo + i * step, 12) for i in range(n + 1))
        return tuple(v for v in values if v <= hi + 1e-9)
    try:
        return tuple(float(p) for p in raw.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad grid literal {raw!r}: {exc}") from None


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean {raw!r}")


def parse_config_file(path) -> dict[str, str]:
    """Read a flat `key = value` config file into a raw string mapping."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _config_from_values(experiment: str, values: dict[str, str]) -> SweepConfig:
    kwargs: dict = {"experiment": experiment}
    try:
        if "seed" in values:
            kwargs["seed"] = int(values["seed"])
        if "realizations" in values:
            kwargs["n_realizations"] = int(values["realizations"])
        if "workers" in values:
            kwargs["workers"] = int(values["workers"])
        if "fine" in values:
            kwargs["fine"] = _parse_bool(values["fine"])
        if "phi_max" in values:
            kwargs["phi_max"] = float(values["phi_max"])
        if "out" in values:
            kwargs["out"] = values["out"]
        if "k" in values:
            kwargs["k"] = int(values["k"])
        if "k_list" in values:
            kwargs["k_list"] = tuple(int(v) for v in values["k_list"].split(","))
        if "noise.amplitude" in values:
            kwargs["amplitude"] = float(values["noise.amplitude"])
        if "noise.epsilon" in values:
            kwargs["epsilon"] = float(values["noise.epsilon"])
        if "noise.eta_list" in values:
            kwargs["eta_list"] = _parse_grid(values["noise.eta_list"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    grid_fields = {
        "grid.time": "time_grid",
        "grid.eta": "eta_grid",
        "grid.amplitude": "amplitude_grid",
        "grid.gamma_s": "gamma_s_grid",
        "grid.rate": "rate_grid",
        "grid.n": "n_grid",
    }
    for key, fieldname in grid_fields.items():
        if key in values:
            grid = _parse_grid(values[key])
            if fieldname == "n_grid":
                grid = tuple(int(v) for v in grid)
            kwargs[fieldname] = grid
    return SweepConfig(**kwargs)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="config file (flat key = value lines)")
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--realizations", type=int, help="noise realizations per grid point")
    sub.add_argument("--workers", type=int, help="parallel worker processes")
    sub.add_argument("--fine", action="store_true", default=None, help="dense grid presets")
    sub.add_argument("--phi-max", type=float, help="equatorial arc of the loop (radians)")
    sub.add_argument("--out", help="output CSV path")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="tripodsim",
        description="Holonomic-gate robustness sweeps for the four-level tripod system.",
        epilog=_CONFIG_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"tripodsim {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (
        ("fid-vs-time", "fidelity vs operational time, noiseless + monochromatic probes"),
        ("mono-surface", "fidelity surface vs probe frequency and amplitude"),
        ("sphere-surface", "fidelity surface vs angular-noise amplitude and rate"),
        ("cartesian-sweep", "fidelity vs switching rate for the optimal times"),
        ("solid-angle", "solid-angle spread of noisy loops vs fluctuation count"),
    ):
        sub = subs.add_parser(name, help=help_)
        _add_common_flags(sub)
        if name == "sphere-surface":
            sub.add_argument("--k", type=int, help="optimal-time index (default 1)")
        if name == "cartesian-sweep":
            sub.add_argument("--k", help="comma list of optimal-time indices (default 1,2,3,4)")

    selftest = subs.add_parser("selftest", help="run the built-in oracle cross-checks")
    selftest.add_argument("--seed", type=int, default=2024, help="seed for the checks")
    return parser


def _merge_cli(values: dict[str, str], args: argparse.Namespace, command: str) -> None:
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.realizations is not None:
        values["realizations"] = str(args.realizations)
    if args.workers is not None:
        values["workers"] = str(args.workers)
    if args.fine:
        values["fine"] = "true"
    if args.phi_max is not None:
        values["phi_max"] = repr(args.phi_max)
    if args.out is not None:
        values["out"] = args.out
    if getattr(args, "k", None) is not None:
        if command == "cartesian-sweep":
            values["k_list"] = args.k
        else:
            values["k"] = str(args.k)


_EXPERIMENT_IDS = {
    "fid-vs-time": "fid_vs_time",
    "mono-surface": "mono_surface",
    "sphere-surface": "sphere_surface",
    "cartesian-sweep": "cartesian_vs_freq",
    "solid-angle": "solid_angle_vs_N",
}


def _run_command(args: argparse.Namespace) -> int:
    if args.command == "selftest":
        ok = run_selftest(seed=args.seed, report=print)
        return 0 if ok else 2

    values = parse_config_file(args.config) if args.config else {}
    _merge_cli(values, args, args.command)
    cfg = _config_from_values(_EXPERIMENT_IDS[args.command], values)
    out = Path(cfg.out) if cfg.out else Path(f"{cfg.experiment}.csv")

    if args.command == "fid-vs-time":
        tables = [run_fid_vs_time(cfg)]
        paths = [out]
    elif args.command == "mono-surface":
        tables = [run_mono_surface(cfg)]
        paths = [out]
    elif args.command == "sphere-surface":
        tables = [run_sphere_surface(cfg)]
        paths = [out]
    elif args.command == "cartesian-sweep":
        by_rate, by_count = run_cartesian_sweeps(cfg)
        tables = [by_rate, by_count]
        paths = [out, out.with_name(out.stem + "_by_count" + out.suffix)]
    else:
        tables = [run_solid_angle(cfg)]
        paths = [out]

    for table, path in zip(tables, paths):
        written = write_table(table, path)
        print(f"wrote {len(table.rows)} rows to {written}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run_command(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalContractError as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
