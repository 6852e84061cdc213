"""Command-line front end.

Subcommands: simulate, ensemble, verify, convergence, catalog.  Exit
codes: 0 success, 1 usage or configuration error, 2 verification found
no applicable certificate.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Optional, Sequence

import numpy as np

from .catalog import CATALOG
from .integrate import estimate_strong_order, simulate_ensemble, simulate_path
from .lyapunov import DEFAULT_DOMAIN, verify_nonexplosion
from .output import (
    write_convergence_json,
    write_ensemble_csv,
    write_ensemble_json,
    write_trajectory_csv,
)
from .runconfig import ConfigError, RunConfig, check_output_paths, load_config
from .svgplot import render_svg
from .system import reduce_to_phase_system
from .transform import build_transformed_system

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNVERIFIED = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="TOML configuration file")
    p.add_argument("--model", help="catalog model name (or 'custom' with a config file)")
    p.add_argument("--preset", help="named reference parameter set for the model")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="model parameter override (repeatable)")
    p.add_argument("--seed", type=int, help="RNG seed (wins over config and environment)")


def _add_integration(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--T", type=float, dest="T", help="time horizon")
    p.add_argument("--rmax", type=float, dest="R_max", help="explosion radius")
    p.add_argument("--stride", type=int, help="record every k-th step")
    p.add_argument("--initial", help="comma-separated initial state x_1..x_n,v_1..v_n")
    p.add_argument("--representation", choices=("direct", "transformed"),
                   help="integrate the phase system directly or in sheared coordinates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochosc",
        description="Second-order stochastic oscillators: simulation and "
                    "non-explosion certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one path, write CSV (and SVG)")
    _add_common(p)
    _add_integration(p)
    p.add_argument("--csv", dest="csv_path", help="trajectory CSV path")
    p.add_argument("--svg", dest="svg_path", help="plot SVG path")

    p = sub.add_parser("ensemble", help="integrate many paths, write summary CSV + JSON")
    _add_common(p)
    _add_integration(p)
    p.add_argument("--paths", type=int, dest="n_paths", help="number of paths")
    p.add_argument("--workers", type=int, help="parallel workers")
    p.add_argument("--csv", dest="csv_path", help="summary CSV path")
    p.add_argument("--json", dest="json_path", help="statistics JSON path")

    p = sub.add_parser("verify", help="construct a non-explosion certificate")
    _add_common(p)
    p.add_argument("--json", dest="json_path", help="certificate JSON path")
    p.add_argument("--report", dest="report_path", help="text report path")
    p.add_argument("--rcheck", type=float, dest="R_check",
                   help="half-width of the scanned box")
    p.add_argument("--grid-points", type=int, dest="points_per_axis",
                   help="grid points per axis")

    p = sub.add_parser("convergence", help="estimate the strong convergence order")
    _add_common(p)
    p.add_argument("--T", type=float, dest="T", help="time horizon")
    p.add_argument("--rmax", type=float, dest="R_max", help="explosion radius")
    p.add_argument("--initial", help="comma-separated initial state")
    p.add_argument("--paths", type=int, dest="n_paths", help="number of coupled paths")
    p.add_argument("--levels", type=int, help="number of dyadic levels")
    p.add_argument("--dt-fine", type=float, dest="dt_fine", help="finest time step")
    p.add_argument("--json", dest="json_path", help="order report JSON path")

    sub.add_parser("catalog", help="list built-in models")
    return parser


def _parse_params(pairs: Sequence[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--param needs KEY=VALUE, got {pair!r}")
        key, _, value = pair.partition("=")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--param {key}: {value!r} is not a number")
    return out


def _parse_initial(text: Optional[str]):
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"--initial must be comma-separated numbers, got {text!r}")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "model": getattr(args, "model", None),
        "preset": getattr(args, "preset", None),
        "params": _parse_params(getattr(args, "param", [])),
        "seed": getattr(args, "seed", None),
        "representation": getattr(args, "representation", None),
        "dt": getattr(args, "dt", None),
        "T": getattr(args, "T", None),
        "R_max": getattr(args, "R_max", None),
        "stride": getattr(args, "stride", None),
        "initial": _parse_initial(getattr(args, "initial", None)),
        "n_paths": getattr(args, "n_paths", None),
        "workers": getattr(args, "workers", None),
        "levels": getattr(args, "levels", None),
        "dt_fine": getattr(args, "dt_fine", None),
        "csv_path": getattr(args, "csv_path", None),
        "svg_path": getattr(args, "svg_path", None),
        "report_path": getattr(args, "report_path", None),
        "json_path": getattr(args, "json_path", None),
        "R_check": getattr(args, "R_check", None),
        "points_per_axis": getattr(args, "points_per_axis", None),
    }
    return load_config(getattr(args, "config", None), overrides)


def _system_for(config: RunConfig):
    """The phase system to integrate plus the shear data when applicable."""
    if config.representation == "transformed":
        try:
            ts = build_transformed_system(config.model)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        return ts.system, ts
    return reduce_to_phase_system(config.model), None


def _shear_initial(z0: np.ndarray, ts) -> np.ndarray:
    """Original coordinates (x, v) -> sheared coordinates (x, v + F(x))."""
    if ts is None:
        return z0
    z0 = np.array(z0, dtype=float, copy=True)
    n = ts.system.n
    for i in range(n):
        z0[n + i] += ts.F[i](z0[i])
    return z0


def _unshear_states(states: np.ndarray, ts) -> np.ndarray:
    """Sheared rows (x, y) -> original rows (x, y - F(x))."""
    out = np.array(states, copy=True)
    n = ts.system.n
    for i in range(n):
        out[..., n + i] -= ts.F[i](states[..., i])
    return out


def cmd_simulate(config: RunConfig) -> int:
    config.csv_path = config.csv_path or f"{config.model_name}_path.csv"
    check_output_paths(config)
    system, ts = _system_for(config)
    z0 = _shear_initial(config.initial_state(), ts)
    traj = simulate_path(system, z0, config.integration, config.seed)
    if ts is not None:
        traj = dataclasses.replace(traj, states=_unshear_states(traj.states, ts))
    with open(config.csv_path, "w", newline="\n") as fh:
        write_trajectory_csv(traj, fh)
    print(f"wrote {config.csv_path} ({len(traj.times)} rows)")
    if config.svg_path is not None:
        with open(config.svg_path, "w", newline="\n") as fh:
            fh.write(render_svg(traj, config.model_name))
        print(f"wrote {config.svg_path}")
    if traj.escaped:
        print(f"warning: path escaped at t = {traj.escape_time:.6g}",
              file=sys.stderr)
    return EXIT_OK


def cmd_ensemble(config: RunConfig) -> int:
    config.csv_path = config.csv_path or f"{config.model_name}_ensemble.csv"
    config.json_path = config.json_path or f"{config.model_name}_ensemble.json"
    check_output_paths(config)
    system, ts = _system_for(config)
    z0 = _shear_initial(config.initial_state(), ts)
    res = simulate_ensemble(system, z0, config.integration, config.seed,
                            config.n_paths, workers=config.workers)
    with open(config.csv_path, "w", newline="\n") as fh:
        write_ensemble_csv(res, fh)
    with open(config.json_path, "w", newline="\n") as fh:
        write_ensemble_json(res, config.model_name, fh,
                            representation=config.representation)
    print(f"wrote {config.csv_path} and {config.json_path}; "
          f"{res.escape_count} of {res.n_paths} paths escaped")
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    config.json_path = config.json_path or f"{config.model_name}_certificate.json"
    check_output_paths(config)
    domain = config.domain or DEFAULT_DOMAIN
    cert = verify_nonexplosion(config.model, domain=domain)
    with open(config.json_path, "w", newline="\n") as fh:
        fh.write(cert.to_json())
        fh.write("\n")
    print(cert.report_text)
    if config.report_path is not None:
        with open(config.report_path, "w", newline="\n") as fh:
            fh.write(cert.report_text)
            fh.write("\n")
    print(f"wrote {config.json_path}")
    return EXIT_OK if cert.verified else EXIT_UNVERIFIED


def cmd_convergence(config: RunConfig) -> int:
    config.json_path = config.json_path or f"{config.model_name}_convergence.json"
    check_output_paths(config)
    system, ts = _system_for(config)
    z0 = _shear_initial(config.initial_state(), ts)
    res = estimate_strong_order(
        system, z0, T=config.integration.T,
        seed=config.seed, n_paths=config.n_paths, levels=config.levels,
        dt_fine=config.dt_fine, R_max=config.integration.R_max,
    )
    with open(config.json_path, "w", newline="\n") as fh:
        write_convergence_json(res, fh, model=config.model_name)
    flag = "" if res.reliable else " (unreliable: too many escapes)"
    print(f"order estimate {res.order:.4f}{flag}; wrote {config.json_path}")
    return EXIT_OK


def cmd_catalog() -> int:
    width = max(len(name) for name in CATALOG)
    for name, entry in sorted(CATALOG.items()):
        defaults = ", ".join(f"{k}={v}" for k, v in entry.default_params.items())
        print(f"{name:<{width}}  {entry.description}")
        if defaults:
            print(f"{'':<{width}}  defaults: {defaults}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "catalog":
        return cmd_catalog()
    try:
        config = _config_from_args(args)
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "ensemble":
            return cmd_ensemble(config)
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "convergence":
            return cmd_convergence(config)
    except (ConfigError, OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
