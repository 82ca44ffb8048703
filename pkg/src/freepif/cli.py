"""Command line entry points.

Two subcommands:

    freepif run <config.toml> [--out DIR] [--threads N] [--seed S]
                              [--method pif|pic] [--precompute on|off]
    freepif study poisson|laplace|energy <config.toml> [--out DIR] [--threads N]

run integrates a beam scenario and writes diagnostics.csv (plus optional
field snapshots) under the output directory; study executes one of the
convergence sweeps and prints its table.  The default output root is the
FREEPIF_OUT environment variable, falling back to ./freepif_out, with one
subdirectory per config stem.  Failures exit nonzero after printing a
single "error: ..." line to stderr.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
from pathlib import Path

import numpy as np

from freepif.scenarios import (
    ScenarioConfig,
    energy_convergence_study,
    laplace_convergence_study,
    load_config,
    poisson_convergence_study,
    run,
)

OUT_ENV = "FREEPIF_OUT"

__all__ = ["OUT_ENV", "build_parser", "main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freepif",
        description="gridless Fourier particle simulator for 2D beams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="integrate a beam scenario")
    runp.add_argument("config", type=Path, help="TOML scenario file")
    runp.add_argument("--out", type=Path, default=None, help="output directory")
    runp.add_argument("--threads", type=int, default=None, help="FFT worker count")
    runp.add_argument("--seed", type=int, default=None, help="override the seed")
    runp.add_argument("--method", choices=("pif", "pic"), default=None)
    runp.add_argument(
        "--precompute",
        choices=("on", "off"),
        default=None,
        help="toggle the tabulated-kernel solver path",
    )

    studyp = sub.add_parser("study", help="run a convergence sweep")
    studyp.add_argument("kind", choices=("poisson", "laplace", "energy"))
    studyp.add_argument("config", type=Path, help="TOML scenario file")
    studyp.add_argument("--out", type=Path, default=None, help="also write the table here")
    studyp.add_argument("--threads", type=int, default=None, help="FFT worker count")
    return parser


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "threads", None) is not None:
        updates["workers"] = args.threads
    if getattr(args, "method", None) is not None:
        updates["method"] = args.method
    if getattr(args, "precompute", None) is not None:
        updates["solver_mode"] = (
            "precomputed" if args.precompute == "on" else "direct"
        )
    if not updates:
        return config
    return dataclasses.replace(config, **updates)


def _default_out(config_path: Path) -> Path:
    root = Path(os.environ.get(OUT_ENV, "freepif_out"))
    return root / config_path.stem


def _cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out_dir = args.out if args.out is not None else _default_out(args.config)
    result = run(config, out_dir=out_dir)
    total = result.total_energy
    drift = float(np.max(np.abs(total - total[0])) / max(abs(total[0]), 1e-300))
    print(f"diagnostics={result.diagnostics_path}")
    print(f"rows={len(result.steps)} final_time={result.times[-1]:g}")
    print(f"energy_drift={drift:.6e}")
    print(f"max_charge_residual={float(np.max(result.charge_residual)):.6e}")
    print(f"frozen={result.frozen}")
    for path in result.snapshot_paths:
        print(f"snapshot={path}")
    return 0


def _resolution_sweep(n_modes: int) -> tuple:
    values = tuple(range(16, n_modes + 1, 8))
    return values if len(values) >= 2 else (n_modes,)


def _node_sweep(n_nodes: int) -> tuple:
    values = []
    n = 16
    while n <= n_nodes:
        values.append(n)
        n *= 2
    return tuple(values) if len(values) >= 2 else (n_nodes,)


def _print_table(header, rows, out_path):
    print(" ".join(header))
    for row in rows:
        print(" ".join(str(v) for v in row))
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\r\n")
            writer.writerow(header)
            writer.writerows(rows)
        print(f"table={out_path}")


def _cmd_study(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out = args.out
    if args.kind == "poisson":
        if config.scenario != "poisson_manufactured":
            raise ValueError("the poisson study needs scenario = 'poisson_manufactured'")
        result = poisson_convergence_study(
            seed=config.seed,
            n_modes_list=_resolution_sweep(config.n_modes),
            sigma=config.shape_sigma,
            shape_radius=config.resolved_shape_radius,
            truncation_radius=config.truncation_radius,
            grid_size=config.snapshot_size,
            tol=config.tol,
            workers=config.workers,
        )
        rows = [
            (int(n), repr(float(d)), repr(float(p)))
            for n, d, p in zip(
                result["n_modes"], result["direct"], result["precomputed"]
            )
        ]
        _print_table(
            ("n_modes", "direct_rms_error", "precomputed_rms_error"),
            rows,
            None if out is None else out / "poisson_study.csv",
        )
        if len(rows) >= 2:
            logs = np.log(result["precomputed"])
            slope = float(
                np.polyfit(np.log(result["n_modes"].astype(float)), logs, 1)[0]
            )
            print(f"precomputed_slope={slope:.4f}")
            print(
                "direct_drop="
                f"{float(result['direct'][0] / result['direct'][-1]):.4e}"
            )
    elif args.kind == "laplace":
        if config.scenario != "laplace_manufactured":
            raise ValueError("the laplace study needs scenario = 'laplace_manufactured'")
        sweep = _node_sweep(config.boundary_nodes)
        inner = laplace_convergence_study(
            n_nodes_list=sweep, radius=config.boundary_radius, shrink=0.8
        )
        outer = laplace_convergence_study(
            n_nodes_list=sweep, radius=config.boundary_radius, shrink=0.9
        )
        rows = [
            (int(n), repr(float(a)), repr(float(b)))
            for n, a, b in zip(sweep, outer["max_error"], inner["max_error"])
        ]
        _print_table(
            ("n_nodes", "max_error_r0.9", "max_error_r0.8"),
            rows,
            None if out is None else out / "laplace_study.csv",
        )
    else:
        dts = (4 * config.dt, 2 * config.dt, config.dt)
        duration = config.n_steps * config.dt
        result = energy_convergence_study(config, dts=dts, duration=duration)
        rows = [
            (repr(float(dt)), repr(float(err)))
            for dt, err in zip(result["dt"], result["max_energy_error"])
        ]
        _print_table(
            ("dt", "max_energy_error"),
            rows,
            None if out is None else out / "energy_study.csv",
        )
        print(f"slope={result['slope']:.4f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_study(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
