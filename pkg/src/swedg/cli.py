"""Command-line entry point: ``swedg run | bench | validate``.

Exit codes: 0 success, 1 failed criterion, 2 configuration error, 3 numerical abort.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench, io
from .config import ConfigError, RunConfig, parse_config
from .positivity import NegativeMeanError
from .scenarios import CATALOGUE
from .timeloop import NegativeDepthError, Solver, StepRejectedError

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3

log = logging.getLogger("swedg")


def _parse_slice(text):
    axis, _, value = text.partition("=")
    axis = axis.strip()
    if axis not in ("x", "y") or not value:
        raise ConfigError(f"slice must look like 'y=0', got {text!r}")
    try:
        return axis, float(value)
    except ValueError:
        raise ConfigError(f"bad slice coordinate in {text!r}") from None


def _run_config(args):
    cfg = parse_config(args.config) if args.config else None
    if cfg is None:
        if not args.scenario:
            raise ConfigError("give --config or --scenario")
        cfg = RunConfig(args.scenario)
    elif args.scenario and args.scenario != cfg.scenario:
        cfg = replace(cfg, scenario=args.scenario)
    overrides = {
        "mode": args.mode, "T": args.T, "N": args.N, "Kx": args.kx, "Ky": args.ky, "cfl": args.cfl,
        "epsilon0": args.epsilon0, "max_steps": args.max_steps, "output_dir": args.out,
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    if args.no_limiter:
        cfg = replace(cfg, limiter=False)
    if args.no_viscosity:
        cfg = replace(cfg, viscosity=False)
    if args.figures:
        cfg = replace(cfg, figures=True)
    if args.slice:
        cfg = replace(cfg, slices=tuple(args.slice))
    return cfg.resolved()


def cmd_run(args):
    cfg = _run_config(args)
    slices = [_parse_slice(s) for s in cfg.slices]
    digest = cfg.digest()
    scenario = cfg.scenario_object()
    mesh = scenario.build_mesh(cfg.Kx, cfg.Ky, cfg.N)
    W0 = scenario.initial_state(mesh)
    solver = Solver(mesh, cfg.solver_config())
    out = Path(cfg.output_dir)
    snaps = []

    def on_output(t, W, eps):
        snaps.append((t, W, eps))
        if cfg.snapshots:
            io.write_snapshot(out / f"snapshot_t{t:.6f}.txt", W, mesh, t, eps, digest)
        for axis, coord in slices:
            rows = io.write_slice(out / f"slice_{axis}{coord:g}_t{t:.6f}.txt", W, mesh, t, axis, coord, digest)
            if cfg.figures:
                from .plotting import plot_slice
                plot_slice(out / f"slice_{axis}{coord:g}_t{t:.6f}.png", rows, t, axis, coord)
        if cfg.figures:
            from .plotting import plot_fields
            plot_fields(out / f"fields_t{t:.6f}.png", W, mesh, eps, t, cfg.scenario)

    log.info("run %s: N=%d, %dx%d elements, T=%g, mode=%s, config %s",
             cfg.scenario, cfg.N, cfg.Kx, cfg.Ky, cfg.T, cfg.mode, digest)
    for axis, coord in slices:  # fail early on a slice outside the domain
        io.slice_rows(W0, mesh, axis, coord)
    try:
        W, records = solver.run(W0, cfg.T, output_times=cfg.output_times, on_output=on_output,
                                max_steps=cfg.max_steps)
    except (NegativeDepthError, NegativeMeanError, StepRejectedError, FloatingPointError) as err:
        print(f"aborted: {err}", file=sys.stderr)
        last = snaps[-1] if snaps else (0.0, W0, np.zeros(mesh.K))
        io.write_snapshot(out / "abort_state.txt", last[1], mesh, last[0], last[2], digest)
        return EXIT_ABORT
    io.write_diagnostics(out / "diagnostics.txt", records, digest)
    if cfg.figures:
        from .plotting import plot_diagnostics
        plot_diagnostics(out / "diagnostics.png", records)
    if not np.all(np.isfinite(W)):
        print("aborted: non-finite state", file=sys.stderr)
        return EXIT_ABORT
    last = records[-1]
    print(f"{cfg.scenario}: t = {last.t:.6g} after {last.step} steps, mass {last.mass:.15g}, "
          f"entropy {last.entropy:.15g}, min h {last.min_h:.3e}; output in {out}")
    return EXIT_OK


def cmd_bench(args):
    if args.n:
        k_dir = args.k or 8
        records = [bench.time_kernels(N, k_dir, args.repetitions) for N in args.n]
    else:
        records = bench.budget_table(range(1, args.nmax + 1), args.budget, args.repetitions,
                                     ceiling=args.ceiling)
    table = bench.format_table(records)
    print(table)
    if args.out:
        with io.atomic_open(args.out) as fh:
            fh.write(table + "\n")
    if args.figures:
        from .plotting import plot_bench
        plot_bench(Path(args.out or "bench.txt").with_suffix(".png"), records)
    return EXIT_OK


def cmd_validate(args):
    from .validate import run_suites

    try:
        results = run_suites(args.suite)
    except KeyError as err:
        raise ConfigError(str(err.args[0])) from None
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_FAILED if failed else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="swedg", description="Entropy-stable DG shallow water solver")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario")
    r.add_argument("--config", help="sectioned key = value config file")
    r.add_argument("--scenario", choices=sorted(CATALOGUE))
    r.add_argument("--mode", choices=("es", "standard"))
    r.add_argument("--T", type=float)
    r.add_argument("--N", type=int)
    r.add_argument("--kx", type=int)
    r.add_argument("--ky", type=int)
    r.add_argument("--cfl", type=float)
    r.add_argument("--epsilon0", type=float)
    r.add_argument("--max-steps", type=int)
    r.add_argument("--no-limiter", action="store_true")
    r.add_argument("--no-viscosity", action="store_true")
    r.add_argument("--slice", action="append", help="line to sample, e.g. y=0 (repeatable)")
    r.add_argument("--out", help="output directory")
    r.add_argument("--figures", action="store_true", help="write matplotlib figures")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="volume-kernel counts, timings and rooflines")
    b.add_argument("--n", type=int, nargs="+", help="degrees to time (with --k)")
    b.add_argument("--k", type=int, help="elements per direction for --n")
    b.add_argument("--nmax", type=int, default=15, help="largest N of the fixed-budget table")
    b.add_argument("--budget", type=float, default=4 * 2**20, help="bytes moved per kernel call")
    b.add_argument("--repetitions", type=int, default=10)
    b.add_argument("--ceiling", type=float, help="compute ceiling in GFLOP/s (measured if omitted)")
    b.add_argument("--out", help="write the table to this file")
    b.add_argument("--figures", action="store_true")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("validate", help="run acceptance criteria")
    v.add_argument("--suite", action="append", help="criterion name (repeatable; default all)")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except io.SliceError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
