"""Command line entry point: ``smtransport {solve,bench,validate}``.

Exit codes
----------
0  success
2  configuration could not be read or parsed
3  CFL condition violated
4  numeric abort (non-finite value or gradient)
5  ``bench``: a benchmark missed its acceptance interval
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .ascent import AscentConfig, DualProblem, NumericAbort, OptimalSteps, error_budget, run_ascent
from .config import ConfigError, RunConfig, load_config
from .hjb import CFLViolation, check_cfl, write_controls_csv, write_lambda0_csv
from .io import atomic_write_text
from .measures import Atoms
from .oracles import feasible_primal_cost, reference_benchmarks
from .sensitivity import write_gradient_csv

EXIT_OK, EXIT_CONFIG, EXIT_CFL, EXIT_NUMERIC, EXIT_BENCH = 0, 2, 3, 4, 5


def _grid_lines(cfg: RunConfig):
    g = cfg.grid
    return [f"grid.R: {g.R!r}", f"grid.dx: {g.dx!r}", f"grid.dt: {g.dt!r}", f"grid.r: {g.r}", f"grid.l: {g.l}"]


def _set_threads(n):
    if n > 0:
        import numba
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _out(path: Path, out_dir):
    return path if path.is_absolute() else Path(out_dir) / path


def report_text(cfg: RunConfig, rep) -> str:
    lines = _grid_lines(cfg) + [
        f"control_set: {cfg.control_set.description} ({len(cfg.control_set)} candidates)",
        f"K: {cfg.ascent.K!r}",
        f"n_iters: {rep.n_iters}",
        f"stopped_early: {rep.stopped_early}",
        f"best_value: {rep.best_value!r}",
        f"best_index: {rep.best_index}",
        f"theoretical_gap: {rep.theoretical_gap!r}",
        f"max_gradient_norm_R: {float(rep.gradient_norm_trace.max())!r}",
        f"wall_time_s: {rep.wall_time:.3f}",
        rep.error_budget.as_text(),
    ]
    return "\n".join(lines) + "\n"


def cmd_solve(config_path, out_dir=None) -> int:
    """Relative output paths resolve against ``out_dir``, else the config's directory."""
    cfg = load_config(config_path)
    if out_dir is None:
        out_dir = Path(config_path).parent
    _set_threads(cfg.threads)
    check_cfl(cfg.grid, cfg.control_set).raise_if_violated()
    problem = DualProblem(cfg.grid, cfg.control_set, cfg.cost, cfg.mu0, cfg.mu1, cfg.gradient_method)
    rep = run_ascent(cfg.grid, cfg.control_set, cfg.cost, cfg.mu0, cfg.mu1, cfg.ascent, problem=problem)
    text = report_text(cfg, rep)
    outs = cfg.outputs
    if outs.trace_csv:
        rep.write_trace_csv(_out(outs.trace_csv, out_dir))
    if outs.report:
        atomic_write_text(_out(outs.report, out_dir), text)
    if outs.lambda0_csv or outs.controls_csv or outs.gradient_csv:
        _, res = problem.solve(rep.best_iterate)
        if outs.lambda0_csv:
            write_lambda0_csv(_out(outs.lambda0_csv, out_dir), cfg.grid, res)
        if outs.controls_csv:
            write_controls_csv(_out(outs.controls_csv, out_dir), cfg.grid, cfg.control_set, res)
        if outs.gradient_csv:
            write_gradient_csv(_out(outs.gradient_csv, out_dir), cfg.grid, problem.gradient(res.controls))
    sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(config_path) -> int:
    cfg = load_config(config_path)
    cfl = check_cfl(cfg.grid, cfg.control_set)
    lines = _grid_lines(cfg) + [f"cfl_ok: {cfl.ok}", f"cfl_margin: {cfl.margin!r}"]
    for name, m in (("mu0", cfg.mu0), ("mu1", cfg.mu1)):
        if isinstance(m, Atoms):
            lines.append(f"{name}.total_weight: {float(m.weights.sum())!r}")
        lines.append(f"{name}.hat_mass: {float(m.hat_weights(cfg.grid).sum())!r}")
    budget = error_budget(cfg.grid, cfg.control_set, cfg.cost, cfg.mu0, cfg.mu1, cfg.ascent.K)
    lines.append(budget.as_text())
    print("\n".join(lines))
    cfl.raise_if_violated()
    return EXIT_OK


def cmd_bench(n_iters=100_000) -> int:
    header = f"{'benchmark':<22}{'exact':>10}{'published':>12}{'dual':>12}{'exact-dual':>12}{'primal':>10}  {'accept':<18}{'time_s':>8}  ok"
    print(header)
    failed = False
    for b in reference_benchmarks():
        rep = run_ascent(b.grid, b.control_set, b.cost, b.mu0, b.mu1,
                         AscentConfig(b.K, n_iters, OptimalSteps()))
        lo, hi = b.accept
        ok = lo <= rep.best_value <= hi
        failed |= not ok
        print(f"{b.name:<22}{b.exact_value:>10.6f}{b.published_value:>12.7f}{rep.best_value:>12.7f}"
              f"{b.exact_value - rep.best_value:>12.2e}{feasible_primal_cost(b):>10.6f}  "
              f"[{lo:.4f}, {hi:.4f}]  {rep.wall_time:>8.1f}  {'yes' if ok else 'NO'}")
    return EXIT_BENCH if failed else EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="smtransport", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("solve", help="run the projected ascent for a config file")
    p.add_argument("config")
    p.add_argument("--output-dir", default=None, help="directory for relative output paths (default: the config's directory)")
    p = sub.add_parser("validate", help="check a config (grid, CFL, marginals) without solving")
    p.add_argument("config")
    p = sub.add_parser("bench", help="run the three reference benchmarks")
    p.add_argument("--n-iters", type=int, default=100_000)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.cmd == "solve":
            return cmd_solve(args.config, args.output_dir)
        if args.cmd == "validate":
            return cmd_validate(args.config)
        return cmd_bench(args.n_iters)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CFLViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CFL
    except NumericAbort as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
