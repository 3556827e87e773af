"""Run configuration: a flat TOML file with dotted keys.

Example::

    grid.R = 1.0
    grid.dx = 0.1
    grid.dt = 0.025
    control_set.kind = "interval"      # interval | log_martingale | explicit_list
    control_set.a_max = 0.1
    cost.kind = "a"                    # a | weighted_a
    marginals.mu0.kind = "gaussian"    # gaussian | atoms
    marginals.mu0.stddev = 0.1
    marginals.mu1.kind = "gaussian"
    marginals.mu1.stddev = 0.2
    ascent.K = 1.5
    ascent.n_iters = 100000
    outputs.trace_csv = "trace.csv"
    outputs.report = "report.txt"
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .ascent import AscentConfig, DivergentSteps, OptimalSteps
from .grid import GridError, GridSpec
from .measures import Atoms, Gaussian, Marginal, load_atoms_csv
from .model import (ControlSet, CostFn, WeightedDiffusionCost, diffusion_cost,
                    make_interval_set, make_log_martingale_set)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass
class Outputs:
    trace_csv: Optional[Path] = None
    report: Optional[Path] = None
    lambda0_csv: Optional[Path] = None
    controls_csv: Optional[Path] = None
    gradient_csv: Optional[Path] = None


@dataclass
class RunConfig:
    grid: GridSpec
    control_set: ControlSet
    cost: CostFn
    mu0: Marginal
    mu1: Marginal
    ascent: AscentConfig
    outputs: Outputs
    gradient_method: str = "adjoint"
    threads: int = 0
    source: Optional[Path] = None


def _section(raw, name):
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"{name} must be a table of dotted keys")
    return sec


def _get(sec, key, kind, default=None, where=""):
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key {where}{key}")
        return default
    val = sec[key]
    try:
        if kind is int and not float(val).is_integer():
            raise ValueError
        return kind(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}{key} = {val!r} is not a valid {kind.__name__}") from None


def parse_control_set(sec) -> ControlSet:
    kind = _get(sec, "kind", str, where="control_set.")
    g = lambda k, t, d=None: _get(sec, k, t, d, "control_set.")  # noqa: E731
    if kind == "interval":
        return make_interval_set(g("a_min", float, 0.0), g("a_max", float), g("b_min", float, 0.0),
                                 g("b_max", float, 0.0), g("n_a", int, 2), g("n_b", int, 1))
    if kind == "log_martingale":
        return make_log_martingale_set(g("a_min", float, 0.0), g("a_max", float), g("n", int, 2))
    if kind == "explicit_list":
        return ControlSet.from_pairs(sec.get("candidates", []))
    raise ConfigError(f"unknown control_set.kind {kind!r}")


def parse_cost(sec) -> CostFn:
    kind = _get(sec, "kind", str, "a", "cost.")
    if kind == "a":
        return diffusion_cost
    if kind == "weighted_a":
        eta = _get(sec, "eta", str, "const", "cost.")
        return WeightedDiffusionCost(eta, _get(sec, "c", float, 1.0, "cost."))
    raise ConfigError(f"unknown cost.kind {kind!r}")


def parse_marginal(sec, where, base: Path) -> Marginal:
    kind = _get(sec, "kind", str, where=where)
    if kind == "gaussian":
        return Gaussian(_get(sec, "mean", float, 0.0, where), _get(sec, "stddev", float, where=where))
    if kind == "atoms":
        if "csv" in sec:
            path = Path(sec["csv"])
            return load_atoms_csv(path if path.is_absolute() else base / path)
        return Atoms(sec.get("positions", []), sec.get("weights", []))
    raise ConfigError(f"unknown {where}kind {kind!r}")


def parse_ascent(sec, grid: GridSpec) -> AscentConfig:
    policy = _get(sec, "stepsize", str, "optimal", "ascent.")
    if policy == "optimal":
        steps = OptimalSteps()
    elif policy == "divergent":
        c = sec.get("c")
        steps = DivergentSteps(None if c is None else float(c), _get(sec, "p", float, 1.0, "ascent."))
    else:
        raise ConfigError(f"unknown ascent.stepsize {policy!r}")
    seed = sec.get("seed")
    if seed is not None:
        seed = grid.check_function(seed, "ascent.seed")
    return AscentConfig(_get(sec, "K", float, where="ascent."), _get(sec, "n_iters", int, where="ascent."),
                        steps, seed)


def parse_config(raw: dict, base: Path = Path(".")) -> RunConfig:
    try:
        g = _section(raw, "grid")
        grid = GridSpec.from_steps(_get(g, "R", float, where="grid."), _get(g, "dx", float, where="grid."),
                                   _get(g, "dt", float, where="grid."))
        margs = _section(raw, "marginals")
        out = _section(raw, "outputs")
        path = lambda k: Path(out[k]) if out.get(k) else None  # noqa: E731
        outputs = Outputs(path("trace_csv"), path("report"), path("lambda0_csv"),
                          path("controls_csv"), path("gradient_csv"))
        method = _get(out, "gradient_method", str, "adjoint", "outputs.")
        if method not in ("adjoint", "direct"):
            raise ConfigError(f"unknown outputs.gradient_method {method!r}")
        return RunConfig(
            grid=grid,
            control_set=parse_control_set(_section(raw, "control_set")),
            cost=parse_cost(_section(raw, "cost")),
            mu0=parse_marginal(_section(margs, "mu0"), "marginals.mu0.", base),
            mu1=parse_marginal(_section(margs, "mu1"), "marginals.mu1.", base),
            ascent=parse_ascent(_section(raw, "ascent"), grid),
            outputs=outputs,
            gradient_method=method,
            threads=_get(raw, "threads", int, 0),
        )
    except ConfigError:
        raise
    except (GridError, ValueError, TypeError, OSError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    cfg = parse_config(raw, path.parent)
    cfg.source = path
    return cfg
