"""Command-line entry point.

Subcommands: generate, walk, kernels, solve, experiment, validate.
Configuration is a flat JSON document of typed keys; unknown keys are
rejected.  Exit codes: 0 all requested verdicts PASS and no clamps,
1 a verdict FAILed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

from . import __version__
from ._seeds import mix64
from .fbm import HurstField, HurstParameter, TimeGrid, ZeroField
from .fk import InitialCondition, estimate_quenched
from .pde import BoxDomain, SolverConfig, default_radius, solve_mollified
from .experiments import EXPERIMENTS, SweepSpec, write_report
from .walk import WalkConfig, sample_walk

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


_KNOWN_KEYS: dict[str, type] = {
    "hurst": float, "hursts": list, "step": float, "horizon": float,
    "pad": float, "epsilon": float, "epsilons": list, "kappa": float,
    "dim": int, "sites": list, "master_seed": int, "n_walks": int,
    "n_samples": int, "n_inner": int, "n_realizations": int, "workers": int,
    "mode": str, "experiment": str, "jump_counts": list, "deltas": list,
    "dt": float, "radius": int, "u0": str, "u0_value": float,
    "u0_site": list, "noise": bool, "run_fk": bool, "run_pde": bool,
    "out": str,
}

_DEFAULTS = {
    "pad": 0.0, "kappa": 1.0, "dim": 1, "master_seed": 0, "n_walks": 1000,
    "n_samples": 1000, "n_inner": 100, "n_realizations": 20, "workers": 1,
    "mode": "rough", "u0": "constant", "u0_value": 1.0, "noise": True,
    "run_fk": True, "run_pde": False, "out": "out",
}


class RunConfig:
    """Validated flat key-value configuration for one CLI invocation."""

    def __init__(self, data: dict) -> None:
        for key, value in data.items():
            if key not in _KNOWN_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            want = _KNOWN_KEYS[key]
            if want in (float, int) and isinstance(value, (int, float)) \
                    and not isinstance(value, bool):
                value = want(value)
            elif not isinstance(value, want):
                raise ConfigError(
                    f"config key {key!r} must be {want.__name__}")
            data[key] = value
        self.data = {**_DEFAULTS, **data}

    @classmethod
    def load(cls, path: str | None, overrides: dict) -> "RunConfig":
        data = {}
        if path:
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}")
            if not isinstance(data, dict):
                raise ConfigError("config must be a JSON object")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(data)

    def require(self, *keys):
        values = []
        for key in keys:
            if key not in self.data or self.data[key] is None:
                raise ConfigError(f"missing config key {key!r}")
            values.append(self.data[key])
        return values[0] if len(values) == 1 else values

    def get(self, key, default=None):
        return self.data.get(key, default)

    @property
    def hash(self) -> str:
        # workers and out must not affect results, so keep them out of the
        # hash; outputs are required to be byte-identical across both.
        canon = json.dumps({k: v for k, v in self.data.items()
                            if k not in ("workers", "out")}, sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def header_lines(self) -> tuple[str, ...]:
        return (f"pamfk version={__version__} config_hash={self.hash} "
                f"master_seed={self.data['master_seed']}",)


def _write_csv(path: str, fieldnames, rows, header_lines) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float)
                             else str(v) for v in row])


def _grid(cfg: RunConfig) -> TimeGrid:
    step, horizon = cfg.require("step", "horizon")
    return TimeGrid(step, horizon, cfg.get("pad", 0.0))


def _hurst(cfg: RunConfig) -> HurstParameter:
    h = cfg.require("hurst")
    try:
        return HurstParameter(h)
    except ValueError:
        raise ConfigError("H must be in (0,1)")


def _initial_condition(cfg: RunConfig) -> InitialCondition:
    kind = cfg.get("u0", "constant")
    if kind == "constant":
        return InitialCondition.constant(cfg.get("u0_value", 1.0))
    if kind == "indicator":
        site = cfg.get("u0_site") or [0] * cfg.get("dim", 1)
        return InitialCondition.indicator(tuple(int(c) for c in site))
    raise ConfigError(f"unknown u0 kind {kind!r}")


def cmd_generate(cfg: RunConfig) -> int:
    hurst = _hurst(cfg)
    grid = _grid(cfg)
    sites = [tuple(int(c) for c in s) for s in cfg.get("sites") or [[0]]]
    field = HurstField(hurst, grid, cfg.get("master_seed"))
    dims = len(sites[0])
    rows = []
    for site in sites:
        path = field.path_on_grid(site)
        zi = grid.zero_index
        for j in range(grid.count):
            rows.append([*site, j * grid.step, float(path[zi + j])])
    _write_csv(os.path.join(cfg.get("out"), "fbm_paths.csv"),
               [f"x{i}" for i in range(dims)] + ["t", "w"],
               rows, cfg.header_lines())
    return EXIT_OK


def cmd_walk(cfg: RunConfig) -> int:
    kappa, horizon = cfg.require("kappa", "horizon")
    wcfg = WalkConfig(cfg.get("dim"), kappa, horizon)
    rows = []
    for k in range(cfg.get("n_samples")):
        path = sample_walk(wcfg, mix64(cfg.get("master_seed"), k))
        rows.append([k, 0, 0.0, *wcfg.start])
        for j, (t, site) in enumerate(zip(path.jump_times, path.sites[1:])):
            rows.append([k, j + 1, t, *site])
    _write_csv(os.path.join(cfg.get("out"), "walks.csv"),
               ["walk", "jump_index", "time"]
               + [f"x{i}" for i in range(wcfg.dim)],
               rows, cfg.header_lines())
    return EXIT_OK


def _sweep_spec(cfg: RunConfig) -> SweepSpec:
    kwargs = {"master_seed": cfg.get("master_seed"),
              "kappa": cfg.get("kappa"), "dim": cfg.get("dim"),
              "n_samples": cfg.get("n_samples"),
              "n_inner": cfg.get("n_inner"),
              "n_realizations": cfg.get("n_realizations"),
              "workers": cfg.get("workers")}
    if cfg.get("hursts"):
        kwargs["hursts"] = tuple(float(h) for h in cfg.get("hursts"))
    if cfg.get("epsilons"):
        kwargs["epsilons"] = tuple(float(e) for e in cfg.get("epsilons"))
    if cfg.get("horizon"):
        kwargs["horizon"] = cfg.get("horizon")
    if cfg.get("jump_counts"):
        kwargs["jump_counts"] = tuple(int(n) for n in cfg.get("jump_counts"))
    return SweepSpec(**kwargs)


def cmd_kernels(cfg: RunConfig) -> int:
    report = EXPERIMENTS["kernel_sweep"](_sweep_spec(cfg))
    write_report(report, cfg.get("out"), cfg.header_lines())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_solve(cfg: RunConfig) -> int:
    hurst = _hurst(cfg)
    grid = _grid(cfg)
    kappa, horizon = cfg.require("kappa", "horizon")
    wcfg = WalkConfig(cfg.get("dim"), kappa, horizon)
    ic = _initial_condition(cfg)
    if cfg.get("noise"):
        field = HurstField(hurst, grid, cfg.get("master_seed")).freeze()
    else:
        field = ZeroField(grid)
    mode = cfg.get("mode")
    epsilon = cfg.get("epsilon") if mode == "smooth" else None
    if mode == "smooth":
        cfg.require("epsilon")
    rows = []
    clamps = 0
    if cfg.get("run_fk"):
        est = estimate_quenched(wcfg, ic, field, mode=mode, epsilon=epsilon,
                                n_walks=cfg.get("n_walks"),
                                seed=cfg.get("master_seed"),
                                workers=cfg.get("workers"))
        clamps += est.clamps
        rows.append([est.mode, hurst.h, kappa, wcfg.dim, horizon,
                     *wcfg.start, epsilon if epsilon is not None else "NA",
                     est.count, est.mean, est.stderr, est.seed, est.clamps])
        _write_csv(os.path.join(cfg.get("out"), "estimates.csv"),
                   ["mode", "H", "kappa", "d", "t"]
                   + [f"x{i}" for i in range(wcfg.dim)]
                   + ["eps", "n", "mean", "stderr", "seed", "clamps"],
                   rows, cfg.header_lines())
    if cfg.get("run_pde"):
        cfg.require("epsilon")
        radius = cfg.get("radius") or default_radius(kappa, horizon)
        domain = BoxDomain(wcfg.dim, radius)
        dt = cfg.get("dt") or min(grid.step, 0.25 / kappa)
        scfg = SolverConfig(dt, kappa, grid, cfg.get("epsilon"))
        sol = solve_mollified(ic, field, scfg, domain, wcfg.start)
        srows = [[horizon, *site, val] for site, val in sorted(sol.items())]
        _write_csv(os.path.join(cfg.get("out"), "solution.csv"),
                   ["t"] + [f"x{i}" for i in range(wcfg.dim)] + ["u"],
                   srows, cfg.header_lines())
    return EXIT_OK if clamps == 0 else EXIT_FAIL


def cmd_experiment(cfg: RunConfig) -> int:
    name = cfg.require("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; "
                          f"choose from {sorted(EXPERIMENTS)}")
    spec = _sweep_spec(cfg)
    if name == "rough_tail" and cfg.get("deltas"):
        report = EXPERIMENTS[name](spec,
                                   tuple(float(d) for d in cfg.get("deltas")))
    elif name == "fk_pde_crosscheck" and cfg.get("epsilon"):
        report = EXPERIMENTS[name](spec, epsilon=cfg.get("epsilon"),
                                   n_walks=cfg.get("n_walks"))
    else:
        report = EXPERIMENTS[name](spec)
    write_report(report, cfg.get("out"), cfg.header_lines())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_validate(cfg: RunConfig) -> int:
    """Run the acceptance-style experiment bundle and write all reports."""
    spec = _sweep_spec(cfg)
    status = EXIT_OK
    for name in ("kernel_sweep", "rate_sweep", "rough_tail",
                 "ueps_convergence", "fk_pde_crosscheck"):
        if name == "ueps_convergence":
            eps = tuple(0.1 * 2.0 ** -k for k in range(4))
            sub = SweepSpec(hursts=spec.hursts, epsilons=eps,
                            kappa=spec.kappa, dim=spec.dim,
                            horizon=spec.horizon, n_samples=spec.n_samples,
                            master_seed=spec.master_seed,
                            n_inner=spec.n_inner, workers=spec.workers)
            report = EXPERIMENTS[name](sub)
        elif name == "fk_pde_crosscheck":
            report = EXPERIMENTS[name](spec, n_walks=cfg.get("n_walks"))
        else:
            report = EXPERIMENTS[name](spec)
        write_report(report, cfg.get("out"), cfg.header_lines())
        if not report.passed:
            status = EXIT_FAIL
    return status


_COMMANDS = {
    "generate": cmd_generate,
    "walk": cmd_walk,
    "kernels": cmd_kernels,
    "solve": cmd_solve,
    "experiment": cmd_experiment,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pamfk",
        description="Feynman-Kac Monte Carlo toolkit for the lattice "
                    "parabolic Anderson model with fractional noise")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="path to a flat JSON config")
    parser.add_argument("--seed", type=int, help="override master_seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--workers", type=int, help="worker count")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"master_seed": args.seed, "out": args.out,
                 "workers": args.workers}
    try:
        cfg = RunConfig.load(args.config, overrides)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
