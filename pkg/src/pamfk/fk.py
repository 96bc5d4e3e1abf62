"""Feynman-Kac functionals and Monte Carlo estimators.

The solution at (t, x) is the walk-average of u_o(X(t)) times the
exponential of a noise functional along the time-reversed path: either
the rough increment sum (the stochastic integral) or the mollified
integral of dW_eps.  Estimators are deterministic given (seed, n_walks)
and independent of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as _dc_field

import numpy as np

from ._seeds import mix64, site_seed
from .fbm import (EpsilonDerivative, HurstField, HurstParameter, TimeGrid,
                  sample_at_times)
from .kernels import path_increment_variance
from .walk import Site, WalkConfig, WalkPath, reverse_view, sample_walk

EXP_CLAMP = 700.0


class ClampError(RuntimeError):
    """An exponent hit the overflow clamp; the estimate is unreliable."""


@dataclass(frozen=True)
class InitialCondition:
    """Bounded initial datum u_o: constant, single-site indicator, or table."""

    kind: str
    value: float = 1.0
    site: Site | None = None
    table: dict | None = None

    @classmethod
    def constant(cls, c: float = 1.0) -> "InitialCondition":
        return cls("constant", value=c)

    @classmethod
    def indicator(cls, site: Site) -> "InitialCondition":
        return cls("indicator", site=tuple(site))

    @classmethod
    def from_table(cls, table: dict) -> "InitialCondition":
        return cls("table", table={tuple(k): float(v) for k, v in table.items()})

    @property
    def bound(self) -> float:
        if self.kind == "constant":
            return abs(self.value)
        if self.kind == "indicator":
            return 1.0
        return max((abs(v) for v in self.table.values()), default=0.0)

    def __call__(self, site: Site) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "indicator":
            return 1.0 if tuple(site) == self.site else 0.0
        return self.table.get(tuple(site), 0.0)


@dataclass(frozen=True)
class FkSample:
    walk_seed: int
    rough_exponent: float
    smooth_exponent: float | None
    terminal_site: Site
    weight: float


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    stderr: float
    count: int
    mode: str
    seed: int
    clamps: int = 0
    config: dict = _dc_field(default_factory=dict)


class GridFunctionalEvaluator:
    """Evaluates rough and mollified FK exponents against one grid field.

    Jump times are snapped to the nearest grid point, which keeps both
    functionals on the same probability space; per-site cumulative
    trapezoids make each walk O(jump count).
    """

    def __init__(self, field, epsilon: float | None = None) -> None:
        self.field = field
        self.grid: TimeGrid = field.grid
        self.epsilon = epsilon
        self._ed = EpsilonDerivative(field, epsilon) if epsilon else None
        if epsilon is not None and epsilon < 4.0 * self.grid.step - 1e-12:
            raise ValueError(
                f"grid too coarse for epsilon={epsilon}: need step <= eps/4, "
                f"got step={self.grid.step}; refine the grid")
        self._cum: dict[Site, np.ndarray] = {}
        self._zi = self.grid.zero_index

    def _w(self, site: Site) -> np.ndarray:
        """W on [0, horizon], indexed from the time-0 grid point."""
        return self.field.path_on_grid(site)[self._zi:self._zi + self.grid.count]

    def _cum_dw(self, site: Site) -> np.ndarray:
        cum = self._cum.get(site)
        if cum is None:
            dw = self._ed.grid_values(site)
            cum = np.concatenate(
                [[0.0], np.cumsum(0.5 * (dw[:-1] + dw[1:]) * self.grid.step)])
            self._cum[site] = cum
        return cum

    def _snap(self, t: float) -> int:
        j = round(t / self.grid.step)
        return min(max(j, 0), self.grid.count - 1)

    def rough(self, path: WalkPath) -> float:
        """Sum of W increments over the time-reversed path's segments."""
        total = 0.0
        for lo, hi, site in reverse_view(path).segments():
            w = self._w(site)
            total += w[self._snap(hi)] - w[self._snap(lo)]
        return total

    def smooth(self, path: WalkPath) -> float:
        """Trapezoid integral of dW_eps along the time-reversed path."""
        if self._ed is None:
            raise ValueError("evaluator built without epsilon")
        total = 0.0
        for lo, hi, site in reverse_view(path).segments():
            cum = self._cum_dw(site)
            total += cum[self._snap(hi)] - cum[self._snap(lo)]
        return total


def rough_functional(path: WalkPath, field) -> float:
    """Grid-mode rough FK exponent for one walk against one field."""
    return GridFunctionalEvaluator(field).rough(path)


def rough_functional_exact(path: WalkPath, hurst: HurstParameter,
                           noise_seed: int) -> float:
    """Exact-mode rough FK exponent: joint Cholesky draws per site.

    Each call draws a fresh, internally consistent realization; use the
    same noise_seed with the same path for reproducibility.
    """
    total = 0.0
    by_site: dict[Site, list[tuple[float, float]]] = {}
    for lo, hi, site in reverse_view(path).segments():
        by_site.setdefault(site, []).append((lo, hi))
    for site, segs in by_site.items():
        times = sorted({t for seg in segs for t in seg if t > 0.0})
        values = dict(zip(times, sample_at_times(
            hurst, times, site_seed(noise_seed, site))))
        values[0.0] = 0.0
        for lo, hi in segs:
            total += values[hi] - values[lo]
    return total


def smooth_functional(path: WalkPath, ed: EpsilonDerivative) -> float:
    """Grid-mode mollified FK exponent for one walk."""
    return GridFunctionalEvaluator(ed.field, ed.epsilon).smooth(path)


def sample_walk_snapped(cfg: WalkConfig, grid: TimeGrid, seed: int) -> WalkPath:
    """Walk whose jump times are distinct after snapping to the grid.

    Colliding jumps are resampled with a derived seed; the collision
    probability vanishes for fine grids.
    """
    for attempt in range(64):
        path = sample_walk(cfg, seed if attempt == 0 else mix64(seed, attempt))
        snapped = [round(t / grid.step) * grid.step for t in path.jump_times]
        idx = [round(t / grid.step) for t in snapped]
        if (len(set(idx)) == len(idx)
                and all(0 < j < grid.count - 1 for j in idx)):
            return WalkPath(path.horizon, tuple(snapped), path.sites)
    raise RuntimeError("could not sample a collision-free walk; grid too coarse")


def _clamped_exp(x: float) -> tuple[float, int]:
    if abs(x) > EXP_CLAMP:
        return math.exp(math.copysign(EXP_CLAMP, x)), 1
    return math.exp(x), 0


def make_fk_sample(cfg: WalkConfig, ic: InitialCondition,
                   evaluator: GridFunctionalEvaluator, mode: str,
                   walk_seed: int) -> FkSample:
    path = sample_walk_snapped(cfg, evaluator.grid, walk_seed)
    rough = evaluator.rough(path)
    smooth = evaluator.smooth(path) if evaluator.epsilon else None
    exponent = rough if mode == "rough" else smooth
    w, _ = _clamped_exp(exponent)
    weight = ic(path.terminal_site()) * w
    return FkSample(walk_seed, rough, smooth, path.terminal_site(), weight)


def _weights_block(args) -> tuple[int, np.ndarray, int]:
    (cfg, ic, field, mode, epsilon, seed, lo, hi) = args
    evaluator = GridFunctionalEvaluator(field, epsilon)
    out = np.empty(hi - lo)
    clamps = 0
    for i in range(lo, hi):
        path = sample_walk_snapped(cfg, field.grid, seed + i)
        exponent = (evaluator.rough(path) if mode == "rough"
                    else evaluator.smooth(path))
        w, c = _clamped_exp(exponent)
        clamps += c
        out[i - lo] = ic(path.terminal_site()) * w
    return lo, out, clamps


def estimate_quenched(cfg: WalkConfig, ic: InitialCondition, field,
                      mode: str = "rough", epsilon: float | None = None,
                      n_walks: int = 1000, seed: int = 0, workers: int = 1,
                      allow_clamp: bool = False) -> EstimateResult:
    """Walk-average of FK weights for one fixed noise realization.

    The noise field must be frozen.  Walk i uses seed seed+i and the
    reduction runs in index order, so the result is bitwise identical
    for any worker count.
    """
    if mode not in ("rough", "smooth"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "smooth" and epsilon is None:
        raise ValueError("smooth mode needs epsilon")
    if not field.frozen:
        raise ValueError("field must be frozen before estimation")
    eps = epsilon if mode == "smooth" else None
    n_blocks = max(workers, 1)
    bounds = np.linspace(0, n_walks, n_blocks + 1).astype(int)
    jobs = [(cfg, ic, field, mode, eps, seed, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_weights_block, jobs))
    else:
        results = [_weights_block(job) for job in jobs]
    results.sort(key=lambda r: r[0])
    weights = np.concatenate([r[1] for r in results])
    clamps = sum(r[2] for r in results)
    if clamps and not allow_clamp:
        raise ClampError(f"{clamps} exponent(s) hit the overflow clamp")
    mean = float(np.sum(weights) / n_walks)
    std = float(np.std(weights, ddof=1)) if n_walks > 1 else 0.0
    return EstimateResult(
        mean=mean, stderr=std / math.sqrt(n_walks), count=n_walks,
        mode=f"quenched-{mode}", seed=seed, clamps=clamps,
        config={"kappa": cfg.kappa, "dim": cfg.dim, "t": cfg.horizon,
                "epsilon": epsilon})


def estimate_annealed_moment(cfg: WalkConfig, ic: InitialCondition,
                             hurst: HurstParameter, grid: TimeGrid,
                             p: float = 1.0, mode: str = "rough",
                             epsilon: float | None = None,
                             n_outer: int = 200, n_inner: int = 200,
                             seed: int = 0, workers: int = 1,
                             noise: bool = True) -> EstimateResult:
    """Nested Monte Carlo estimate of E|u(t,x)|^p (or E|u_eps|^p).

    Each outer sample draws a fresh noise realization and averages the
    FK weight over n_inner walks; noise=False reduces to the zero-noise
    walk functional.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    from .fbm import ZeroField
    samples = np.empty(n_outer)
    for k in range(n_outer):
        if noise:
            fld = HurstField(hurst, grid, mix64(seed, k)).freeze()
        else:
            fld = ZeroField(grid)
        inner = estimate_quenched(cfg, ic, fld, mode=mode, epsilon=epsilon,
                                  n_walks=n_inner, seed=mix64(seed, k, 1),
                                  workers=workers)
        samples[k] = abs(inner.mean) ** p
    mean = float(np.mean(samples))
    std = float(np.std(samples, ddof=1)) if n_outer > 1 else 0.0
    return EstimateResult(
        mean=mean, stderr=std / math.sqrt(n_outer), count=n_outer,
        mode=f"annealed-{mode}", seed=seed,
        config={"p": p, "epsilon": epsilon, "n_inner": n_inner})


def annealed_mean_rough_oracle(cfg: WalkConfig, hurst: HurstParameter,
                               n_walks: int = 2000, seed: int = 0) -> float:
    """E u(t,x) for u_o = 1 via the Gaussian moment formula.

    Averaging exp(Var[rough functional]/2) over walks, with the per-path
    variance computed exactly from the increment covariance.
    """
    total = 0.0
    for i in range(n_walks):
        path = sample_walk(cfg, seed + i)
        total += math.exp(0.5 * path_increment_variance(
            reverse_view(path), hurst))
    return total / n_walks
