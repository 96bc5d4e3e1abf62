import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pamfk._seeds import mix64
from pamfk.fbm import (HurstField, HurstParameter, LinearField, TimeGrid,
                       ZeroField, sample_grid_paths)
from pamfk.fk import (ClampError, GridFunctionalEvaluator, InitialCondition,
                      annealed_mean_rough_oracle, estimate_annealed_moment,
                      estimate_quenched, rough_functional,
                      rough_functional_exact, sample_walk_snapped,
                      smooth_functional)
from pamfk.kernels import path_increment_variance, prop41_variance
from pamfk.walk import WalkConfig, WalkPath, reverse_view, sample_walk


class TestInitialCondition:
    def test_constant(self):
        ic = InitialCondition.constant(2.5)
        assert ic((3, 4)) == 2.5
        assert ic.bound == 2.5

    def test_indicator(self):
        ic = InitialCondition.indicator((1, -1))
        assert ic((1, -1)) == 1.0
        assert ic((0, 0)) == 0.0
        assert ic.bound == 1.0

    def test_table(self):
        ic = InitialCondition.from_table({(0,): 2.0, (1,): -3.0})
        assert ic((1,)) == -3.0
        assert ic((5,)) == 0.0
        assert ic.bound == 3.0


class TestFunctionals:
    def test_rough_zero_field(self):
        g = TimeGrid(0.05, 1.0)
        p = WalkPath(1.0, (0.25, 0.5), ((0,), (1,), (0,)))
        assert rough_functional(p, ZeroField(g)) == 0.0

    def test_rough_no_jump_is_terminal_value(self):
        g = TimeGrid(0.05, 1.0)
        f = HurstField(HurstParameter(0.6), g, 4)
        p = WalkPath(1.0, (), ((2,),))
        w = f.path_on_grid((2,))
        assert rough_functional(p, f) == pytest.approx(
            w[g.zero_index + g.count - 1])

    def test_rough_reversal_bookkeeping(self):
        # reversed-path evaluation equals the forward occupation sum
        g = TimeGrid(0.05, 1.0)
        f = HurstField(HurstParameter(0.3), g, 8)
        p = WalkPath(1.0, (0.25, 0.6), ((0,), (1,), (0,)))
        direct = 0.0
        for lo, hi, site in p.segments():
            w = f.path_on_grid(site)
            zi = g.zero_index
            direct += (w[zi + round((1.0 - lo) / g.step)]
                       - w[zi + round((1.0 - hi) / g.step)])
        assert rough_functional(p, f) == pytest.approx(direct, abs=1e-12)

    def test_smooth_zero_field(self):
        g = TimeGrid(0.025, 1.0, pad=0.1)
        from pamfk.fbm import EpsilonDerivative
        p = WalkPath(1.0, (0.25,), ((0,), (1,)))
        assert smooth_functional(p, EpsilonDerivative(ZeroField(g), 0.1)) == 0.0

    def test_smooth_linear_field(self):
        g = TimeGrid(0.025, 1.0, pad=0.1)
        from pamfk.fbm import EpsilonDerivative
        lf = LinearField(g, {(0,): 2.0, (1,): -1.0})
        p = WalkPath(1.0, (0.25, 0.5), ((0,), (1,), (0,)))
        ed = EpsilonDerivative(lf, 0.1)
        expect = 2.0 * 0.25 + (-1.0) * 0.25 + 2.0 * 0.5
        assert smooth_functional(p, ed) == pytest.approx(expect)

    def test_grid_too_coarse_for_epsilon(self):
        g = TimeGrid(0.05, 1.0, pad=0.1)
        f = ZeroField(g)
        with pytest.raises(ValueError, match="refine"):
            GridFunctionalEvaluator(f, 0.1)  # step > eps/4

    def test_smooth_without_epsilon_rejected(self):
        g = TimeGrid(0.05, 1.0)
        ev = GridFunctionalEvaluator(ZeroField(g))
        with pytest.raises(ValueError):
            ev.smooth(WalkPath(1.0, (), ((0,),)))

    def test_rough_variance_brownian(self):
        # Var over noise = t for H=1/2, any fixed path
        g = TimeGrid(0.05, 1.0)
        h = HurstParameter(0.5)
        p = WalkPath(1.0, (0.25, 0.6), ((0,), (1,), (0,)))
        n = 4000
        vals = np.empty(n)
        for i in range(n):
            f = HurstField(h, g, mix64(99, i))
            vals[i] = rough_functional(p, f)
        sq = vals**2
        stderr = sq.std(ddof=1) / math.sqrt(n)
        assert abs(sq.mean() - 1.0) < 3 * stderr

    def test_rough_variance_general_h_oracle(self):
        g = TimeGrid(0.025, 1.0)
        h = HurstParameter(0.3)
        p = WalkPath(1.0, (0.25, 0.6), ((0,), (1,), (0,)))
        target = path_increment_variance(reverse_view(p), h)
        n = 4000
        vals = np.empty(n)
        for i in range(n):
            f = HurstField(h, g, mix64(7, i))
            vals[i] = rough_functional(p, f)
        sq = vals**2
        stderr = sq.std(ddof=1) / math.sqrt(n)
        assert abs(sq.mean() - target) < 3 * stderr

    def test_exact_mode_variance(self):
        h = HurstParameter(0.4)
        p = WalkPath(1.0, (0.3,), ((0,), (1,)))
        target = path_increment_variance(reverse_view(p), h)
        n = 4000
        vals = np.array([rough_functional_exact(p, h, mix64(3, i))
                         for i in range(n)])
        sq = vals**2
        stderr = sq.std(ddof=1) / math.sqrt(n)
        assert abs(sq.mean() - target) < 3 * stderr

    def test_smooth_minus_rough_tracks_prop41(self):
        # E|smooth - rough|^2 against the exact per-path variance
        h = HurstParameter(0.5)
        eps = 0.125
        step = eps / 8
        g = TimeGrid(step, 1.0, pad=eps)
        times = tuple(round(t / step) * step for t in (0.203, 0.406, 0.703))
        p = WalkPath(1.0, times, ((0,), (1,), (0,), (1,)))
        target = prop41_variance(reverse_view(p), h, eps)

        n = 10**4
        zi, k = g.zero_index, round(eps / step)
        diff = np.zeros(n)
        for s_i, site in enumerate({s for _, _, s in p.segments()}):
            paths = sample_grid_paths(h, g, [mix64(42, s_i, i)
                                             for i in range(n)])
            w = paths[:, zi:zi + g.count]
            dw = (paths[:, zi + k:zi + k + g.count]
                  - paths[:, zi - k:zi - k + g.count]) / (2 * eps)
            cum = np.concatenate(
                [np.zeros((n, 1)),
                 np.cumsum(0.5 * (dw[:, :-1] + dw[:, 1:]) * step, axis=1)],
                axis=1)
            for lo, hi, seg_site in reverse_view(p).segments():
                if seg_site != site:
                    continue
                i, j = round(lo / step), round(hi / step)
                diff += (cum[:, j] - cum[:, i]) - (w[:, j] - w[:, i])
        sq = diff**2
        stderr = sq.std(ddof=1) / math.sqrt(n)
        assert abs(sq.mean() - target) < 3 * stderr


@given(st.integers(min_value=0, max_value=2000),
       st.sampled_from([0.25, 0.4]), st.sampled_from([0.5, 0.75]))
@settings(max_examples=100, deadline=None)
def test_variance_moment_bounds(seed, h_low, h_high):
    # per-path variance of the increment sum obeys the jump-count bounds
    p = reverse_view(sample_walk(WalkConfig(1, 4.0, 1.0), seed))
    n = p.jump_count
    v_low = path_increment_variance(p, HurstParameter(h_low))
    assert v_low <= (n + 1) ** (1 - 2 * h_low) * 1.0 + 1e-9
    v_high = path_increment_variance(p, HurstParameter(h_high))
    assert v_high <= (n + 1) * 1.0 + 1e-9


class TestSnappedWalks:
    def test_distinct_grid_indices(self):
        g = TimeGrid(0.01, 1.0)
        cfg = WalkConfig(1, 5.0, 1.0)
        for seed in range(200):
            p = sample_walk_snapped(cfg, g, seed)
            idx = [round(t / g.step) for t in p.jump_times]
            assert len(set(idx)) == len(idx)
            assert all(0 < i < g.count - 1 for i in idx)

    def test_deterministic(self):
        g = TimeGrid(0.01, 1.0)
        cfg = WalkConfig(1, 5.0, 1.0)
        assert sample_walk_snapped(cfg, g, 3) == sample_walk_snapped(cfg, g, 3)


class TestQuenchedEstimator:
    def test_zero_noise_constant_ic(self):
        g = TimeGrid(0.05, 1.0)
        est = estimate_quenched(WalkConfig(1, 1.0, 1.0),
                                InitialCondition.constant(1.0),
                                ZeroField(g), n_walks=100, seed=0)
        assert est.mean == 1.0
        assert est.stderr == 0.0
        assert est.count == 100

    def test_requires_frozen_field(self):
        g = TimeGrid(0.05, 1.0)
        f = HurstField(HurstParameter(0.5), g, 0)
        with pytest.raises(ValueError, match="frozen"):
            estimate_quenched(WalkConfig(1, 1.0, 1.0),
                              InitialCondition.constant(), f)

    def test_mode_validation(self):
        g = TimeGrid(0.05, 1.0)
        f = ZeroField(g)
        cfg = WalkConfig(1, 1.0, 1.0)
        ic = InitialCondition.constant()
        with pytest.raises(ValueError):
            estimate_quenched(cfg, ic, f, mode="weird")
        with pytest.raises(ValueError):
            estimate_quenched(cfg, ic, f, mode="smooth")  # missing epsilon

    def test_worker_count_invariance(self):
        g = TimeGrid(0.02, 1.0, pad=0.08)
        f = HurstField(HurstParameter(0.6), g, 12).freeze()
        cfg = WalkConfig(1, 1.0, 1.0)
        ic = InitialCondition.constant()
        kw = dict(mode="smooth", epsilon=0.08, n_walks=64, seed=5)
        serial = estimate_quenched(cfg, ic, f, workers=1, **kw)
        parallel = estimate_quenched(cfg, ic, f, workers=3, **kw)
        assert serial.mean == parallel.mean
        assert serial.stderr == parallel.stderr

    def test_clamp_raises_by_default(self):
        g = TimeGrid(0.02, 1.0, pad=0.08)
        f = LinearField(g, {}, default=2000.0)  # exponent ~ 2000
        cfg = WalkConfig(1, 1.0, 1.0)
        ic = InitialCondition.constant()
        with pytest.raises(ClampError):
            estimate_quenched(cfg, ic, f, mode="smooth", epsilon=0.08,
                              n_walks=16, seed=0)
        est = estimate_quenched(cfg, ic, f, mode="smooth", epsilon=0.08,
                                n_walks=16, seed=0, allow_clamp=True)
        assert est.clamps == 16

    def test_indicator_zero_noise_matches_return_probability(self):
        # P(X(1) = 0) for the rate-1 lattice walk via an independent MC
        g = TimeGrid(0.05, 1.0)
        cfg = WalkConfig(1, 1.0, 1.0)
        est = estimate_quenched(cfg, InitialCondition.indicator((0,)),
                                ZeroField(g), n_walks=4000, seed=2)
        hits = np.array([sample_walk(cfg, mix64(31, i)).terminal_site() == (0,)
                         for i in range(4000)], dtype=float)
        joint = math.sqrt(est.stderr**2
                          + (hits.std(ddof=1) / math.sqrt(4000))**2)
        assert abs(est.mean - hits.mean()) < 3 * joint


class TestAnnealedEstimator:
    def test_noise_disabled_constant(self):
        g = TimeGrid(0.05, 1.0)
        est = estimate_annealed_moment(WalkConfig(1, 1.0, 1.0),
                                       InitialCondition.constant(),
                                       HurstParameter(0.5), g, p=2.0,
                                       n_outer=10, n_inner=10, noise=False)
        assert est.mean == 1.0

    def test_p_validation(self):
        g = TimeGrid(0.05, 1.0)
        with pytest.raises(ValueError):
            estimate_annealed_moment(WalkConfig(1, 1.0, 1.0),
                                     InitialCondition.constant(),
                                     HurstParameter(0.5), g, p=0.5)

    def test_mean_matches_gaussian_moment_oracle(self):
        # E u(t,x) for u_o = 1 equals E^x exp(Var[rough]/2)
        h = HurstParameter(0.5)
        cfg = WalkConfig(1, 1.0, 1.0)
        g = TimeGrid(0.025, 1.0)
        oracle = annealed_mean_rough_oracle(cfg, h, n_walks=4000, seed=1)
        est = estimate_annealed_moment(cfg, InitialCondition.constant(), h, g,
                                       p=1.0, mode="rough", n_outer=400,
                                       n_inner=100, seed=9)
        # p=1 of |mean| is biased toward the unsigned mean; weights are
        # positive here so the absolute value is exact
        assert abs(est.mean - oracle) < 4 * est.stderr + 0.02

    def test_brownian_annealed_mean_closed_form(self):
        # H=1/2: Var[rough] = t for every path, so E u = e^{t/2}
        h = HurstParameter(0.5)
        cfg = WalkConfig(1, 1.0, 1.0)
        oracle = annealed_mean_rough_oracle(cfg, h, n_walks=50, seed=0)
        assert oracle == pytest.approx(math.exp(0.5), rel=1e-9)
