"""Linear/remainder splitting for stochastic Burgers."""

import numpy as np
import pytest

from conftest import sin_field
from spdekit.burgers import (
    BurgersProblem,
    PicardError,
    apriori_report,
    compose,
    sample_linear_part,
    solve_remainder,
    solve_split,
)
from spdekit.noise import CovarianceSpec, NoiseSampler
from spdekit.spectral import TorusGrid, lp_norm, zero_field


def dead_noise(grid):
    return CovarianceSpec.from_eigenvalues(grid, np.zeros(grid.n_modes + 1))


def l2_dist(a, b):
    d = a - b
    return float(np.sqrt(d[0].real ** 2 + 2 * np.sum(np.abs(d[1:]) ** 2)))


class TestProblemValidation:
    def test_exponent_and_tolerance(self):
        g = TorusGrid(8)
        with pytest.raises(ValueError, match="p must be >= 2"):
            BurgersProblem(g, 0.1, 1e-3, zero_field(g), p=1.0)
        with pytest.raises(ValueError, match="picard_tol"):
            BurgersProblem(g, 0.1, 1e-3, zero_field(g), picard_tol=0.0)

    def test_default_noise_is_mean_free(self):
        g = TorusGrid(8)
        prob = BurgersProblem(g, 0.1, 1e-3, zero_field(g))
        assert prob.q.lam[0] == 0.0
        assert np.all(prob.q.lam[1:] == 1.0)


class TestLinearPart:
    def test_dead_spec_gives_zero(self):
        g = TorusGrid(16)
        prob = BurgersProblem(g, 0.05, 1e-3, zero_field(g), q=dead_noise(g))
        v = sample_linear_part(prob, NoiseSampler(prob.q, 1))
        assert np.all(v.states == 0)

    def test_starts_at_zero(self):
        g = TorusGrid(16)
        prob = BurgersProblem(g, 0.05, 1e-3, zero_field(g))
        v = sample_linear_part(prob, NoiseSampler(prob.q, 2))
        assert np.all(v.states[0] == 0)

    def test_single_mode_variance_against_closed_form(self):
        # Var v_k(t) = (1 - e^{-2 mu t}) / (2 mu), MC over paths
        g = TorusGrid(2)
        lam = np.zeros(3)
        lam[1] = 1.0
        q = CovarianceSpec.from_eigenvalues(g, lam)
        prob = BurgersProblem(g, 0.02, 1e-3, zero_field(g), q=q)
        n = 800
        t_idx = 10
        t = t_idx * prob.dt
        mu = g.laplacian_eigs[1]
        samples = np.empty(n)
        for i in range(n):
            v = sample_linear_part(prob, NoiseSampler(q, 50, i))
            samples[i] = abs(v.states[t_idx, 1]) ** 2
        target = (1 - np.exp(-2 * mu * t)) / (2 * mu)
        se = np.std(samples, ddof=1) / np.sqrt(n)
        assert abs(np.mean(samples) - target) < 3 * se

    def test_stationarity_onset_closed_form(self):
        # once mu t > 3 the variance sits within 1% of lambda/(2 mu)
        mu = (2 * np.pi * 3) ** 2
        t = 3.0 / mu * 1.2
        var = (1 - np.exp(-2 * mu * t)) / (2 * mu)
        assert abs(var - 1 / (2 * mu)) / (1 / (2 * mu)) < 0.01


class TestRemainder:
    def test_zero_data_zero_noise_one_iteration(self):
        g = TorusGrid(16)
        prob = BurgersProblem(g, 0.05, 1e-3, zero_field(g), q=dead_noise(g))
        v = sample_linear_part(prob, NoiseSampler(prob.q, 1))
        w, iters, residuals, _ = solve_remainder(prob, v)
        assert np.all(w.states == 0)
        assert all(i == 1 for i in iters)

    def test_deterministic_self_convergence(self):
        # v = 0, w0 = 0.1 sin: converged w matches a fine-dt reference
        g = TorusGrid(32)
        w0 = sin_field(g, amplitude=0.1)
        stats = {}
        for dt in (1e-3, 1e-3 / 16):
            prob = BurgersProblem(g, 0.2, dt, w0, q=dead_noise(g), picard_tol=1e-12)
            v = sample_linear_part(prob, NoiseSampler(prob.q, 1))
            w, _, _, _ = solve_remainder(prob, v)
            stats[dt] = w.states[-1]
        err = l2_dist(stats[1e-3], stats[1e-3 / 16])
        ref_norm = np.sqrt(
            stats[1e-3 / 16][0].real ** 2 + 2 * np.sum(np.abs(stats[1e-3 / 16][1:]) ** 2)
        )
        assert err / ref_norm < 1e-3

    def test_contraction_ratios_below_one(self):
        g = TorusGrid(64)
        prob = BurgersProblem(g, 0.05, 2.5e-4, sin_field(g), picard_tol=1e-11)
        split = solve_split(prob, seed=5)
        dists = split.iterate_distances[0]
        ratios = [dists[i + 1] / dists[i] for i in range(len(dists) - 1) if dists[i] > 0]
        assert all(r < 1.0 for r in ratios[1:])

    def test_maxit_exceeded_names_window(self):
        g = TorusGrid(32)
        prob = BurgersProblem(
            g, 0.05, 1e-3, sin_field(g, amplitude=8.0), picard_maxit=1, picard_tol=1e-14
        )
        v = sample_linear_part(prob, NoiseSampler(prob.q, 3))
        with pytest.raises(PicardError, match="window 0"):
            solve_remainder(prob, v)

    def test_mean_conservation(self):
        g = TorusGrid(32)
        prob = BurgersProblem(g, 0.1, 5e-4, sin_field(g))
        split = solve_split(prob, seed=11)
        assert np.max(np.abs(split.w_path.mode0_series())) < 1e-10
        assert np.max(np.abs(split.v_path.mode0_series())) == 0.0  # mean-free noise


class TestCompose:
    def test_zero_remainder(self):
        g = TorusGrid(16)
        prob = BurgersProblem(g, 0.02, 1e-3, zero_field(g))
        v = sample_linear_part(prob, NoiseSampler(prob.q, 7))
        w, _, _, _ = solve_remainder(prob, v)
        u = compose(v, w)
        # with zero initial remainder w is driven only by v; composing adds them
        assert np.allclose(u.states, v.states + w.states)

    def test_zero_linear_part(self):
        g = TorusGrid(16)
        prob = BurgersProblem(g, 0.02, 1e-3, sin_field(g), q=dead_noise(g))
        v = sample_linear_part(prob, NoiseSampler(prob.q, 7))
        w, _, _, _ = solve_remainder(prob, v)
        u = compose(v, w)
        assert np.array_equal(u.states, w.states)

    def test_subtracting_recovers(self):
        g = TorusGrid(16)
        prob = BurgersProblem(g, 0.02, 1e-3, sin_field(g))
        split = solve_split(prob, seed=13)
        back = split.u_path.states - split.v_path.states
        assert np.max(np.abs(back - split.w_path.states)) < 1e-14

    def test_time_grid_mismatch(self):
        g = TorusGrid(16)
        p1 = BurgersProblem(g, 0.02, 1e-3, zero_field(g))
        p2 = BurgersProblem(g, 0.04, 1e-3, zero_field(g))
        v1 = sample_linear_part(p1, NoiseSampler(p1.q, 1))
        v2 = sample_linear_part(p2, NoiseSampler(p2.q, 1))
        with pytest.raises(ValueError, match="time grids"):
            compose(v1, v2)


class TestAprioriReport:
    def test_zero_remainder_ratio(self):
        g = TorusGrid(16)
        prob = BurgersProblem(g, 0.02, 1e-3, zero_field(g), q=dead_noise(g))
        v = sample_linear_part(prob, NoiseSampler(prob.q, 1))
        w, _, _, _ = solve_remainder(prob, v)
        rep = apriori_report(prob, w, v)
        assert rep.estimate == 0.0

    def test_deterministic_decay_ratio_below_one(self):
        # zero noise, p = 2: dissipativity gives sup_t |w| <= |w_0|
        g = TorusGrid(32)
        prob = BurgersProblem(g, 0.1, 5e-4, sin_field(g), p=2.0, q=dead_noise(g))
        v = sample_linear_part(prob, NoiseSampler(prob.q, 1))
        w, _, _, _ = solve_remainder(prob, v)
        rep = apriori_report(prob, w, v)
        assert rep.metadata["sup_w_lp"] <= rep.metadata["w0_lp"] * (1 + 1e-12)
        assert rep.estimate <= 1.0

    def test_doubling_w0_monotone_trend(self):
        g = TorusGrid(32)
        sups = []
        for amp in (0.25, 0.5, 1.0):
            prob = BurgersProblem(g, 0.05, 5e-4, sin_field(g, amplitude=amp))
            sup_w = 0.0
            for seed in range(5):
                split = solve_split(prob, seed=seed)
                rep = apriori_report(prob, split.w_path, split.v_path)
                sup_w += rep.metadata["sup_w_lp"]
            sups.append(sup_w / 5)
        assert sups[0] < sups[1] < sups[2]
        # doubling w0 at fixed noise does not more than double sup|w| plus offset
        assert sups[2] < 2 * sups[1] + 0.5
