import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvbilinear.model import fd_wirtinger_gradient, linearize, normalized_misalignment
from cvbilinear.optimum import (AlternatingEstimate, SingularMatrixError, cbls_iterate,
                                cbwf_iterate, crbls_iterate, crbwf_iterate, ls_cost,
                                run_alternating, wiener_gradient_g, wiener_gradient_h)
from cvbilinear.signals import Rng, miso_matrices, sample_proper_gaussian
from cvbilinear.stats import (BlockDataset, estimate_stats, exact_stats, ma1_covariance,
                              white_covariance)

from conftest import crandn, rel


def miso_data(seed, L, M, N, noise=0.0, real_g=False):
    rng = Rng(seed)
    h = sample_proper_gaussian(rng, 1.0, L)
    g = rng.normal(M) if real_g else sample_proper_gaussian(rng, 1.0, M)
    X = miso_matrices(sample_proper_gaussian(rng, 1.0, (N + L - 1, M)), L)[L - 1:]
    y = np.einsum("l,nlm,m->n", h.conj(), X, g) + sample_proper_gaussian(rng, noise, N)
    return h, g, BlockDataset(X, y)


class TestWienerOneStep:
    def test_unit_scaling(self, rng):
        h, g = crandn(rng, 4), crandn(rng, 3)
        est = cbwf_iterate(exact_stats(white_covariance(4), h, g), AlternatingEstimate(None, g))
        assert rel(est.h_hat, h) <= 1e-12

    @pytest.mark.parametrize("cov", [white_covariance(6), ma1_covariance(6, 0.7)])
    def test_closed_form_scaling(self, rng, cov):
        h, g, g0 = crandn(rng, 6), crandn(rng, 3), crandn(rng, 3)
        stats = exact_stats(cov, h, g)
        est = cbwf_iterate(stats, AlternatingEstimate(None, g0))
        nu = np.vdot(g, g0) / np.vdot(g0, g0)
        assert rel(est.h_hat, nu * h) <= 1e-10
        assert rel(est.g_hat, np.vdot(g0, g0) / np.vdot(g0, g) * g) <= 1e-10
        assert normalized_misalignment(linearize(h, g), est.f_hat).nm <= 1e-20
        again = cbwf_iterate(stats, est)
        assert rel(again.f_hat, est.f_hat) <= 1e-10

    def test_large_ma1_reaches_floor(self):
        rng = Rng(4)
        h, g, g0 = (sample_proper_gaussian(rng, 10, n) for n in (64, 5, 5))
        est = cbwf_iterate(exact_stats(ma1_covariance(64, np.sqrt(0.5)), h, g),
                           AlternatingEstimate(None, g0))
        assert normalized_misalignment(linearize(h, g), est.f_hat).nm_db <= -200

    def test_zero_g_rejected(self):
        stats = exact_stats(white_covariance(2), np.ones(2), np.ones(2))
        with pytest.raises(ValueError):
            cbwf_iterate(stats, AlternatingEstimate(np.ones(2), np.zeros(2)))

    def test_singular_statistics(self):
        stats = exact_stats(np.zeros((2, 2)), np.ones(2), np.ones(2))
        with pytest.raises(SingularMatrixError, match="iteration 1"):
            cbwf_iterate(stats, AlternatingEstimate(np.ones(2), np.ones(2)))


class TestLeastSquares:
    def test_noiseless_interpolation(self):
        h, g, data = miso_data(1, 4, 2, 32)
        hist = run_alternating(cbls_iterate, data, AlternatingEstimate(np.ones(4), np.ones(2)), 40,
                               tol=None)
        assert normalized_misalignment(linearize(h, g), hist[-1].f_hat).nm_db <= -200

    def test_true_g_gives_linear_ls(self):
        h, g, data = miso_data(2, 5, 3, 40, noise=0.1)
        est = cbls_iterate(data, AlternatingEstimate(None, g))
        U = data.X @ g  # ordinary LS problem y = U h* + n
        ref = np.linalg.lstsq(U, data.y, rcond=None)[0].conj()
        assert rel(est.h_hat, ref) <= 1e-10

    def test_matches_wiener_on_sample_stats(self):
        _, _, data = miso_data(3, 8, 3, 96, noise=0.1)
        stats = estimate_stats(data)
        a = b = AlternatingEstimate(None, np.ones(3, complex))
        for _ in range(20):
            a, b = cbls_iterate(data, a), cbwf_iterate(stats, b)
            assert rel(a.h_hat, b.h_hat) <= 1e-10 and rel(a.g_hat, b.g_hat) <= 1e-10

    def test_underdetermined_is_singular(self):
        _, _, data = miso_data(4, 6, 2, 3)
        with pytest.raises(SingularMatrixError):
            cbls_iterate(data, AlternatingEstimate(None, np.ones(2)))

    @given(seed=st.integers(0, 2**32 - 1))
    def test_half_steps_never_increase_cost(self, seed):
        h, g, data = miso_data(seed % 2**32, 4, 3, 30, noise=0.3)
        rng = np.random.default_rng(seed)
        est = AlternatingEstimate(crandn(rng, 4), crandn(rng, 3))
        cost = ls_cost(data, est.h_hat, est.g_hat)
        for _ in range(5):
            nxt = cbls_iterate(data, est)
            mid = ls_cost(data, nxt.h_hat, est.g_hat)
            end = ls_cost(data, nxt.h_hat, nxt.g_hat)
            assert mid <= cost * (1 + 1e-10)
            assert end <= mid * (1 + 1e-10)
            est, cost = nxt, end

    @given(seed=st.integers(0, 2**32 - 1))
    def test_wiener_half_steps_never_increase_mse(self, seed):
        rng = np.random.default_rng(seed)
        h, g = crandn(rng, 5), crandn(rng, 2)
        stats = exact_stats(ma1_covariance(5, 1.0), h, g, noise_var=0.5)
        est = AlternatingEstimate(crandn(rng, 5), crandn(rng, 2))
        cost = stats.mse(est.h_hat, est.g_hat)
        nxt = cbwf_iterate(stats, est)
        mid = stats.mse(nxt.h_hat, est.g_hat)
        assert mid <= cost + 1e-10 * abs(cost)
        assert stats.mse(nxt.h_hat, nxt.g_hat) <= mid + 1e-10 * abs(mid)


class TestGradients:
    def test_stationary_after_iteration(self):
        _, _, data = miso_data(6, 4, 3, 60, noise=0.2)
        stats = estimate_stats(data)
        g0 = np.ones(3, complex)
        est = cbwf_iterate(stats, AlternatingEstimate(None, g0))
        # h is optimal for the g it was solved with, g for the new h
        h_mid = cbwf_iterate(stats, AlternatingEstimate(None, g0)).h_hat
        assert np.max(np.abs(wiener_gradient_h(stats, h_mid, g0))) <= 1e-8
        assert np.max(np.abs(wiener_gradient_g(stats, est.h_hat, est.g_hat))) <= 1e-8
        num = fd_wirtinger_gradient(lambda v: stats.mse(est.h_hat, v), est.g_hat)
        assert np.max(np.abs(num)) <= 1e-8

    def test_analytic_matches_finite_differences(self, rng):
        h, g = crandn(rng, 4), crandn(rng, 3)
        stats = exact_stats(ma1_covariance(4, 0.8), h, g, 0.1)
        hh, gg = crandn(rng, 4), crandn(rng, 3)
        assert rel(wiener_gradient_h(stats, hh, gg),
                   fd_wirtinger_gradient(lambda v: stats.mse(v, gg), hh)) <= 1e-6
        assert rel(wiener_gradient_g(stats, hh, gg),
                   fd_wirtinger_gradient(lambda v: stats.mse(hh, v), gg)) <= 1e-6


class TestMixedBlock:
    def test_g_stays_real(self):
        _, g, data = miso_data(7, 4, 3, 40, noise=0.1, real_g=True)
        est = AlternatingEstimate(None, np.ones(3))
        for _ in range(5):
            est = crbls_iterate(data, est)
            assert est.g_hat.dtype == float

    def test_real_g_one_step(self):
        rng = np.random.default_rng(8)
        h, g = crandn(rng, 4), rng.standard_normal(3)
        est = crbwf_iterate(exact_stats(white_covariance(4), h, g), AlternatingEstimate(None, g))
        assert rel(est.h_hat, h) <= 1e-12

    def test_same_floor_as_complex(self):
        rng = np.random.default_rng(9)
        h, g = crandn(rng, 6), rng.standard_normal(3)
        stats = exact_stats(ma1_covariance(6, 0.5), h, g)
        g0 = rng.standard_normal(3)
        f = linearize(h, g)
        mixed = crbwf_iterate(stats, AlternatingEstimate(None, g0))
        full = cbwf_iterate(stats, AlternatingEstimate(None, g0.astype(complex)))
        a = normalized_misalignment(f, mixed.f_hat).nm
        b = normalized_misalignment(f, full.f_hat).nm
        assert abs(a - b) <= 1e-12


class TestRunAlternating:
    def test_early_stop_and_budget(self, rng):
        h, g = crandn(rng, 4), crandn(rng, 2)
        stats = exact_stats(white_covariance(4), h, g)
        start = AlternatingEstimate(np.ones(4), crandn(rng, 2))
        assert len(run_alternating(cbwf_iterate, stats, start)) < 41
        assert len(run_alternating(cbwf_iterate, stats, start, iterations=7, tol=None)) == 8
