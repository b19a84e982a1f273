import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvbilinear.signals import Rng, miso_matrices, sample_proper_gaussian
from cvbilinear.stats import (BlockDataset, SecondOrderStats, _rg_blocked, _rh_blocked, build_rg,
                              build_rh, estimate_stats, exact_stats, ma1_covariance,
                              white_covariance)

from conftest import crandn


def random_hermitian_psd(rng, n):
    A = crandn(rng, n, n)
    return A @ A.conj().T / n


class TestEstimateStats:
    def test_single_sample(self):
        s = estimate_stats(BlockDataset(np.array([[[1.0]]]), np.array([2.0])))
        assert np.array_equal(s.r_xx, [[1]])
        assert np.array_equal(s.r_Xy, [[2]])

    def test_white_inputs(self):
        rng = Rng(1)
        X = sample_proper_gaussian(rng, 1.0, (10**5, 4, 2))
        s = estimate_stats(BlockDataset(X, np.zeros(10**5)))
        assert np.max(np.abs(s.r_xx - np.eye(8))) < 0.05

    def test_hermitian_bit_exact(self, rng):
        s = estimate_stats(BlockDataset(crandn(rng, 30, 3, 2), crandn(rng, 30)))
        assert np.array_equal(s.r_xx, s.r_xx.conj().T)

    def test_bad_dataset(self):
        with pytest.raises(ValueError):
            BlockDataset(np.ones((2, 2, 2)), np.ones(3))


class TestExactStats:
    def test_cross_correlation_is_r_times_conj_f(self, rng):
        h, g = crandn(rng, 3), crandn(rng, 2)
        s = exact_stats(white_covariance(3), h, g)
        assert np.allclose(s.r_Xy, np.outer(h, g.conj()))

    def test_ma1_covariance(self):
        C = ma1_covariance(3, 1.0)
        assert np.array_equal(C.real, [[2, 1, 0], [1, 2, 1], [0, 1, 2]])

    def test_mse_is_zero_at_truth(self, rng):
        h, g = crandn(rng, 4), crandn(rng, 2)
        s = exact_stats(ma1_covariance(4, 0.7), h, g, noise_var=0.3)
        assert s.mse(h, g) == pytest.approx(0.3)

    def test_inconsistent_shapes(self):
        with pytest.raises(ValueError):
            SecondOrderStats(np.eye(3), np.ones((2, 2)))


class TestKroneckerMatrices:
    def test_identity_covariance(self, rng):
        g = crandn(rng, 3)
        assert np.allclose(build_rg(np.eye(12), g), np.vdot(g, g).real * np.eye(4))

    def test_block_diagonal_covariance(self, rng):
        g = crandn(rng, 3)
        Rxx = random_hermitian_psd(rng, 4)
        assert np.allclose(build_rg(np.kron(np.eye(3), Rxx), g), np.vdot(g, g).real * Rxx)

    def test_expectation_form(self):
        rng = Rng(5)
        N, L, M = 10**5, 3, 2
        X = sample_proper_gaussian(rng, 1.0, (N, L, M))
        g, h = sample_proper_gaussian(rng, 1.0, M), sample_proper_gaussian(rng, 1.0, L)
        u = X @ g
        v = np.einsum("nlm,l->nm", X.conj(), h)
        R = estimate_stats(BlockDataset(X, np.zeros(N))).r_xx
        assert np.max(np.abs(build_rg(np.eye(L * M), g) - u.T @ u.conj() / N)) < 0.05
        assert np.max(np.abs(build_rg(R, g) - u.T @ u.conj() / N)) < 1e-10
        assert np.max(np.abs(build_rh(R, h) - v.T @ v.conj() / N)) < 1e-10

    def test_blocked_contraction_matches_materialized(self, rng):
        L, M = 5, 3
        R = random_hermitian_psd(rng, L * M)
        g, h = crandn(rng, M), crandn(rng, L)
        G = np.kron(g[:, None], np.eye(L))
        H = np.kron(np.eye(M), h[:, None])
        assert np.allclose(_rg_blocked(R, g), G.T @ R @ G.conj())
        assert np.allclose(_rh_blocked(R, h), H.T @ R.conj() @ H.conj())

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            build_rg(np.eye(4), np.zeros(2))

    @given(L=st.integers(1, 6), M=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
    def test_hermitian_psd(self, L, M, seed):
        rng = np.random.default_rng(seed)
        R = random_hermitian_psd(rng, L * M)
        for A in (build_rg(R, crandn(rng, M)), build_rh(R, crandn(rng, L))):
            assert np.array_equal(A, A.conj().T)
            assert np.linalg.eigvalsh(A).min() >= -1e-10 * max(1.0, np.abs(A).max())
