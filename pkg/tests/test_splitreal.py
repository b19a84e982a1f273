import numpy as np
import pytest
from hypothesis import given, strategies as st

from cvbilinear.model import fd_real_gradient, linearize, normalized_misalignment, vec
from cvbilinear.splitreal import (PATHS_2R, PATHS_4R, LinearNlmsState, SplitRealState,
                                  blms2r_step, blms4r_step, bnlms2r_step, bnlms4r_step,
                                  linear_nlms_step, make_split_state, split_misalignment)

from conftest import crandn, rel

seeds = st.integers(0, 2**32 - 1)


def random_split(rng, paths, L, M, step=0.01, delta=1e-4):
    P = len(paths)
    return SplitRealState(paths, rng.standard_normal((P, L)), rng.standard_normal((P, M)),
                          step, step, delta, delta)


class TestTwoR:
    def test_hand_worked_scalar_step(self):
        a, b, c, d, mu = 0.5, -1.0, 2.0, 0.3, 0.1
        x, y = 1.5 - 2.0j, 1.0 + 0.5j
        s = SplitRealState(PATHS_2R, [[a], [b]], [[c], [d]], mu, mu)
        new, e = blms2r_step(s, np.array([[x]]), y)
        e_re = y.real - a * x.real * c
        e_im = y.imag - b * x.imag * d
        assert e == pytest.approx(complex(e_re, e_im))
        assert new.h[:, 0] == pytest.approx([a + mu * e_re * x.real * c, b + mu * e_im * x.imag * d])
        assert new.g[:, 0] == pytest.approx([c + mu * e_re * x.real * a, d + mu * e_im * x.imag * b])

    def test_zero_steps_identity(self, rng):
        s = random_split(rng, PATHS_2R, 3, 2, step=0.0)
        new, _ = blms2r_step(s, crandn(rng, 3, 2), 1 + 1j)
        assert np.array_equal(new.h, s.h) and np.array_equal(new.g, s.g)

    def test_real_signals_decouple(self, rng):
        L, M, mu = 4, 2, 0.02
        s = random_split(rng, PATHS_2R, L, M, step=mu)
        h_ref, g_ref = s.h[0].copy(), s.g[0].copy()
        im_h, im_g = s.h[1].copy(), s.g[1].copy()
        h_true, g_true = rng.standard_normal(L), rng.standard_normal(M)
        for _ in range(200):
            X = rng.standard_normal((L, M)).astype(complex)
            y = h_true @ X.real @ g_true
            s, _ = blms2r_step(s, X, y)
            e = y - h_ref @ X.real @ g_ref
            h_ref, g_ref = h_ref + mu * e * X.real @ g_ref, g_ref + mu * e * X.real.T @ h_ref
        assert np.array_equal(s.h[1], im_h) and np.array_equal(s.g[1], im_g)
        assert rel(s.h[0], h_ref) <= 1e-12 and rel(s.g[0], g_ref) <= 1e-12

    def test_wrong_structure_rejected(self, rng):
        with pytest.raises(ValueError):
            blms2r_step(random_split(rng, PATHS_4R, 2, 2), np.ones((2, 2)), 0j)

    @given(seed=seeds)
    def test_updates_follow_negative_real_gradient(self, seed):
        rng = np.random.default_rng(seed)
        L, M, mu = 3, 2, 0.01
        s = random_split(rng, PATHS_4R, L, M, step=mu)
        X, y = crandn(rng, L, M), crandn(rng, 1)[0]
        new, _ = blms4r_step(s, X, y)

        def cost(H, G):
            yh = SplitRealState(PATHS_4R, H, G, 0, 0).predict(X)
            return abs(y - yh) ** 2

        for p in range(4):
            def ch(v, p=p):
                H = s.h.copy()
                H[p] = v
                return cost(H, s.g)

            def cg(v, p=p):
                G = s.g.copy()
                G[p] = v
                return cost(s.h, G)

            # the update is minus half the real gradient times the step size
            assert rel(new.h[p] - s.h[p], -0.5 * mu * fd_real_gradient(ch, s.h[p])) <= 1e-6
            assert rel(new.g[p] - s.g[p], -0.5 * mu * fd_real_gradient(cg, s.g[p])) <= 1e-6


class TestFourR:
    def test_hand_worked_scalar_step(self):
        h = np.array([0.5, -1.0, 0.2, 0.7])
        g = np.array([2.0, 0.3, -0.4, 1.1])
        mu, x, y = 0.05, 1.5 - 2.0j, 1.0 + 0.5j
        new, e = blms4r_step(SplitRealState(PATHS_4R, h[:, None], g[:, None], mu, mu),
                             np.array([[x]]), y)
        xs = np.array([x.real, x.imag, x.real, x.imag])
        e_re = y.real - h[0] * xs[0] * g[0] - h[1] * xs[1] * g[1]
        e_im = y.imag - h[2] * xs[2] * g[2] - h[3] * xs[3] * g[3]
        err = np.array([e_re, e_re, e_im, e_im])
        assert e == pytest.approx(complex(e_re, e_im))
        assert new.h[:, 0] == pytest.approx(h + mu * err * xs * g)
        assert new.g[:, 0] == pytest.approx(g + mu * err * xs * h)

    @pytest.mark.parametrize("normalized", [False, True])
    def test_contains_two_r(self, rng, normalized):
        L, M, mu = 4, 3, 0.03
        s2 = random_split(rng, PATHS_2R, L, M, step=mu)
        h4 = np.stack([s2.h[0], np.zeros(L), np.zeros(L), s2.h[1]])
        g4 = np.stack([s2.g[0], np.zeros(M), np.zeros(M), s2.g[1]])
        s4 = SplitRealState(PATHS_4R, h4, g4, [mu, 0, 0, mu], [mu, 0, 0, mu])
        step2, step4 = (bnlms2r_step, bnlms4r_step) if normalized else (blms2r_step, blms4r_step)
        for _ in range(100):
            X, y = crandn(rng, L, M), crandn(rng, 1)[0]
            s2, e2 = step2(s2, X, y)
            s4, e4 = step4(s4, X, y)
            assert e2 == e4
        assert np.array_equal(s4.h[[0, 3]], s2.h) and np.array_equal(s4.g[[0, 3]], s2.g)
        assert not np.any(s4.h[1:3]) and not np.any(s4.g[1:3])

    def test_zero_steps_identity(self, rng):
        s = random_split(rng, PATHS_4R, 3, 2, step=0.0)
        new, _ = bnlms4r_step(s, crandn(rng, 3, 2), 1 + 1j)
        assert np.array_equal(new.h, s.h) and np.array_equal(new.g, s.g)

    def test_widely_linear_equivalent_predicts(self, rng):
        s = random_split(rng, PATHS_4R, 3, 2)
        X = crandn(rng, 3, 2)
        a, b = s.linear_equivalents()
        assert abs(s.predict(X) - (a @ vec(X) + b @ vec(X).conj())) <= 1e-12

    def test_split_misalignment_exact_for_real_system(self, rng):
        # real coefficients act identically on Re X and Im X, so both paths carry (h, g)
        h, g = rng.standard_normal(3), rng.standard_normal(2)
        s = SplitRealState(PATHS_2R, [h, h], [g, g], 0.0, 0.0)
        assert split_misalignment(linearize(h, g), s) == pytest.approx(0, abs=1e-30)


class TestSplitNlms:
    def test_isolated_path_a_posteriori(self, rng):
        L, M = 3, 2
        s = random_split(rng, PATHS_2R, L, M, delta=0.0)
        s = SplitRealState(PATHS_2R, s.h, s.g, [1.0, 0.0], 0.0, 0.0, 0.0)
        X, y = crandn(rng, L, M), crandn(rng, 1)[0]
        new, _ = bnlms2r_step(s, X, y)
        post = y.real - new.h[0] @ X.real @ s.g[0]
        assert abs(post) <= 1e-12

    def test_zero_alpha_identity(self, rng):
        s = random_split(rng, PATHS_2R, 3, 2, step=0.0)
        new, _ = bnlms2r_step(s, crandn(rng, 3, 2), 2.0)
        assert np.array_equal(new.h, s.h)

    def test_real_system_matches_real_nlms(self, rng):
        L, M, a, dlt = 4, 2, 0.4, 1e-3
        s = random_split(rng, PATHS_2R, L, M, step=a, delta=dlt)
        h, g = s.h[0].copy(), s.g[0].copy()
        ht, gt = rng.standard_normal(L), rng.standard_normal(M)
        for _ in range(300):
            X = rng.standard_normal((L, M))
            y = ht @ X @ gt
            s, _ = bnlms2r_step(s, X.astype(complex), y)
            e = y - h @ X @ g
            u, v = X @ g, X.T @ h
            h, g = h + a * e * u / (dlt + u @ u), g + a * e * v / (dlt + v @ v)
        assert rel(s.h[0], h) <= 1e-12 and rel(s.g[0], g) <= 1e-12

    def test_representability_gap(self):
        from cvbilinear.adaptive import NlmsState, cbnlms_step
        gaps = []
        for seed in range(3):
            rng = np.random.default_rng(seed)
            L, M, K = 4, 2, 4000
            h, g = crandn(rng, L), crandn(rng, M)
            Xs = crandn(rng, K, L, M)
            ys = np.einsum("l,klm,m->k", h.conj(), Xs, g) + crandn(rng, K, scale=1e-4)
            h0, g0 = crandn(rng, L), crandn(rng, M)
            cv = NlmsState(h0, g0)
            sr = make_split_state("2r", h0, g0, 0.1, 0.1)
            ise_cv, ise_sr = [], []
            for X, y in zip(Xs, ys):
                cv, e1 = cbnlms_step(cv, X, y)
                sr, e2 = bnlms2r_step(sr, X, y)
                ise_cv.append(abs(e1) ** 2)
                ise_sr.append(abs(e2) ** 2)
            tail = slice(-K // 10, None)
            gaps.append(10 * np.log10(np.mean(ise_sr[tail]) / np.mean(ise_cv[tail])))
        assert min(gaps) >= 20


class TestLinearNlms:
    def test_fixed_point(self, rng):
        f, X = crandn(rng, 6), crandn(rng, 3, 2)
        s, e = linear_nlms_step(LinearNlmsState(f), X, f @ vec(X))
        assert abs(e) < 1e-15 and rel(s.f_hat, f) < 1e-15

    def test_a_posteriori_zero(self, rng):
        X, y = crandn(rng, 3, 2), 1 + 2j
        s, _ = linear_nlms_step(LinearNlmsState(np.zeros(6), 1.0, 0.0), X, y)
        assert abs(y - s.f_hat @ vec(X)) <= 1e-12

    def test_identifies_small_system(self):
        rng = np.random.default_rng(2)
        f = crandn(rng, 4)
        s = LinearNlmsState(np.zeros(4), 0.5, 1e-2)
        for _ in range(10**4):
            X = crandn(rng, 2, 2)
            s, _ = linear_nlms_step(s, X, f @ vec(X) + crandn(rng, 1, scale=1e-4)[0])
        assert normalized_misalignment(f, s.f_hat).nm_db <= -60

    def test_invalid_alpha(self):
        with pytest.raises(ValueError):
            LinearNlmsState(np.zeros(2), 2.0)


class TestMakeSplitState:
    def test_two_r_uses_parts(self):
        s = make_split_state("2r", [1 + 2j], [3 - 1j], 0.1, 0.1)
        assert np.array_equal(s.h[:, 0], [1, 2]) and np.array_equal(s.g[:, 0], [3, -1])

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_split_state("3r", [1], [1], 0.1, 0.1)
