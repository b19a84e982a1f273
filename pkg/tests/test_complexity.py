import numpy as np
import pytest

from cvbilinear.adaptive import LmsState, cblms_step
from cvbilinear.complexity import (VARIANTS, complexity_table, instrumented_count,
                                   instrumented_step, mult_count)
from cvbilinear.splitreal import PATHS_4R, SplitRealState, blms4r_step

from conftest import crandn, rel

GRID = [(L, M) for L in range(1, 9) for M in range(1, 9)]


class TestClosedForms:
    def test_two_r_example(self):
        assert mult_count("two_r_v1", 2, 3).count == 56

    def test_fully_complex_scalar(self):
        assert mult_count("fully_cv_v1", 1, 1).count == 22

    @pytest.mark.parametrize("L, M", GRID)
    def test_four_r_doubles_two_r(self, L, M):
        for order in ("v1", "v2"):
            assert mult_count(f"four_r_{order}", L, M).count == 2 * mult_count(f"two_r_{order}", L, M).count

    @pytest.mark.parametrize("L, M", GRID)
    def test_orderings(self, L, M):
        for order in ("v1", "v2"):
            assert mult_count(f"fully_cv_{order}", L, M).count < mult_count(f"four_r_{order}", L, M).count
        diff = mult_count("two_r_v2", L, M).count - mult_count("two_r_v1", L, M).count
        assert diff == 2 * (L - M)

    def test_invalid(self):
        with pytest.raises(ValueError):
            mult_count("three_r_v1", 1, 1)
        with pytest.raises(ValueError):
            mult_count("two_r_v1", 0, 1)


class TestInstrumented:
    def test_example(self):
        assert instrumented_count("two_r_v1", 2, 3) == 56

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_matches_closed_form_on_grid(self, variant):
        for L, M in GRID:
            assert instrumented_count(variant, L, M) == mult_count(variant, L, M).count

    def test_four_r_is_twice_two_r(self):
        for L, M in GRID:
            assert instrumented_count("four_r_v1", L, M) == 2 * instrumented_count("two_r_v1", L, M)

    @pytest.mark.parametrize("order", ["v1", "v2"])
    def test_shadow_execution_matches_filters(self, rng, order):
        L, M, mu = 3, 2, 0.05
        h, g, X, y = crandn(rng, L), crandn(rng, M), crandn(rng, L, M), crandn(rng, 1)[0]
        h1, g1, e, _ = instrumented_step(f"fully_cv_{order}", h, g, X, y, mu, mu)
        s, e_ref = cblms_step(LmsState(h, g, mu, mu), X, y)
        assert rel(h1, s.h_hat) < 1e-13 and rel(g1, s.g_hat) < 1e-13 and abs(e - e_ref) < 1e-13
        H, G = rng.standard_normal((4, L)), rng.standard_normal((4, M))
        H1, G1, e, _ = instrumented_step(f"four_r_{order}", H, G, X, y, mu, mu)
        s, e_ref = blms4r_step(SplitRealState(PATHS_4R, H, G, mu, mu), X, y)
        assert rel(H1, s.h) < 1e-13 and rel(G1, s.g) < 1e-13 and abs(e - e_ref) < 1e-13

    def test_table_rows(self):
        rows = complexity_table(2, 2)
        assert len(rows) == 2 * 2 * len(VARIANTS)
        assert all(r[3] == r[4] for r in rows)
