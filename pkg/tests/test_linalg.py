import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _instances import centered_instance, rel_err
from slopebounds.bounds import adjusted_slope
from slopebounds.exceptions import DegenerateExplanatory, DegenerateInput, InvalidInput, RankDeficient
from slopebounds.linalg import (
    center_columns,
    correlation,
    make_context,
    multi_slope,
    r_squared,
    residualize,
    simple_slope,
    variance,
)


def dense_projector(w):
    return w @ np.linalg.inv(w.T @ w) @ w.T


class TestCenterColumns:
    def test_subtracts_mean(self):
        np.testing.assert_array_equal(center_columns([[1.0], [2.0], [3.0]])[:, 0], [-1, 0, 1])

    def test_idempotent(self):
        out = center_columns(np.array([-1.0, 0.0, 1.0]))
        np.testing.assert_array_equal(out, [-1, 0, 1])

    def test_constant_column(self):
        np.testing.assert_array_equal(center_columns(np.full(4, 5.0)), np.zeros(4))
        with pytest.raises(RankDeficient):
            make_context(center_columns(np.full((4, 1), 5.0)), labels=["const"])

    def test_bitwise_idempotent_on_random(self, rng):
        m = center_columns(rng.normal(3.0, 2.0, size=(37, 5)))
        assert np.array_equal(center_columns(m), m)
        assert np.all(np.abs(m.mean(axis=0)) <= 1e-10 * np.abs(m).max(axis=0))

    def test_empty(self):
        with pytest.raises(InvalidInput):
            center_columns(np.empty((0, 2)))


class TestProjection:
    def test_empty_basis(self, rng):
        v = rng.normal(size=7)
        ctx = make_context(None, n=7)
        np.testing.assert_array_equal(ctx.fitted(v), np.zeros(7))
        np.testing.assert_array_equal(residualize(ctx, v), v)

    def test_self_projection(self, rng):
        v = rng.normal(size=9)
        ctx = make_context(v[:, None])
        assert np.linalg.norm(residualize(ctx, v)) < 1e-12 * np.linalg.norm(v)

    def test_matches_normal_equations(self, rng):
        w = rng.normal(size=(6, 2))
        v = rng.normal(size=6)
        coef = np.linalg.solve(w.T @ w, w.T @ v)
        np.testing.assert_allclose(make_context(w).fitted(v), w @ coef, rtol=1e-12, atol=1e-12)

    def test_residualize_matches_dense_projector(self, rng):
        w = rng.normal(size=(5, 2))
        t = rng.normal(size=(5, 3))
        expected = (np.eye(5) - dense_projector(w)) @ t
        np.testing.assert_allclose(residualize(make_context(w), t), expected, atol=1e-12)

    def test_orthogonal_targets_unchanged(self, rng):
        w = np.zeros((6, 1))
        w[:3, 0] = 1.0
        t = np.zeros((6, 2))
        t[3:, 0] = [1, 2, 3]
        t[4, 1] = 2.0
        np.testing.assert_allclose(residualize(make_context(w), t), t, atol=0)

    def test_basis_targets_vanish(self, rng):
        w = rng.normal(size=(8, 3))
        assert np.abs(residualize(make_context(w), w)).max() < 1e-12

    def test_row_mismatch(self, rng):
        with pytest.raises(InvalidInput):
            residualize(make_context(rng.normal(size=(5, 2))), rng.normal(size=(6, 1)))

    def test_rank_deficient_names_column(self, rng):
        w = rng.normal(size=(10, 2))
        w = np.column_stack([w, w[:, 0] - 2 * w[:, 1]])
        with pytest.raises(RankDeficient) as err:
            make_context(w, labels=["a", "b", "c"])
        assert err.value.label == "c"

    def test_drop_dependent_keeps_span(self, rng):
        w = rng.normal(size=(10, 2))
        w = np.column_stack([w, w.sum(axis=1)])
        ctx = make_context(w, drop_dependent=True)
        assert ctx.rank == 2
        v = rng.normal(size=10)
        np.testing.assert_allclose(ctx.fitted(v), dense_projector(w[:, :2]) @ v, atol=1e-12)

    def test_idempotence_and_orthogonality_on_correlated_basis(self, rng):
        for _ in range(20):
            n, k = rng.integers(10, 50), rng.integers(1, 6)
            base = rng.normal(size=(n, 1))
            w = base + 0.01 * rng.normal(size=(n, k))
            m = rng.normal(size=(n, 4))
            ctx = make_context(w)
            once = residualize(ctx, m)
            twice = residualize(ctx, once)
            assert np.abs(twice - once).max() <= 1e-8 * np.linalg.norm(m)
            assert np.abs(w.T @ once).max() <= 1e-8 * np.linalg.norm(m) * np.linalg.norm(w, axis=0).max()


class TestScalars:
    def test_simple_slope_colinear(self):
        assert simple_slope([-1, 0, 1], [-2, 0, 2]) == 2.0

    def test_simple_slope_orthogonal(self):
        assert simple_slope([1, -1, 0], [1, 1, -2]) == 0.0

    def test_simple_slope_matches_lstsq(self, rng):
        x, y = rng.normal(size=50), rng.normal(size=50)
        expected = np.linalg.lstsq(x[:, None], y, rcond=None)[0][0]
        assert rel_err(simple_slope(x, y), expected) < 1e-12

    def test_simple_slope_zero_x(self):
        with pytest.raises(DegenerateExplanatory):
            simple_slope(np.zeros(3), [1, 2, 3])

    def test_correlation(self, rng):
        a = rng.normal(size=10)
        assert correlation(a, a) == pytest.approx(1.0)
        assert correlation(a, -a) == pytest.approx(-1.0)
        assert correlation([1, -1, 0, 0], [0, 0, 1, -1]) == 0.0
        with pytest.raises(DegenerateInput):
            correlation(np.zeros(3), a[:3])

    def test_r_squared_extremes(self, rng):
        w = rng.normal(size=(12, 2))
        assert r_squared(w, w @ [1.0, -3.0]) == pytest.approx(1.0)
        v = residualize(make_context(w), rng.normal(size=12))
        assert r_squared(w, v) == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(DegenerateInput):
            r_squared(w, np.zeros(12))

    def test_r_squared_complementary_identity(self, rng):
        w, v = rng.normal(size=(20, 2)), rng.normal(size=20)
        res = residualize(make_context(w), v)
        assert r_squared(w, v) == pytest.approx(1 - (res @ res) / (v @ v), rel=1e-12)

    def test_r_squared_monotone(self, rng):
        for _ in range(30):
            n = int(rng.integers(10, 40))
            cols = rng.normal(size=(n, 6)) + rng.normal(size=(n, 1))
            v = rng.normal(size=n) + cols[:, 0]
            r2 = [r_squared(cols[:, :k], v) for k in range(7)]
            assert all(b >= a - 1e-14 for a, b in zip(r2, r2[1:]))

    def test_variance_population_convention(self):
        assert variance([-1.0, 1.0]) == 1.0


class TestMultiSlope:
    def test_no_covariates(self, rng):
        x, y = rng.normal(size=15), rng.normal(size=15)
        assert rel_err(multi_slope(x, y), simple_slope(x, y)) < 1e-12

    def test_orthogonal_covariates_do_not_adjust(self):
        x = np.array([1.0, -1.0, 0.0, 0.0])
        y = np.array([2.0, -1.0, -0.5, -0.5])
        z = np.array([[0.0], [0.0], [1.0], [-1.0]])
        assert multi_slope(x, y, z) == pytest.approx(simple_slope(x, y), rel=1e-12)

    def test_matches_residualized_path(self, rng):
        y, x, s = centered_instance(rng, 30, 3)
        ctx = make_context(s)
        direct = multi_slope(x, y, s)
        assert rel_err(direct, simple_slope(residualize(ctx, x), residualize(ctx, y))) < 1e-10
        full = np.linalg.lstsq(np.column_stack([x, s]), y, rcond=None)[0][0]
        assert rel_err(direct, full) < 1e-10

    def test_rank_deficient(self, rng):
        x, y = rng.normal(size=10), rng.normal(size=10)
        with pytest.raises(RankDeficient):
            multi_slope(x, y, np.column_stack([x * 2.0]))


class TestResidualIdentities:
    """Coefficient of x is unchanged by first residualizing on part of the covariates."""

    def test_three_paths_and_orthogonality(self, rng):
        for _ in range(40):
            n = int(rng.integers(15, 51))
            p_w = int(rng.integers(0, 5))
            p_z = int(rng.integers(0, 9 - p_w))
            y, x, s = centered_instance(rng, n, p_w + p_z)
            w, z = s[:, :p_w], s[:, p_w:]
            ctx = make_context(w, n=n)
            xr, yr, zr = residualize(ctx, x), residualize(ctx, y), residualize(ctx, z)
            full = multi_slope(x, y, s)
            assert rel_err(full, multi_slope(xr, y, zr)) < 1e-9
            assert rel_err(full, multi_slope(xr, yr, zr)) < 1e-9
            if p_w:
                assert np.abs(w.T @ xr).max() <= 1e-8 * np.linalg.norm(x) * np.linalg.norm(w, axis=0).max()
                if p_z:
                    assert np.abs(w.T @ zr).max() <= 1e-8 * np.linalg.norm(z) * np.linalg.norm(w, axis=0).max()

    def test_slope_from_summary_statistics(self, rng):
        for _ in range(40):
            n = int(rng.integers(15, 51))
            p_w, p_z = int(rng.integers(0, 4)), int(rng.integers(1, 6))
            y, x, s = centered_instance(rng, n, p_w + p_z)
            ctx = make_context(s[:, :p_w], n=n)
            xr, yr = residualize(ctx, x), residualize(ctx, y)
            mask = rng.random(p_z) < 0.6
            zt = residualize(ctx, s[:, p_w:][:, mask])
            beta = multi_slope(xr, yr, zt)
            sub = make_context(zt, n=n)
            fx, fy = sub.fitted(xr), sub.fitted(yr)
            rho_hat = correlation(fx, fy) if np.linalg.norm(fx) > 0 and np.linalg.norm(fy) > 0 else 0.0
            formula = adjusted_slope(
                np.sqrt(variance(yr) / variance(xr)),
                correlation(xr, yr),
                r_squared(sub, xr),
                r_squared(sub, yr),
                rho_hat,
            )
            assert rel_err(beta, float(formula)) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_residual_orthogonal_to_basis(n, k, seed):
    k = min(k, n - 1)
    r = np.random.default_rng(seed)
    w = r.normal(size=(n, k))
    v = r.normal(size=n) * 10 ** r.uniform(-3, 3)
    res = residualize(make_context(w, n=n), v)
    if k:
        assert np.abs(w.T @ res).max() <= 1e-8 * np.linalg.norm(v) * np.linalg.norm(w, axis=0).max()
