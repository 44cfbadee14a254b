import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from radcramer.core import LN2, DualVector, psi1_star
from radcramer.errors import DomainError, InfeasibleError
from radcramer.legendre import SolverConfig, cramer_transform, solve_tilt
from radcramer.variational import kkt_certificate, minimize_entropy, project_box_hyperplane

F_HALF = 0.26162407188227391826
ATANH_HALF = 0.54930614433405484570
# (arctanh 0.9 - arctanh 0.1) / 2 by mpmath
HALF_ATANH_GAP = 0.68594207092607232468

instances = st.lists(
    st.floats(0.1, 2.0).flatmap(lambda x: st.sampled_from([x, -x])), min_size=1, max_size=8
)


def brute_force_n2(t, alpha, step=1e-3):
    """min psi1* along the segment of the constraint line inside the box."""
    t1, t2 = t
    b1 = np.arange(-1.0, 1.0 + step / 2, step)
    b2 = (alpha - t1 * b1) / t2
    ok = np.abs(b2) <= 1.0
    b1, b2 = b1[ok], b2[ok]
    from radcramer.core import entropy_f

    vals = 0.5 * (entropy_f(b1) + entropy_f(b2))
    return float(vals.min())


class TestProjection:
    def test_feasible_point_unchanged(self):
        v = np.array([0.3, -0.2, 0.5])
        t = [1.0, 2.0, -1.0]
        alpha = float(np.dot(t, v))
        np.testing.assert_allclose(project_box_hyperplane(v, t, alpha).values, v, atol=1e-15)

    def test_single_coordinate(self):
        assert project_box_hyperplane([-0.9], [1.0], 0.5).values[0] == pytest.approx(0.5, abs=1e-15)

    def test_hand_solved(self):
        np.testing.assert_allclose(
            project_box_hyperplane([0.4, -0.4], [1.0, 1.0], 0.0).values, [0.4, -0.4], atol=1e-15)
        np.testing.assert_allclose(
            project_box_hyperplane([0.5, 0.1], [1.0, 1.0], 0.0).values, [0.2, -0.2], atol=1e-15)

    def test_box_active(self):
        # lambda = 0.8 puts the first coordinate on its bound
        b = project_box_hyperplane([0.9, 0.0], [1.0, 1.0], 1.5).values
        np.testing.assert_allclose(b, [1.0, 0.5], atol=1e-15)

    def test_zero_weights_only_clipped(self):
        b = project_box_hyperplane([2.0, 0.1, -3.0], [0.0, 1.0, 0.0], 0.5).values
        np.testing.assert_allclose(b, [1.0, 0.5, -1.0], atol=1e-15)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            project_box_hyperplane([0.0, 0.0], [1.0, 1.0], 2.5)

    @settings(max_examples=60, deadline=None)
    @given(instances, st.floats(-0.99, 0.99), st.integers(0, 2**31))
    def test_against_slsqp(self, w, frac, seed):
        w = np.asarray(w)
        rng = np.random.default_rng(seed)
        v = rng.uniform(-2, 2, w.size)
        alpha = frac * np.abs(w).sum()
        got = project_box_hyperplane(v, w, alpha).values
        assert abs(np.dot(w, got) - alpha) <= 1e-12 * max(1, abs(alpha))
        assert np.all(np.abs(got) <= 1.0)
        ref = minimize(
            lambda b: 0.5 * np.sum((b - v) ** 2),
            np.clip(v, -1, 1),
            jac=lambda b: b - v,
            bounds=[(-1, 1)] * w.size,
            constraints=[{"type": "eq", "fun": lambda b: np.dot(w, b) - alpha, "jac": lambda b: w}],
            method="SLSQP",
            options={"ftol": 1e-14, "maxiter": 500},
        )
        assert np.sum((got - v) ** 2) <= np.sum((ref.x - v) ** 2) + 1e-9
        np.testing.assert_allclose(got, ref.x, atol=1e-5)


class TestMinimizeEntropy:
    def test_origin(self):
        sol = minimize_entropy([1.0, 2.0], 0.0)
        assert sol.value == 0.0 and sol.converged
        np.testing.assert_array_equal(sol.b_star.values, [0.0, 0.0])

    def test_symmetric_pair(self):
        sol = minimize_entropy([1.0, 1.0], 1.0)
        np.testing.assert_allclose(sol.b_star.values, [0.5, 0.5], atol=1e-12)
        assert sol.value == pytest.approx(F_HALF, abs=1e-12)

    def test_matches_legendre(self):
        sol = minimize_entropy([1.0, 2.0], 1.5)
        assert abs(sol.value - cramer_transform([1.0, 2.0], 1.5).value) <= 1e-7

    def test_corner(self):
        sol = minimize_entropy([1.0, -2.0, 0.0], -3.0)
        np.testing.assert_array_equal(sol.b_star.values, [-1.0, 1.0, 0.0])
        assert sol.value == 2 * LN2

    def test_zero_weights_pinned(self):
        sol = minimize_entropy([1.0, 0.0, 2.0], 1.5)
        assert sol.b_star.values[1] == 0.0
        assert abs(sol.value - cramer_transform([1.0, 2.0], 1.5).value) <= 1e-7

    def test_degenerate(self):
        assert minimize_entropy([0.0, 0.0], 0.0).value == 0.0
        with pytest.raises(InfeasibleError):
            minimize_entropy([0.0, 0.0], 0.1)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            minimize_entropy([1.0, 2.0], 3.5)

    def test_iteration_cap_reports_non_convergence(self):
        sol = minimize_entropy([0.1, 2.0, 0.3], 2.2, SolverConfig(pg_max_iters=1))
        assert not sol.converged and sol.iterations == 1
        assert sol.value >= cramer_transform([0.1, 2.0, 0.3], 2.2).value

    def test_iterates_feasible_and_descending(self):
        t = np.array([1.9, -0.1, 0.45, 1.2, -0.7])
        alpha = 0.95 * np.abs(t).sum()
        trace = []
        minimize_entropy(t, alpha, callback=lambda k, b, f: trace.append((b, f)))
        assert len(trace) > 2
        for b, f in trace:
            assert abs(np.dot(t, b) - alpha) <= 1e-10 * max(1, abs(alpha))
            assert f == pytest.approx(psi1_star(b), abs=0)
        fs = [f for _, f in trace]
        assert all(b <= a + 1e-15 for a, b in zip(fs, fs[1:]))

    @settings(max_examples=100, deadline=None)
    @given(instances, st.floats(-0.95, 0.95))
    def test_route_equivalence_and_stationarity(self, w, frac):
        alpha = frac * float(np.abs(w).sum())
        sol = minimize_entropy(w, alpha)
        rp = cramer_transform(w, alpha)
        assert sol.converged
        assert abs(sol.value - rp.value) <= 1e-7
        assert abs(sol.s_hat - rp.s_star) <= 1e-6
        np.testing.assert_allclose(sol.b_star.values, np.tanh(rp.s_star * np.asarray(w)), atol=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_brute_force_n2(self, seed):
        rng = np.random.default_rng(seed)
        t = rng.uniform(0.1, 2, 2) * rng.choice([-1, 1], 2)
        alpha = rng.uniform(-0.95, 0.95) * np.abs(t).sum()
        brute = brute_force_n2(t, alpha)
        sol = minimize_entropy(t, alpha)
        assert sol.value <= brute + 1e-12
        assert brute - sol.value <= 1e-3

    def test_value_curve_convex_and_symmetric(self):
        t = [0.3, -1.7, 0.9]
        alphas = np.linspace(-0.95, 0.95, 41) * 2.9
        vals = np.array([minimize_entropy(t, a).value for a in alphas])
        np.testing.assert_allclose(vals, vals[::-1], atol=1e-10)
        assert np.max(vals[1:-1] - 0.5 * (vals[:-2] + vals[2:])) <= 1e-8


class TestKKTCertificate:
    def test_constructed_stationary_point(self):
        t = np.array([1.0, 2.0])
        b = np.tanh(0.7 * t)
        s, r = kkt_certificate(t, b, float(np.dot(t, b)))
        assert s == pytest.approx(0.7, abs=1e-12)
        assert r <= 1e-12

    def test_symmetric_minimizer(self):
        s, r = kkt_certificate([1.0, 1.0], DualVector([0.5, 0.5]), 1.0)
        assert s == pytest.approx(ATANH_HALF, abs=1e-15)
        assert r <= 1e-12

    def test_non_optimal_point(self):
        s, r = kkt_certificate([1.0, 1.0], [0.9, 0.1], 1.0)
        assert r == pytest.approx(HALF_ATANH_GAP, abs=1e-12)

    def test_boundary_components(self):
        assert kkt_certificate([1.0, 1.0], [1.0, 0.0], 1.0)[1] == math.inf
        s, r = kkt_certificate([1.0, -1.0], [1.0, -1.0], 2.0)
        assert s == math.inf and r == 0.0

    def test_zero_weight_must_be_zero(self):
        _, r = kkt_certificate([1.0, 0.0], [0.5, 0.2], 0.5)
        assert r == pytest.approx(math.atanh(0.2), abs=1e-15)

    def test_infeasible_point_rejected(self):
        with pytest.raises(DomainError):
            kkt_certificate([1.0, 1.0], [0.5, 0.5], 0.3)

    def test_agrees_with_solver(self):
        t = [0.4, -1.1, 1.6]
        sol = minimize_entropy(t, 2.0)
        s, r = kkt_certificate(t, sol.b_star, 2.0)
        assert s == pytest.approx(sol.s_hat, abs=1e-12)
        assert r == pytest.approx(sol.kkt_residual, abs=1e-12)
        assert s == pytest.approx(solve_tilt(t, 2.0), abs=1e-9)
