import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from radcramer.core import (
    LN2,
    DualVector,
    WeightVector,
    as_weights,
    cgf,
    cgf_prime,
    cgf_second,
    entropy_f,
    ln_cosh,
    psi1_star,
    psi1_star_grad,
)
from radcramer.errors import BoundaryError, DomainError

# 50-digit mpmath evaluations, frozen
LNCOSH_1 = 0.43378083048302718703
LNCOSH_1P5 = 0.85544017101379674934
LNCOSH_100 = 99.306852819440054691
LNCOSH_700 = 699.30685281944005469
F_HALF = 0.26162407188227391826
ATANH_HALF = 0.54930614433405484570
SECH2_1 = 0.41997434161402606939

weights_st = st.lists(
    st.floats(-5, 5, allow_nan=False, allow_infinity=False), min_size=1, max_size=12
)


class TestWeightVector:
    def test_norms_cached(self):
        t = WeightVector([1.0, -2.0, 0.0, 0.5])
        assert t.l1_norm == 3.5
        assert t.l2_norm == pytest.approx(math.sqrt(5.25), rel=1e-15)
        assert t.nonzero_count == 3
        assert not t.degenerate

    def test_all_zero_is_degenerate(self):
        t = as_weights([0.0, 0.0])
        assert t.degenerate
        assert t.l1_norm == 0.0

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            WeightVector([1.0, math.nan])

    def test_read_only(self):
        t = as_weights([1.0, 2.0])
        with pytest.raises(ValueError):
            t.weights[0] = 3.0

    @given(weights_st)
    def test_norms_recompute(self, w):
        t = as_weights(w)
        a = np.asarray(w)
        assert t.l1_norm == pytest.approx(np.abs(a).sum(), rel=1e-15, abs=0)
        assert t.l2_norm ** 2 == pytest.approx((a * a).sum(), rel=1e-14, abs=1e-300)
        assert t.nonzero_count == np.count_nonzero(a)


class TestDualVector:
    def test_endpoints_allowed(self):
        assert DualVector([1.0, -1.0]).tolist() == [1.0, -1.0]

    def test_outside_rejected(self):
        with pytest.raises(DomainError):
            DualVector([0.5, 1.0000001])


class TestLnCosh:
    def test_zero(self):
        assert ln_cosh(0.0) == 0.0

    @pytest.mark.parametrize("x,expected", [(1.0, LNCOSH_1), (1.5, LNCOSH_1P5), (100.0, LNCOSH_100)])
    def test_values(self, x, expected):
        assert ln_cosh(x) == pytest.approx(expected, abs=1e-14)

    def test_large_argument_within_one_ulp(self):
        # 1e-14 absolute is below the spacing of doubles near 700
        got = ln_cosh(700.0)
        assert abs(got - LNCOSH_700) <= max(1e-14, np.spacing(LNCOSH_700))

    def test_even(self):
        assert ln_cosh(1.5) == ln_cosh(-1.5)

    def test_no_overflow(self):
        assert np.isfinite(ln_cosh(1e6))

    def test_non_finite_raises(self):
        with pytest.raises(DomainError):
            ln_cosh(math.inf)

    def test_branches_agree_at_threshold(self):
        x = np.array([19.999999, 20.0, 20.000001])
        direct = np.log(np.cosh(x))
        np.testing.assert_allclose(ln_cosh(x), direct, rtol=0, atol=1e-14)

    @given(st.floats(-700, 700, allow_nan=False))
    def test_asymptotic_remainder(self, x):
        r = ln_cosh(x) - (abs(x) - LN2)
        assert 0.0 <= r <= LN2 + 1e-15
        if abs(x) > 40:
            assert r < 1e-15


class TestEntropyF:
    def test_values(self):
        assert entropy_f(0.0) == 0.0
        assert entropy_f(1.0) == 2 * LN2
        assert entropy_f(-1.0) == 2 * LN2
        assert entropy_f(0.5) == pytest.approx(F_HALF, abs=1e-15)

    @pytest.mark.parametrize("x", [1e-150, 1e-9, 1e-4, 0.3])
    def test_relative_precision_near_zero(self, x):
        # series x^2 + x^4/6 + x^6/15 + x^8/28 + ...
        x2 = x * x
        ref = x2 * (1 + x2 / 6 + x2 * x2 / 15 + x2 ** 3 / 28 + x2 ** 4 / 45 + x2 ** 5 / 66)
        tail = x2 ** 7 / 91 if x > 0.1 else 0.0
        assert entropy_f(x) == pytest.approx(ref + tail, rel=1e-6 if x > 0.1 else 1e-15)

    def test_outside_is_inf_marker(self):
        assert entropy_f(1.5) == math.inf
        assert entropy_f(-1.0000001) == math.inf

    def test_dominates_square(self):
        x = np.linspace(-1, 1, 10_001)
        assert np.min(entropy_f(x) - x * x) >= -1e-15

    @given(st.floats(-1, 1))
    def test_even(self, x):
        assert entropy_f(x) == entropy_f(-x)


class TestCgf:
    def test_zero_tilt(self):
        assert cgf([3.0, -1.0], 0.0) == 0.0

    def test_values(self):
        assert cgf([1.0], 1.0) == pytest.approx(LNCOSH_1, abs=1e-15)
        assert cgf([1.0, 2.0], 0.5) == pytest.approx(0.55389533744130471166, abs=1e-15)

    def test_zero_weights_skipped(self):
        assert cgf([1.0, 0.0, 2.0], 0.5) == cgf([1.0, 2.0], 0.5)

    @given(weights_st, st.floats(-50, 50, allow_nan=False))
    def test_bounded_by_l1(self, w, s):
        t = as_weights(w)
        assert abs(cgf(t, s)) <= abs(s) * t.l1_norm * (1 + 1e-12) + 1e-300

    @given(weights_st, st.floats(-50, 50, allow_nan=False))
    def test_even(self, w, s):
        assert cgf(w, s) == pytest.approx(cgf(w, -s), rel=1e-14, abs=1e-300)


class TestCgfPrime:
    def test_values(self):
        assert cgf_prime([1.0, 2.0], 0.0) == 0.0
        assert cgf_prime([1.0, 2.0], 0.5) == pytest.approx(1.9853054691715395347, abs=1e-14)

    def test_limit(self):
        assert abs(cgf_prime([1.0], 50.0) - 1.0) <= 1e-15

    @given(weights_st, st.floats(-30, 30), st.floats(-30, 30))
    def test_odd_and_increasing(self, w, s1, s2):
        t = as_weights(w)
        assert cgf_prime(t, -s1) == -cgf_prime(t, s1)
        assert abs(cgf_prime(t, s1)) <= t.l1_norm
        if s1 < s2 and t.nonzero_count:
            assert cgf_prime(t, s1) <= cgf_prime(t, s2)

    def test_strict_on_grid(self):
        s = np.linspace(-5, 5, 201)
        vals = [cgf_prime([1.0, -0.3, 2.0], x) for x in s]
        assert np.all(np.diff(vals) > 0)

    def test_matches_finite_difference_of_cgf(self):
        t = [0.4, -1.3, 2.0]
        h = 1e-6
        for s in (-1.2, 0.3, 2.5):
            fd = (cgf(t, s + h) - cgf(t, s - h)) / (2 * h)
            assert fd == pytest.approx(cgf_prime(t, s), rel=1e-8)


class TestCgfSecond:
    def test_values(self):
        assert cgf_second([1.0, 2.0], 0.0) == 5.0
        assert cgf_second([1.0], 1.0) == pytest.approx(SECH2_1, abs=1e-15)
        assert cgf_second([1.0], 5.0) < cgf_second([1.0], 1.0)

    def test_positive_far_out(self):
        assert cgf_second([1.0], 300.0) > 0.0

    def test_matches_finite_difference(self):
        t = [0.4, -1.3, 2.0]
        h = 1e-6
        for s in (-1.2, 0.3, 2.5):
            fd = (cgf_prime(t, s + h) - cgf_prime(t, s - h)) / (2 * h)
            assert fd == pytest.approx(cgf_second(t, s), rel=1e-7)


class TestPsi1Star:
    def test_values(self):
        assert psi1_star(np.zeros(3)) == 0.0
        assert psi1_star(DualVector([0.5, 0.5])) == pytest.approx(F_HALF, abs=1e-15)
        assert psi1_star([1.0, -1.0]) == pytest.approx(2 * LN2, abs=1e-15)

    def test_inf_outside_box(self):
        assert psi1_star([0.0, 1.2]) == math.inf

    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=10))
    def test_quadratic_lower_bound(self, b):
        b = np.asarray(b)
        assert psi1_star(b) >= 0.5 * np.dot(b, b) - 1e-15
        if np.dot(b, b) > 0.0:  # b^2 underflows below ~1e-162
            assert psi1_star(b) > 0.0


class TestPsi1StarGrad:
    def test_values(self):
        np.testing.assert_array_equal(psi1_star_grad(np.zeros(2)), np.zeros(2))
        assert psi1_star_grad([0.5])[0] == pytest.approx(ATANH_HALF, abs=1e-15)

    def test_boundary_raises(self):
        with pytest.raises(BoundaryError):
            psi1_star_grad([0.2, 1.0])

    def test_finite_difference(self):
        b = np.array([0.3, -0.7])
        h = 1e-6
        g = psi1_star_grad(b)
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            fd = (psi1_star(b + e) - psi1_star(b - e)) / (2 * h)
            assert abs(fd - g[i]) / abs(g[i]) < 1e-6
