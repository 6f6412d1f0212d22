import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pandemic_renewal import exact_rw as rw

from oracles import enumerate_laws, no_zero_after, origin_count_by_convolution, return_count_dp

# frozen from tests/oracles.py (path counting, no closed forms)
U_50 = 0.11227517265921705
U_100 = 0.07958923738717877
LAST_ZERO_CDF_300_150 = 0.502115004183252
EXPECTED_RETURNS_300 = 12.854281840129365


@pytest.fixture(scope="module")
def laws():
    return {m: enumerate_laws(m) for m in range(2, 17, 2)}


def test_frozen_values_match_oracles():
    assert origin_count_by_convolution(50) / 2**50 == U_50
    assert float(no_zero_after(300, 150)) == pytest.approx(LAST_ZERO_CDF_300_150, rel=1e-15)


class TestAtOrigin:
    def test_small_epochs(self):
        assert rw.at_origin_prob(0) == 1.0
        assert rw.at_origin_prob(2) == 0.5

    def test_epoch_50(self):
        assert rw.at_origin_prob(50) == pytest.approx(U_50, rel=1e-14)

    @pytest.mark.parametrize("bad", [1, 3, 51, -2])
    def test_rejects_odd_and_negative(self, bad):
        with pytest.raises(rw.OddEpochError):
            rw.at_origin_prob(bad)

    def test_exact_and_log_space_agree(self):
        for n in range(0, 501):
            exact = float(rw.at_origin_prob_exact(2 * n))
            assert math.exp(rw.log_at_origin_prob(2 * n)) == pytest.approx(exact, rel=1e-12, abs=0)
        # log-space branch on its own, below the exact threshold as well
        ks = np.arange(8, 501)
        via_stirling = np.exp(rw._log_gamma_half_ratio(ks) - rw._HALF_LOG_PI)
        exact = np.array([float(rw.at_origin_prob_exact(2 * k)) for k in ks])
        assert np.max(np.abs(via_stirling / exact - 1)) < 1e-12

    def test_recursion(self):
        for n in range(1, 400):
            ratio = rw.at_origin_prob(2 * n) / rw.at_origin_prob(2 * n - 2)
            assert ratio == pytest.approx((2 * n - 1) / (2 * n), rel=1e-12)

    def test_huge_epoch_stays_finite(self):
        p = rw.at_origin_prob(2 * 10**9)
        assert p == pytest.approx(1 / math.sqrt(10**9 * math.pi), rel=1e-9)


class TestSurvival:
    def test_values(self):
        assert rw.no_return_survival(2) == 0.5
        assert rw.no_return_survival(50) == pytest.approx(U_50, rel=1e-14)
        assert rw.no_return_survival(100) == pytest.approx(U_100, rel=1e-14)

    def test_zero_epoch_rejected(self):
        with pytest.raises(rw.OddEpochError):
            rw.no_return_survival(0)
        with pytest.raises(rw.OddEpochError):
            rw.no_return_survival(7)

    def test_asymptotic_values(self):
        assert rw.no_return_survival_asymptotic(50) == pytest.approx(0.1128379167, rel=1e-9)
        assert rw.no_return_survival_asymptotic(100) == pytest.approx(0.0797884561, rel=1e-9)
        assert rw.no_return_survival_asymptotic(2) == pytest.approx(1 / math.sqrt(math.pi))

    def test_asymptotic_relative_gap_below_quarter_n(self):
        for n in range(25, 2000):
            exact = rw.no_return_survival(2 * n)
            gap = abs(exact - rw.no_return_survival_asymptotic(2 * n)) / exact
            assert gap < 1 / (4 * n)


class TestFirstReturn:
    def test_values(self):
        assert rw.first_return_pmf(2) == 0.5
        assert rw.first_return_pmf(4) == 0.125

    def test_matches_difference_of_u(self):
        for n in range(1, 300):
            diff = rw.at_origin_prob(2 * n - 2) - rw.at_origin_prob(2 * n)
            assert rw.first_return_pmf(2 * n) == pytest.approx(diff, rel=1e-12)
            assert rw.first_return_pmf_exact(2 * n) == rw.at_origin_prob_exact(2 * n - 2) - rw.at_origin_prob_exact(2 * n)

    @pytest.mark.parametrize("n", [1, 5, 32, 150, 1000])
    def test_telescoping(self, n):
        total = math.fsum(rw.first_return_pmf(2 * k) for k in range(1, n + 1))
        assert total + rw.no_return_survival(2 * n) == pytest.approx(1.0, abs=1e-12)


class TestReturnCount:
    def test_small(self):
        assert list(rw.return_count_pmf(2).mass) == [0.5, 0.5]
        assert list(rw.return_count_pmf(4).mass) == [0.375, 0.375, 0.25]
        assert list(rw.return_count_pmf(0).mass) == [1.0]

    def test_horizon_300_mean(self):
        pmf = rw.return_count_pmf(300)
        assert pmf.mean() == pytest.approx(EXPECTED_RETURNS_300, abs=1e-10)
        assert pmf.mass.sum() == pytest.approx(1.0, abs=1e-12)

    def test_horizon_300_against_dp(self):
        dp = return_count_dp(300)
        np.testing.assert_allclose(rw.return_count_pmf(300).mass, dp, rtol=1e-11, atol=1e-15)

    def test_exact_tier_matches_float(self):
        for m in range(0, 65, 2):
            exact = rw.return_count_pmf_exact(m)
            assert sum(exact) == 1
            np.testing.assert_allclose(rw.return_count_pmf(m).mass, [float(p) for p in exact], rtol=1e-13)

    def test_odd_rejected(self):
        with pytest.raises(rw.OddEpochError):
            rw.return_count_pmf(5)


class TestExpectedReturns:
    def test_values(self):
        assert rw.expected_returns(2) == 0.5
        assert rw.expected_returns(4) == 0.875
        assert rw.expected_returns(300) == pytest.approx(EXPECTED_RETURNS_300, rel=1e-13)

    @pytest.mark.parametrize("m", [2, 10, 64, 66, 300, 1000, 5000])
    def test_closed_form_matches_sum(self, m):
        assert rw.expected_returns(m) == pytest.approx(rw.expected_returns_by_sum(m), abs=1e-10)

    def test_exact(self):
        assert rw.expected_returns_exact(4) == Fraction(7, 8)
        assert float(rw.expected_returns_exact(300)) == pytest.approx(EXPECTED_RETURNS_300, rel=1e-15)


class TestLastZero:
    def test_small(self):
        assert list(rw.last_zero_pmf(2).mass) == [0.5, 0.5]
        assert list(rw.last_zero_pmf(4).mass) == [0.375, 0.25, 0.375]

    @pytest.mark.parametrize("m", [2, 10, 64, 66, 300, 1001 * 2])
    def test_normalised_and_symmetric(self, m):
        mass = rw.last_zero_pmf(m).mass
        assert math.fsum(mass) == pytest.approx(1.0, abs=1e-12)
        assert np.array_equal(mass, mass[::-1])

    def test_cdf(self):
        assert rw.last_zero_cdf(300, 300) == pytest.approx(1.0, abs=1e-12)
        assert rw.last_zero_cdf(300, 150) == pytest.approx(LAST_ZERO_CDF_300_150, rel=1e-13)
        assert rw.last_zero_cdf(4, 0) == 0.375
        assert float(rw.last_zero_cdf_exact(300, 150)) == pytest.approx(LAST_ZERO_CDF_300_150, rel=1e-15)

    def test_cdf_rejects(self):
        with pytest.raises(ValueError):
            rw.last_zero_cdf(300, 302)
        with pytest.raises(rw.OddEpochError):
            rw.last_zero_cdf(300, 151)


class TestEnumerationOracle:
    """Every even horizon up to 16 against all 2**(2n) paths."""

    def test_return_count(self, laws):
        for m, law in laws.items():
            exact = rw.return_count_pmf_exact(m)
            assert {r: p for r, p in enumerate(exact) if p} == law["return_count"]
            np.testing.assert_allclose(
                rw.return_count_pmf(m).mass, [float(p) for p in exact], rtol=0, atol=1e-12
            )

    def test_last_zero(self, laws):
        for m, law in laws.items():
            exact = rw.last_zero_pmf_exact(m)
            assert {2 * k: p for k, p in enumerate(exact)} == law["last_zero"]
            floats = rw.last_zero_pmf(m).mass
            for k, p in enumerate(exact):
                assert abs(floats[k] - float(p)) < 1e-12

    def test_first_return_and_survival(self, laws):
        for m, law in laws.items():
            fr = law["first_return"]
            for k in range(2, m + 1, 2):
                assert rw.first_return_pmf_exact(k) == fr[k]
                assert abs(rw.first_return_pmf(k) - float(fr[k])) < 1e-12
            assert rw.no_return_survival_exact(m) == fr[None]
            assert abs(rw.no_return_survival(m) - float(fr[None])) < 1e-12
            assert rw.at_origin_prob_exact(m) == law["at_origin"]


@given(st.integers(min_value=0, max_value=3000))
def test_pmfs_normalised(n):
    m = 2 * n
    assert math.fsum(rw.return_count_pmf(m).mass) == pytest.approx(1.0, abs=1e-12)
    assert math.fsum(rw.last_zero_pmf(m).mass) == pytest.approx(1.0, abs=1e-12)
    assert np.all(rw.return_count_pmf(m).mass >= 0)


@given(st.integers(min_value=0, max_value=2000))
def test_moment_consistency(n):
    m = 2 * n
    assert rw.return_count_pmf(m).mean() == pytest.approx(rw.expected_returns(m), abs=1e-10)


@given(st.integers(min_value=-5, max_value=10**6))
def test_floor_even(x):
    f = rw.floor_even(x)
    assert f % 2 == 0 and f <= x < f + 2
