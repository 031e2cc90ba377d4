import math

import numpy as np
import pytest

from sparsecert.analysis import eta_j
from sparsecert.errors import DomainError, InvalidInputError, PreconditionError
from sparsecert.random_dict import (
    RandomDictSpec,
    binom_upper_log,
    eta_seq,
    failure_bound,
    gamma_analog,
    gamma_seq,
    gaussian_dictionary,
    regime_check,
    sampled_eta,
    sparsity_supremum,
    szarek_check,
)
from sparsecert.seeding import stream


class TestEtaGammaSeq:
    def test_reference_point(self):
        expected = (1.0 + math.sqrt(1.9)) / (1.0 - math.sqrt(0.1))
        assert eta_seq(100, 200, 10) == pytest.approx(expected, rel=1e-15)
        assert eta_seq(100, 200, 10) == pytest.approx(3.478, abs=5e-4)

    def test_gamma_reference_point(self):
        eta = eta_seq(100, 200, 10)
        expected = math.sqrt(190.0 * (1.0 + eta * eta))
        assert gamma_seq(100, 200, 10) == pytest.approx(expected, rel=1e-15)
        assert gamma_seq(100, 200, 10) == pytest.approx(49.9, abs=0.05)

    def test_denominator_shrinks_near_n(self):
        # j close to n blows up through the vanishing denominator
        denom = 1.0 - math.sqrt(99 / 100)
        assert denom == pytest.approx(0.00501, abs=5e-6)
        assert eta_seq(100, 200, 99) > 100.0

    def test_pole(self):
        with pytest.raises(DomainError):
            eta_seq(100, 200, 10, r2=1.0 - math.sqrt(0.1))
        with pytest.raises(DomainError):
            eta_seq(100, 200, 10, r2=0.9)

    def test_j_domain(self):
        with pytest.raises(DomainError):
            eta_seq(100, 200, 0)
        with pytest.raises(DomainError):
            eta_seq(100, 200, 100)

    def test_shape_validation(self):
        with pytest.raises(InvalidInputError):
            RandomDictSpec(10, 10)

    @pytest.mark.parametrize("n,m,r1,r2", [(50, 100, 0.0, 0.0), (100, 300, 0.3, 0.2), (20, 25, 1.0, 0.1)])
    def test_gamma_strictly_increasing_and_above_sqrt_m(self, n, m, r1, r2):
        jmax = n - 1
        while r2 >= 1.0 - math.sqrt(jmax / n):
            jmax -= 1
        values = [gamma_seq(n, m, j, r1, r2) for j in range(1, jmax + 1)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert all(v > math.sqrt(m) for v in values)


class TestGammaAnalog:
    def test_identity_with_sequence(self):
        n, m, r1, r2 = 64, 160, 0.25, 0.125
        p, a, b = m / n, 1.0 + r1, 1.0 - r2
        for j in range(1, 20):
            lhs = math.sqrt(n) * gamma_analog(j / n, p, a, b)
            assert lhs == pytest.approx(gamma_seq(n, m, j, r1, r2), rel=1e-12)

    def test_strictly_increasing(self):
        p, a, b = 2.5, 1.3, 0.8
        xs = np.linspace(0.0, b * b * (1.0 - 1e-9), 1000)
        vals = [gamma_analog(float(x), p, a, b) for x in xs]
        assert all(y > x for x, y in zip(vals, vals[1:]))

    def test_endpoint(self):
        p, a, b = 3.0, 1.0, 1.0
        expected = math.sqrt(p * (1.0 + ((a + math.sqrt(p)) / b) ** 2))
        assert gamma_analog(0.0, p, a, b) == pytest.approx(expected, rel=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma_analog(0.81, 2.0, 1.0, 0.9)  # x >= b^2
        with pytest.raises(DomainError):
            gamma_analog(0.1, 0.5, 1.0, 1.0)  # p < b^2


class TestFailureBound:
    def test_reference_point(self):
        report = failure_bound(100, 200, 2, 0.5, 0.5)
        expected = (200 + 19900) * 2.0 * math.exp(-12.5)
        assert report.failure_prob_rhs == pytest.approx(expected, rel=1e-12)
        assert report.failure_prob_rhs == pytest.approx(0.150, abs=5e-4)
        assert not report.vacuous
        assert report.binom_sum == 20100.0

    def test_vacuous_flag(self):
        report = failure_bound(10, 20, 2, 0.1, 0.1)
        assert report.failure_prob_rhs >= 1.0
        assert report.vacuous

    def test_binom_estimate_dominates_term_by_term(self):
        for m, ell in [(200, 5), (50, 10), (1000, 3)]:
            for j in range(1, ell + 1):
                assert binom_upper_log(m, j) >= math.log(math.comb(m, j)) - 1e-12

    def test_log_space_consistency(self):
        report = failure_bound(100, 200, 2, 0.5, 0.5)
        assert math.exp(report.log_failure_prob) == pytest.approx(
            report.failure_prob_rhs, rel=1e-12
        )
        assert math.exp(report.log_binom_sum) == pytest.approx(report.binom_sum, rel=1e-12)

    def test_huge_binomials_stay_finite_in_log(self):
        report = failure_bound(2000, 6000, 1500, 0.5, 0.01)
        assert math.isinf(report.failure_prob_rhs) or report.failure_prob_rhs > 1
        assert math.isfinite(report.log_binom_sum)
        assert math.isfinite(report.log_failure_prob)
        assert report.vacuous

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            failure_bound(100, 200, 100, 0.5, 0.5)  # ell > n - 1
        with pytest.raises(PreconditionError):
            failure_bound(100, 200, 2, 0.0, 0.5)  # r1 must be positive
        with pytest.raises(DomainError):
            failure_bound(100, 200, 50, 0.5, 0.5)  # r2 hits the pole

    def test_exponent_decreasing_at_fixed_ratios(self):
        # u = ell/n and v = m/ell held fixed: rhs falls monotonically in n
        rhs = [
            failure_bound(n, 2 * n, n // 50, 0.5, 0.5).failure_prob_rhs
            for n in (100, 200, 400, 800)
        ]
        assert all(b < a for a, b in zip(rhs, rhs[1:]))

    def test_exponent_vanishes_at_extreme_sparsity(self):
        # with 2p = n - 1 the decay exponent c^2 n (1 - sqrt(2p/n))^2 / 2 sinks to 0
        c = 0.5
        exponents = [
            c * c * n * (1.0 - math.sqrt((n - 1) / n)) ** 2 / 2.0 for n in (10, 100, 1000, 10000)
        ]
        assert all(b < a for a, b in zip(exponents, exponents[1:]))
        assert exponents[-1] < 0.01


class TestRegimeCheck:
    def test_reference_point(self):
        result = regime_check(0.01, 10.0, 0.5, 0.5)
        assert result.ok
        assert result.margin == pytest.approx(0.125 - 0.01 * (1.0 + math.log(10.0)), rel=1e-12)

    def test_extreme_sparsity_fails(self):
        with pytest.raises(DomainError):
            regime_check(0.999999, 10.0, 0.5, 0.5)  # r2 window collapses

    def test_flip_only_at_zero_margin(self):
        v, r1, r2 = 10.0, 0.4, 0.3
        target = (min(r1, r2) ** 2 / 2.0) / (1.0 + math.log(v))  # u at zero margin
        below = regime_check(target * 0.999, v, r1, r2)
        above = regime_check(target * 1.001, v, r1, r2)
        assert below.ok and below.margin > 0
        assert not above.ok and above.margin < 0


class TestSparsitySupremum:
    def test_bracket_beta2_c1(self):
        u = sparsity_supremum(2.0, 1.0)
        assert 0.05 < u < 0.07

        def f(x):
            return x * (1 + math.log(2.0 / x)) - (1 - math.sqrt(x)) ** 2 / 2.0

        assert f(0.05) < 0 < f(0.07)

    def test_residual(self):
        for beta in (1.0, 2.0, 5.0, 10.0):
            for c in (0.25, 0.5, 0.75, 1.0):
                u = sparsity_supremum(beta, c)
                resid = u * (1 + math.log(beta / u)) - c * c * (1 - math.sqrt(u)) ** 2 / 2
                assert abs(resid) < 1e-12

    def test_monotone_in_beta(self):
        values = [sparsity_supremum(b, 0.5) for b in np.linspace(1.0, 10.0, 19)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_monotone_in_c(self):
        values = [sparsity_supremum(2.0, c) for c in (0.25, 0.5, 0.75, 1.0)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            sparsity_supremum(0.5, 0.5)
        with pytest.raises(DomainError):
            sparsity_supremum(2.0, 1.5)


class TestGaussianDictionary:
    def test_deterministic(self):
        a = gaussian_dictionary(20, 40, seed=7)
        b = gaussian_dictionary(20, 40, seed=7)
        np.testing.assert_array_equal(a, b)
        c = gaussian_dictionary(20, 40, seed=8)
        assert not np.array_equal(a, c)

    def test_column_norm_concentration(self):
        a = gaussian_dictionary(400, 900, seed=1)
        norms = np.linalg.norm(a, axis=0)
        assert np.mean((norms > 0.8) & (norms < 1.2)) > 0.99

    def test_sigma_max_near_limit(self):
        # tall 400x100 draw with the same entry law as the dictionaries
        x = stream(2).standard_normal((400, 100)) / math.sqrt(400)
        smax = np.linalg.svd(x, compute_uv=False)[0]
        assert abs(smax - 1.5) < 0.1

    def test_normalize_flag(self):
        a = gaussian_dictionary(30, 60, seed=3, normalize=True)
        np.testing.assert_allclose(np.linalg.norm(a, axis=0), 1.0, atol=1e-12)


class TestSampledEta:
    def test_lower_bounds_exhaustive(self):
        a = gaussian_dictionary(5, 9, seed=4)
        exact = eta_j(a, 2).value
        sampled = sampled_eta(a, 2, samples=30, seed=0)
        assert sampled <= exact + 1e-12

    def test_saturates_with_enough_samples(self):
        a = gaussian_dictionary(4, 7, seed=5)
        exact = eta_j(a, 2).value
        sampled = sampled_eta(a, 2, samples=400, seed=1)
        assert sampled == pytest.approx(exact, rel=1e-9)


class TestConcentrationReport:
    def test_large_dictionary_concentrates(self, capsys):
        # convergence is almost-sure only, so this reports and checks loosely
        a = gaussian_dictionary(400, 800, seed=0)
        target = eta_seq(400, 800, 40)
        empirical = sampled_eta(a, 40, samples=20, seed=1)
        with capsys.disabled():
            print(
                f"\nsampled eta at n=400 m=800 j=40: empirical {empirical:.4f}, "
                f"limit {target:.4f}"
            )
        assert 0.75 * target < empirical < 1.25 * target


class TestSzarekCheck:
    def test_tall_within_bound(self):
        result = szarek_check(50, 10, r=0.6, trials=300, seed=0)
        assert result.within_bound
        assert result.threshold_max == pytest.approx(1.0 + math.sqrt(0.2) + 0.6, rel=1e-15)
        assert result.threshold_min == pytest.approx(1.0 - math.sqrt(0.2) - 0.6, rel=1e-15)

    def test_large_r_floors_min_frequency(self):
        result = szarek_check(30, 20, r=0.8, trials=100, seed=1)
        assert result.threshold_min < 0.0
        assert result.freq_min == 0.0

    def test_wide_reduction_identity(self):
        # scaling the transpose maps the wide check onto the tall one exactly
        n, p, r = 30, 60, 0.4
        result = szarek_check(n, p, r, trials=50, seed=2)
        factor = math.sqrt(p / n)
        for t in range(50):
            x = stream(2, t).standard_normal((n, p)) / math.sqrt(n)
            y = math.sqrt(n / p) * x.T
            s_y = np.linalg.svd(y, compute_uv=False)
            # tall thresholds for y with slack r' = r / factor
            assert (s_y[0] * factor > result.threshold_max) == (
                result.sigma_max[t] > result.threshold_max
            )
            assert (s_y[-1] * factor < result.threshold_min) == (
                result.sigma_min[t] < result.threshold_min
            )

    def test_deterministic(self):
        a = szarek_check(20, 10, 0.5, trials=20, seed=9)
        b = szarek_check(20, 10, 0.5, trials=20, seed=9)
        np.testing.assert_array_equal(a.sigma_max, b.sigma_max)
