import itertools
import math

import numpy as np
import pytest

from sparsecert.analysis import g_constant, gamma_profile
from sparsecert.certify import (
    THETA_MAX_DEGREES,
    Theorem,
    alpha_stat,
    first_bound,
    h_stat,
    loose_bound,
    noisy_loose_bound,
    noisy_tight_bound,
    tight_bound,
    tightness_example,
)
from sparsecert.errors import DomainError, InvalidInputError, PreconditionError

from conftest import rotation_dictionary

COS5 = math.cos(math.radians(5.0))
BETA5 = 0.2 / (2.0 * math.sin(math.radians(5.0) / 2.0))
SHAT5 = np.array([0.0, BETA5, 0.2])


@pytest.fixture(scope="module")
def profile_5deg():
    return gamma_profile(rotation_dictionary(5.0), 2)


class TestHStat:
    def test_example_candidate(self):
        assert h_stat(np.array([0.0, 2.2926, 0.2]), 2) == 0.2

    def test_sign_ignored(self):
        assert h_stat(np.array([3.0, -5.0, 0.0]), 1) == 5.0

    def test_ties(self):
        assert h_stat(np.array([1.0, 1.0, 1.0]), 3) == 1.0

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            h_stat(np.array([1.0, 2.0]), 3)

    def test_alpha_index(self):
        s = np.array([5.0, 4.0, 3.0, 2.0, 1.0])
        assert alpha_stat(s, 4) == h_stat(s, 3)
        assert alpha_stat(s, 5) == h_stat(s, 3)  # odd ell uses the same index


class TestFirstBound:
    def test_rotation_example(self, dict_5deg, profile_5deg):
        cert = first_bound(dict_5deg, profile_5deg, SHAT5)
        g = g_constant(dict_5deg)
        assert cert.theorem is Theorem.FIRST_BOUND
        assert cert.bound == pytest.approx((g + 1.0) * 3 * 0.2, rel=1e-14)
        assert cert.bound == pytest.approx(10.34, abs=5e-3)

    def test_sparse_candidate_gives_zero(self, dict_5deg, profile_5deg):
        cert = first_bound(dict_5deg, profile_5deg, np.array([BETA5, 0.0, 0.0]))
        assert cert.bound == 0.0

    def test_monotone_in_tail(self, dict_5deg, profile_5deg):
        shrunk = SHAT5.copy()
        shrunk[2] *= 0.5  # pull the below-threshold entry toward zero
        big = first_bound(dict_5deg, profile_5deg, SHAT5).bound
        small = first_bound(dict_5deg, profile_5deg, shrunk).bound
        assert small <= big

    def test_withheld_on_failed_checks(self, example_3x4):
        profile = gamma_profile(example_3x4, 3)
        cert = first_bound(example_3x4, profile, np.array([1.0, 0.1, 0.0, 0.0]))
        assert cert.withheld
        failed = {c.name for c in cert.checks if not c.passed}
        assert failed == {"unit_norm_columns"}


class TestLooseBound:
    def test_rotation_example(self, profile_5deg):
        cert = loose_bound(profile_5deg, SHAT5, 2)
        expected = (1.0 / math.sqrt(1.0 - COS5) + 1.0) * 3 * 0.2
        assert cert.bound == pytest.approx(expected, rel=1e-12)
        assert cert.bound == pytest.approx(10.33, abs=5e-3)

    def test_zero_alpha_recovers_uniqueness(self, profile_5deg):
        cert = loose_bound(profile_5deg, np.array([0.0, 1.0, 0.0]), 2)
        assert cert.alpha == 0.0
        assert cert.bound == 0.0

    def test_coefficient_monotone_in_ell(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((6, 10))
        a /= np.linalg.norm(a, axis=0)
        profile = gamma_profile(a, 4)
        # smaller cardinality leaves a larger singular value floor
        assert profile.sigma_min(2) >= profile.sigma_min(4)
        coeff = lambda ell: (1.0 / profile.sigma_min(ell) + 1.0) * profile.m
        assert coeff(2) <= coeff(4)

    def test_requires_unit_columns(self, example_3x4):
        profile = gamma_profile(example_3x4, 2)
        with pytest.raises(PreconditionError):
            loose_bound(profile, np.ones(4), 2)

    def test_ell_beyond_rank(self, profile_5deg):
        with pytest.raises(PreconditionError):
            loose_bound(profile_5deg, SHAT5, 3)


class TestTightBound:
    def test_rotation_equality(self, profile_5deg):
        cert = tight_bound(profile_5deg, SHAT5, 2)
        actual = np.linalg.norm(SHAT5 - np.array([BETA5, 0.0, 0.0]))
        assert cert.bound == pytest.approx(3.248, abs=5e-4)
        assert cert.bound == pytest.approx(actual, rel=1e-9)

    def test_tight_below_loose(self, profile_5deg):
        tight = tight_bound(profile_5deg, SHAT5, 2).bound
        loose = loose_bound(profile_5deg, SHAT5, 2).bound
        assert tight <= loose + 1e-9

    def test_tight_below_loose_random(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            a = rng.standard_normal((4, 7))
            a /= np.linalg.norm(a, axis=0)
            profile = gamma_profile(a, 4)
            s = rng.standard_normal(7)
            for ell in (2, 3, 4):
                if ell > profile.q:
                    continue
                t = tight_bound(profile, s, ell).bound
                l = loose_bound(profile, s, ell).bound
                assert t <= l + 1e-9

    def test_zero_alpha(self, profile_5deg):
        assert tight_bound(profile_5deg, np.array([9.0, 0.0, 0.0]), 2).bound == 0.0

    def test_unnormalized_uses_prime(self, example_3x4):
        profile = gamma_profile(example_3x4, 2)
        s = np.array([1.0, 0.2, 0.1, 0.0])
        cert = tight_bound(profile, s, 2)  # profile carries normalized=False
        assert cert.bound == pytest.approx(profile.gamma_bar_prime(2) * h_stat(s, 2), rel=1e-14)

    def test_normalized_override_rejected_when_false(self, example_3x4):
        profile = gamma_profile(example_3x4, 2)
        with pytest.raises(PreconditionError):
            tight_bound(profile, np.ones(4), 2, normalized=True)


class TestNoisyLooseBound:
    def test_zero_noise_reduces_exactly(self, profile_5deg):
        noiseless = loose_bound(profile_5deg, SHAT5, 2)
        noisy = noisy_loose_bound(profile_5deg, SHAT5, 2, 0.0, 0.0)
        assert noisy.bound == noiseless.bound

    def test_stability_term(self, profile_5deg):
        cert = noisy_loose_bound(profile_5deg, np.array([1.0, 0.0, 0.0]), 2, 0.04, 0.06)
        expected = 0.1 / profile_5deg.sigma_min(2)
        assert cert.alpha == 0.0
        assert cert.bound == pytest.approx(expected, rel=1e-12)
        assert cert.bound == pytest.approx(1.621, abs=5e-3)

    def test_affine_in_delta(self, profile_5deg):
        base = noisy_loose_bound(profile_5deg, SHAT5, 2, 0.0, 0.0).bound
        slope = 1.0 / profile_5deg.sigma_min(2)
        for total in (0.05, 0.2, 1.3):
            cert = noisy_loose_bound(profile_5deg, SHAT5, 2, total, 0.0)
            assert cert.bound == pytest.approx(base + slope * total, rel=1e-12)

    def test_split_vs_combined_budget(self, profile_5deg):
        a = noisy_loose_bound(profile_5deg, SHAT5, 2, 0.07, 0.03)
        b = noisy_loose_bound(profile_5deg, SHAT5, 2, 0.0, 0.10)
        assert a.bound == pytest.approx(b.bound, rel=1e-15)

    def test_negative_noise_rejected(self, profile_5deg):
        with pytest.raises(InvalidInputError):
            noisy_loose_bound(profile_5deg, SHAT5, 2, -0.1, 0.0)


def brute_noisy_tight(a, ell, alpha, delta):
    """Independent exhaustive evaluation of the noisy worst case."""
    n, m = a.shape
    worst = -np.inf
    for j in range(1, ell + 1):
        for comb in itertools.combinations(range(m), j):
            comp = [c for c in range(m) if c not in comb]
            smin = np.linalg.svd(a[:, list(comb)], compute_uv=False)[-1]
            smax = np.linalg.svd(a[:, comp], compute_uv=False)[0]
            r = smax / smin
            val = (
                (1 + r**2) * (m - j) * alpha**2
                + 2 * r * math.sqrt(m - j) * alpha * delta
                + delta**2 / smin**2
            )
            worst = max(worst, val)
    return worst


class TestNoisyTightBound:
    def test_zero_noise_matches_tight(self, dict_5deg, profile_5deg):
        noisy = noisy_tight_bound(dict_5deg, SHAT5, 2, 0.0, 0.0)
        tight = tight_bound(profile_5deg, SHAT5, 2)
        assert noisy.bound == pytest.approx(tight.bound, rel=1e-12)

    def test_zero_alpha_is_stability(self, dict_5deg, profile_5deg):
        cert = noisy_tight_bound(dict_5deg, np.array([1.0, 0.0, 0.0]), 2, 0.1, 0.0)
        assert cert.bound == pytest.approx(0.1 / profile_5deg.sigma_min(2), rel=1e-11)

    def test_exhaustive_oracle(self, dict_5deg, profile_5deg):
        alpha, delta = 0.2, 0.1
        cert = noisy_tight_bound(dict_5deg, SHAT5, 2, delta, 0.0)
        brute = math.sqrt(brute_noisy_tight(dict_5deg, 2, alpha, delta))
        assert cert.alpha == alpha
        assert cert.bound == pytest.approx(brute, rel=1e-11)
        assert cert.bound >= tight_bound(profile_5deg, SHAT5, 2).bound
        assert cert.bound >= delta / profile_5deg.sigma_min(2)

    def test_unnormalized_matches_prime_tight(self, example_3x4):
        profile = gamma_profile(example_3x4, 2)
        s = np.array([1.0, 0.2, 0.1, 0.0])
        noisy = noisy_tight_bound(example_3x4, s, 2, 0.0, 0.0)
        tight = tight_bound(profile, s, 2)
        assert noisy.bound == pytest.approx(tight.bound, rel=1e-12)
        assert noisy.bound >= math.sqrt(4) * h_stat(s, 2) - 1e-12  # sqrt(m) alpha floor

    def test_exhaustive_oracle_random(self):
        rng = np.random.default_rng(31)
        for trial in range(10):
            a = rng.standard_normal((4, 7))
            if trial % 2 == 0:
                a /= np.linalg.norm(a, axis=0)
            s = rng.standard_normal(7)
            ell = int(rng.integers(1, 5))
            eps, delta = float(rng.uniform(0, 0.3)), float(rng.uniform(0, 0.2))
            cert = noisy_tight_bound(a, s, ell, eps, delta)
            alpha = h_stat(s, ell // 2 + 1)
            worst = brute_noisy_tight(a, ell, alpha, eps + delta)
            if trial % 2 == 0:
                expected = math.sqrt(worst)
            else:
                expected = math.sqrt(max(7 * alpha**2, worst))
            assert cert.bound == pytest.approx(expected, rel=1e-10)

    def test_ell_beyond_rank(self):
        a = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 1.0]])
        with pytest.raises(PreconditionError, match="q="):
            noisy_tight_bound(a, np.ones(3), 2, 0.0, 0.0)


class TestSerialization:
    def test_stable_key_order(self, profile_5deg):
        cert = loose_bound(profile_5deg, SHAT5, 2)
        text = cert.to_json()
        assert text.startswith('{"theorem": "LooseSigma", "ell": 2, "alpha": 0.2, "delta": 0.0, "bound": ')
        assert '"assumptions": [' in text and '"checks": [' in text
        assert "\n" not in text

    def test_withheld_bound_serializes_null(self, example_3x4):
        profile = gamma_profile(example_3x4, 2)
        cert = first_bound(example_3x4, profile, np.ones(4))
        assert '"bound": null' in cert.to_json()


class TestTightnessExample:
    def test_theta_max_constant(self):
        assert THETA_MAX_DEGREES == pytest.approx(38.6683, abs=1e-4)

    def test_reference_construction(self):
        ex = tightness_example(5.0, 0.2)
        assert ex.beta == pytest.approx(2.2926, abs=5e-5)
        reference = np.array([[1.0, 0.9962, 0.0436], [0.0, 0.0872, -0.9990]])
        np.testing.assert_allclose(ex.dictionary, reference, atol=5e-5)
        assert ex.equality_residual < 1e-9
        assert ex.s_hat_residual <= 1e-12

    @pytest.mark.parametrize("theta", [1.0, 5.0, 20.0, 38.0])
    def test_equality_across_angles(self, theta):
        ex = tightness_example(theta, 0.7)
        assert ex.equality_residual < 1e-9
        assert ex.gamma_bar == pytest.approx(ex.gamma_bar_closed_form, rel=1e-9)

    @pytest.mark.parametrize("theta", [0.0, -3.0, 39.0, 38.67, 180.0])
    def test_domain(self, theta):
        with pytest.raises(DomainError):
            tightness_example(theta, 0.2)

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            tightness_example(5.0, 0.0)


class TestUniquenessRecovery:
    def test_all_bounds_vanish(self, dict_5deg, profile_5deg):
        s = np.array([0.0, 3.7, 0.0])  # one nonzero = floor(ell/2) for ell = 2
        assert first_bound(dict_5deg, profile_5deg, s).bound == 0.0
        assert loose_bound(profile_5deg, s, 2).bound == 0.0
        assert tight_bound(profile_5deg, s, 2).bound == 0.0
        assert noisy_loose_bound(profile_5deg, s, 2, 0.0, 0.0).bound == 0.0
        assert noisy_tight_bound(dict_5deg, s, 2, 0.0, 0.0).bound == 0.0
