"""Tests for entropy and Fisher-information estimators.

Closed-form oracle values used below (computed by hand from
h = (n ln(2 pi e) + ln det) / 2 and I = tr(cov^-1)):

    h(N(0,1))              = 1.4189385332046727
    h(N(0,I2))             = 2.8378770664093453
    h(N(0,4))              = 2.1120857137646181
    h(N(0,I3))             = 4.2568155996140180
    h(X_2 | X_1) for cov [[2,1],[1,2]] = 0.5 ln(2 pi e * 1.5)
                           = 1.6216710872587540
    tr([[2,1],[1,2]]^-1)   = 4/3
    2 pi e                 = 17.079468445347132
"""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epicheck import (
    DimensionError,
    GaussianComponent,
    GaussianMixture,
    ScalarEstimate,
    conditional_entropy,
    conditional_entropy_last,
    conditional_fisher_last,
    entropy,
    entropy_power,
    fisher,
    gaussian_entropy,
    gaussian_fisher,
    knn_entropy,
    mc_entropy,
    mc_fisher,
    projective_fisher,
    random_mixture,
)
from epicheck.seeding import rng_from_tokens

H_STD_1D = 1.4189385332046727
H_STD_2D = 2.8378770664093453
H_VAR4_1D = 2.1120857137646181
H_STD_3D = 4.256815599614018
H_COND_WORKED = 1.621671087258754
TWO_PI_E = 17.079468445347132

COV_WORKED = [[2.0, 1.0], [1.0, 2.0]]


def gauss(cov, mean=None) -> GaussianMixture:
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if mean is None:
        mean = np.zeros(cov.shape[0])
    return GaussianMixture.gaussian(mean, cov)


class TestScalarEstimate:
    def test_invariants(self):
        with pytest.raises(ValueError):
            ScalarEstimate(float("nan"), 0.0, 0, "closed_form")
        with pytest.raises(ValueError):
            ScalarEstimate(1.0, -0.1, 10, "plug_in_mc")
        with pytest.raises(ValueError):
            ScalarEstimate(1.0, 0.5, 0, "closed_form")


class TestGaussianEntropy:
    def test_worked_values(self):
        assert gaussian_entropy(GaussianComponent([0.0], [[1.0]])).value == pytest.approx(
            H_STD_1D, rel=1e-12
        )
        assert gaussian_entropy(
            GaussianComponent([0.0, 0.0], np.eye(2))
        ).value == pytest.approx(H_STD_2D, rel=1e-12)
        assert gaussian_entropy(GaussianComponent([0.0], [[4.0]])).value == pytest.approx(
            H_VAR4_1D, rel=1e-12
        )

    def test_closed_form_tagging(self):
        est = gaussian_entropy(GaussianComponent([0.0], [[1.0]]))
        assert est.method == "closed_form" and est.std_error == 0.0


class TestEntropyPower:
    def test_standard_normal_gives_two_pi_e(self):
        for n in (1, 2, 5):
            h = ScalarEstimate(n * H_STD_1D, 0.0, 0, "closed_form")
            assert entropy_power(h, n).value == pytest.approx(TWO_PI_E, rel=1e-12)

    def test_zero_entropy(self):
        assert entropy_power(ScalarEstimate(0.0, 0.0, 0, "closed_form"), 1).value == 1.0

    def test_delta_method_stderr(self):
        h = ScalarEstimate(1.0, 0.01, 100, "plug_in_mc")
        est = entropy_power(h, 2)
        assert est.std_error == pytest.approx(est.value * 0.01, rel=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.2, 5.0))
    def test_scale_law(self, seed, t):
        # N(tX) = t^2 N(X)
        gm = random_mixture(2, rng_from_tokens(seed, "prop-npow"))
        rng1 = rng_from_tokens(seed, "prop-npow", "base")
        base = entropy_power(entropy(gm, 3000, rng1), 2)
        rng2 = rng_from_tokens(seed, "prop-npow", "base")
        scaled = entropy_power(entropy(gm.scale(t), 3000, rng2), 2)
        # identical streams make the ratio exact up to float roundoff
        assert scaled.value == pytest.approx(t * t * base.value, rel=1e-9)


class TestMcEntropy:
    def test_gaussian_within_three_sigma(self):
        gm = gauss(np.eye(3))
        est = mc_entropy(gm, 50_000, rng_from_tokens(0, "mc-h"))
        assert abs(est.value - H_STD_3D) <= 3.0 * est.std_error
        assert est.method == "plug_in_mc" and est.n_samples == 50_000

    def test_mixture_agrees_with_high_m(self):
        gm = GaussianMixture(
            [0.5, 0.5],
            [([0.0, 0.0], np.eye(2)), ([12.0, 0.0], np.eye(2))],
        )
        est = mc_entropy(gm, 100_000, rng_from_tokens(1, "mc-h"))
        # far-separated equal modes: h = ln 2 + h(N(0,I2)) up to ~e^-18 overlap
        assert est.value == pytest.approx(math.log(2.0) + H_STD_2D, abs=0.02)

    def test_bit_identical_under_seed(self):
        gm = gauss(COV_WORKED)
        a = mc_entropy(gm, 5000, rng_from_tokens(2, "mc-h"))
        b = mc_entropy(gm, 5000, rng_from_tokens(2, "mc-h"))
        assert a.value == b.value and a.std_error == b.std_error

    def test_entropy_dispatcher(self):
        gm = gauss(COV_WORKED)
        assert entropy(gm, 1000, None).method == "closed_form"
        mix = GaussianMixture([0.5, 0.5], [([0.0], [[1.0]]), ([1.0], [[2.0]])])
        with pytest.raises(ValueError, match="generator"):
            entropy(mix, 1000, None)


class TestKnnEntropy:
    def test_gaussian_oracle(self):
        pts = rng_from_tokens(3, "knn").normal(size=(20_000, 1))
        est = knn_entropy(pts, k=4)
        assert est.method == "knn"
        assert abs(est.value - H_STD_1D) <= 3.0 * est.std_error + 0.05

    def test_translation_invariance(self):
        pts = rng_from_tokens(4, "knn").normal(size=(2000, 2))
        a = knn_entropy(pts, k=4)
        b = knn_entropy(pts + 17.5, k=4)
        assert b.value == pytest.approx(a.value, abs=1e-9)

    def test_duplicates_warn(self):
        pts = np.zeros((50, 2))
        pts[25:] = 1.0
        with pytest.warns(RuntimeWarning, match="duplicate"):
            est = knn_entropy(pts, k=2)
        assert math.isfinite(est.value)

    def test_k_validation(self):
        pts = rng_from_tokens(5, "knn").normal(size=(10, 1))
        with pytest.raises(ValueError):
            knn_entropy(pts, k=10)
        with pytest.raises(ValueError):
            knn_entropy(pts, k=0)


class TestConditionalEntropy:
    def test_independent_coordinates(self):
        est = conditional_entropy_last(gauss(np.eye(3)))
        assert est.value == pytest.approx(H_STD_1D, rel=1e-12)

    def test_worked_schur_value(self):
        est = conditional_entropy_last(gauss(COV_WORKED))
        assert est.value == pytest.approx(H_COND_WORKED, rel=1e-12)

    def test_general_conditioning_set(self):
        cov = np.array([[4.0, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 2.0]])
        est = conditional_entropy(gauss(cov), [1], 1000, None)
        # h(X_0, X_2 | X_1) = h(X) - h(X_1)
        expected = gaussian_entropy(GaussianComponent(np.zeros(3), cov)).value - (
            0.5 * (math.log(2.0 * math.pi * math.e) + math.log(3.0))
        )
        assert est.value == pytest.approx(expected, rel=1e-12)

    def test_subset_validation(self):
        gm = gauss(np.eye(3))
        with pytest.raises(DimensionError):
            conditional_entropy(gm, [], 1000, None)
        with pytest.raises(DimensionError):
            conditional_entropy(gm, [0, 1, 2], 1000, None)
        with pytest.raises(IndexError):
            conditional_entropy(gm, [3], 1000, None)
        with pytest.raises(ValueError):
            conditional_entropy(gm, [0, 0], 1000, None)

    def test_mc_route_paired_and_calibrated(self):
        mix = GaussianMixture(
            [0.6, 0.4], [([0.0, 0.0], COV_WORKED), ([1.0, 1.0], np.eye(2))]
        )
        est = conditional_entropy_last(mix, m=40_000, rng=rng_from_tokens(6, "cond"))
        assert est.method == "plug_in_mc"
        # conditioning reduces entropy: h(X_n | rest) <= h(X_n)
        marg = mix.marginal([1])
        upper = mc_entropy(marg, 40_000, rng_from_tokens(7, "cond"))
        assert est.value <= upper.value + 3.0 * (est.std_error + upper.std_error)

    def test_dim_validation(self):
        with pytest.raises(DimensionError):
            conditional_entropy_last(gauss([[1.0]]))


class TestFisher:
    def test_gaussian_closed_forms(self):
        assert gaussian_fisher(GaussianComponent(np.zeros(3), np.eye(3))).value == pytest.approx(
            3.0, rel=1e-12
        )
        assert gaussian_fisher(GaussianComponent([0.0], [[4.0]])).value == pytest.approx(
            0.25, rel=1e-12
        )
        assert gaussian_fisher(
            GaussianComponent([0.0, 0.0], COV_WORKED)
        ).value == pytest.approx(4.0 / 3.0, rel=1e-12)

    def test_mc_fisher_calibrated(self):
        gm = gauss(np.diag([1.0, 4.0]))
        est = mc_fisher(gm, 50_000, rng_from_tokens(8, "fisher"))
        assert abs(est.value - 1.25) <= 3.0 * est.std_error

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.5, 2.0))
    def test_scaling_law(self, seed, t):
        # I(tX) = I(X) / t^2, exact when streams are shared
        gm = random_mixture(2, rng_from_tokens(seed, "prop-fisher"))
        a = mc_fisher(gm, 4000, rng_from_tokens(seed, "prop-fisher", "r"))
        b = mc_fisher(gm.scale(t), 4000, rng_from_tokens(seed, "prop-fisher", "r"))
        assert b.value == pytest.approx(a.value / t**2, rel=1e-9)

    def test_nonnegative(self):
        gm = GaussianMixture(
            [0.5, 0.5], [([0.0, 0.0], COV_WORKED), ([2.0, -1.0], np.eye(2))]
        )
        est = mc_fisher(gm, 2000, rng_from_tokens(9, "fisher"))
        assert est.value >= 0.0


class TestProjectiveFisher:
    def test_closed_form_values(self):
        gm = gauss(np.eye(2))
        assert projective_fisher(gm, [0.0, 1.0], 10, None).value == pytest.approx(1.0)
        gm = gauss(COV_WORKED)
        est = projective_fisher(gm, [0.0, 1.0], 10, None)
        assert est.value == pytest.approx(2.0 / 3.0, rel=1e-12)
        assert est.method == "closed_form"

    def test_unit_vector_required(self):
        gm = gauss(np.eye(2))
        with pytest.raises(ValueError, match="unit vector"):
            projective_fisher(gm, [0.0, 2.0], 10, None)
        with pytest.raises(DimensionError):
            projective_fisher(gm, [1.0], 10, None)

    def test_dominated_by_full_fisher(self):
        mix = GaussianMixture(
            [0.5, 0.5], [([0.0, 0.0], COV_WORKED), ([1.0, 0.0], np.eye(2))]
        )
        u = np.array([3.0, 4.0]) / 5.0
        proj = projective_fisher(mix, u, 20_000, rng_from_tokens(10, "proj"))
        full = mc_fisher(mix, 20_000, rng_from_tokens(11, "proj"))
        assert proj.value <= full.value + 3.0 * (proj.std_error + full.std_error)


class TestConditionalFisherLast:
    def test_identity_covariance(self):
        est = conditional_fisher_last(
            gauss(np.eye(2)), m_outer=400, m_inner=400, rng=rng_from_tokens(12, "cf")
        )
        assert abs(est.value - 1.0) <= 3.0 * est.std_error + 1e-9

    def test_equals_inverse_schur_for_gaussian(self):
        est = conditional_fisher_last(
            gauss(COV_WORKED), m_outer=500, m_inner=800, rng=rng_from_tokens(13, "cf")
        )
        assert abs(est.value - 1.0 / 1.5) <= 3.0 * est.std_error + 0.01

    def test_matches_projective_on_mixture(self):
        mix = GaussianMixture(
            [0.5, 0.5], [([0.0, 0.0], COV_WORKED), ([1.0, -1.0], [[1.0, 0.0], [0.0, 2.0]])]
        )
        cond = conditional_fisher_last(
            mix, m_outer=800, m_inner=2000, rng=rng_from_tokens(14, "cf")
        )
        proj = projective_fisher(mix, [0.0, 1.0], 100_000, rng_from_tokens(15, "cf"))
        combined = math.hypot(cond.std_error, proj.std_error)
        assert abs(cond.value - proj.value) <= 3.0 * combined + 0.02


class TestScalingInvariant:
    # statistical bound, so seeds are pinned: hypothesis-style seed search
    # would eventually find (and lock onto) legitimate >3-sigma draws
    @pytest.mark.parametrize("seed", range(8))
    def test_entropy_shift_under_linear_map(self, seed):
        # h(AX) - h(X) = ln |det A| within 3 sigma of independent estimates
        rng = rng_from_tokens(seed, "scale-h")
        gm = random_mixture(2, rng)
        a = rng.normal(size=(2, 2))
        while abs(np.linalg.det(a)) < 0.3:
            a = rng.normal(size=(2, 2))
        h0 = mc_entropy(gm, 30_000, rng_from_tokens(seed, "scale-h", "h0"))
        h1 = mc_entropy(gm.linear_map(a), 30_000, rng_from_tokens(seed, "scale-h", "h1"))
        shift = math.log(abs(np.linalg.det(a)))
        tol = 3.0 * math.hypot(h0.std_error, h1.std_error)
        assert abs((h1.value - h0.value) - shift) <= tol
