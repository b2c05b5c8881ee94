import numpy as np
import pytest

from fadagrad import models
from fadagrad.data import GaussianLinearSource, make_toeplitz_cov


class TestLinearGrad:
    def test_zero_at_exact_fit(self):
        theta = np.array([1.0, -2.0])
        x = np.array([0.3, 0.7])
        g = models.linear_grad(theta, x, float(x @ theta))
        assert np.allclose(g, 0.0, atol=1e-15)

    def test_hand_computation(self):
        g = models.linear_grad(np.zeros(2), np.array([1.0, 2.0]), 3.0)
        assert np.allclose(g, [-3.0, -6.0])

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            theta = rng.standard_normal(4)
            x = rng.standard_normal(4)
            y = rng.standard_normal()
            g = models.linear_grad(theta, x, y)
            fd = models.finite_diff_grad(
                lambda th: models.linear_loss(th, x, y), theta, h=1e-6)
            assert np.max(np.abs(g - fd)) / max(1.0, np.max(np.abs(g))) < 1e-5

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            models.linear_grad(np.zeros(2), np.zeros(3), 0.0)


class TestLogisticGrad:
    def test_at_zero_theta(self):
        x = np.array([2.0, -1.0])
        assert np.allclose(models.logistic_grad(np.zeros(2), x, 1.0),
                           (0.5 - 1.0) * x)
        assert np.allclose(models.logistic_grad(np.zeros(2), x, 0.0),
                           0.5 * x)

    def test_saturated_logit_no_overflow(self):
        theta = np.array([40.0])
        x = np.array([1.0])
        g = models.logistic_grad(theta, x, 1.0)
        assert np.all(np.isfinite(g))
        assert np.max(np.abs(g)) < 1e-15

    def test_extreme_negative_logit(self):
        theta = np.array([-800.0])
        g = models.logistic_grad(theta, np.array([1.0]), 0.0)
        assert np.all(np.isfinite(g))

    def test_rejects_invalid_label(self):
        with pytest.raises(ValueError, match="label"):
            models.logistic_grad(np.zeros(1), np.ones(1), -1.0)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            theta = rng.standard_normal(3)
            x = rng.standard_normal(3)
            y = float(rng.integers(0, 2))
            g = models.logistic_grad(theta, x, y)
            fd = models.finite_diff_grad(
                lambda th: models.logistic_loss(th, x, y), theta, h=1e-6)
            assert np.max(np.abs(g - fd)) / max(1.0, np.max(np.abs(g))) < 1e-5

    def test_norm_bounded_by_feature_norm(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            theta = 10.0 * rng.standard_normal(4)
            x = rng.standard_normal(4)
            y = float(rng.integers(0, 2))
            g = models.logistic_grad(theta, x, y)
            assert np.linalg.norm(g) <= np.linalg.norm(x) + 1e-12


class TestLogisticPredict:
    def test_zero_theta_ties_to_class_one(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            assert models.logistic_predict(np.zeros(3),
                                           rng.standard_normal(3)) == 1

    def test_negative_logit(self):
        assert models.logistic_predict(np.array([1.0]),
                                       np.array([-2.0])) == 0

    def test_perfect_on_separable_data(self):
        rng = np.random.default_rng(4)
        theta_true = rng.standard_normal(5)
        X = rng.standard_normal((200, 5))
        y = (X @ theta_true >= 0).astype(float)
        correct = sum(models.logistic_predict(theta_true, x) == yi
                      for x, yi in zip(X, y))
        assert correct == 200


class TestFiniteDiff:
    def test_exact_for_quadratic(self):
        theta = np.array([1.0, -2.0, 0.5])
        g = models.finite_diff_grad(lambda th: 0.5 * float(th @ th), theta,
                                    h=1e-5)
        assert np.max(np.abs(g - theta)) < 1e-9

    def test_exact_for_linear(self):
        c = np.array([2.0, -1.0])
        g = models.finite_diff_grad(lambda th: float(c @ th),
                                    np.array([0.3, 0.4]), h=1e-6)
        assert np.max(np.abs(g - c)) < 1e-10

    def test_rejects_nonpositive_h(self):
        with pytest.raises(ValueError):
            models.finite_diff_grad(lambda th: 0.0, np.zeros(1), h=0.0)


class TestBatchConsistency:
    def test_linear_mean_grad_equals_average_of_singles(self):
        rng = np.random.default_rng(5)
        model = models.LinearModel()
        theta = rng.standard_normal(3)
        X = rng.standard_normal((6, 3))
        y = rng.standard_normal(6)
        singles = np.mean([model.grad(theta, x, yi)
                           for x, yi in zip(X, y)], axis=0)
        assert np.allclose(model.mean_grad(theta, X, y), singles, atol=1e-14)

    def test_logistic_mean_grad_equals_average_of_singles(self):
        rng = np.random.default_rng(6)
        model = models.LogisticModel()
        theta = rng.standard_normal(3)
        X = rng.standard_normal((6, 3))
        y = rng.integers(0, 2, 6).astype(float)
        singles = np.mean([model.grad(theta, x, yi)
                           for x, yi in zip(X, y)], axis=0)
        assert np.allclose(model.mean_grad(theta, X, y), singles, atol=1e-14)


class TestGradientCovarianceAtOptimum:
    def test_matches_design_covariance(self):
        # at the optimum the linear-model gradient is -eps*x, so its
        # covariance equals the design covariance
        d = 5
        cov = make_toeplitz_cov(d, 0.9)
        theta_star = np.array([1.0, -0.5, 0.0, 2.0, 0.3])
        src = GaussianLinearSource(theta_star, cov, noise_std=1.0, seed=99)
        total = np.zeros((d, d))
        n = 100_000
        X, y = src.draw(n)
        resid = X @ theta_star - y
        G = X * resid[:, None]
        total = G.T @ G / n
        rel = np.linalg.norm(total - cov) / np.linalg.norm(cov)
        assert rel < 0.05
