"""Metric functions shared by the runners and the tests."""

import numpy as np

from ..linalg import frobenius_distance, inv_sqrt_eig


def metric_theta_error(theta, theta_star):
    """Squared distance to the ground truth parameter."""
    if theta.shape != theta_star.shape:
        raise ValueError(f"dimension mismatch: {theta.shape} vs "
                         f"{theta_star.shape}")
    diff = theta - theta_star
    return float(diff @ diff)


def metric_precond_error(A, sigma):
    """Frobenius distance from A to the exact inverse square root of sigma."""
    return frobenius_distance(A, inv_sqrt_eig(sigma))


def metric_accuracy(theta, dataset):
    """Fraction of correct class decisions (threshold at logit 0)."""
    pred = (dataset.X @ theta >= 0.0)
    return float(np.mean(pred == (dataset.y == 1.0)))
