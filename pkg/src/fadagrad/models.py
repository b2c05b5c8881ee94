"""Loss/gradient providers for linear and logistic regression.

Single-sample gradients are exposed as plain functions; the model classes
add vectorized block-mean gradients for the optimizer loop.  A central
finite-difference oracle is included for gradient verification.
"""

import numpy as np


def sigmoid(z):
    """Logistic function, overflow-safe for any logit magnitude."""
    if np.isscalar(z) or np.ndim(z) == 0:
        z = float(z)
        if z >= 0:
            return 1.0 / (1.0 + np.exp(-z))
        ez = np.exp(z)
        return ez / (1.0 + ez)
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def linear_grad(theta, x, y):
    """Gradient of the half-squared residual: (x^T theta - y) * x."""
    if x.shape != theta.shape:
        raise ValueError(f"dimension mismatch: theta {theta.shape}, "
                         f"x {x.shape}")
    return (x @ theta - y) * x


def logistic_grad(theta, x, y):
    """Gradient of the logistic loss: (sigmoid(x^T theta) - y) * x."""
    if x.shape != theta.shape:
        raise ValueError(f"dimension mismatch: theta {theta.shape}, "
                         f"x {x.shape}")
    if y not in (0, 1):
        raise ValueError(f"logistic label must be 0 or 1, got {y!r}")
    return (sigmoid(float(x @ theta)) - y) * x


def logistic_predict(theta, x):
    """Class decision: 1 iff x^T theta >= 0 (ties go to class 1)."""
    return 1 if float(x @ theta) >= 0.0 else 0


def linear_loss(theta, x, y):
    r = float(x @ theta) - y
    return 0.5 * r * r


def logistic_loss(theta, x, y):
    z = float(x @ theta)
    # log(1 + e^z) - y*z, computed without overflow
    return float(np.logaddexp(0.0, z) - y * z)


def finite_diff_grad(loss, theta, h=1e-6):
    """Central finite differences of a scalar loss, coordinate by coordinate."""
    if h <= 0:
        raise ValueError(f"step h must be > 0, got {h}")
    theta = np.asarray(theta, dtype=float)
    g = np.empty_like(theta)
    for i in range(theta.size):
        bumped = theta.copy()
        bumped[i] = theta[i] + h
        up = loss(bumped)
        bumped[i] = theta[i] - h
        down = loss(bumped)
        g[i] = (up - down) / (2.0 * h)
    return g


class LinearModel:
    """Half-squared-error regression: F(theta) = E[(y - x^T theta)^2] / 2."""

    def grad(self, theta, x, y):
        return linear_grad(theta, x, y)

    def mean_grad(self, theta, X, y):
        r = X @ theta
        r -= y
        g = r @ X
        g /= len(y)
        return g

    def loss(self, theta, x, y):
        return linear_loss(theta, x, y)


class LogisticModel:
    """Binary logistic regression with labels in {0, 1}."""

    def grad(self, theta, x, y):
        return logistic_grad(theta, x, y)

    def mean_grad(self, theta, X, y):
        p = sigmoid(X @ theta)
        p -= y
        g = p @ X
        g /= len(y)
        return g

    def loss(self, theta, x, y):
        return logistic_loss(theta, x, y)

    def predict(self, theta, X):
        return (X @ theta >= 0.0).astype(int)
