"""Power-law step/threshold sequences and log-weighted iterate averaging.

The same averaging rule serves the parameter vector and the preconditioner
matrix: at update t (counting from 0) the new iterate enters with weight

    a_{t+1} = ln(t+1)^tau / sum_{k=0..t} ln(k+1)^tau

with the conventions 0^0 = 1 (so tau = 0 reproduces the plain running mean)
and 0/0 = 0 (so the very first update with tau > 0 keeps the initial value;
the coefficient is exactly 1 one step later, which flushes the initial value
out of the average).  The recursion is applied exactly as stated, without
re-balancing into a textbook weighted mean; unrolled, it equals the weighted
mean of inputs v_1..v_{t+1} with weights ln(1)^tau .. ln(t+1)^tau.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg

DECAY = "decay"
GROWTH = "growth"


@dataclass(frozen=True)
class PowerSchedule:
    """c * t^{-e} (decay) or c * t^{+e} (growth), defined for t >= 1."""

    coefficient: float
    exponent: float
    direction: str = DECAY

    def __post_init__(self):
        if self.coefficient <= 0:
            raise ValueError(f"coefficient must be > 0, got {self.coefficient}")
        if self.direction not in (DECAY, GROWTH):
            raise ValueError(f"direction must be 'decay' or 'growth', got "
                             f"{self.direction!r}")

    def value(self, t):
        if t < 1:
            raise ValueError(f"schedule index must be >= 1, got {t}")
        if self.direction == DECAY:
            return self.coefficient * t ** -self.exponent
        return self.coefficient * t ** self.exponent


def decay(coefficient, exponent):
    return PowerSchedule(coefficient, exponent, DECAY)


def growth(coefficient, exponent):
    return PowerSchedule(coefficient, exponent, GROWTH)


def averaging_coefficient(t, tau):
    """Weight a_{t+1} given to the newest iterate after t prior updates.

    Computes ln(t+1)^tau / sum_{k=0..t} ln(k+1)^tau with 0^0 = 1 and
    0/0 = 0.  O(t); the running-sum form in LogWeightAverager is the
    constant-time equivalent.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    w = math.log(t + 1) ** tau
    total = sum(math.log(k + 1) ** tau for k in range(t + 1))
    if total == 0.0:
        return 0.0
    return w / total


class LogWeightAverager:
    """Running log-weighted average of a vector or matrix iterate sequence.

    Tracks its own update count so the running weight sum stays consistent
    with the coefficient definition; callers feed exactly one value per
    optimizer step.
    """

    def __init__(self, initial, tau):
        if tau < 0:
            raise ValueError(f"tau must be >= 0, got {tau}")
        self.tau = float(tau)
        self.value = np.array(initial, dtype=float, copy=True)
        self.weight_sum = 0.0
        self.updates = 0
        self._scratch = np.empty_like(self.value)

    def coefficient_for_next(self):
        w = math.log(self.updates + 1) ** self.tau
        total = self.weight_sum + w
        if total == 0.0:
            return 0.0, 0.0
        return w / total, w

    def update(self, new_value):
        if new_value.shape != self.value.shape:
            raise ValueError(f"shape mismatch: average has {self.value.shape},"
                             f" got {new_value.shape}")
        a, w = self.coefficient_for_next()
        self.weight_sum += w
        self.updates += 1
        linalg.blend(self.value, 1.0 - a, new_value, a, self._scratch)
        return self.value

    def restore(self, value, weight_sum, updates):
        """Reset internals from a saved snapshot (checkpoint support)."""
        self.value = np.array(value, dtype=float, copy=True)
        self.weight_sum = float(weight_sum)
        self.updates = int(updates)
        self._scratch = np.empty_like(self.value)
