"""Truncated Robbins-Monro estimator of the inverse square root of the
gradient covariance.

State: a symmetric positive definite d x d matrix A updated once per
gradient (or per block of n gradients, using the block mean g):

    q = n * g^T A g
    if q <= beta_{t+1}:
        A <- A - gamma_{t+1} * (n * (A g)(A g)^T - I), then symmetrize
    else:
        A unchanged, skipped counter incremented

together with a log-weighted running average of the A iterates.  The update
keeps A positive definite; two eigenvalue bounds follow by induction and are
runtime-checkable through check_eigen_bounds:

    lambda_min(A_t) >= min{1, lambda_min(A_0)/beta_1} / beta_{t+1}
    lambda_max(A_t) <= lambda_max(A_0) + sum_{k<=t} gamma_k

Cost per update is O(d^2): the product v = A g is formed once and the rank-1
term as n * v v^T; g g^T is never materialized.
"""

import warnings

import numpy as np

from . import linalg
from .schedules import LogWeightAverager, PowerSchedule

CURRENT = "current"
AVERAGED = "averaged"


class EigenBoundReport:
    """Outcome of the two eigenvalue-bound checks plus a symmetry audit."""

    def __init__(self, symmetric, lambda_min, lambda_max, min_bound,
                 max_bound, slack):
        self.symmetric = symmetric
        self.lambda_min = lambda_min
        self.lambda_max = lambda_max
        self.min_bound = min_bound
        self.max_bound = max_bound
        self.min_margin = lambda_min - min_bound
        self.max_margin = max_bound - lambda_max
        self.slack = slack

    @property
    def passed(self):
        return (self.symmetric and self.min_margin >= -self.slack
                and self.max_margin >= -self.slack)

    def __repr__(self):
        return (f"EigenBoundReport(passed={self.passed}, "
                f"symmetric={self.symmetric}, "
                f"min_margin={self.min_margin:.3e}, "
                f"max_margin={self.max_margin:.3e})")


class PrecondState:
    """A_t, its log-weighted average, schedules and truncation statistics."""

    def __init__(self, A0, gamma, beta, tau_prime, eig0=None):
        A0 = np.array(A0, dtype=float, copy=True)
        if A0.ndim != 2 or A0.shape[0] != A0.shape[1]:
            raise ValueError(f"A0 must be square, got shape {A0.shape}")
        if not np.array_equal(A0, A0.T):
            raise ValueError("A0 must be exactly symmetric")
        self.dim = A0.shape[0]
        self.A = A0
        self.gamma = gamma
        self.beta = beta
        self.A_avg = LogWeightAverager(A0, tau_prime)
        self.t = 0
        self.skipped_updates = 0
        # eig0 lets callers that know the spectrum of A0 (scaled identity,
        # checkpoint restore) skip the O(d^3) factorization
        lam_min0, lam_max0 = eig0 if eig0 is not None \
            else linalg.eig_extremes(A0)
        self.lambda0 = min(1.0, lam_min0 / beta.value(1))
        self.lambda_max0 = lam_max0
        self.gamma_sum = 0.0
        self._v = np.empty(self.dim)
        self._rank1 = np.empty((self.dim, self.dim))
        self._sym = np.empty((self.dim, self.dim))

    @property
    def tau_prime(self):
        return self.A_avg.tau

    def rm_update(self, g, n=1, Ag=None):
        """One Robbins-Monro update from gradient (or block mean) g.

        Returns True when the update was applied, False when the truncation
        indicator rejected it.  Ag, when given, must equal A @ g for the
        current A; passing it saves the mat-vec when the caller already
        computed the product.
        """
        if g.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: state is {self.dim}-d, "
                             f"gradient has shape {g.shape}")
        if n < 1:
            raise ValueError(f"block size must be >= 1, got {n}")
        t1 = self.t + 1
        gam = self.gamma.value(t1)
        if Ag is None:
            Ag = linalg.mat_vec(self.A, g, out=self._v)
        q = n * float(g @ Ag)
        if q <= self.beta.value(t1):
            r1 = linalg.outer(Ag, Ag, out=self._rank1)
            r1 *= n * gam
            self.A -= r1
            self.A.flat[:: self.dim + 1] += gam
            linalg.symmetrize(self.A, self._sym)
            applied = True
        else:
            self.skipped_updates += 1
            applied = False
        self.gamma_sum += gam
        self.A_avg.update(self.A)
        self.t = t1
        return applied

    def matrix(self, mode=CURRENT):
        """The current estimate A_t or its log-weighted average."""
        if mode == CURRENT:
            return self.A
        if mode == AVERAGED:
            return self.A_avg.value
        raise ValueError(f"mode must be 'current' or 'averaged', got {mode!r}")

    def check_eigen_bounds(self, slack=1e-9):
        """Evaluate both eigenvalue bounds for the current step count."""
        symmetric = bool(np.array_equal(self.A, self.A.T))
        lam_min, lam_max = linalg.eig_extremes(self.A)
        min_bound = self.lambda0 / self.beta.value(self.t + 1)
        max_bound = self.lambda_max0 + self.gamma_sum
        return EigenBoundReport(symmetric, lam_min, lam_max, min_bound,
                                max_bound, slack)

    def save(self, path):
        save_precond(self, path)

    @classmethod
    def load(cls, path):
        return load_precond(path)


def precond_init(d, a0_scale, gamma, beta, tau_prime=2.0):
    """Fresh state with A_0 = a0_scale * I_d.

    Warns when the schedule coefficients land outside 0 < c_beta*c_gamma < 1;
    the positive-definiteness argument still holds for products <= 1, but the
    convergence analysis assumes the open interval.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if a0_scale <= 0:
        raise ValueError(f"a0_scale must be > 0, got {a0_scale}")
    product = beta.coefficient * gamma.coefficient
    if not 0 < product < 1:
        warnings.warn(
            f"c_beta * c_gamma = {product:g} is outside (0, 1); positive "
            f"definiteness is still guaranteed for products <= 1 but the "
            f"convergence analysis assumes the open interval",
            UserWarning, stacklevel=2)
    return PrecondState(a0_scale * np.eye(d), gamma, beta, tau_prime,
                        eig0=(a0_scale, a0_scale))


def _write_floats(f, name, arr):
    flat = " ".join(repr(float(x)) for x in np.asarray(arr).ravel())
    f.write(f"{name} {flat}\n")


def save_precond(state, path):
    """Plain-text state snapshot: scalars, schedules, then the matrices in
    row-major order with full-precision float repr."""
    with open(path, "w", encoding="ascii") as f:
        f.write(f"dim {state.dim}\n")
        f.write(f"t {state.t}\n")
        f.write(f"skipped_updates {state.skipped_updates}\n")
        f.write(f"lambda0 {state.lambda0!r}\n")
        f.write(f"lambda_max0 {state.lambda_max0!r}\n")
        f.write(f"gamma_sum {state.gamma_sum!r}\n")
        for name, s in (("gamma", state.gamma), ("beta", state.beta)):
            f.write(f"{name} {s.coefficient!r} {s.exponent!r} {s.direction}\n")
        f.write(f"tau_prime {state.A_avg.tau!r}\n")
        f.write(f"avg_weight_sum {state.A_avg.weight_sum!r}\n")
        f.write(f"avg_updates {state.A_avg.updates}\n")
        _write_floats(f, "A", state.A)
        _write_floats(f, "A_avg", state.A_avg.value)


def load_precond(path):
    fields = {}
    with open(path, encoding="ascii") as f:
        for line in f:
            key, _, rest = line.rstrip("\n").partition(" ")
            fields[key] = rest
    d = int(fields["dim"])
    gamma_c, gamma_e, gamma_dir = fields["gamma"].split()
    beta_c, beta_e, beta_dir = fields["beta"].split()
    gamma = PowerSchedule(float(gamma_c), float(gamma_e), gamma_dir)
    beta = PowerSchedule(float(beta_c), float(beta_e), beta_dir)
    A = np.array([float(x) for x in fields["A"].split()]).reshape(d, d)
    state = PrecondState(A, gamma, beta, float(fields["tau_prime"]),
                         eig0=(1.0, 1.0))
    state.t = int(fields["t"])
    state.skipped_updates = int(fields["skipped_updates"])
    state.lambda0 = float(fields["lambda0"])
    state.lambda_max0 = float(fields["lambda_max0"])
    state.gamma_sum = float(fields["gamma_sum"])
    avg = np.array([float(x) for x in fields["A_avg"].split()]).reshape(d, d)
    state.A_avg.restore(avg, float(fields["avg_weight_sum"]),
                        int(fields["avg_updates"]))
    return state
