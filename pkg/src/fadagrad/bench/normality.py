"""Replication-vectorized weighted-averaged full AdaGrad on the linear model.

The asymptotic-normality study needs hundreds of independent replications of
the same run; stepping them one by one is dominated by per-call overhead at
small d.  This runner carries all replications in batched arrays (theta is
(R, d), A is (R, d, d)) and applies the identical recursion to every slice:
per-replication truncation indicators, the same schedules, the same gating
default as the scalar path.  batched_wafa accepts explicit sample arrays so
tests can pin its trajectories against the canonical single-run optimizer on
shared data.
"""

import math

import numpy as np

from ..data import make_toeplitz_cov, sample_theta_star


def batched_wafa(d, reps, steps, seed=2024, cov=None, noise_std=1.0,
                 nu_exponent=0.75, c_nu=1.0, gamma_exponent=0.75, c_gamma=1.0,
                 beta_exponent=0.75, c_beta=1.0, tau=2.0, tau_prime=2.0,
                 a0_scale=0.1, a_hat="averaged", gate_theta=True,
                 theta_star=None, theta0=None, samples=None):
    """Run `reps` independent replications for `steps` updates each.

    Every replication r follows the standard protocol: theta_star uniform on
    the hypercube, theta0 = theta_star + E/2, per-sample gradients of the
    half-squared linear loss.  Pass theta_star/theta0 ((R, d) arrays) and
    samples (X of shape (R, steps, d), y of shape (R, steps)) to run on
    externally supplied data instead.

    Returns a dict with final theta (R, d), theta_avg (R, d), theta_star and
    the truncation-skip counts.
    """
    ss = np.random.SeedSequence(seed)
    star_ss, init_ss, x_ss, eps_ss = ss.spawn(4)
    if theta_star is None:
        rng_star = np.random.default_rng(star_ss)
        theta_star = np.stack([sample_theta_star(d, rng_star)
                               for _ in range(reps)])
    theta_star = np.asarray(theta_star, dtype=float)
    if theta0 is None:
        theta0 = theta_star + 0.5 * np.random.default_rng(init_ss) \
            .standard_normal((reps, d))
    chol = None if cov is None else np.linalg.cholesky(cov)
    rng_x = np.random.default_rng(x_ss)
    rng_eps = np.random.default_rng(eps_ss)
    if samples is not None:
        X_all, y_all = samples
        if X_all.shape != (reps, steps, d) or y_all.shape != (reps, steps):
            raise ValueError("explicit samples have wrong shape")

    theta = np.array(theta0, dtype=float)
    theta_avg = theta.copy()
    eye = np.eye(d)
    A = np.tile(a0_scale * eye, (reps, 1, 1))
    A_avg = A.copy()
    weight_sum_theta = 0.0
    weight_sum_A = 0.0
    skipped = np.zeros(reps, dtype=int)

    for t in range(steps):
        if samples is None:
            X = rng_x.standard_normal((reps, d))
            if chol is not None:
                X = X @ chol.T
            y = np.einsum("ri,ri->r", X, theta_star)
            if noise_std > 0:
                y += noise_std * rng_eps.standard_normal(reps)
        else:
            X = X_all[:, t, :]
            y = y_all[:, t]
        g_theta = X * (np.einsum("ri,ri->r", X, theta) - y)[:, None]
        g_pre = X * (np.einsum("ri,ri->r", X, theta_avg) - y)[:, None]

        v = np.einsum("rij,rj->ri", A, g_pre)
        q = np.einsum("ri,ri->r", g_pre, v)
        beta_t = c_beta * (t + 1) ** beta_exponent
        ok = q <= beta_t
        skipped += ~ok

        A_hat = A_avg if a_hat == "averaged" else A
        mv = np.einsum("rij,rj->ri", A_hat, g_theta)
        nu_t = c_nu * (t + 1) ** -nu_exponent
        move = ok if gate_theta else np.ones(reps, dtype=bool)
        theta -= (nu_t * move)[:, None] * mv

        w = math.log(t + 1) ** tau
        weight_sum_theta += w
        a = w / weight_sum_theta if weight_sum_theta > 0 else 0.0
        theta_avg *= 1.0 - a
        theta_avg += a * theta

        gam_t = c_gamma * (t + 1) ** -gamma_exponent
        upd = v[:, :, None] * v[:, None, :]
        upd -= eye
        upd *= (gam_t * ok)[:, None, None]
        A -= upd
        At = np.transpose(A, (0, 2, 1)).copy()
        A += At
        A *= 0.5

        w2 = math.log(t + 1) ** tau_prime
        weight_sum_A += w2
        a2 = w2 / weight_sum_A if weight_sum_A > 0 else 0.0
        A_avg *= 1.0 - a2
        A_avg += a2 * A

    return {"theta": theta, "theta_avg": theta_avg, "theta_star": theta_star,
            "skipped": skipped}


def run_normality_study(d=2, reps=500, steps=100_000, seed=2024, cov=None,
                        rho=None):
    """Empirical second moment of sqrt(t) * (theta_avg - theta_star).

    With an identity design the linear model's limit covariance
    H^{-1} Sigma H^{-1} is the identity, so the scaled deviations should
    have second-moment matrix close to I.
    """
    if cov is None and rho is not None:
        cov = make_toeplitz_cov(d, rho)
    res = batched_wafa(d, reps, steps, seed=seed, cov=cov)
    Z = math.sqrt(steps) * (res["theta_avg"] - res["theta_star"])
    C = (Z.T @ Z) / reps
    eye = np.eye(d)
    rel_dev = float(np.linalg.norm(C - eye) / np.linalg.norm(eye))
    return {"covariance": C, "rel_deviation": rel_dev, "reps": reps,
            "steps": steps}
