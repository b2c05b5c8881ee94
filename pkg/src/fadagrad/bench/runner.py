"""Replication runners for the simulated and real-data studies.

Every run is reproducible from one top-level seed: replication r of a study
derives its own SeedSequence child, shared across the optimizers under
comparison so they see identical sample streams (common random numbers).
Metrics are recorded at geometrically spaced milestones in samples seen and
aggregated pointwise (mean and median) over replications.
"""

import math
import time

import numpy as np

from ..data import GaussianLinearSource, make_toeplitz_cov, sample_theta_star
from ..linalg import frobenius_distance, inv_sqrt_eig
from ..models import LinearModel, LogisticModel
from ..optim import FULL_KINDS, AVERAGED_KINDS, run_optimizer
from .config import build_state, parse_block_size, resolve_block_size
from .metrics import metric_accuracy, metric_theta_error

SIM_COLUMNS = ("optimizer", "samples_seen",
               "theta_err_sq_mean", "theta_err_sq_median",
               "theta_avg_err_sq_mean", "theta_avg_err_sq_median",
               "precond_err_mean", "precond_err_median",
               "train_acc_mean", "train_acc_median",
               "test_acc_mean", "test_acc_median",
               "skipped_updates_mean")
TIMING_COLUMNS = ("wall_time_ns_mean", "wall_time_ns_median")

PRECOND_COLUMNS = ("samples_seen",
                   "err_current_mean", "err_current_median",
                   "err_avg_mean", "err_avg_median",
                   "rel_err_avg_mean", "skipped_updates_mean")


def milestones(total_steps, stride=1.25):
    """Geometrically spaced step indices: 1, then x stride, ending at total."""
    if total_steps < 1:
        return []
    out = []
    t = 1
    while t < total_steps:
        out.append(t)
        t = max(t + 1, math.ceil(t * stride))
    out.append(total_steps)
    return out


def covariance_matrix(cfg):
    if cfg.cov == "identity":
        return np.eye(cfg.d)
    return make_toeplitz_cov(cfg.d, cfg.rho)


def _aggregate(per_rep_rows, value_keys):
    """Pointwise mean/median over replications.

    per_rep_rows: one list of row dicts per replication, all aligned on the
    same milestones.  Returns aggregated dicts with <key>_mean/_median.
    """
    n_points = len(per_rep_rows[0])
    for rows in per_rep_rows:
        if len(rows) != n_points:
            raise ValueError("replications disagree on milestone count")
    out = []
    for i in range(n_points):
        agg = dict(per_rep_rows[0][i])
        for key in value_keys:
            vals = [rows[i][key] for rows in per_rep_rows]
            if any(v is None for v in vals):
                agg[f"{key}_mean"] = None
                agg[f"{key}_median"] = None
            else:
                agg[f"{key}_mean"] = float(np.mean(vals))
                agg[f"{key}_median"] = float(np.median(vals))
            agg.pop(key, None)
        out.append(agg)
    return out


def _linear_replication(cfg, kind, rep_seed, cov, sigma_inv_sqrt):
    star_ss, init_ss, data_ss = rep_seed.spawn(3)
    theta_star = sample_theta_star(cfg.d, np.random.default_rng(star_ss))
    theta0 = theta_star + 0.5 * np.random.default_rng(init_ss) \
        .standard_normal(cfg.d)
    source = GaussianLinearSource(theta_star, cov, cfg.noise_std,
                                  seed=data_ss)
    state = build_state(cfg, kind, theta0)
    n = state.block_size
    steps = cfg.n_samples // n
    if steps < 1:
        raise ValueError(f"{kind}: n_samples={cfg.n_samples} yields no full "
                         f"block of size {n}")
    record_pre = cfg.record_precond and kind in FULL_KINDS
    traj = run_optimizer(state, source.blocks(n), LinearModel(), steps,
                         record_at=milestones(steps, cfg.metric_stride),
                         record_precond=record_pre)
    rows = []
    for p in traj.points:
        err_pre = None
        if record_pre and p.A_avg is not None:
            err_pre = frobenius_distance(p.A_avg, sigma_inv_sqrt)
        rows.append({
            "samples_seen": p.samples_seen,
            "theta_err_sq": metric_theta_error(p.theta, theta_star),
            "theta_avg_err_sq": metric_theta_error(p.theta_avg, theta_star),
            "precond_err": err_pre,
            "train_acc": None,
            "test_acc": None,
            "wall_time_ns": p.wall_time_ns,
            "skipped_updates": p.skipped_updates,
        })
    return rows


def _classify_replication(cfg, kind, rep_seed, train, test):
    rng = np.random.default_rng(rep_seed)
    order = np.concatenate([rng.permutation(train.n_rows)
                            for _ in range(cfg.passes)])
    X, y = train.X[order], train.y[order]
    state = build_state(cfg, kind, np.zeros(train.dim))
    n = state.block_size
    steps = len(y) // n

    def blocks():
        for i in range(steps):
            yield X[i * n:(i + 1) * n], y[i * n:(i + 1) * n]

    traj = run_optimizer(state, blocks(), LogisticModel(), steps,
                         record_at=milestones(steps, cfg.metric_stride))
    averaged = kind in AVERAGED_KINDS
    rows = []
    for p in traj.points:
        est = p.theta_avg if averaged else p.theta
        rows.append({
            "samples_seen": p.samples_seen,
            "theta_err_sq": None,
            "theta_avg_err_sq": None,
            "precond_err": None,
            "train_acc": metric_accuracy(est, train),
            "test_acc": metric_accuracy(est, test),
            "wall_time_ns": p.wall_time_ns,
            "skipped_updates": p.skipped_updates,
        })
    return rows


_VALUE_KEYS = ("theta_err_sq", "theta_avg_err_sq", "precond_err",
               "train_acc", "test_acc", "wall_time_ns", "skipped_updates")


def run_replications(cfg, datasets=None):
    """Run the configured study; returns aggregated rows in column order.

    For linear_sim each replication draws a fresh ground truth, start point
    and sample stream.  For logistic_file the data are fixed and each
    replication reshuffles the pass order.  Any replication failure aborts
    with the optimizer and replication index attached.
    """
    rep_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    if cfg.task == "linear_sim":
        cov = covariance_matrix(cfg)
        sigma_inv_sqrt = inv_sqrt_eig(cov) if cfg.record_precond else None
    else:
        train, test = datasets if datasets is not None \
            else load_classify_datasets(cfg)
    agg_rows = []
    accuracy_summary = []
    for kind in cfg.optimizers:
        per_rep = []
        for r, rep_seed in enumerate(rep_seeds):
            try:
                if cfg.task == "linear_sim":
                    rows = _linear_replication(cfg, kind, rep_seed, cov,
                                               sigma_inv_sqrt)
                else:
                    rows = _classify_replication(cfg, kind, rep_seed, train,
                                                 test)
            except Exception as exc:
                raise RuntimeError(
                    f"replication {r} of optimizer {kind} failed: "
                    f"{exc}") from exc
            per_rep.append(rows)
        agg = _aggregate(per_rep, _VALUE_KEYS)
        for row in agg:
            row["optimizer"] = kind
        agg_rows.extend(agg)
        if cfg.task == "logistic_file":
            accuracy_summary.append({
                "optimizer": kind,
                "train_acc": agg[-1]["train_acc_mean"],
                "test_acc": agg[-1]["test_acc_mean"],
            })
    columns = list(SIM_COLUMNS)
    if cfg.with_timing:
        columns += list(TIMING_COLUMNS)
    result = {"columns": columns, "rows": agg_rows}
    if cfg.task == "logistic_file":
        result["accuracy"] = accuracy_summary
    return result


def load_classify_datasets(cfg):
    from ..data import load_libsvm, train_test_split
    if not cfg.train_path:
        raise ValueError("classify requires a training file path")
    train = load_libsvm(cfg.train_path)
    if cfg.test_path:
        test = load_libsvm(cfg.test_path)
        dim = max(train.dim, test.dim)
        train = _pad_dataset(train, dim)
        test = _pad_dataset(test, dim)
    else:
        train, test = train_test_split(train, cfg.split_fraction, cfg.seed)
    return train, test


def _pad_dataset(ds, dim):
    from ..data import Dataset
    if ds.dim == dim:
        return ds
    X = np.zeros((ds.n_rows, dim))
    X[:, :ds.dim] = ds.X
    return Dataset(X, ds.y)


def run_precond_only(cfg):
    """Convergence of the preconditioner alone, gradients drawn at the
    optimum, reported against the eigendecomposition oracle."""
    from ..precond import precond_init
    from ..schedules import decay, growth
    cov = covariance_matrix(cfg)
    sigma_inv_sqrt = inv_sqrt_eig(cov)
    denom = float(np.linalg.norm(sigma_inv_sqrt))
    steps = cfg.steps if cfg.steps is not None else cfg.n_samples
    n = parse_block_size(cfg.block_size, cfg.d)
    model = LinearModel()
    rep_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    per_rep = []
    for rep_seed in rep_seeds:
        star_ss, data_ss = rep_seed.spawn(2)
        theta_star = sample_theta_star(cfg.d,
                                       np.random.default_rng(star_ss))
        source = GaussianLinearSource(theta_star, cov, cfg.noise_std,
                                      seed=data_ss)
        pre = precond_init(cfg.d, cfg.a0_scale,
                           decay(cfg.c_gamma, cfg.gamma_exponent),
                           growth(cfg.c_beta, cfg.beta_exponent),
                           tau_prime=cfg.tau_prime)
        record = set(milestones(steps, cfg.metric_stride))
        rows = []
        for t1 in range(1, steps + 1):
            X, y = source.draw(n)
            pre.rm_update(model.mean_grad(theta_star, X, y), n=n)
            if t1 in record:
                err_cur = frobenius_distance(pre.A, sigma_inv_sqrt)
                err_avg = frobenius_distance(pre.A_avg.value, sigma_inv_sqrt)
                rows.append({
                    "samples_seen": n * t1,
                    "err_current": err_cur,
                    "err_avg": err_avg,
                    "rel_err_avg": err_avg / denom,
                    "skipped_updates": pre.skipped_updates,
                })
        per_rep.append(rows)
    agg = _aggregate(per_rep, ("err_current", "err_avg", "rel_err_avg",
                               "skipped_updates"))
    for row in agg:
        row.pop("rel_err_avg_median", None)
        row.pop("skipped_updates_median", None)
    return {"columns": list(PRECOND_COLUMNS), "rows": agg}


def run_invariant_sweep(dims=(2, 5, 20), covs=("identity", "toeplitz"),
                        steps=10_000, seed=2024, rho=0.9, base_cfg=None,
                        kind="wafa", slack=1e-9):
    """Check both eigenvalue bounds after every optimizer step over a grid.

    Returns one report row per grid cell with the worst margins observed.
    """
    from .config import ExperimentConfig, replace
    cfg0 = base_cfg if base_cfg is not None else ExperimentConfig()
    rows = []
    for d in dims:
        for cov_name in covs:
            cfg = replace(cfg0, task="linear_sim", d=d, cov=cov_name, rho=rho,
                          n_samples=steps, replications=1, seed=seed,
                          optimizers=(kind,), record_precond=False)
            cov = covariance_matrix(cfg)
            rep_seed = np.random.SeedSequence(cfg.seed).spawn(1)[0]
            star_ss, init_ss, data_ss = rep_seed.spawn(3)
            theta_star = sample_theta_star(d, np.random.default_rng(star_ss))
            theta0 = theta_star + 0.5 * np.random.default_rng(init_ss) \
                .standard_normal(d)
            source = GaussianLinearSource(theta_star, cov, cfg.noise_std,
                                          seed=data_ss)
            state = build_state(cfg, kind, theta0)
            worst = {"min_margin": math.inf, "max_margin": math.inf,
                     "symmetric": True, "violations": 0}

            def check(s, worst=worst):
                rep = s.precond.check_eigen_bounds(slack=slack)
                worst["min_margin"] = min(worst["min_margin"], rep.min_margin)
                worst["max_margin"] = min(worst["max_margin"], rep.max_margin)
                worst["symmetric"] &= rep.symmetric
                worst["violations"] += 0 if rep.passed else 1

            run_optimizer(state, source.blocks(1), LinearModel(), steps,
                          on_step=check)
            rows.append({
                "d": d, "cov": cov_name, "steps": steps,
                "min_margin": worst["min_margin"],
                "max_margin": worst["max_margin"],
                "symmetric": worst["symmetric"],
                "violations": worst["violations"],
                "passed": worst["violations"] == 0 and worst["symmetric"],
            })
    return rows


def _timed_linear_run(cfg, kind, seed):
    """One full pipeline (data generation included) under the wall clock."""
    rep_seed = np.random.SeedSequence(seed).spawn(1)[0]
    cov = covariance_matrix(cfg)
    start = time.perf_counter_ns()
    star_ss, init_ss, data_ss = rep_seed.spawn(3)
    theta_star = sample_theta_star(cfg.d, np.random.default_rng(star_ss))
    theta0 = theta_star + 0.5 * np.random.default_rng(init_ss) \
        .standard_normal(cfg.d)
    source = GaussianLinearSource(theta_star, cov, cfg.noise_std,
                                  seed=data_ss)
    state = build_state(cfg, kind, theta0)
    n = state.block_size
    run_optimizer(state, source.blocks(n), LinearModel(),
                  cfg.n_samples // n)
    return (time.perf_counter_ns() - start) / 1e9


def time_profile(configs, runs=5, labels=None):
    """Median wall time of each configuration over `runs` timed runs.

    Data generation time is part of every measurement.  Returns one entry
    per configuration: {label, median, times}.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    entries = []
    for i, cfg in enumerate(configs):
        kind = cfg.optimizers[0]
        times = [_timed_linear_run(cfg, kind, cfg.seed + k)
                 for k in range(runs)]
        label = labels[i] if labels else _timing_label(cfg)
        entries.append({"label": label, "median": float(np.median(times)),
                        "times": times})
    return entries


def time_compare(cfg_a, cfg_b, runs=5, label_a=None, label_b=None):
    """Median wall times of two configurations and their ratio b/a.

    The configurations are expected to differ only in optimizer/block size.
    """
    a, b = time_profile((cfg_a, cfg_b), runs=runs,
                        labels=(label_a or _timing_label(cfg_a),
                                label_b or _timing_label(cfg_b)))
    return {
        "label_a": a["label"],
        "label_b": b["label"],
        "median_a": a["median"],
        "median_b": b["median"],
        "ratio": b["median"] / a["median"],
        "times_a": a["times"],
        "times_b": b["times"],
    }


def _timing_label(cfg):
    kind = cfg.optimizers[0]
    if kind == "swafa":
        return f"swafa(n={resolve_block_size(cfg, kind)})"
    return kind
