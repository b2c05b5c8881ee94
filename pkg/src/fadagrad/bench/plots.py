"""Figure rendering for the benchmark CLI.

Each report path can emit a matplotlib figure next to its CSV: error curves
on log-log axes for the simulated studies, a decay curve for the
preconditioner study, bar charts for timings and accuracies.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["figure.figsize"] = (7.0, 4.5)
plt.rcParams["axes.grid"] = True
plt.rcParams["grid.alpha"] = 0.3


def _column(rows, key):
    return [row.get(key) for row in rows]


def render_error_curves(rows, path, metric="theta_avg_err_sq_mean",
                        title="mean squared error vs samples seen"):
    """One log-log error curve per optimizer from aggregated rows."""
    fig, ax = plt.subplots()
    kinds = []
    for row in rows:
        if row["optimizer"] not in kinds:
            kinds.append(row["optimizer"])
    for kind in kinds:
        pts = [(r["samples_seen"], r[metric]) for r in rows
               if r["optimizer"] == kind and r.get(metric) is not None
               and r["samples_seen"] > 0]
        if not pts:
            continue
        xs, ys = zip(*pts)
        ax.loglog(xs, ys, label=kind)
    ax.set_xlabel("samples seen")
    ax.set_ylabel(metric)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_precond_curve(rows, path):
    fig, ax = plt.subplots()
    xs = _column(rows, "samples_seen")
    for key, label in (("err_current_mean", "current estimate"),
                       ("err_avg_mean", "weighted average")):
        ys = _column(rows, key)
        ax.loglog(xs, ys, label=label)
    ax.set_xlabel("samples seen")
    ax.set_ylabel("Frobenius distance to inverse square root")
    ax.set_title("preconditioner convergence")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_timing(entries, path):
    """Bar chart of median wall times, one bar per labelled configuration."""
    fig, ax = plt.subplots()
    labels = [e["label"] for e in entries]
    medians = [e["median"] for e in entries]
    ax.bar(labels, medians)
    ax.set_ylabel("median wall time (s)")
    ax.set_title("timing comparison")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_accuracy(entries, path):
    fig, ax = plt.subplots()
    labels = [e["optimizer"] for e in entries]
    x = range(len(labels))
    width = 0.38
    ax.bar([i - width / 2 for i in x], [e["train_acc"] for e in entries],
           width, label="train")
    ax.bar([i + width / 2 for i in x], [e["test_acc"] for e in entries],
           width, label="test")
    ax.set_xticks(list(x), labels)
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.0)
    ax.set_title("classification accuracy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
