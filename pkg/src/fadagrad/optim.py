"""The six optimizers behind a single stepping interface.

Kinds:
    sgd           plain stochastic gradient descent
    adagrad_diag  diagonal AdaGrad (per-coordinate accumulators)
    waa           diagonal AdaGrad reported through its weighted average
    full_adagrad  full-matrix preconditioning by the recursive estimate A_t
    wafa          weighted-averaged full AdaGrad (averages theta and A)
    swafa         streaming variant updating once per block of n samples

Every state carries the weighted average of its iterates; the averaged
kinds (waa, wafa, swafa) report it as their estimate, the others report the
raw iterate.  Step functions mutate the state in place and evaluate all
schedules at t+1 for the (t+1)-th update.

For the full-matrix kinds the preconditioner update is truncated whenever
n * g^T A g exceeds the threshold beta_{t+1}.  By default the parameter
update is gated on the same indicator (a truncated step leaves theta
unchanged too); set gate_theta=False for the literal recursion that always
moves theta.  Gating rejects exactly the samples whose gradients are
excessively large for the current preconditioner scale and suppresses the
violent transients those samples cause under the default schedules.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .precond import AVERAGED, CURRENT
from .schedules import LogWeightAverager

KINDS = ("sgd", "adagrad_diag", "waa", "full_adagrad", "wafa", "swafa")
AVERAGED_KINDS = ("waa", "wafa", "swafa")
FULL_KINDS = ("full_adagrad", "wafa", "swafa")


@dataclass
class GradientBlock:
    """Mean gradient(s) of one block of n samples.

    grads_at_theta is the block-mean gradient at the current iterate;
    grads_at_theta_avg is the mean gradient of the same samples at the
    current weighted average (needed by wafa/swafa unless grad_reuse).
    """

    grads_at_theta: np.ndarray
    n: int = 1
    grads_at_theta_avg: np.ndarray = None


class OptimizerState:
    """Iterate, averages and per-kind auxiliaries for one optimization run."""

    def __init__(self, kind, theta0, nu, tau=2.0, precond=None, block_size=1,
                 grad_reuse=False, a_hat=AVERAGED, gate_theta=True, eps=1e-8):
        if kind not in KINDS:
            raise ValueError(f"unknown optimizer kind {kind!r}")
        if kind in FULL_KINDS and precond is None:
            raise ValueError(f"{kind} requires a preconditioner state")
        if kind != "swafa" and block_size != 1:
            raise ValueError(f"{kind} uses block_size 1, got {block_size}")
        if block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {block_size}")
        if a_hat not in (CURRENT, AVERAGED):
            raise ValueError(f"a_hat must be 'current' or 'averaged', "
                             f"got {a_hat!r}")
        self.kind = kind
        self.theta = np.array(theta0, dtype=float, copy=True)
        self.dim = self.theta.size
        self.theta_avg = LogWeightAverager(self.theta, tau)
        self.nu = nu
        self.t = 0
        self.precond = precond
        self.diag_accum = (np.zeros(self.dim)
                           if kind in ("adagrad_diag", "waa") else None)
        self.block_size = block_size
        self.grad_reuse = grad_reuse
        self.a_hat = a_hat
        self.gate_theta = gate_theta
        self.eps = eps
        self._mv = np.empty(self.dim)
        self._denom = np.empty(self.dim)

    @property
    def samples_seen(self):
        return self.block_size * self.t

    @property
    def skipped_updates(self):
        return self.precond.skipped_updates if self.precond is not None else 0

    def estimate(self):
        """The reported estimate: averaged iterate for waa/wafa/swafa."""
        if self.kind in AVERAGED_KINDS:
            return self.theta_avg.value
        return self.theta


def init_state(kind, theta0, *, nu, tau=2.0, precond=None, block_size=1,
               grad_reuse=False, a_hat=AVERAGED, gate_theta=True, eps=1e-8):
    return OptimizerState(kind, theta0, nu, tau=tau, precond=precond,
                          block_size=block_size, grad_reuse=grad_reuse,
                          a_hat=a_hat, gate_theta=gate_theta, eps=eps)


def _check_dims(state, g):
    if g.shape != (state.dim,):
        raise ValueError(f"dimension mismatch: state is {state.dim}-d, "
                         f"gradient has shape {g.shape}")


def sgd_step(state, block):
    g = block.grads_at_theta
    _check_dims(state, g)
    state.theta -= state.nu.value(state.t + 1) * g
    state.theta_avg.update(state.theta)
    state.t += 1


def adagrad_diag_step(state, block):
    """Diagonal AdaGrad step, shared by the adagrad_diag and waa kinds.

    The accumulator includes the current gradient before scaling, and a
    small eps regularizes the first-step division by zero.
    """
    g = block.grads_at_theta
    _check_dims(state, g)
    acc = state.diag_accum
    acc += g * g
    denom = np.sqrt(acc, out=state._denom)
    denom += state.eps
    state.theta -= state.nu.value(state.t + 1) * g / denom
    state.theta_avg.update(state.theta)
    state.t += 1


def full_adagrad_step(state, block):
    """Non-averaged full AdaGrad: theta steps along A_t g, then the same
    gradient (and the same mat-vec product) feeds the A-update."""
    g = block.grads_at_theta
    _check_dims(state, g)
    pre = state.precond
    Ag = linalg.mat_vec(pre.A, g, out=state._mv)
    applied = pre.rm_update(g, Ag=Ag)
    if applied or not state.gate_theta:
        state.theta -= state.nu.value(state.t + 1) * Ag
    state.theta_avg.update(state.theta)
    state.t += 1


def _wafa_core(state, block, n):
    g_theta = block.grads_at_theta
    _check_dims(state, g_theta)
    if state.grad_reuse:
        g_precond = g_theta
    else:
        g_precond = block.grads_at_theta_avg
        if g_precond is None:
            raise ValueError("block lacks grads_at_theta_avg and grad_reuse "
                             "is off")
        _check_dims(state, g_precond)
    pre = state.precond
    A_hat = pre.matrix(state.a_hat)
    mv = linalg.mat_vec(A_hat, g_theta, out=state._mv)
    applied = pre.rm_update(g_precond, n=n)
    if applied or not state.gate_theta:
        state.theta -= state.nu.value(state.t + 1) * mv
    state.theta_avg.update(state.theta)
    state.t += 1


def wafa_step(state, block):
    """Weighted-averaged full AdaGrad; the preconditioner is fed the
    gradient at the pre-step weighted average."""
    if block.n != 1:
        raise ValueError(f"wafa consumes single samples, got block of "
                         f"{block.n}")
    _wafa_core(state, block, n=1)


def swafa_step(state, block):
    """Streaming variant: block-mean gradients with n-scaled rank-1 term and
    indicator; n=1 coincides with wafa exactly."""
    if block.n != state.block_size:
        raise ValueError(f"block size mismatch: state expects "
                         f"{state.block_size}, got {block.n}")
    _wafa_core(state, block, n=block.n)


_STEP_FNS = {
    "sgd": sgd_step,
    "adagrad_diag": adagrad_diag_step,
    "waa": adagrad_diag_step,
    "full_adagrad": full_adagrad_step,
    "wafa": wafa_step,
    "swafa": swafa_step,
}


def apply_step(state, block):
    _STEP_FNS[state.kind](state, block)


def needs_avg_gradient(state):
    return state.kind in ("wafa", "swafa") and not state.grad_reuse


@dataclass
class TrajectoryPoint:
    t: int
    samples_seen: int
    theta: np.ndarray
    theta_avg: np.ndarray
    skipped_updates: int
    wall_time_ns: int
    A: np.ndarray = None
    A_avg: np.ndarray = None


@dataclass
class Trajectory:
    points: list = field(default_factory=list)

    def final(self):
        return self.points[-1]


def _snapshot(state, wall_ns, record_precond):
    A = A_avg = None
    if record_precond and state.precond is not None:
        A = state.precond.A.copy()
        A_avg = state.precond.A_avg.value.copy()
    return TrajectoryPoint(state.t, state.samples_seen, state.theta.copy(),
                           state.theta_avg.value.copy(),
                           state.skipped_updates, wall_ns, A, A_avg)


def run_optimizer(state, blocks, model, steps, record_at=(),
                  record_precond=False, on_step=None):
    """Drive `steps` optimizer updates from an iterator of (X, y) blocks.

    Gradient blocks are assembled with the model's block-mean gradient at
    the current iterate (and at the current weighted average when the kind
    requires it).  Snapshots are taken at step 0, at every step index in
    record_at, and at the final step.  on_step(state) runs after every
    update (diagnostics hook).
    """
    record_set = set(record_at)
    start = time.perf_counter_ns()
    traj = Trajectory([_snapshot(state, 0, record_precond)])
    want_avg = needs_avg_gradient(state)
    for t1 in range(1, steps + 1):
        try:
            X, y = next(blocks)
        except StopIteration:
            raise RuntimeError(
                f"sample stream exhausted at step {t1} of {steps}") from None
        g = model.mean_grad(state.theta, X, y)
        g_avg = model.mean_grad(state.theta_avg.value, X, y) if want_avg \
            else None
        apply_step(state, GradientBlock(g, n=len(y), grads_at_theta_avg=g_avg))
        if on_step is not None:
            on_step(state)
        if t1 in record_set or t1 == steps:
            traj.points.append(_snapshot(state, time.perf_counter_ns() - start,
                                         record_precond))
    return traj
