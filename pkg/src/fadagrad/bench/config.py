"""Experiment configuration: defaults, flat key=value config files and
per-optimizer hyperparameter resolution.

Default hyperparameters follow the reference protocol: exponents
beta = gamma = nu = 3/4 with unit coefficients, c_nu = sqrt(n) for the
streaming kind, tau = tau' = 2, A_0 = 0.1 I, and the diagonal kinds use
nu_t = t^{-1/4}.
"""

import dataclasses
import math
from dataclasses import dataclass

from ..data import sqrt_block_size
from ..precond import precond_init
from ..schedules import decay, growth
from ..optim import KINDS, FULL_KINDS, init_state

DIAG_KINDS = ("adagrad_diag", "waa")


@dataclass
class ExperimentConfig:
    task: str = "linear_sim"              # linear_sim | logistic_file
    optimizers: tuple = ("adagrad_diag", "waa", "full_adagrad", "wafa")
    d: int = 20
    n_samples: int = 100_000
    replications: int = 20
    cov: str = "toeplitz"                 # identity | toeplitz
    rho: float = 0.9
    noise_std: float = 1.0
    seed: int = 2024
    out: str = None
    # schedule overrides; None means the per-optimizer default
    nu_exponent: float = None
    c_nu: float = None
    gamma_exponent: float = 0.75
    c_gamma: float = 1.0
    beta_exponent: float = 0.75
    c_beta: float = 1.0
    tau: float = 2.0
    tau_prime: float = 2.0
    a0_scale: float = 0.1
    a_hat: str = "averaged"               # averaged | current
    grad_reuse: bool = False
    gate_theta: bool = True
    block_size: str = "1"                 # integer, or "sqrt" / "d"
    eps: float = 1e-8
    metric_stride: float = 1.25
    record_precond: bool = False
    steps: int = None                     # precond-only step count override
    train_path: str = None
    test_path: str = None
    split_fraction: float = 0.5
    passes: int = 1
    plot: bool = False
    with_timing: bool = False

    def __post_init__(self):
        if isinstance(self.optimizers, str):
            self.optimizers = tuple(
                s.strip() for s in self.optimizers.split(",") if s.strip())
        for kind in self.optimizers:
            if kind not in KINDS:
                raise ValueError(f"unknown optimizer {kind!r}; choose from "
                                 f"{', '.join(KINDS)}")
        if self.task not in ("linear_sim", "logistic_file"):
            raise ValueError(f"unknown task {self.task!r}")
        if self.cov not in ("identity", "toeplitz"):
            raise ValueError(f"cov must be identity or toeplitz, "
                             f"got {self.cov!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.metric_stride <= 1.0:
            raise ValueError("metric_stride must be > 1")
        for name in ("c_gamma", "c_beta", "a0_scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


_BOOL_VALUES = {"true": True, "1": True, "yes": True,
                "false": False, "0": False, "no": False}


def _coerce(name, text, target_type):
    if target_type is bool:
        try:
            return _BOOL_VALUES[text.lower()]
        except KeyError:
            raise ValueError(f"config key {name}: expected a boolean, "
                             f"got {text!r}") from None
    try:
        return target_type(text)
    except ValueError:
        raise ValueError(f"config key {name}: cannot parse {text!r} as "
                         f"{target_type.__name__}") from None


_FIELD_TYPES = {
    "optimizers": str, "task": str, "cov": str, "out": str, "a_hat": str,
    "block_size": str, "train_path": str, "test_path": str,
    "d": int, "n_samples": int, "replications": int, "seed": int,
    "steps": int, "passes": int,
    "rho": float, "noise_std": float, "nu_exponent": float, "c_nu": float,
    "gamma_exponent": float, "c_gamma": float, "beta_exponent": float,
    "c_beta": float, "tau": float, "tau_prime": float, "a0_scale": float,
    "eps": float, "metric_stride": float, "split_fraction": float,
    "grad_reuse": bool, "gate_theta": bool, "record_precond": bool,
    "plot": bool, "with_timing": bool,
}


def parse_config_text(text):
    """Flat `key = value` lines; `#` starts a comment, blank lines ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected key = value, "
                             f"got {raw!r}")
        key = key.strip()
        val = val.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, val, _FIELD_TYPES[key])
    return values


def load_config(path, overrides=None):
    """Config file merged with CLI overrides on top of the defaults."""
    with open(path, encoding="utf-8") as f:
        values = parse_config_text(f.read())
    if overrides:
        values.update(overrides)
    return ExperimentConfig(**values)


def config_from(overrides):
    return ExperimentConfig(**overrides)


def parse_block_size(spec, d):
    """Resolve a block-size spec: an integer, "sqrt" (floor sqrt d) or "d"."""
    if spec == "sqrt":
        return max(1, sqrt_block_size(d))
    if spec == "d":
        return d
    n = int(spec)
    if n < 1:
        raise ValueError(f"block_size must be >= 1, got {n}")
    return n


def resolve_block_size(cfg, kind, d=None):
    """Streaming block size for one optimizer kind (1 unless swafa)."""
    if kind != "swafa":
        return 1
    return parse_block_size(cfg.block_size, d if d is not None else cfg.d)


def nu_schedule(cfg, kind, n):
    exponent = cfg.nu_exponent
    if exponent is None:
        exponent = 0.25 if kind in DIAG_KINDS else 0.75
    c = cfg.c_nu
    if c is None:
        c = math.sqrt(n) if kind == "swafa" else 1.0
    return decay(c, exponent)


def build_state(cfg, kind, theta0):
    """Optimizer state for one replication, with per-kind defaults filled.

    The problem dimension comes from the start point, which for file-backed
    tasks reflects the dataset rather than the config."""
    d = len(theta0)
    n = resolve_block_size(cfg, kind, d=d)
    pre = None
    if kind in FULL_KINDS:
        pre = precond_init(d, cfg.a0_scale,
                           decay(cfg.c_gamma, cfg.gamma_exponent),
                           growth(cfg.c_beta, cfg.beta_exponent),
                           tau_prime=cfg.tau_prime)
    return init_state(kind, theta0, nu=nu_schedule(cfg, kind, n), tau=cfg.tau,
                      precond=pre, block_size=n, grad_reuse=cfg.grad_reuse,
                      a_hat=cfg.a_hat, gate_theta=cfg.gate_theta, eps=cfg.eps)


def replace(cfg, **kw):
    return dataclasses.replace(cfg, **kw)
