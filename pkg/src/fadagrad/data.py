"""Data sources: the Gaussian linear simulator, LIBSVM-format ingestion,
streaming block iteration and train/test splitting.

All randomness flows through numpy's PCG64 generators seeded from
SeedSequence objects, one independent child stream per purpose, so sample
streams are reproducible and independent of how they are chunked into
blocks.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class LabeledSample(NamedTuple):
    x: np.ndarray
    y: float


class SparseRow(NamedTuple):
    label: float
    indices: tuple
    values: tuple


def make_toeplitz_cov(d, rho):
    """Correlation matrix R with R_ij = rho^|i-j|."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if abs(rho) >= 1:
        raise ValueError(f"|rho| must be < 1, got {rho}")
    idx = np.arange(d)
    return rho ** np.abs(np.subtract.outer(idx, idx)).astype(float)


def sample_theta_star(d, rng):
    """Ground-truth parameter drawn uniformly from the [-2, 2]^d hypercube."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return rng.uniform(-2.0, 2.0, d)


def sqrt_block_size(d):
    """The floor(sqrt(d)) streaming block size, e.g. d=200 -> 14."""
    return int(math.floor(math.sqrt(d)))


class GaussianLinearSource:
    """Stream of (x, y) with x ~ N(0, cov) and y = x^T theta_star + noise.

    Two independent child generators drive the design draws and the noise
    draws, which makes the sample sequence invariant to block size: drawing
    one sample at a time or a thousand at once yields the same stream.
    """

    def __init__(self, theta_star, cov, noise_std=1.0, seed=0):
        if noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {noise_std}")
        self.theta_star = np.array(theta_star, dtype=float, copy=True)
        self.dim = self.theta_star.size
        cov = np.asarray(cov, dtype=float)
        if cov.shape != (self.dim, self.dim):
            raise ValueError(f"covariance shape {cov.shape} does not match "
                             f"dimension {self.dim}")
        self.cov = cov
        self.cov_chol = np.linalg.cholesky(cov)
        if not np.allclose(self.cov_chol @ self.cov_chol.T, cov, atol=1e-10):
            raise ValueError("Cholesky factor does not reproduce the "
                             "covariance to 1e-10")
        self.noise_std = float(noise_std)
        ss = seed if isinstance(seed, np.random.SeedSequence) \
            else np.random.SeedSequence(seed)
        kx, keps = ss.spawn(2)
        self._rng_x = np.random.default_rng(kx)
        self._rng_eps = np.random.default_rng(keps)

    def draw(self, n):
        """n samples as a (n, d) design block and an n-vector of targets."""
        Z = self._rng_x.standard_normal((n, self.dim))
        X = Z @ self.cov_chol.T
        y = X @ self.theta_star
        if self.noise_std > 0:
            y += self.noise_std * self._rng_eps.standard_normal(n)
        return X, y

    def draw_sample(self):
        X, y = self.draw(1)
        return LabeledSample(X[0], float(y[0]))

    def samples(self):
        """Infinite per-sample iterator."""
        while True:
            yield self.draw_sample()

    def blocks(self, n):
        """Infinite iterator of (X, y) blocks of exactly n samples."""
        if n < 1:
            raise ValueError(f"block size must be >= 1, got {n}")
        while True:
            yield self.draw(n)


def parse_libsvm_line(line, lineno=None):
    """One LIBSVM row `label index:value ...` -> SparseRow.

    Returns None for blank and #-comment lines.  Indices are 1-based and
    must be strictly increasing.
    """
    where = f"line {lineno}: " if lineno is not None else ""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    tokens = stripped.split()
    try:
        label = float(tokens[0])
    except ValueError:
        raise ValueError(f"{where}unparsable label {tokens[0]!r}") from None
    indices = []
    values = []
    prev = 0
    for tok in tokens[1:]:
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise ValueError(f"{where}malformed token {tok!r} "
                             f"(expected index:value)")
        try:
            idx = int(idx_s)
            val = float(val_s)
        except ValueError:
            raise ValueError(f"{where}unparsable number in token "
                             f"{tok!r}") from None
        if idx < 1:
            raise ValueError(f"{where}index must be >= 1, got {idx}")
        if idx <= prev:
            raise ValueError(f"{where}indices must be strictly increasing, "
                             f"got {idx} after {prev}")
        prev = idx
        indices.append(idx)
        values.append(val)
    return SparseRow(label, tuple(indices), tuple(values))


def format_libsvm_row(row):
    """Inverse of parse_libsvm_line for round-trip checks."""
    parts = [f"{row.label:g}"]
    parts += [f"{i}:{v:g}" for i, v in zip(row.indices, row.values)]
    return " ".join(parts)


_LABEL_MAPS = (
    ({0.0, 1.0}, {0.0: 0.0, 1.0: 1.0}),
    ({-1.0, 1.0}, {-1.0: 0.0, 1.0: 1.0}),
    ({1.0, 2.0}, {1.0: 0.0, 2.0: 1.0}),
)


@dataclass
class Dataset:
    """Densified feature matrix with labels normalized to {0, 1}."""

    X: np.ndarray
    y: np.ndarray

    @property
    def n_rows(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    def rows(self):
        for i in range(self.n_rows):
            yield LabeledSample(self.X[i], float(self.y[i]))


def load_libsvm(path, dim_hint=None):
    """Read a LIBSVM text file into a dense Dataset.

    The feature dimension is the larger of dim_hint and the maximum index
    observed; labels {0,1}, {-1,+1} and {1,2} are normalized to {0,1}.
    Accepts LF and CRLF line endings.
    """
    rows = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            row = parse_libsvm_line(line, lineno)
            if row is not None:
                rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    dim = max((row.indices[-1] for row in rows if row.indices), default=0)
    if dim_hint is not None:
        dim = max(dim, dim_hint)
    if dim == 0:
        raise ValueError(f"{path}: no features in any row")
    labels = {row.label for row in rows}
    for domain, mapping in _LABEL_MAPS:
        if labels <= domain:
            label_map = mapping
            break
    else:
        raise ValueError(f"{path}: cannot normalize labels {sorted(labels)} "
                         f"to {{0, 1}}")
    X = np.zeros((len(rows), dim))
    y = np.empty(len(rows))
    for i, row in enumerate(rows):
        for idx, val in zip(row.indices, row.values):
            X[i, idx - 1] = val
        y[i] = label_map[row.label]
    return Dataset(X, y)


def block_iter(stream, n):
    """Group a sample stream into (X, y) blocks of exactly n samples.

    Consecutive, non-overlapping; a trailing partial block is dropped.
    """
    if n < 1:
        raise ValueError(f"block size must be >= 1, got {n}")
    xs = []
    ys = []
    for sample in stream:
        x, y = sample
        xs.append(x)
        ys.append(y)
        if len(xs) == n:
            yield np.stack(xs), np.asarray(ys, dtype=float)
            xs = []
            ys = []


def train_test_split(dataset, fraction, seed):
    """Deterministic shuffled split; train receives the rounding surplus."""
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    total = dataset.n_rows
    n_train = int(math.ceil(fraction * total))
    if n_train == 0 or n_train == total:
        raise ValueError(f"degenerate split: {n_train}/{total - n_train}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(total)
    tr, te = order[:n_train], order[n_train:]
    return (Dataset(dataset.X[tr], dataset.y[tr]),
            Dataset(dataset.X[te], dataset.y[te]))
