"""Dense symmetric-matrix kernels and the exact eigendecomposition oracle.

The optimizer stepping paths are built exclusively from the O(d^2) kernels
in this module (mat_vec, outer, symmetrize, blend).  Every kernel call bumps
a per-process counter so tests can audit that a step performs a bounded
number of quadratic operations and never falls back to an O(d^3) routine.
The eigendecomposition helpers (inv_sqrt_eig, eig_extremes) are O(d^3) and
are reserved for metrics, diagnostics and tests.
"""

from collections import Counter

import numpy as np

# Cost class of each counted kernel.  "quadratic" kernels are legal on the
# optimizer stepping path, "cubic" ones are not.
QUADRATIC_KERNELS = ("mat_vec", "quad_form", "outer", "symmetrize", "blend",
                     "frobenius")
CUBIC_KERNELS = ("inv_sqrt_eig", "eig_extremes")

KERNEL_COUNTS = Counter()


def reset_kernel_counts():
    KERNEL_COUNTS.clear()


def kernel_counts():
    """Snapshot of the per-kernel call counters."""
    return dict(KERNEL_COUNTS)


def quadratic_calls():
    return sum(KERNEL_COUNTS[k] for k in QUADRATIC_KERNELS)


def cubic_calls():
    return sum(KERNEL_COUNTS[k] for k in CUBIC_KERNELS)


def _check_square(A, name="A"):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")


def mat_vec(A, v, out=None):
    """Matrix-vector product A @ v for a square A."""
    _check_square(A)
    if v.ndim != 1 or v.shape[0] != A.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {A.shape[0]}x{A.shape[1]}, "
            f"vector has shape {v.shape}")
    KERNEL_COUNTS["mat_vec"] += 1
    return np.dot(A, v, out=out)


def quad_form(A, g):
    """Quadratic form g^T A g."""
    _check_square(A)
    if g.ndim != 1 or g.shape[0] != A.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {A.shape[0]}x{A.shape[1]}, "
            f"vector has shape {g.shape}")
    KERNEL_COUNTS["quad_form"] += 1
    return float(g @ np.dot(A, g))


def outer(v, w, out=None):
    """Rank-1 outer product v w^T."""
    KERNEL_COUNTS["outer"] += 1
    return np.outer(v, w, out=out)


def symmetrize(A, scratch=None):
    """Replace A by (A + A^T)/2 in place and return it.

    Uses a scratch buffer because A and A.T alias the same memory.
    """
    _check_square(A)
    KERNEL_COUNTS["symmetrize"] += 1
    if scratch is None:
        scratch = np.empty_like(A)
    np.add(A, A.T, out=scratch)
    scratch *= 0.5
    A[...] = scratch
    return A


def blend(target, keep, source, mix, scratch=None):
    """In-place convex-style blend: target = keep*target + mix*source.

    Counted as a quadratic kernel only for matrix operands; vector blends
    are O(d) and stay off the budget.
    """
    if target.shape != source.shape:
        raise ValueError(
            f"shape mismatch: {target.shape} vs {source.shape}")
    if target.ndim == 2:
        KERNEL_COUNTS["blend"] += 1
    target *= keep
    if scratch is None:
        target += mix * source
    else:
        np.multiply(source, mix, out=scratch)
        target += scratch
    return target


def frobenius_distance(A, B):
    """Frobenius norm of A - B."""
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    KERNEL_COUNTS["frobenius"] += 1
    return float(np.linalg.norm(A - B))


def inv_sqrt_eig(S, tol=1e-12):
    """Inverse square root of a symmetric positive definite matrix.

    Returns the symmetric M with M S M = I, computed from the full
    eigendecomposition.  This is the evaluation oracle the recursive
    estimator is compared against; it is O(d^3) and must stay off the
    optimizer stepping path.
    """
    _check_square(S, "S")
    KERNEL_COUNTS["inv_sqrt_eig"] += 1
    w, V = np.linalg.eigh(S)
    if w.min() <= tol:
        raise ValueError(
            f"matrix is not positive definite: min eigenvalue {w.min():.3e} "
            f"<= tolerance {tol:.0e}")
    M = (V * w ** -0.5) @ V.T
    # eigh output is symmetric only up to rounding; pin it exactly
    return 0.5 * (M + M.T)


def eig_extremes(A):
    """(smallest, largest) eigenvalue of a symmetric matrix.

    Only the lower triangle is read; the caller is responsible for symmetry.
    """
    _check_square(A)
    KERNEL_COUNTS["eig_extremes"] += 1
    w = np.linalg.eigvalsh(A)
    return float(w[0]), float(w[-1])
