"""Vectors and dense linear operators on finite-dimensional real spaces.

Vectors are plain 1-D ``float64`` numpy arrays. :class:`LinearOp` wraps a
dense matrix and exposes ``apply``/``adjoint_apply`` plus the largest
eigenvalue of ``A^T A`` (:func:`gram_norm`), which bounds admissible step
sizes for the splitting schemes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

#: Multiplier applied to power-iteration estimates before forming step bounds.
SAFETY_FACTOR = 1.01

GRAM_TOL = 1e-10
GRAM_MAX_ITER = 5000
_BREAKDOWN = 1e-30


class DimensionError(ValueError):
    """Operand shapes do not conform."""


class GramNormWarning(RuntimeWarning):
    """Power iteration hit ``max_iter`` before reaching ``tol``.

    The last Rayleigh-quotient estimate is kept in ``estimate``.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


def as_vector(x, dim=None):
    """Return ``x`` as a finite 1-D float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {v.shape}")
    if v.size == 0:
        raise DimensionError("vectors must have positive dimension")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dim is not None and v.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {v.size}")
    return v


def inner(x, y):
    return float(np.dot(x, y))


def norm(x):
    return float(np.linalg.norm(x))


@dataclass(frozen=True, eq=False)
class LinearOp:
    """Dense matrix operator ``R^cols -> R^rows``.

    Parameters
    ----------
    matrix : array_like
        2-D array of shape ``(rows, cols)``. It is copied and made read-only.
    """

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim == 1:
            m = m.reshape(1, -1)
        if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
            raise DimensionError(f"operator must be a non-empty 2-D array, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @property
    def rows(self):
        return self.matrix.shape[0]

    @property
    def cols(self):
        return self.matrix.shape[1]

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, x):
        return apply(self, x)

    def adjoint_apply(self, y):
        return adjoint_apply(self, y)

    def __repr__(self):
        return f"LinearOp(rows={self.rows}, cols={self.cols})"


def apply(A, x):
    """Matrix-vector product ``A x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (A.cols,):
        raise DimensionError(f"operator expects dimension {A.cols}, got {x.shape}")
    return A.matrix @ x


def adjoint_apply(A, y):
    """Adjoint product ``A^T y``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (A.rows,):
        raise DimensionError(f"adjoint expects dimension {A.rows}, got {y.shape}")
    return A.matrix.T @ y


def _start_vector(n):
    # Deterministic, and generically not orthogonal to any eigenvector.
    v = np.ones(n) + 0.1 * np.sin(np.arange(1, n + 1) * np.sqrt(2.0))
    return v / np.linalg.norm(v)


def gram_norm(A, tol=GRAM_TOL, max_iter=GRAM_MAX_ITER):
    """Estimate ``||A^T A||``, the largest eigenvalue of the Gram matrix.

    Power iteration on ``A^T A`` from a fixed start vector. Each estimate is
    a Rayleigh quotient, hence a lower bound on the true value; callers
    forming step sizes should scale by :data:`SAFETY_FACTOR`.

    Parameters
    ----------
    A : LinearOp
    tol : float
        Stop when the relative change of the Rayleigh quotient is at most ``tol``.
    max_iter : int

    Returns
    -------
    float
        The estimate. If ``max_iter`` is exhausted a :class:`GramNormWarning`
        is issued and the last estimate returned.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = A.matrix
    if not np.any(M):
        return 0.0
    n = A.cols
    v = _start_vector(n)
    est = 0.0
    perturb = 0
    for _ in range(max_iter):
        Av = M @ v
        w = M.T @ Av
        wn = np.linalg.norm(w)
        if wn < _BREAKDOWN:
            # v landed in the null space; restart from a shifted deterministic vector
            perturb += 1
            v = np.cos(np.arange(1, n + 1) * (perturb + 0.5)) + 1e-3 * perturb
            v /= np.linalg.norm(v)
            continue
        new = float(Av @ Av)
        v = w / wn
        if est > 0 and abs(new - est) <= tol * abs(new):
            return float(np.dot(M @ v, M @ v))
        est = new
    warnings.warn(
        GramNormWarning(f"gram_norm did not reach tol={tol:g} in {max_iter} iterations", est),
        stacklevel=2,
    )
    return est


def safe_lipschitz(L):
    """Inflate a power-iteration estimate by :data:`SAFETY_FACTOR`."""
    return SAFETY_FACTOR * L


def lift_operator(p, ops, n=None):
    """Stack ``p`` identity blocks on top of the operators in ``ops``.

    This is the diagonal embedding ``x -> (x, ..., x, A_1 x, ..., A_r x)``.
    ``n`` is required only when ``ops`` is empty.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    cols = {op.cols for op in ops}
    if n is not None:
        cols.add(n)
    if len(cols) > 1:
        raise DimensionError(f"inconsistent column counts {sorted(cols)}")
    if not cols:
        raise DimensionError("cannot infer the domain dimension: pass n")
    (n,) = cols
    blocks = [np.eye(n)] * p + [op.matrix for op in ops]
    if not blocks:
        raise DimensionError("lifted operator would be empty (p = 0 and no operators)")
    return LinearOp(np.vstack(blocks))
