"""Epsilon-insensitive support vector regression on a precomputed kernel.

The dual is solved in terms of ``beta_i = alpha_i - alpha_i^*``::

    max_beta  -eps * sum|beta_i| + sum beta_i y_i - 1/2 beta^T K beta
    s.t.      -C <= beta_i <= C,  sum beta_i = 0

by pairwise coordinate ascent: each step moves ``beta_i += t, beta_j -= t`` along
the maximally KKT-violating pair and maximizes the piecewise quadratic in ``t``
exactly, so the objective never decreases and the equality constraint is kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

SV_THRESHOLD = 1e-9


@dataclass(frozen=True)
class SvrParams:
    C: float = 1.0
    epsilon: float = 0.1
    tol: float = 1e-3
    max_passes: int = 1000

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True, eq=False)
class SvrModel:
    beta: np.ndarray
    bias: float
    support_indices: np.ndarray
    params: SvrParams
    kernel: object = None
    train_rows: Optional[np.ndarray] = field(default=None, repr=False)
    iterations: int = 0

    @property
    def n_support(self) -> int:
        return int(self.support_indices.size)

    def predict_rows(self, K_rows) -> np.ndarray:
        """Predictions for a matrix whose rows are kernel rows against the training set."""
        K_rows = np.atleast_2d(np.asarray(K_rows, dtype=float))
        if K_rows.shape[1] != self.beta.size:
            raise ValueError(f"kernel rows have length {K_rows.shape[1]}, expected {self.beta.size}")
        return K_rows @ self.beta + self.bias

    def predict_points(self, X) -> np.ndarray:
        if self.kernel is None or self.train_rows is None:
            raise ValueError("model has no kernel binding; use predict() with explicit kernel rows")
        return self.predict_rows(self.kernel.cross(X, self.train_rows))


def predict(model: SvrModel, k_row) -> float:
    k_row = np.asarray(k_row, dtype=float).reshape(-1)
    if k_row.size != model.beta.size:
        raise ValueError(f"k_row has length {k_row.size}, expected {model.beta.size}")
    return float(k_row @ model.beta + model.bias)


def dual_objective(beta, K, y, epsilon: float) -> float:
    beta = np.asarray(beta, dtype=float)
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (beta.shape == y.shape and K.shape == (beta.size, beta.size)):
        raise ValueError(f"size mismatch: beta {beta.shape}, y {y.shape}, K {K.shape}")
    return float(-epsilon * np.abs(beta).sum() + beta @ y - 0.5 * beta @ K @ beta)


def _check_problem(K, y) -> tuple[np.ndarray, np.ndarray]:
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size == 0:
        raise ValueError("empty target vector")
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"kernel matrix must be square, got shape {K.shape}")
    if K.shape[0] != y.size:
        raise ValueError(f"kernel size {K.shape[0]} does not match {y.size} targets")
    if np.max(np.abs(K - K.T)) > 1e-9:
        raise ValueError("kernel matrix is not symmetric")
    return K, y


def _directional_rates(beta, g, eps):
    # U_i: ascent rate for increasing beta_i; D_i: its counterpart for decreasing (rate = -D_i)
    up = np.where(beta >= 0, g - eps, g + eps)
    down = np.where(beta <= 0, g + eps, g - eps)
    return up, down


def _select_pair(up, down, can_up, can_down):
    U = np.where(can_up, up, -np.inf)
    D = np.where(can_down, down, np.inf)
    i = int(np.argmax(U))
    j = int(np.argmin(D))
    if i != j:
        return i, j, U[i] - D[j]
    # same index on both sides: fall back to the better of the two runner-up pairs
    U2, D2 = U.copy(), D.copy()
    U2[i] = -np.inf
    D2[j] = np.inf
    i2, j2 = int(np.argmax(U2)), int(np.argmin(D2))
    gap_a, gap_b = U2[i2] - D[j], U[i] - D2[j2]
    if gap_a >= gap_b:
        return i2, j, gap_a
    return i, j2, gap_b


def _pair_step(bi, bj, a, eta, C, eps) -> float:
    """Maximize a*t - eta/2*t^2 - eps*(|bi+t| + |bj-t|) over the feasible interval."""
    lo = max(-C - bi, bj - C)
    hi = min(C - bi, bj + C)

    def phi(t):
        return a * t - 0.5 * eta * t * t - eps * (abs(bi + t) + abs(bj - t))

    candidates = [0.0, lo, hi]
    for kink in (-bi, bj):
        if lo <= kink <= hi:
            candidates.append(kink)
    if eta > 1e-12:
        for si in (-1.0, 1.0):
            for sj in (-1.0, 1.0):
                t = (a - eps * si + eps * sj) / eta
                if lo <= t <= hi and si * (bi + t) >= 0 and sj * (bj - t) >= 0:
                    candidates.append(t)
    best, best_val = 0.0, phi(0.0)
    for t in candidates[1:]:
        val = phi(t)
        if val > best_val:
            best, best_val = t, val
    return best


def _solve(K, y, params: SvrParams, callback):
    n = y.size
    C, eps = params.C, params.epsilon
    beta = np.zeros(n)
    g = y.copy()  # y - K @ beta
    max_iter = params.max_passes * max(n, 1)
    it = 0
    while it < max_iter:
        up, down = _directional_rates(beta, g, eps)
        i, j, gap = _select_pair(up, down, beta < C, beta > -C)
        if not gap > params.tol:
            break
        t = _pair_step(beta[i], beta[j], g[i] - g[j], K[i, i] + K[j, j] - 2 * K[i, j], C, eps)
        if t == 0.0:
            break
        beta[i] = min(max(beta[i] + t, -C), C)
        beta[j] = min(max(beta[j] - t, -C), C)
        g -= t * (K[:, i] - K[:, j])
        it += 1
        if callback is not None:
            callback(it, beta.copy())
    return beta, it


def _bias(K, y, beta, params: SvrParams) -> float:
    C, eps = params.C, params.epsilon
    mag = np.abs(beta)
    if np.all(mag <= SV_THRESHOLD):
        return float(np.mean(y))
    g = y - K @ beta
    free = (mag > SV_THRESHOLD) & (mag < C * (1 - 1e-9))
    if np.any(free):
        return float(np.mean(g[free] - eps * np.sign(beta[free])))
    up, down = _directional_rates(beta, g, eps)
    lower = up[beta < C].max() if np.any(beta < C) else None
    upper = down[beta > -C].min() if np.any(beta > -C) else None
    if lower is None:
        return float(upper)
    if upper is None:
        return float(lower)
    return float(0.5 * (lower + upper))


def fit_svr(
    K,
    y,
    params: SvrParams = SvrParams(),
    *,
    kernel=None,
    train_rows=None,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> SvrModel:
    """Fit an epsilon-SVR on the Gram matrix ``K``.

    ``kernel``/``train_rows`` optionally bind the model to a kernel so that
    :meth:`SvrModel.predict_points` works on raw inputs. ``callback`` receives
    ``(iteration, beta)`` after every pair update.
    """
    K, y = _check_problem(K, y)
    beta, iterations = _solve(K, y, params, callback)
    bias = _bias(K, y, beta, params)
    support = np.flatnonzero(np.abs(beta) > SV_THRESHOLD)
    beta.setflags(write=False)
    if train_rows is not None:
        train_rows = np.asarray(train_rows, dtype=float)
    return SvrModel(beta, bias, support, params, kernel, train_rows, iterations)


def rbf_kernel_entry(x, z, gamma: float) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    z = np.asarray(z, dtype=float).reshape(-1)
    if x.shape != z.shape:
        raise ValueError(f"length mismatch: {x.size} vs {z.size}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    d = x - z
    return float(np.exp(-gamma * (d @ d)))


def rbf_cross(A, B, gamma: float) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"row width mismatch: {A.shape[1]} vs {B.shape[1]}")
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def scale_gamma(X) -> float:
    """``1 / (d * Var(X))`` over the flattened training matrix."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    var = X.var()
    return 1.0 / (X.shape[1] * var) if var > 0 else 1.0


@dataclass(frozen=True)
class RbfKernel:
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @classmethod
    def scaled(cls, X) -> RbfKernel:
        return cls(scale_gamma(X))

    def gram(self, X) -> np.ndarray:
        K = rbf_cross(X, X, self.gamma)
        K = 0.5 * (K + K.T)
        np.fill_diagonal(K, 1.0)
        return K

    def cross(self, A, B) -> np.ndarray:
        return rbf_cross(A, B, self.gamma)


@dataclass(frozen=True, eq=False)
class PrecomputedKernel:
    """A fixed training Gram matrix plus a provider of kernel rows for new points.

    ``row_provider(A)`` must return the ``len(A) x n_train`` matrix of kernel values
    between ``A`` and the training rows.
    """

    matrix: np.ndarray
    row_provider: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def gram(self, X) -> np.ndarray:
        n = len(X)
        if self.matrix.shape != (n, n):
            raise ValueError(f"precomputed Gram has shape {self.matrix.shape}, got {n} training rows")
        return np.asarray(self.matrix, dtype=float)

    def cross(self, A, B) -> np.ndarray:
        if self.row_provider is None:
            raise ValueError("precomputed kernel has no row provider for new points")
        return np.asarray(self.row_provider(np.asarray(A, dtype=float)), dtype=float)
