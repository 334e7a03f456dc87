"""Per-feature SVR reconstruction detector (QSVR / CSVR)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .svr import SvrModel, SvrParams, fit_svr

THRESHOLD_FACTOR = 3.0

NORMAL = 0
ANOMALOUS = 1


def training_matrix(X, what: str = "training set") -> np.ndarray:
    try:
        X = np.asarray(X, dtype=float)
    except ValueError:
        raise ValueError(f"{what} has ragged rows") from None
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError(f"{what} must be a non-empty 2-D array, got shape {X.shape}")
    return X


def threshold_from_losses(losses) -> tuple[float, float]:
    """Return ``(mean_loss, tau)`` with ``tau = 3 * mean_loss``."""
    mean_loss = float(np.mean(losses))
    return mean_loss, THRESHOLD_FACTOR * mean_loss


def label_scores(scores, tau: float) -> np.ndarray:
    """1 where ``score > tau``; a score equal to ``tau`` counts as normal."""
    return (np.asarray(scores, dtype=float) > tau).astype(int)


@dataclass(frozen=True, eq=False)
class ReconstructionDetector:
    sub_models: tuple[SvrModel, ...]
    kernel: object
    train_rows: np.ndarray
    tau: float
    train_mean_loss: float

    @property
    def n_features(self) -> int:
        return self.train_rows.shape[1]

    def predictions(self, X) -> np.ndarray:
        """Reconstructed rows, one column per sub-model."""
        X = self._check_width(X)
        K_rows = self.kernel.cross(X, self.train_rows)
        return np.column_stack([m.predict_rows(K_rows) for m in self.sub_models])

    def scores(self, X) -> np.ndarray:
        X = self._check_width(X)
        return ((X - self.predictions(X)) ** 2).sum(axis=1)

    def _check_width(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected rows of width {self.n_features}, got {X.shape[1]}")
        return X


def fit_detector(X_train, kernel, params: SvrParams = SvrParams()) -> ReconstructionDetector:
    """Fit one SVR per feature column, all sharing a single training Gram matrix."""
    X = training_matrix(X_train)
    K = kernel.gram(X)
    subs = tuple(
        fit_svr(K, X[:, k], params, kernel=kernel, train_rows=X) for k in range(X.shape[1])
    )
    preds = np.column_stack([m.predict_rows(K) for m in subs])
    in_sample = ((X - preds) ** 2).sum(axis=1)
    mean_loss, tau = threshold_from_losses(in_sample)
    return ReconstructionDetector(subs, kernel, X, tau, mean_loss)


def reconstruction_score(det: ReconstructionDetector, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    return float(det.scores(x[None, :])[0])


def classify(det: ReconstructionDetector, x) -> int:
    return int(label_scores([reconstruction_score(det, x)], det.tau)[0])


def nonzero_parameter_count(det: ReconstructionDetector) -> int:
    # alpha and alpha* are both counted for every support vector
    return 2 * sum(m.n_support for m in det.sub_models)


def total_parameter_count(det: ReconstructionDetector) -> int:
    return 2 * det.train_rows.shape[0] * det.n_features
