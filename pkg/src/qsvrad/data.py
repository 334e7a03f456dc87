"""Dataset ingestion, PCA, min-max rescaling, the 30/25/25 split and toy data."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

N_TRAIN = 30
N_TEST_NORMAL = 25
N_TEST_ANOMALOUS = 25
N_COMPONENTS = 5


class DataError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RawDataset:
    rows: np.ndarray
    labels: np.ndarray
    name: str = "data"
    columns: tuple[str, ...] = ()

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        labels = np.asarray(self.labels, dtype=int).reshape(-1)
        if rows.shape[0] != labels.size:
            raise DataError(f"{rows.shape[0]} rows but {labels.size} labels")
        if not np.isin(labels, (0, 1)).all():
            raise DataError("labels must be 0 (normal) or 1 (anomalous)")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.labels.size

    @property
    def n_normal(self) -> int:
        return int((self.labels == 0).sum())

    @property
    def n_anomalous(self) -> int:
        return int((self.labels == 1).sum())


@dataclass(frozen=True, eq=False)
class PcaRecord:
    mean: np.ndarray
    components: np.ndarray  # shape (k, d), rows orthonormal
    explained_variance: np.ndarray

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) @ self.components.T


@dataclass(frozen=True, eq=False)
class MinMaxScaler:
    minimum: np.ndarray
    maximum: np.ndarray

    @classmethod
    def fit(cls, X) -> MinMaxScaler:
        X = np.asarray(X, dtype=float)
        return cls(X.min(axis=0), X.max(axis=0))

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        span = self.maximum - self.minimum
        degenerate = span <= 0
        safe = np.where(degenerate, 1.0, span)
        out = 2.0 * (X - self.minimum) / safe - 1.0
        # constant training column: map everything to 0
        out[:, degenerate] = 0.0
        return out


@dataclass(frozen=True, eq=False)
class ProcessedDataset:
    name: str
    train: np.ndarray
    test: np.ndarray
    test_labels: np.ndarray
    scaler: MinMaxScaler
    pca: PcaRecord | None = None
    train_index: np.ndarray = field(default=None, repr=False)
    test_index: np.ndarray = field(default=None, repr=False)


@dataclass(frozen=True)
class ToyConfig:
    n_normal: int = N_TRAIN + N_TEST_NORMAL
    n_anomalous: int = N_TEST_ANOMALOUS
    dim: int = N_COMPONENTS
    offset_band: tuple[float, float] = (0.4, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.n_normal <= 0 or self.n_anomalous <= 0:
            raise DataError("toy sample counts must be positive")
        if self.dim < 2:
            raise DataError(f"toy dimension must be >= 2, got {self.dim}")
        lo, hi = self.offset_band
        if not 0 <= lo <= hi:
            raise DataError(f"bad offset band {self.offset_band}")


def load_csv(path, label_column: str = "label") -> RawDataset:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header {header}")
        label_at = header.index(label_column)
        feature_cols = [c for i, c in enumerate(header) if i != label_at]
        rows, labels = [], []
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(header):
                raise DataError(f"{path}: row {line_no} has {len(record)} cells, expected {len(header)}")
            values = []
            for i, cell in enumerate(record):
                if i == label_at:
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric value {cell!r} at row {line_no}, column {header[i]!r}"
                    ) from None
            raw_label = record[label_at].strip()
            try:
                label = float(raw_label)
            except ValueError:
                label = None
            if label not in (0.0, 1.0):
                raise DataError(f"{path}: label {raw_label!r} at row {line_no} is not 0 or 1")
            rows.append(values)
            labels.append(int(label))
    rows_arr = np.array(rows, dtype=float).reshape(len(rows), len(feature_cols))
    return RawDataset(rows_arr, np.array(labels, dtype=int), path.stem, tuple(feature_cols))


def write_csv(data: RawDataset, path, label_column: str = "label") -> None:
    columns = data.columns or tuple(f"x{i}" for i in range(data.rows.shape[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*columns, label_column])
        for row, label in zip(data.rows, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def pca_reduce(data: RawDataset, k: int = N_COMPONENTS) -> tuple[RawDataset, PcaRecord]:
    """Project mean-centered rows onto the top-``k`` principal directions."""
    n, d = data.rows.shape
    if d < k:
        raise DataError(f"PCA needs at least {k} feature columns, got {d}")
    if n < k + 1:
        raise DataError(f"PCA needs at least {k + 1} rows, got {n}")
    mean = data.rows.mean(axis=0)
    _, s, vt = np.linalg.svd(data.rows - mean, full_matrices=False)
    components = vt[:k]
    # deterministic orientation: largest-magnitude loading is positive
    flip = np.sign(components[np.arange(k), np.abs(components).argmax(axis=1)])
    components = components * flip[:, None]
    record = PcaRecord(mean, components, s[:k] ** 2 / (n - 1))
    reduced = RawDataset(record.transform(data.rows), data.labels, data.name, tuple(f"pc{i}" for i in range(k)))
    return reduced, record


def rescale_minmax(train, test) -> tuple[np.ndarray, np.ndarray, MinMaxScaler]:
    train = np.atleast_2d(np.asarray(train, dtype=float))
    test = np.atleast_2d(np.asarray(test, dtype=float))
    if train.shape[1] != test.shape[1]:
        raise DataError(f"train width {train.shape[1]} != test width {test.shape[1]}")
    scaler = MinMaxScaler.fit(train)
    return scaler.transform(train), scaler.transform(test), scaler


def sample_split(data: RawDataset, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(train_index, test_index)``; test holds 25 normal then 25 anomalous rows."""
    normal = np.flatnonzero(data.labels == 0)
    anomalous = np.flatnonzero(data.labels == 1)
    need_normal = N_TRAIN + N_TEST_NORMAL
    if normal.size < need_normal or anomalous.size < N_TEST_ANOMALOUS:
        raise DataError(
            f"split needs >= {need_normal} normal and >= {N_TEST_ANOMALOUS} anomalous rows; "
            f"have {normal.size} normal, {anomalous.size} anomalous"
        )
    rng = np.random.default_rng([seed, 1])
    picked_normal = rng.choice(normal, size=need_normal, replace=False)
    picked_anomalous = rng.choice(anomalous, size=N_TEST_ANOMALOUS, replace=False)
    return picked_normal[:N_TRAIN], np.concatenate([picked_normal[N_TRAIN:], picked_anomalous])


def prepare(data: RawDataset, seed: int, reduce: bool = True) -> ProcessedDataset:
    """PCA on the full matrix, then split, then min-max fitted on train only."""
    pca = None
    if reduce:
        data, pca = pca_reduce(data)
    train_idx, test_idx = sample_split(data, seed)
    train, test, scaler = rescale_minmax(data.rows[train_idx], data.rows[test_idx])
    return ProcessedDataset(data.name, train, test, data.labels[test_idx], scaler, pca, train_idx, test_idx)


def generate_toy(config: ToyConfig = ToyConfig()) -> tuple[RawDataset, np.ndarray]:
    """Separable toy data around a random hyperplane through the origin.

    Returns the dataset and the unit normal ``w`` of the plane.
    """
    rng = np.random.default_rng([config.seed, 2])
    w = rng.normal(size=config.dim)
    w /= np.linalg.norm(w)

    def on_plane(count):
        u = rng.uniform(-1.0, 1.0, size=(count, config.dim))
        return u - np.outer(u @ w, w)

    normal = on_plane(config.n_normal)
    lo, hi = config.offset_band
    delta = rng.uniform(lo, hi, size=config.n_anomalous) * rng.choice([-1.0, 1.0], size=config.n_anomalous)
    anomalous = on_plane(config.n_anomalous) + np.outer(delta, w)
    rows = np.vstack([normal, anomalous])
    labels = np.r_[np.zeros(config.n_normal, dtype=int), np.ones(config.n_anomalous, dtype=int)]
    columns = tuple(f"x{i}" for i in range(config.dim))
    return RawDataset(rows, labels, "toy", columns), w
