"""Experiment orchestration and report emission."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .cae import N_PARAMS as CAE_PARAMS
from .cae import CaeConfig, train_cae
from .data import ProcessedDataset, RawDataset, ToyConfig, generate_toy, load_csv, prepare
from .detectors import fit_detector, nonzero_parameter_count, total_parameter_count
from .kernel import QuantumKernel, parse_kernel_mode
from .metrics import threshold_metrics
from .qae import QaeConfig, train_qae
from .svr import RbfKernel, SvrParams

MODELS = ("qsvr", "csvr", "qae", "cae")

REPORT_HEADER = (
    "dataset",
    "model",
    "auc",
    "precision",
    "recall",
    "f1",
    "accuracy",
    "nonzero_params",
    "total_params",
    "tau",
    "wall_time_seconds",
)
_METRIC_FIELDS = ("auc", "precision", "recall", "f1", "accuracy", "tau")


class ExperimentError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: Optional[str] = None
    toy: Optional[ToyConfig] = None
    model: str = "qsvr"
    kernel_mode: str = "exact"
    seed: int = 0
    label_column: str = "label"
    svr_c: Optional[float] = None
    svr_eps: Optional[float] = None
    rbf_gamma: Optional[float] = None
    lr: Optional[float] = None
    epochs: Optional[int] = None

    def __post_init__(self):
        if (self.dataset is None) == (self.toy is None):
            raise ValueError("exactly one of dataset and toy must be given")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        parse_kernel_mode(self.kernel_mode)


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    model: str
    auc: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    accuracy: float
    nonzero_params: int
    total_params: int
    tau: float
    wall_time_seconds: float

    def without_timing(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self) if f.name != "wall_time_seconds")


def _stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ExperimentError:
        raise
    except (ValueError, OSError, ArithmeticError) as exc:
        raise ExperimentError(stage, str(exc)) from exc


def load_source(config: ExperimentConfig) -> RawDataset:
    if config.toy is not None:
        return _stage("generate", lambda: generate_toy(config.toy)[0])
    return _stage("load", load_csv, config.dataset, config.label_column)


def prepare_source(config: ExperimentConfig) -> ProcessedDataset:
    raw = load_source(config)
    return _stage("preprocess", prepare, raw, config.seed)


def _svr_params(config: ExperimentConfig) -> SvrParams:
    defaults = SvrParams()
    return SvrParams(
        C=defaults.C if config.svr_c is None else config.svr_c,
        epsilon=defaults.epsilon if config.svr_eps is None else config.svr_eps,
    )


def _fit_and_score(config: ExperimentConfig, data: ProcessedDataset):
    """Return ``(test_scores, tau, nonzero_params, total_params)``."""
    if config.model in ("qsvr", "csvr"):
        if config.model == "qsvr":
            kernel = QuantumKernel(mode=parse_kernel_mode(config.kernel_mode, config.seed))
        elif config.rbf_gamma is None:
            kernel = RbfKernel.scaled(data.train)
        else:
            kernel = RbfKernel(config.rbf_gamma)
        det = fit_detector(data.train, kernel, _svr_params(config))
        return det.scores(data.test), det.tau, nonzero_parameter_count(det), total_parameter_count(det)
    overrides = {k: v for k, v in (("learning_rate", config.lr), ("epochs", config.epochs)) if v is not None}
    if config.model == "qae":
        qcfg = replace(QaeConfig(seed=config.seed), **overrides)
        model = train_qae(data.train, qcfg)
        return model.scores(data.test), model.tau, int(np.count_nonzero(model.params)), qcfg.n_params
    model = train_cae(data.train, replace(CaeConfig(seed=config.seed), **overrides))
    return model.scores(data.test), model.tau, int(np.count_nonzero(model.params.flat)), CAE_PARAMS


def run_experiment(config: ExperimentConfig, data: Optional[ProcessedDataset] = None) -> ReportRow:
    """Full pipeline for one (dataset, model) pair.

    ``data`` may be passed to reuse an already prepared dataset across models.
    """
    start = time.perf_counter()
    if data is None:
        data = prepare_source(config)
    scores, tau, nonzero, total = _stage("fit", _fit_and_score, config, data)
    m = _stage("evaluate", threshold_metrics, scores, data.test_labels, tau)
    return ReportRow(
        dataset=data.name,
        model=config.model,
        auc=m.auc,
        precision=m.precision,
        recall=m.recall,
        f1=m.f1,
        accuracy=m.accuracy,
        nonzero_params=nonzero,
        total_params=total,
        tau=tau,
        wall_time_seconds=time.perf_counter() - start,
    )


def run_many(configs: Iterable[ExperimentConfig]) -> list[ReportRow]:
    """Run every config, preparing each distinct data source once; rows sorted by (dataset, model)."""
    cache: dict = {}
    rows = []
    for cfg in configs:
        key = (cfg.dataset, cfg.toy, cfg.seed, cfg.label_column)
        if key not in cache:
            cache[key] = prepare_source(cfg)
        rows.append(run_experiment(cfg, cache[key]))
    return sorted(rows, key=lambda r: (r.dataset, r.model))


def mean_auc(rows: Sequence[ReportRow]) -> dict[str, float]:
    """Mean AUC per model over all datasets it was run on (rows without AUC are skipped)."""
    per_model: dict[str, list[float]] = defaultdict(list)
    for row in rows:
        if row.auc is not None:
            per_model[row.model].append(row.auc)
    return {model: sum(v) / len(v) for model, v in sorted(per_model.items())}


def _fmt(value, decimals: int = 6) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return f"{value:.{decimals}f}"


def format_row(row: ReportRow) -> list[str]:
    out = [row.dataset, row.model]
    out += [_fmt(getattr(row, name)) for name in ("auc", "precision", "recall", "f1", "accuracy")]
    out += [str(row.nonzero_params), str(row.total_params), _fmt(row.tau), _fmt(row.wall_time_seconds, 3)]
    return out


def _json_value(name: str, value):
    if value is None:
        return None
    if name in _METRIC_FIELDS:
        return round(float(value), 6)
    if name == "wall_time_seconds":
        return round(float(value), 3)
    return value


def render_report(rows: Sequence[ReportRow], fmt: str = "csv") -> str:
    if not rows:
        raise ValueError("no report rows to write")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        writer.writerows(format_row(r) for r in rows)
        return buf.getvalue()
    if fmt == "json":
        payload = [{k: _json_value(k, v) for k, v in asdict(r).items()} for r in rows]
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError(f"format must be csv or json, got {fmt!r}")


def write_report(rows: Sequence[ReportRow], path, fmt: str = "csv") -> None:
    """CSV cells use ``nan`` for undefined metrics; JSON uses ``null``."""
    text = render_report(rows, fmt)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ExperimentError("report", f"cannot write {path}: {exc}") from exc


def read_report(path) -> list[ReportRow]:
    """Parse a CSV or JSON report written by :func:`write_report`."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        records = json.loads(text)
    else:
        records = list(csv.DictReader(text.splitlines()))
    rows = []
    for rec in records:
        values = {}
        for name in REPORT_HEADER:
            raw = rec[name]
            if name in ("dataset", "model"):
                values[name] = raw
            elif name in ("nonzero_params", "total_params"):
                values[name] = int(raw)
            elif raw is None or raw == "nan":
                values[name] = None
            else:
                values[name] = float(raw)
        rows.append(ReportRow(**values))
    return rows
