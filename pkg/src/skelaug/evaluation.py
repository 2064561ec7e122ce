"""Accuracy statistics, error-diversity analytics, and the experiment runner.

Reproduces the measurement protocol: per-method test accuracy over seeded
runs with Student-t 95% confidence intervals, pairwise Jaccard error overlap
between specialists, and the ensemble-size subset sweep computed from cached
member predictions (no retraining).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .augment import AugmentationSpec
from .core import LabeledDataset
from .ensemble import (
    hard_vote_batch,
    predict_ensemble,
    soft_vote_batch,
    train_bagging,
    train_generalist,
    train_specialist_ensemble,
)
from .model import ModelConfig, TrainConfig, predict, train
from .seeding import STREAM_RUN, derive_seed

__all__ = [
    "MeanCI",
    "SweepPoint",
    "EvalReport",
    "accuracy",
    "mean_ci",
    "error_indices",
    "jaccard_error_overlap",
    "jaccard_matrix",
    "jaccard_summary",
    "subset_sweep",
    "run_experiment",
    "METHOD_NAMES",
]

METHOD_NAMES = ("baseline", "generalist", "bagging", "specialist-ensemble")

# per-method seed stream tags inside one run
_SEED_TAGS = {"baseline": 11, "generalist": 12, "bagging": 13, "specialist-ensemble": 14}


def accuracy(predicted: Sequence[int], true: Sequence[int]) -> float:
    predicted = np.asarray(predicted)
    true = np.asarray(true)
    if predicted.shape != true.shape:
        raise ValueError("predicted and true labels must have equal length")
    if predicted.size == 0:
        raise ValueError("empty label arrays")
    return float((predicted == true).mean())


@dataclass
class MeanCI:
    """Mean with a Student-t confidence half-width (undefined when n < 2)."""

    mean: float
    half_width: float
    n: int
    confidence: float = 0.95
    defined: bool = True


def mean_ci(values: Sequence[float], confidence: float = 0.95) -> MeanCI:
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("mean_ci needs at least one value")
    mean = float(values.mean())
    if n < 2:
        return MeanCI(mean=mean, half_width=float("nan"), n=n, confidence=confidence, defined=False)
    quantile = float(stats.t.ppf(0.5 + confidence / 2.0, n - 1))
    half = quantile * float(values.std(ddof=1)) / math.sqrt(n)
    return MeanCI(mean=mean, half_width=half, n=n, confidence=confidence)


def error_indices(predicted: Sequence[int], true: Sequence[int]) -> set[int]:
    predicted = np.asarray(predicted)
    true = np.asarray(true)
    return set(np.flatnonzero(predicted != true).tolist())


def jaccard_error_overlap(errors_i: set, errors_j: set) -> float | None:
    """|i ∩ j| / |i ∪ j|; None (undefined) when both sets are empty."""
    union = errors_i | errors_j
    if not union:
        return None
    return len(errors_i & errors_j) / len(union)


def jaccard_matrix(error_sets: Sequence[set]) -> np.ndarray:
    """Symmetric pairwise overlap matrix; undefined entries are nan."""
    m = len(error_sets)
    out = np.full((m, m), np.nan)
    for i in range(m):
        for j in range(i, m):
            value = jaccard_error_overlap(error_sets[i], error_sets[j])
            if value is not None:
                out[i, j] = out[j, i] = value
    return out


def jaccard_summary(matrix: np.ndarray) -> dict[str, float] | None:
    """min/mean/max over defined off-diagonal pairs; None if no pair is defined."""
    m = matrix.shape[0]
    values = [matrix[i, j] for i in range(m) for j in range(i + 1, m) if not math.isnan(matrix[i, j])]
    if not values:
        return None
    return {"min": float(min(values)), "mean": float(np.mean(values)), "max": float(max(values))}


@dataclass
class SweepPoint:
    k: int
    mean: float
    half_width: float
    n_subsets: int
    defined: bool


def subset_sweep(
    member_labels: np.ndarray,
    member_probs: np.ndarray,
    true: np.ndarray,
    aggregation: str = "hard",
    max_members: int = 20,
    sample: int | None = None,
    seed: int = 0,
) -> list[SweepPoint]:
    """Accuracy over all size-k member subsets for k = 1..M, from cached predictions.

    Refuses M > max_members unless `sample` bounds the per-k subset count.
    """
    member_labels = np.asarray(member_labels)
    member_probs = np.asarray(member_probs)
    true = np.asarray(true)
    m = member_labels.shape[0]
    if m > max_members and sample is None:
        raise ValueError(
            f"M={m} exceeds the combinatorial guard ({max_members}); pass sample= to subsample"
        )
    rng = np.random.default_rng(seed)
    points = []
    for k in range(1, m + 1):
        total = math.comb(m, k)
        if sample is not None and total > sample:
            subsets = {tuple(sorted(rng.choice(m, size=k, replace=False))) for _ in range(sample)}
            subsets = sorted(subsets)
        else:
            subsets = list(itertools.combinations(range(m), k))
        accs = []
        for sub in subsets:
            idx = list(sub)
            if aggregation == "hard":
                voted = hard_vote_batch(member_labels[idx], member_probs[idx])
            else:
                voted = soft_vote_batch(member_probs[idx])
            accs.append(accuracy(voted, true))
        ci = mean_ci(accs)
        points.append(SweepPoint(k=k, mean=ci.mean, half_width=ci.half_width,
                                 n_subsets=len(subsets), defined=ci.defined))
    return points


# ---------------------------------------------------------------------------
# Experiment runner
# ---------------------------------------------------------------------------

@dataclass
class EvalReport:
    """Per-run accuracies plus diversity analytics for one experiment."""

    runs: int
    seeds: list[int]
    methods: dict[str, list[float]]
    specialists: dict[str, list[float]]
    jaccard: list[dict]          # per run: {"tags", "matrix", "summary"}
    subset_curves: list[list[SweepPoint]]
    config_hash: str | None = None
    # per-run prediction caches (ndarrays); not serialized into the report JSON
    prediction_cache: list[dict] = field(default_factory=list, repr=False)

    def method_summary(self) -> dict[str, MeanCI]:
        out = {name: mean_ci(vals) for name, vals in self.methods.items()}
        out.update({f"specialist:{tag}": mean_ci(vals) for tag, vals in self.specialists.items()})
        return out

    def to_dict(self) -> dict:
        def _pt(p: SweepPoint) -> dict:
            return {
                "k": p.k,
                "mean": p.mean,
                "half_width": None if not p.defined else p.half_width,
                "n_subsets": p.n_subsets,
            }

        def _jac(entry: dict) -> dict:
            matrix = [
                [None if math.isnan(v) else v for v in row] for row in entry["matrix"]
            ]
            return {"tags": entry["tags"], "matrix": matrix, "summary": entry["summary"]}

        summary = {
            name: {
                "mean": ci.mean,
                "half_width": None if not ci.defined else ci.half_width,
                "n": ci.n,
                "confidence": ci.confidence,
                "interval": "student-t",
            }
            for name, ci in self.method_summary().items()
        }
        return {
            "runs": self.runs,
            "seeds": self.seeds,
            "config_hash": self.config_hash,
            "methods": self.methods,
            "specialists": self.specialists,
            "summary": summary,
            "jaccard": [_jac(e) for e in self.jaccard],
            "subset_curves": [[_pt(p) for p in curve] for curve in self.subset_curves],
        }


def run_experiment(
    dataset: LabeledDataset,
    splits: Mapping[str, Sequence[int]],
    methods: Sequence[str],
    aug_specs: Sequence[AugmentationSpec],
    model_config: ModelConfig,
    train_config: TrainConfig,
    runs: int = 5,
    seeds: Sequence[int] | None = None,
    mode: str = "append",
    aggregation: str = "hard",
    jobs: int | None = None,
    config_hash: str | None = None,
) -> EvalReport:
    """Train each requested method over seeded runs and evaluate on the test split.

    The specialist-ensemble run also records per-member (specialist) test
    accuracies, the pairwise Jaccard error-overlap matrix, and the subset-sweep
    curve, all from cached member predictions.
    """
    for name in methods:
        if name not in METHOD_NAMES:
            raise ValueError(f"unknown method {name!r}; expected one of {METHOD_NAMES}")
    test_idx = [int(i) for i in splits.get("test", [])]
    if not test_idx:
        raise ValueError("experiment needs a non-empty test split")
    if seeds is not None and len(seeds) != runs:
        raise ValueError("seeds list length must equal runs")
    test = dataset.subset(test_idx)
    y_test = test.labels
    method_acc: dict[str, list[float]] = {name: [] for name in methods}
    specialist_acc: dict[str, list[float]] = {}
    jaccard_entries: list[dict] = []
    curves: list[list[SweepPoint]] = []
    caches: list[dict] = []
    for r in range(runs):
        run_seed = int(seeds[r]) if seeds is not None else derive_seed(train_config.seed, STREAM_RUN, r)
        for name in methods:
            cfg = TrainConfig(
                learning_rate=train_config.learning_rate,
                batch_size=train_config.batch_size,
                max_epochs=train_config.max_epochs,
                patience=train_config.patience,
                seed=derive_seed(run_seed, _SEED_TAGS[name]),
            )
            if name == "baseline":
                sp = train(dataset, splits, model_config, cfg, augmentation="baseline")
                labels, _ = predict(sp, test)
            elif name == "generalist":
                sp = train_generalist(dataset, splits, aug_specs, model_config, cfg)
                labels, _ = predict(sp, test)
            elif name == "bagging":
                ens = train_bagging(dataset, splits, len(aug_specs), model_config, cfg, aggregation)
                labels, _, _ = predict_ensemble(ens, test)
            else:  # specialist-ensemble
                ens = train_specialist_ensemble(
                    dataset, splits, aug_specs, model_config, cfg,
                    mode=mode, aggregation=aggregation, jobs=jobs,
                )
                labels, member_labels, member_probs = predict_ensemble(ens, test)
                tags = [m.augmentation_tag for m in ens.members]
                for tag, preds in zip(tags, member_labels):
                    specialist_acc.setdefault(tag, []).append(accuracy(preds, y_test))
                error_sets = [error_indices(preds, y_test) for preds in member_labels]
                matrix = jaccard_matrix(error_sets)
                jaccard_entries.append(
                    {"tags": tags, "matrix": matrix.tolist(), "summary": jaccard_summary(matrix)}
                )
                curves.append(subset_sweep(member_labels, member_probs, y_test, aggregation))
                caches.append(
                    {
                        "member_labels": member_labels,
                        "member_probs": member_probs,
                        "true_labels": np.asarray(y_test),
                        "tags": tags,
                    }
                )
            method_acc[name].append(accuracy(labels, y_test))
    return EvalReport(
        runs=runs,
        seeds=[int(seeds[r]) if seeds is not None else derive_seed(train_config.seed, STREAM_RUN, r) for r in range(runs)],
        methods=method_acc,
        specialists=specialist_acc,
        jaccard=jaccard_entries,
        subset_curves=curves,
        config_hash=config_hash,
        prediction_cache=caches,
    )
