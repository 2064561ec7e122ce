"""Specialist-ensemble construction, vote aggregation, and the generalist and
bagging baselines.

A specialist ensemble holds one classifier per augmentation, each trained on
the training split expanded (append mode by default) by exactly one transform.
Prediction feeds the input to every member and aggregates by hard voting
(plurality; ties broken by summed probability, then lowest class index) or
soft voting (argmax of averaged probabilities).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .augment import AugmentationSpec, apply_augmentation, build_specialist_dataset
from .core import LabeledDataset, LandmarkSequence
from .model import (
    ModelConfig,
    TrainConfig,
    TrainedSpecialist,
    build_network,
    forward,
    load_specialist,
    predict,
    save_specialist,
    sequence_features,
    train,
)
from .seeding import (
    STREAM_AUGMENT,
    STREAM_BOOTSTRAP,
    STREAM_GENERALIST,
    STREAM_MEMBER,
    STREAM_TRAIN,
    derive_seed,
    make_rng,
)

__all__ = [
    "EnsembleModel",
    "TIE_POLICY",
    "hard_vote",
    "soft_vote",
    "hard_vote_batch",
    "soft_vote_batch",
    "train_specialist_ensemble",
    "train_generalist",
    "train_bagging",
    "predict_ensemble",
    "save_ensemble",
    "load_ensemble",
]

TIE_POLICY = "summed-probability-then-lowest-index"
MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1


@dataclass
class EnsembleModel:
    members: list[TrainedSpecialist]
    aggregation: str = "hard"  # "hard" | "soft"
    tie_policy: str = TIE_POLICY
    master_seed: int | None = None

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("ensemble needs at least one member")
        if self.aggregation not in ("hard", "soft"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")
        first = self.members[0].model_config
        for m in self.members[1:]:
            if m.model_config.class_count != first.class_count or m.model_config.input_dim != first.input_dim:
                raise ValueError("ensemble members must share class_count and input shape")

    @property
    def size(self) -> int:
        return len(self.members)


# ---------------------------------------------------------------------------
# Vote aggregation
# ---------------------------------------------------------------------------

def hard_vote_batch(member_labels: np.ndarray, member_probs: np.ndarray) -> np.ndarray:
    """Plurality vote per sample over (M, B) labels with (M, B, C) probabilities.

    Score per class = vote count, then summed probability (scaled below one
    vote) breaks count ties, and argmax's lowest-index rule breaks exact ties.
    """
    member_labels = np.asarray(member_labels)
    member_probs = np.asarray(member_probs)
    m, b = member_labels.shape
    c = member_probs.shape[-1]
    counts = np.zeros((b, c))
    for i in range(m):
        counts[np.arange(b), member_labels[i]] += 1.0
    prob_sums = member_probs.sum(axis=0)  # (B, C)
    score = counts + prob_sums / (m + 1.0)  # tie-break term stays below one vote
    return score.argmax(axis=1)


def soft_vote_batch(member_probs: np.ndarray) -> np.ndarray:
    """Argmax of the arithmetic mean probability vector (lowest index on ties)."""
    mean = np.asarray(member_probs).mean(axis=0)
    mean = mean / mean.sum(axis=-1, keepdims=True)
    return mean.argmax(axis=1)


def hard_vote(member_labels: Sequence[int], member_probs: np.ndarray) -> int:
    """Single-sample hard vote; see hard_vote_batch for the tie policy."""
    labels = np.asarray(member_labels).reshape(-1, 1)
    probs = np.asarray(member_probs)[:, None, :]
    return int(hard_vote_batch(labels, probs)[0])


def soft_vote(member_probs: np.ndarray) -> int:
    return int(soft_vote_batch(np.asarray(member_probs)[:, None, :])[0])


# ---------------------------------------------------------------------------
# Training protocols
# ---------------------------------------------------------------------------

def _member_dataset(
    dataset: LabeledDataset,
    splits: Mapping[str, Sequence[int]],
    train_sequences: LabeledDataset,
) -> tuple[LabeledDataset, dict[str, list[int]]]:
    """Member-local dataset: (possibly expanded) train subset plus original validation."""
    val_idx = [int(i) for i in splits.get("validation", [])]
    val = dataset.subset(val_idx) if val_idx else None
    sequences = list(train_sequences.sequences)
    labels = list(train_sequences.labels)
    subjects = list(train_sequences.subject_ids)
    n_train = len(sequences)
    if val is not None:
        sequences += list(val.sequences)
        labels += list(val.labels)
        subjects += list(val.subject_ids)
    member_ds = LabeledDataset(
        sequences=sequences,
        labels=np.asarray(labels, dtype=np.int64),
        class_names=list(dataset.class_names),
        subject_ids=subjects,
        topology=dataset.topology,
    )
    member_splits = {
        "train": list(range(n_train)),
        "validation": list(range(n_train, len(sequences))),
    }
    return member_ds, member_splits


def _train_member(args) -> TrainedSpecialist:
    """Top-level worker so member training can run in a process pool."""
    (dataset, splits, spec, model_config, train_config, member_seed, mode) = args
    train_subset = dataset.subset(splits["train"])
    augmented = build_specialist_dataset(
        train_subset, spec, seed=derive_seed(member_seed, STREAM_AUGMENT), mode=mode
    )
    member_ds, member_splits = _member_dataset(dataset, splits, augmented)
    cfg = replace(train_config, seed=derive_seed(member_seed, STREAM_TRAIN))
    return train(member_ds, member_splits, model_config, cfg, augmentation=spec)


def train_specialist_ensemble(
    dataset: LabeledDataset,
    splits: Mapping[str, Sequence[int]],
    aug_specs: Sequence[AugmentationSpec],
    model_config: ModelConfig,
    train_config: TrainConfig,
    mode: str = "append",
    aggregation: str = "hard",
    jobs: int | None = None,
) -> EnsembleModel:
    """Train one specialist per augmentation spec; members are independent.

    Member i derives its augmentation and training seeds from
    (train_config.seed, i), so results do not depend on jobs or ordering.
    """
    if not aug_specs:
        raise ValueError("need at least one augmentation spec")
    tasks = [
        (dataset, splits, spec, model_config, train_config,
         derive_seed(train_config.seed, STREAM_MEMBER, i), mode)
        for i, spec in enumerate(aug_specs)
    ]
    if jobs is None:
        jobs = 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            members = list(pool.map(_train_member, tasks))
    else:
        members = [_train_member(t) for t in tasks]
    return EnsembleModel(members=members, aggregation=aggregation, master_seed=train_config.seed)


def train_generalist(
    dataset: LabeledDataset,
    splits: Mapping[str, Sequence[int]],
    aug_specs: Sequence[AugmentationSpec],
    model_config: ModelConfig,
    train_config: TrainConfig,
) -> TrainedSpecialist:
    """One model; each training sequence gets a random augmentation per batch.

    The augmentation choice and its parameters use a fresh sub-seed per
    (epoch, sequence index); evaluation uses untransformed inputs.
    """
    if not aug_specs:
        raise ValueError("generalist requires at least one augmentation spec")
    topo = dataset.topology
    t = dataset.sequences[0].T

    def batch_transform(epoch: int, indices: list[int]) -> tuple[np.ndarray, np.ndarray]:
        transformed = []
        for idx in indices:
            seed = derive_seed(train_config.seed, STREAM_GENERALIST, epoch, idx)
            pick = int(make_rng(seed, 0).integers(0, len(aug_specs)))
            transformed.append(apply_augmentation(dataset.sequences[idx], topo, aug_specs[pick], seed))
        return sequence_features(transformed)

    return train(
        dataset, splits, model_config, train_config,
        augmentation="generalist", batch_transform=batch_transform,
    )


def bootstrap_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    """n draws with replacement from range(n)."""
    return rng.integers(0, n, size=n)


def train_bagging(
    dataset: LabeledDataset,
    splits: Mapping[str, Sequence[int]],
    m: int,
    model_config: ModelConfig,
    train_config: TrainConfig,
    aggregation: str = "hard",
) -> EnsembleModel:
    """Bootstrap-resampled ensemble: member i trains on n-with-replacement draws."""
    if m < 1:
        raise ValueError("ensemble size must be >= 1")
    train_idx = [int(i) for i in splits["train"]]
    if not train_idx:
        raise ValueError("empty train split")
    members = []
    for i in range(m):
        member_seed = derive_seed(train_config.seed, STREAM_MEMBER, i)
        rng = make_rng(member_seed, STREAM_BOOTSTRAP)
        picks = bootstrap_indices(rng, len(train_idx))
        resampled = dataset.subset([train_idx[p] for p in picks])
        member_ds, member_splits = _member_dataset(dataset, splits, resampled)
        cfg = replace(train_config, seed=derive_seed(member_seed, STREAM_TRAIN))
        members.append(
            train(member_ds, member_splits, model_config, cfg, augmentation=f"bagging.{i}")
        )
    return EnsembleModel(members=members, aggregation=aggregation, master_seed=train_config.seed)


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------

def predict_ensemble(
    ensemble: EnsembleModel,
    sequences: Sequence[LandmarkSequence] | LabeledDataset,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Aggregate member predictions; also expose the per-member outputs.

    Returns (labels (B,), member_labels (M, B), member_probs (M, B, C)).
    """
    if isinstance(sequences, LabeledDataset):
        sequences = sequences.sequences
    x, mask = sequence_features(sequences)
    member_labels = []
    member_probs = []
    for member in ensemble.members:
        net = build_network(member.model_config)
        probs = forward(net, member.params, x, mask)
        member_labels.append(probs.argmax(axis=1))
        member_probs.append(probs)
    member_labels = np.stack(member_labels)
    member_probs = np.stack(member_probs)
    if ensemble.aggregation == "hard":
        labels = hard_vote_batch(member_labels, member_probs)
    else:
        labels = soft_vote_batch(member_probs)
    return labels, member_labels, member_probs


# ---------------------------------------------------------------------------
# Manifest persistence
# ---------------------------------------------------------------------------

def save_ensemble(ensemble: EnsembleModel, directory: str | Path) -> Path:
    """Write member weight files plus a manifest sufficient to reload them."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, member in enumerate(ensemble.members):
        filename = f"member_{i:02d}.weights"
        save_specialist(member, directory / filename)
        entries.append({"file": filename, "augmentation": member.augmentation_tag})
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "aggregation": ensemble.aggregation,
        "tie_policy": ensemble.tie_policy,
        "master_seed": ensemble.master_seed,
        "members": entries,
    }
    path = directory / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def load_ensemble(directory: str | Path) -> EnsembleModel:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"no ensemble manifest at {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("manifest_version") != MANIFEST_VERSION:
        raise ValueError(
            f"unsupported manifest version {manifest.get('manifest_version')}, "
            f"this build reads version {MANIFEST_VERSION}"
        )
    members = [load_specialist(directory / entry["file"]) for entry in manifest["members"]]
    return EnsembleModel(
        members=members,
        aggregation=manifest["aggregation"],
        tie_policy=manifest.get("tie_policy", TIE_POLICY),
        master_seed=manifest.get("master_seed"),
    )
