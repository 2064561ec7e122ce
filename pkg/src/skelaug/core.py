"""Canonical data model for 3D landmark sequences, skeleton topology, and splits.

Sequences are stored as (T, J, 3) float64 arrays plus a per-frame boolean mask
(True = real frame, False = zero padding). All operations here are pure: they
return new values and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "LandmarkSequence",
    "SkeletonTopology",
    "LabeledDataset",
    "SplitSpec",
    "normalize_length",
    "center_sequence",
    "make_splits",
]


@dataclass
class LandmarkSequence:
    """A T x J x 3 joint-coordinate tensor with a padding mask.

    Attributes
    ----------
    frames : np.ndarray
        Shape (T, J, 3), float64, finite.
    frame_mask : np.ndarray
        Shape (T,), bool. True marks a real frame; padded frames are all-zero.
    """

    frames: np.ndarray
    frame_mask: np.ndarray | None = None

    def __post_init__(self) -> None:
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 3 or frames.shape[2] != 3:
            raise ValueError(f"frames must have shape (T, J, 3), got {frames.shape}")
        if frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ValueError("sequence needs T >= 1 and J >= 1")
        if not np.isfinite(frames).all():
            raise ValueError("frames contain non-finite values")
        if self.frame_mask is None:
            mask = np.ones(frames.shape[0], dtype=bool)
        else:
            mask = np.asarray(self.frame_mask, dtype=bool)
        if mask.shape != (frames.shape[0],):
            raise ValueError(
                f"frame_mask must have length {frames.shape[0]}, got shape {mask.shape}"
            )
        if np.any(frames[~mask] != 0.0):
            raise ValueError("padded frames must be all-zero")
        self.frames = frames
        self.frame_mask = mask

    @property
    def T(self) -> int:
        return self.frames.shape[0]

    @property
    def J(self) -> int:
        return self.frames.shape[1]

    @property
    def n_real(self) -> int:
        return int(self.frame_mask.sum())

    @property
    def real_indices(self) -> np.ndarray:
        return np.flatnonzero(self.frame_mask)

    def with_frames(self, frames: np.ndarray) -> "LandmarkSequence":
        """New sequence with replaced coordinates and the same mask."""
        return LandmarkSequence(frames, self.frame_mask.copy())

    def copy(self) -> "LandmarkSequence":
        return LandmarkSequence(self.frames.copy(), self.frame_mask.copy())


@dataclass
class SkeletonTopology:
    """Named joint roles the geometry-aware transforms consult.

    hand_joints / wrist_index are keyed by hand name (e.g. "left", "right").
    finger_chains are ordered 4-tuples [base f0, MCP f1, PIP f2, DIP/tip f3].
    torso_reference is a joint index, an index pair (midpoint), or None
    (fall back to the per-frame skeleton centroid).
    """

    joint_count: int
    hand_joints: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    wrist_index: Mapping[str, int] = field(default_factory=dict)
    finger_chains: tuple[tuple[int, int, int, int], ...] = ()
    torso_reference: int | tuple[int, int] | None = None
    joint_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.joint_count < 1:
            raise ValueError("joint_count must be >= 1")
        self.hand_joints = {k: tuple(int(i) for i in v) for k, v in self.hand_joints.items()}
        self.wrist_index = {k: int(v) for k, v in self.wrist_index.items()}
        self.finger_chains = tuple(tuple(int(i) for i in c) for c in self.finger_chains)
        for hand, joints in self.hand_joints.items():
            if any(j < 0 or j >= self.joint_count for j in joints):
                raise ValueError(f"hand {hand!r} has joint index out of range")
        if set(self.wrist_index) != set(self.hand_joints):
            raise ValueError("wrist_index keys must match hand_joints keys")
        for hand, w in self.wrist_index.items():
            if w not in self.hand_joints[hand]:
                raise ValueError(f"wrist {w} of hand {hand!r} is not in its hand set")
        for chain in self.finger_chains:
            if len(chain) != 4 or len(set(chain)) != 4:
                raise ValueError(f"finger chain {chain} must have 4 distinct indices")
            if self.hand_of_chain(chain) is None:
                raise ValueError(f"finger chain {chain} is not contained in any hand")
        if isinstance(self.torso_reference, (list, tuple)):
            self.torso_reference = tuple(int(i) for i in self.torso_reference)
            if len(self.torso_reference) != 2:
                raise ValueError("torso_reference pair must have exactly 2 indices")
            bad = [i for i in self.torso_reference if i < 0 or i >= self.joint_count]
        elif self.torso_reference is not None:
            self.torso_reference = int(self.torso_reference)
            bad = [self.torso_reference] if not 0 <= self.torso_reference < self.joint_count else []
        else:
            bad = []
        if bad:
            raise ValueError(f"torso_reference index out of range: {bad}")
        if self.joint_names is not None:
            self.joint_names = tuple(self.joint_names)
            if len(self.joint_names) != self.joint_count:
                raise ValueError("joint_names length must equal joint_count")

    @property
    def has_hands(self) -> bool:
        return bool(self.hand_joints)

    def hand_of_chain(self, chain: Sequence[int]) -> str | None:
        for hand, joints in self.hand_joints.items():
            if set(chain) <= set(joints):
                return hand
        return None

    def torso_point(self, frame: np.ndarray, mask_joints: np.ndarray | None = None) -> np.ndarray:
        """Torso reference position for one (J, 3) frame."""
        ref = self.torso_reference
        if ref is None:
            return frame.mean(axis=0)
        if isinstance(ref, tuple):
            return 0.5 * (frame[ref[0]] + frame[ref[1]])
        return frame[ref]


@dataclass
class LabeledDataset:
    """Sequences with class labels, subject ids, and a shared topology."""

    sequences: list[LandmarkSequence]
    labels: np.ndarray
    class_names: list[str]
    subject_ids: list
    topology: SkeletonTopology

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if not (len(self.sequences) == len(self.labels) == len(self.subject_ids)):
            raise ValueError(
                "sequences, labels, subject_ids must have equal length "
                f"({len(self.sequences)}, {len(self.labels)}, {len(self.subject_ids)})"
            )
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise ValueError("labels must lie in [0, class_count)")
        for i, seq in enumerate(self.sequences):
            if seq.J != self.topology.joint_count:
                raise ValueError(
                    f"sequence {i} has J={seq.J}, topology expects {self.topology.joint_count}"
                )

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        idx = list(int(i) for i in indices)
        return LabeledDataset(
            sequences=[self.sequences[i] for i in idx],
            labels=self.labels[idx],
            class_names=list(self.class_names),
            subject_ids=[self.subject_ids[i] for i in idx],
            topology=self.topology,
        )


@dataclass
class SplitSpec:
    """Train/validation/test membership, by subject id or by sequence index."""

    mode: str  # "by-subject" | "by-index"
    train: Sequence = ()
    validation: Sequence = ()
    test: Sequence = ()

    def __post_init__(self) -> None:
        if self.mode not in ("by-subject", "by-index"):
            raise ValueError(f"unknown split mode {self.mode!r}")
        groups = [set(self.train), set(self.validation), set(self.test)]
        names = ["train", "validation", "test"]
        for a in range(3):
            for b in range(a + 1, 3):
                overlap = groups[a] & groups[b]
                if overlap:
                    raise ValueError(
                        f"{names[a]}/{names[b]} splits overlap: {sorted(overlap)}"
                    )


def normalize_length(seq: LandmarkSequence, target_t: int) -> LandmarkSequence:
    """Trim (center-crop) or zero-pad a sequence to exactly target_t frames."""
    if target_t < 1:
        raise ValueError("target_t must be >= 1")
    t = seq.T
    if t == target_t:
        return seq.copy()
    if t > target_t:
        start = (t - target_t) // 2
        stop = start + target_t
        return LandmarkSequence(seq.frames[start:stop].copy(), seq.frame_mask[start:stop].copy())
    pad = target_t - t
    frames = np.concatenate([seq.frames, np.zeros((pad, seq.J, 3))], axis=0)
    mask = np.concatenate([seq.frame_mask, np.zeros(pad, dtype=bool)])
    return LandmarkSequence(frames, mask)


def center_sequence(seq: LandmarkSequence, topology: SkeletonTopology | None = None) -> LandmarkSequence:
    """Subtract the mean over all non-padded frames and joints.

    Padded frames stay zero; relative joint geometry is untouched.
    """
    if topology is not None and topology.joint_count != seq.J:
        raise ValueError("topology joint_count does not match sequence")
    if seq.n_real == 0:
        raise ValueError("empty sequence: all frames are padded")
    mean = seq.frames[seq.frame_mask].reshape(-1, 3).mean(axis=0)
    frames = seq.frames.copy()
    frames[seq.frame_mask] -= mean
    return LandmarkSequence(frames, seq.frame_mask.copy())


def make_splits(dataset: LabeledDataset, spec: SplitSpec) -> dict[str, list[int]]:
    """Resolve a SplitSpec into {train, validation, test} index lists."""
    if spec.mode == "by-subject":
        present = set(dataset.subject_ids)
        wanted = set(spec.train) | set(spec.validation) | set(spec.test)
        unknown = wanted - present
        if unknown:
            raise ValueError(f"unknown subject ids in split spec: {sorted(map(str, unknown))}")
        member = {}
        for name, subjects in (("train", spec.train), ("validation", spec.validation), ("test", spec.test)):
            for s in subjects:
                member[s] = name
        splits: dict[str, list[int]] = {"train": [], "validation": [], "test": []}
        for i, subject in enumerate(dataset.subject_ids):
            name = member.get(subject)
            if name is not None:
                splits[name].append(i)
        return splits
    # by-index
    n = len(dataset)
    splits = {}
    for name, indices in (("train", spec.train), ("validation", spec.validation), ("test", spec.test)):
        idx = [int(i) for i in indices]
        bad = [i for i in idx if i < 0 or i >= n]
        if bad:
            raise ValueError(f"{name} indices out of range: {bad}")
        splits[name] = idx
    return splits
