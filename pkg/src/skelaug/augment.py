"""Geometry-aware transformations for skeletal landmark sequences.

Eight families: camera-depth scaling, time-varying depth, horizontal/vertical
shifting, hand-size scaling, viewpoint rotation, finger folding, elbow-driven
hand displacement, and time warping. Every operation is a pure function of
(sequence, topology, parameters, seed), returns a sequence of identical shape,
and passes padded frames through untouched.

Rotation conventions (right-handed): yaw is rotation about +y, pitch about +x,
roll about +z. See FORMAT.md.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .core import LabeledDataset, LandmarkSequence, SkeletonTopology
from .seeding import STREAM_AUGMENT, make_rng

__all__ = [
    "AugmentationSpec",
    "PRESETS",
    "cam_depth",
    "temp_depth",
    "hv_shift",
    "hand_size",
    "view_rot",
    "finger_fold",
    "elbow_disp",
    "time_warp",
    "resample_timeline",
    "linear_schedule",
    "sine_schedule",
    "hv_sine_offsets",
    "rotation_matrix",
    "apply_augmentation",
    "build_specialist_dataset",
    "default_specialist_presets",
    "get_preset",
]

logger = logging.getLogger(__name__)

KINDS = (
    "camdepth",
    "tempdepth",
    "hvshift",
    "handsize",
    "viewrot",
    "fingerfold",
    "elbowdisp",
    "timewarp",
)

AXIS_VECTORS = {
    "yaw": np.array([0.0, 1.0, 0.0]),
    "pitch": np.array([1.0, 0.0, 0.0]),
    "roll": np.array([0.0, 0.0, 1.0]),
}

DEFAULT_MAX_FOLD_ANGLES = (90.0, 100.0, 70.0)  # MCP, PIP, DIP degrees; invented defaults


def _check_range(name: str, rng: Sequence[float], positive: bool = False) -> tuple[float, float]:
    lo, hi = float(rng[0]), float(rng[1])
    if lo > hi:
        raise ValueError(f"{name} range must be ordered (low <= high), got ({lo}, {hi})")
    if positive and lo <= 0:
        raise ValueError(f"{name} range must be strictly positive, got ({lo}, {hi})")
    return lo, hi


@dataclass(frozen=True)
class AugmentationSpec:
    """A tagged transformation kind plus its parameter ranges.

    Parameters are drawn once per apply_augmentation call from the seeded
    generator; degenerate ranges (low == high) make the draw deterministic.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    name: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown augmentation kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "params", dict(self.params))
        self.validate()

    def validate(self) -> None:
        p = self.params
        kind = self.kind
        if kind == "camdepth":
            _check_range("s", p["s_range"], positive=True)
        elif kind == "tempdepth":
            schedule = p.get("schedule", "linear-ramp")
            if schedule == "linear-ramp":
                _check_range("s_start", p["s_start_range"], positive=True)
                _check_range("s_end", p["s_end_range"], positive=True)
            elif schedule == "sine-cycle":
                _check_range("s", p["s_range"], positive=True)
            else:
                raise ValueError(f"unknown tempdepth schedule {schedule!r}")
        elif kind == "hvshift":
            mode = p.get("mode", "constant")
            if mode in ("constant", "linear"):
                _check_range("dx", p["dx_range"])
                _check_range("dy", p["dy_range"])
            elif mode == "sine":
                for key in ("amp_x", "amp_y", "frequency"):
                    float(p[key])
            else:
                raise ValueError(f"unknown hvshift mode {mode!r}")
        elif kind == "handsize":
            _check_range("alpha", p["alpha_range"], positive=True)
        elif kind == "viewrot":
            axis = p.get("axis", "yaw")
            if isinstance(axis, str):
                if axis not in ("yaw", "pitch", "roll", "random-unit"):
                    raise ValueError(f"unknown rotation axis {axis!r}")
            else:
                v = np.asarray(axis, dtype=float)
                if v.shape != (3,) or np.linalg.norm(v) == 0:
                    raise ValueError("axis vector must be a nonzero 3-vector")
            lo, hi = _check_range("angle", p["angle_range"])
            if lo < -180.0 or hi > 180.0:
                raise ValueError("angle_range must lie within [-180, 180] degrees")
        elif kind == "fingerfold":
            prog = [float(x) for x in p["progression"]]
            if not prog:
                raise ValueError("folding progression must be non-empty")
            if any(x < 0.0 or x > 1.0 for x in prog):
                raise ValueError("fold fractions must lie in [0, 1]")
            angles = p.get("max_angles", DEFAULT_MAX_FOLD_ANGLES)
            if len(angles) != 3:
                raise ValueError("max_angles must be (MCP, PIP, DIP)")
        elif kind == "elbowdisp":
            if p.get("direction", "inward") not in ("inward", "outward"):
                raise ValueError("elbowdisp direction must be 'inward' or 'outward'")
            if float(p["intensity"]) < 0:
                raise ValueError("elbowdisp intensity must be >= 0")
            if p.get("ramp", "linear") not in ("constant", "linear"):
                raise ValueError("elbowdisp ramp must be 'constant' or 'linear'")
        elif kind == "timewarp":
            if float(p["sigma"]) <= 0:
                raise ValueError("timewarp sigma must be > 0")
            if int(p["knots"]) < 1:
                raise ValueError("timewarp knots must be >= 1")

    @property
    def tag(self) -> str:
        return self.name if self.name is not None else self.kind


# ---------------------------------------------------------------------------
# Schedules and rotation helpers
# ---------------------------------------------------------------------------

def linear_schedule(start: float, end: float, t: int) -> np.ndarray:
    """Linear ramp from start to end over t frames."""
    if t == 1:
        return np.array([start], dtype=float)
    return np.linspace(start, end, t)


def sine_schedule(low: float, high: float, t: int) -> np.ndarray:
    """Half-sine bump: starts and ends at the range midpoint, peaks at high at T/2."""
    mid = 0.5 * (low + high)
    amp = 0.5 * (high - low)
    if t == 1:
        return np.array([mid], dtype=float)
    phase = np.pi * np.arange(t) / (t - 1)
    return mid + amp * np.sin(phase)


def hv_sine_offsets(amp_x: float, amp_y: float, frequency: float, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Sinusoidal drift starting at zero; frequency in cycles per sequence."""
    if t == 1:
        return np.zeros(1), np.zeros(1)
    phase = 2.0 * np.pi * frequency * np.arange(t) / (t - 1)
    return amp_x * np.sin(phase), amp_y * np.sin(phase)


def rotation_matrix(axis: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rodrigues rotation matrix for a unit axis and an angle in degrees."""
    k = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(k)
    if norm == 0:
        raise ValueError("rotation axis must be nonzero")
    k = k / norm
    theta = math.radians(angle_deg)
    c, s = math.cos(theta), math.sin(theta)
    kx, ky, kz = k
    cross = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return c * np.eye(3) + s * cross + (1.0 - c) * np.outer(k, k)


# ---------------------------------------------------------------------------
# The eight transformations
# ---------------------------------------------------------------------------

def cam_depth(seq: LandmarkSequence, s: float) -> LandmarkSequence:
    """Scale the z-coordinate of every non-padded frame by s; x, y untouched."""
    if s <= 0:
        raise ValueError(f"depth scale must be > 0, got {s}")
    frames = seq.frames.copy()
    frames[seq.frame_mask, :, 2] *= s
    return seq.with_frames(frames)


def temp_depth(seq: LandmarkSequence, schedule: np.ndarray) -> LandmarkSequence:
    """Scale z by a per-frame factor s_t; x, y untouched."""
    schedule = np.asarray(schedule, dtype=float)
    if schedule.shape != (seq.T,):
        raise ValueError(f"schedule length {schedule.shape} does not match T={seq.T}")
    if np.any(schedule <= 0):
        raise ValueError("all schedule values must be > 0")
    frames = seq.frames.copy()
    frames[seq.frame_mask, :, 2] *= schedule[seq.frame_mask, None]
    return seq.with_frames(frames)


def hv_shift(seq: LandmarkSequence, dx: np.ndarray, dy: np.ndarray) -> LandmarkSequence:
    """Add per-frame planar displacement (dx_t, dy_t); z untouched."""
    dx = np.broadcast_to(np.asarray(dx, dtype=float), (seq.T,))
    dy = np.broadcast_to(np.asarray(dy, dtype=float), (seq.T,))
    frames = seq.frames.copy()
    frames[seq.frame_mask, :, 0] += dx[seq.frame_mask, None]
    frames[seq.frame_mask, :, 1] += dy[seq.frame_mask, None]
    return seq.with_frames(frames)


def hand_size(seq: LandmarkSequence, topo: SkeletonTopology, alpha: float) -> LandmarkSequence:
    """Scale hand landmarks about the wrist: L' = w_t + alpha * (L - w_t)."""
    if alpha <= 0:
        raise ValueError(f"hand scale must be > 0, got {alpha}")
    if not topo.has_hands:
        raise ValueError("no hand joints: topology defines no hands")
    frames = seq.frames.copy()
    real = seq.frame_mask
    for hand, joints in topo.hand_joints.items():
        wrist = topo.wrist_index[hand]
        w = seq.frames[real, wrist, :][:, None, :]
        idx = list(joints)
        frames[np.ix_(real, idx)] = w + alpha * (seq.frames[np.ix_(real, idx)] - w)
    return seq.with_frames(frames)


def view_rot(
    seq: LandmarkSequence,
    topo: SkeletonTopology,
    axis: str | np.ndarray,
    angle_deg: float,
) -> LandmarkSequence:
    """Rotate the whole skeleton about the per-frame centroid by one rotation."""
    if isinstance(axis, str):
        if axis not in AXIS_VECTORS:
            raise ValueError(f"unknown named axis {axis!r}")
        axis_vec = AXIS_VECTORS[axis]
    else:
        axis_vec = np.asarray(axis, dtype=float)
    r = rotation_matrix(axis_vec, angle_deg)
    frames = seq.frames.copy()
    real = seq.frame_mask
    pts = seq.frames[real]                      # (R, J, 3)
    c = pts.mean(axis=1, keepdims=True)         # per-frame centroid
    frames[real] = (pts - c) @ r.T + c
    return seq.with_frames(frames)


def _fold_axis_for_chain(
    frame0: np.ndarray, topo: SkeletonTopology, chain: Sequence[int]
) -> np.ndarray | None:
    """Fold axis at rest: unit cross of palm-inward reference and segment direction.

    Computed at the first real frame. Returns None when the base segment is
    degenerate (zero length).
    """
    f0, f1 = frame0[chain[0]], frame0[chain[1]]
    seg = f1 - f0
    seg_norm = np.linalg.norm(seg)
    if seg_norm < 1e-12:
        return None
    seg = seg / seg_norm
    hand = topo.hand_of_chain(chain)
    chains = [c for c in topo.finger_chains if topo.hand_of_chain(c) == hand]
    ref = None
    if len(chains) >= 2:
        wrist = frame0[topo.wrist_index[hand]]
        u1 = frame0[chains[0][0]] - wrist
        u2 = frame0[chains[-1][0]] - wrist
        n = np.cross(u1, u2)
        if np.linalg.norm(n) > 1e-12:
            ref = n / np.linalg.norm(n)
    if ref is None:
        # least-aligned world axis keeps the cross product well conditioned
        ref = np.eye(3)[np.argmin(np.abs(seg))]
    axis = np.cross(ref, seg)
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        return None
    return axis / norm


def fold_fraction(progression: Sequence[float], t: int, total: int) -> float:
    """Bucketed per-timestep fold fraction: total frames split into equal buckets."""
    buckets = len(progression)
    idx = min(buckets - 1, (t * buckets) // total)
    return float(progression[idx])


def finger_fold(
    seq: LandmarkSequence,
    topo: SkeletonTopology,
    progression: Sequence[float],
    max_angles_deg: Sequence[float] = DEFAULT_MAX_FOLD_ANGLES,
    axis: np.ndarray | None = None,
) -> LandmarkSequence:
    """Fold each finger chain by cascading rotations at its three joints.

    f'1 = f0 + R_mcp (f1 - f0); f'2 = f'1 + R_pip (f2 - f1);
    f'3 = f'2 + R_dip (f3 - f2). The angle at each joint is the bucketed
    progression fraction times that joint's maximum angle. Segment lengths are
    preserved (rotations are isometries of the segment vectors).
    """
    progression = [float(x) for x in progression]
    if any(x < 0.0 or x > 1.0 for x in progression):
        raise ValueError("fold fractions must lie in [0, 1]")
    if len(max_angles_deg) != 3:
        raise ValueError("max_angles_deg must be (MCP, PIP, DIP)")
    frames = seq.frames.copy()
    real_idx = seq.real_indices
    if real_idx.size == 0 or not topo.finger_chains:
        return seq.with_frames(frames)
    frame0 = seq.frames[real_idx[0]]
    skipped = 0
    for chain in topo.finger_chains:
        chain_axis = np.asarray(axis, dtype=float) if axis is not None else _fold_axis_for_chain(frame0, topo, chain)
        if chain_axis is None:
            skipped += 1
            continue
        for t in real_idx:
            frac = fold_fraction(progression, int(t), seq.T)
            pts = seq.frames[t]
            out = frames[t]
            prev_new = pts[chain[0]]
            for k in range(3):
                r = rotation_matrix(chain_axis, frac * float(max_angles_deg[k]))
                segment = pts[chain[k + 1]] - pts[chain[k]]
                prev_new = prev_new + r @ segment
                out[chain[k + 1]] = prev_new
    if skipped:
        logger.warning("finger_fold skipped %d degenerate finger chain(s)", skipped)
    return seq.with_frames(frames)


def elbow_disp(
    seq: LandmarkSequence,
    topo: SkeletonTopology,
    direction: str,
    intensity: float,
    ramp: str = "linear",
) -> LandmarkSequence:
    """Translate each hand along the line between it and the torso reference.

    inward moves the hand toward the torso point, outward away from it; the
    displacement magnitude follows the ramp (constant, or linear 0 -> intensity).
    """
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    if direction not in ("inward", "outward"):
        raise ValueError(f"direction must be 'inward' or 'outward', got {direction!r}")
    if ramp not in ("constant", "linear"):
        raise ValueError(f"ramp must be 'constant' or 'linear', got {ramp!r}")
    if not topo.has_hands:
        raise ValueError("no hand joints: topology defines no hands")
    if ramp == "constant":
        magnitudes = np.full(seq.T, float(intensity))
    elif seq.T == 1:
        magnitudes = np.array([float(intensity)])
    else:
        magnitudes = float(intensity) * np.arange(seq.T) / (seq.T - 1)
    frames = seq.frames.copy()
    for t in seq.real_indices:
        torso = topo.torso_point(seq.frames[t])
        for hand, joints in topo.hand_joints.items():
            idx = list(joints)
            centroid = seq.frames[t, idx].mean(axis=0)
            vec = torso - centroid if direction == "inward" else centroid - torso
            norm = np.linalg.norm(vec)
            if norm < 1e-12:
                continue  # hand already at the torso point: no defined direction
            frames[t, idx] += magnitudes[t] * vec / norm
    return seq.with_frames(frames)


def resample_timeline(seq: LandmarkSequence, tau: np.ndarray) -> LandmarkSequence:
    """Resample the non-padded frames at (possibly fractional) source times tau.

    tau maps output position -> input position on the non-padded sub-timeline
    (length R = number of real frames); linear interpolation between the two
    adjacent input frames, exact frame copies at integer tau.
    """
    real_idx = seq.real_indices
    r = real_idx.size
    tau = np.asarray(tau, dtype=float)
    if tau.shape != (r,):
        raise ValueError(f"tau length {tau.shape} does not match {r} real frames")
    if np.any(tau < 0) or np.any(tau > r - 1):
        raise ValueError("tau values must lie within [0, R-1]")
    pts = seq.frames[real_idx]
    frames = seq.frames.copy()
    for out_pos, src in enumerate(tau):
        i0 = int(math.floor(src))
        w = src - i0
        if w == 0.0:
            frames[real_idx[out_pos]] = pts[i0]
        else:
            frames[real_idx[out_pos]] = (1.0 - w) * pts[i0] + w * pts[i0 + 1]
    return seq.with_frames(frames)


def generate_warp(t: int, sigma: float, knots: int, rng: np.random.Generator) -> np.ndarray:
    """Monotone warp tau over [0, t-1] from knots+2 Normal(1, sigma) increments.

    Increments are clamped to >= 0.05 (hard monotonicity), cumulated, affinely
    rescaled so the endpoints map to 0 and t-1, then linearly interpolated
    between the equally spaced control positions.
    """
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    if knots < 1:
        raise ValueError("knots must be >= 1")
    if t == 1:
        return np.zeros(1)
    n_ctrl = knots + 2
    increments = np.clip(rng.normal(1.0, sigma, size=n_ctrl), 0.05, None)
    values = np.cumsum(increments)
    values = (values - values[0]) / (values[-1] - values[0]) * (t - 1)
    positions = np.linspace(0.0, t - 1.0, n_ctrl)
    tau = np.interp(np.arange(t, dtype=float), positions, values)
    tau[0], tau[-1] = 0.0, float(t - 1)
    if np.any(np.diff(tau) < 0):
        raise RuntimeError("generated warp is not monotone")  # unreachable after clamping
    return tau


def time_warp(seq: LandmarkSequence, sigma: float, knots: int, seed: int) -> LandmarkSequence:
    """Resample the sequence along a random monotone warp of its timeline."""
    rng = make_rng(STREAM_AUGMENT, seed)
    tau = generate_warp(seq.n_real, sigma, int(knots), rng)
    return resample_timeline(seq, tau)


# ---------------------------------------------------------------------------
# Preset catalogue and dispatch
# ---------------------------------------------------------------------------

def _preset(kind: str, name: str, **params: Any) -> AugmentationSpec:
    return AugmentationSpec(kind=kind, params=params, name=name)


PRESETS: dict[str, AugmentationSpec] = {
    spec.name: spec
    for spec in [
        _preset("camdepth", "camdepth.near", s_range=(0.7, 0.7)),
        _preset("camdepth", "camdepth.far", s_range=(1.3, 1.3)),
        _preset(
            "tempdepth", "tempdepth.far_to_near",
            schedule="linear-ramp", s_start_range=(0.5, 0.5), s_end_range=(1.3, 1.3),
        ),
        _preset(
            "tempdepth", "tempdepth.near_to_far",
            schedule="linear-ramp", s_start_range=(0.7, 0.7), s_end_range=(1.5, 1.5),
        ),
        _preset("tempdepth", "tempdepth.near_far_near", schedule="sine-cycle", s_range=(0.6, 1.4)),
        _preset("hvshift", "hvshift.linear", mode="linear", dx_range=(-0.15, 0.15), dy_range=(-0.15, 0.15)),
        _preset("hvshift", "hvshift.sine", mode="sine", amp_x=0.10, amp_y=0.08, frequency=1.5),
        _preset("handsize", "handsize.large", alpha_range=(1.3, 1.3)),
        _preset("handsize", "handsize.small", alpha_range=(0.8, 0.8)),
        _preset("viewrot", "viewrot.yaw", axis="yaw", angle_range=(-45.0, 45.0)),
        _preset(
            "fingerfold", "fingerfold.gradual",
            progression=(0.2, 0.4, 0.6, 0.8), max_angles=DEFAULT_MAX_FOLD_ANGLES,
        ),
        _preset("elbowdisp", "elbowdisp.inward", direction="inward", intensity=0.4, ramp="linear"),
        _preset("elbowdisp", "elbowdisp.outward", direction="outward", intensity=0.3, ramp="linear"),
        _preset("timewarp", "timewarp.moderate", sigma=0.1, knots=4),
        _preset("timewarp", "timewarp.mild", sigma=0.05, knots=4),
    ]
}

# One representative pattern per family; FingerFold/ElbowDisp are dropped for
# topologies without finger chains (full-body skeletons), leaving 6 members.
_DEFAULT_FAMILY_PRESETS = (
    "camdepth.far",
    "tempdepth.near_far_near",
    "hvshift.linear",
    "handsize.large",
    "viewrot.yaw",
    "fingerfold.gradual",
    "elbowdisp.inward",
    "timewarp.moderate",
)


def get_preset(name: str) -> AugmentationSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown augmentation preset {name!r}; see `skelaug list-augs`") from None


def default_specialist_presets(topology: SkeletonTopology) -> list[str]:
    """Default one-preset-per-family specialist list for a topology."""
    names = list(_DEFAULT_FAMILY_PRESETS)
    if not topology.finger_chains:
        names = [n for n in names if not n.startswith(("fingerfold.", "elbowdisp."))]
    return names


def apply_augmentation(
    seq: LandmarkSequence,
    topo: SkeletonTopology,
    spec: AugmentationSpec,
    seed: int,
) -> LandmarkSequence:
    """Sample the spec's parameters from the seeded generator and transform."""
    rng = make_rng(STREAM_AUGMENT, seed)
    p = spec.params
    kind = spec.kind
    if kind == "camdepth":
        return cam_depth(seq, rng.uniform(*p["s_range"]))
    if kind == "tempdepth":
        if p.get("schedule", "linear-ramp") == "linear-ramp":
            start = rng.uniform(*p["s_start_range"])
            end = rng.uniform(*p["s_end_range"])
            return temp_depth(seq, linear_schedule(start, end, seq.T))
        return temp_depth(seq, sine_schedule(*p["s_range"], seq.T))
    if kind == "hvshift":
        mode = p.get("mode", "constant")
        if mode == "sine":
            dx, dy = hv_sine_offsets(p["amp_x"], p["amp_y"], p["frequency"], seq.T)
            return hv_shift(seq, dx, dy)
        dx_end = rng.uniform(*p["dx_range"])
        dy_end = rng.uniform(*p["dy_range"])
        if mode == "constant":
            return hv_shift(seq, np.full(seq.T, dx_end), np.full(seq.T, dy_end))
        return hv_shift(seq, linear_schedule(0.0, dx_end, seq.T), linear_schedule(0.0, dy_end, seq.T))
    if kind == "handsize":
        return hand_size(seq, topo, rng.uniform(*p["alpha_range"]))
    if kind == "viewrot":
        axis = p.get("axis", "yaw")
        if axis == "random-unit":
            v = rng.normal(size=3)
            while np.linalg.norm(v) < 1e-9:
                v = rng.normal(size=3)
            axis = v / np.linalg.norm(v)
        angle = rng.uniform(*p["angle_range"])
        return view_rot(seq, topo, axis, angle)
    if kind == "fingerfold":
        return finger_fold(
            seq, topo, p["progression"], p.get("max_angles", DEFAULT_MAX_FOLD_ANGLES),
        )
    if kind == "elbowdisp":
        return elbow_disp(seq, topo, p["direction"], p["intensity"], p.get("ramp", "linear"))
    if kind == "timewarp":
        return time_warp(seq, p["sigma"], p["knots"], seed)
    raise ValueError(f"unhandled augmentation kind {kind!r}")  # pragma: no cover


def build_specialist_dataset(
    dataset: LabeledDataset,
    spec: AugmentationSpec,
    seed: int,
    mode: str = "append",
) -> LabeledDataset:
    """Transform every sequence under one spec, with slot-index sub-seeding.

    replace: same size, every sequence transformed. append: originals followed
    by their transformed copies (size doubles); labels/subject ids carried over.
    """
    if mode not in ("replace", "append"):
        raise ValueError(f"mode must be 'replace' or 'append', got {mode!r}")
    transformed = [
        apply_augmentation(seq, dataset.topology, spec, derive_subseed(seed, i))
        for i, seq in enumerate(dataset.sequences)
    ]
    if mode == "replace":
        return LabeledDataset(
            sequences=transformed,
            labels=dataset.labels.copy(),
            class_names=list(dataset.class_names),
            subject_ids=list(dataset.subject_ids),
            topology=dataset.topology,
        )
    return LabeledDataset(
        sequences=[s.copy() for s in dataset.sequences] + transformed,
        labels=np.concatenate([dataset.labels, dataset.labels]),
        class_names=list(dataset.class_names),
        subject_ids=list(dataset.subject_ids) * 2,
        topology=dataset.topology,
    )


def derive_subseed(master_seed: int, index: int) -> int:
    """Per-slot sub-seed: a pure function of (master_seed, slot index)."""
    from .seeding import derive_seed

    return derive_seed(master_seed, index)
