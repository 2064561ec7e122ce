"""Generic time-series augmentations: the traditional baseline suite.

Jitter, magnitude scaling, magnitude warping, time warping, window warping,
and window scaling. These treat all coordinates uniformly and ignore skeletal
geometry. Same contract as the geometry-aware suite: shape preserved, padded
frames untouched, deterministic under seed, neutral parameters give identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .core import LandmarkSequence
from .seeding import STREAM_AUGMENT, make_rng
from .augment import generate_warp, resample_timeline, time_warp

__all__ = [
    "GenericAugSpec",
    "GENERIC_PRESETS",
    "jitter",
    "scale_mag",
    "mag_warp",
    "win_warp",
    "win_scale",
    "apply_generic",
]

GENERIC_KINDS = ("jitter", "scale", "magwarp", "timewarp", "winwarp", "winscale")


@dataclass(frozen=True)
class GenericAugSpec:
    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    name: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in GENERIC_KINDS:
            raise ValueError(f"unknown generic augmentation kind {self.kind!r}")
        object.__setattr__(self, "params", dict(self.params))
        p = self.params
        if self.kind == "jitter" and p["noise_sigma"] < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.kind == "scale":
            lo, hi = p["scale_range"]
            if lo > hi or lo <= 0:
                raise ValueError("scale_range must be ordered and positive")
        if self.kind == "magwarp" and (p["sigma"] <= 0 or int(p["knots"]) < 1):
            raise ValueError("magwarp needs sigma > 0 and knots >= 1")
        if self.kind == "timewarp" and (p["sigma"] <= 0 or int(p["knots"]) < 1):
            raise ValueError("timewarp needs sigma > 0 and knots >= 1")
        if self.kind in ("winwarp", "winscale"):
            ratio = float(p["window_ratio"])
            if not 0 < ratio <= 1:
                raise ValueError("window_ratio must lie in (0, 1]")

    @property
    def tag(self) -> str:
        return self.name if self.name is not None else f"generic.{self.kind}"


def jitter(seq: LandmarkSequence, sigma: float, seed: int) -> LandmarkSequence:
    """Additive Normal(0, sigma) noise per coordinate on non-padded frames."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = make_rng(STREAM_AUGMENT, seed)
    frames = seq.frames.copy()
    noise = rng.normal(0.0, sigma, size=(seq.n_real, seq.J, 3))
    frames[seq.frame_mask] += noise
    return seq.with_frames(frames)


def scale_mag(seq: LandmarkSequence, factor: float) -> LandmarkSequence:
    """Multiply every coordinate by a single factor."""
    frames = seq.frames.copy()
    frames[seq.frame_mask] *= factor
    return seq.with_frames(frames)


def mag_warp(seq: LandmarkSequence, sigma: float, knots: int, seed: int) -> LandmarkSequence:
    """Multiply coordinates by a smooth per-timestep curve around 1.

    Control values ~ Normal(1, sigma) at knots+2 equally spaced positions over
    the non-padded sub-timeline, linearly interpolated.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if int(knots) < 1:
        raise ValueError("knots must be >= 1")
    rng = make_rng(STREAM_AUGMENT, seed)
    r = seq.n_real
    n_ctrl = int(knots) + 2
    values = rng.normal(1.0, sigma, size=n_ctrl)
    if r == 1:
        curve = values[:1]
    else:
        positions = np.linspace(0.0, r - 1.0, n_ctrl)
        curve = np.interp(np.arange(r, dtype=float), positions, values)
    frames = seq.frames.copy()
    frames[seq.frame_mask] *= curve[:, None, None]
    return seq.with_frames(frames)


def win_warp(seq: LandmarkSequence, window_ratio: float, speed: float, seed: int) -> LandmarkSequence:
    """Play a random contiguous window at `speed`, renormalize back to length T.

    The warp map runs the window's source frames speed times faster than the
    surrounding frames, then the whole map is rescaled to the original length.
    """
    if not 0 < window_ratio <= 1:
        raise ValueError("window_ratio must lie in (0, 1]")
    if speed <= 0:
        raise ValueError("speed must be > 0")
    rng = make_rng(STREAM_AUGMENT, seed)
    r = seq.n_real
    if r < 2:
        return seq.copy()
    win_len = max(1, round(window_ratio * r))
    start = int(rng.integers(0, r - win_len + 1))
    stop = start + win_len
    # per-step source velocity: `speed` inside the window, 1 outside
    velocity = np.ones(r - 1)
    velocity[start : max(start, min(stop, r - 1))] = speed
    source = np.concatenate([[0.0], np.cumsum(velocity)])
    source *= (r - 1) / source[-1]
    return resample_timeline(seq, source)


def win_scale(seq: LandmarkSequence, window_ratio: float, factor: float, seed: int) -> LandmarkSequence:
    """Multiply the coordinates inside a random window of frames by factor."""
    if not 0 < window_ratio <= 1:
        raise ValueError("window_ratio must lie in (0, 1]")
    rng = make_rng(STREAM_AUGMENT, seed)
    real_idx = seq.real_indices
    r = real_idx.size
    win_len = max(1, round(window_ratio * r))
    start = int(rng.integers(0, r - win_len + 1)) if r > win_len else 0
    frames = seq.frames.copy()
    frames[real_idx[start : start + win_len]] *= factor
    return seq.with_frames(frames)


GENERIC_PRESETS: dict[str, GenericAugSpec] = {
    spec.name: spec
    for spec in [
        # The source table does not state parameter values; these are mild
        # defaults relative to normalized coordinates.
        GenericAugSpec("jitter", {"noise_sigma": 0.01}, "generic.jitter"),
        GenericAugSpec("scale", {"scale_range": (0.8, 1.2)}, "generic.scale"),
        GenericAugSpec("magwarp", {"sigma": 0.2, "knots": 4}, "generic.magwarp"),
        GenericAugSpec("timewarp", {"sigma": 0.1, "knots": 4}, "generic.timewarp"),
        GenericAugSpec("winwarp", {"window_ratio": 0.3, "speed_range": (0.5, 2.0)}, "generic.winwarp"),
        GenericAugSpec("winscale", {"window_ratio": 0.3, "scale_range": (0.7, 1.3)}, "generic.winscale"),
    ]
}


def apply_generic(seq: LandmarkSequence, spec: GenericAugSpec, seed: int) -> LandmarkSequence:
    """Sample the spec's parameters from the seeded generator and transform."""
    rng = make_rng(STREAM_AUGMENT, seed, 1)  # parameter draws; op uses its own stream
    p = spec.params
    if spec.kind == "jitter":
        return jitter(seq, p["noise_sigma"], seed)
    if spec.kind == "scale":
        return scale_mag(seq, rng.uniform(*p["scale_range"]))
    if spec.kind == "magwarp":
        return mag_warp(seq, p["sigma"], p["knots"], seed)
    if spec.kind == "timewarp":
        return time_warp(seq, p["sigma"], p["knots"], seed)
    if spec.kind == "winwarp":
        return win_warp(seq, p["window_ratio"], rng.uniform(*p["speed_range"]), seed)
    if spec.kind == "winscale":
        return win_scale(seq, p["window_ratio"], rng.uniform(*p["scale_range"]), seed)
    raise ValueError(f"unhandled generic kind {spec.kind!r}")  # pragma: no cover
