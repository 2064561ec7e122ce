"""Deterministic seed derivation and counter-based generators.

Every random draw in the package flows through a Philox generator keyed by
integer identifier tuples (master seed, member index, epoch, ...), so results
are independent of iteration order and safe to parallelize.
"""

from __future__ import annotations

import numpy as np

# Stream tags keep derived seeds for different purposes disjoint even when the
# remaining identifier ints collide.
STREAM_AUGMENT = 1
STREAM_TRAIN = 2
STREAM_INIT = 3
STREAM_SHUFFLE = 4
STREAM_DROPOUT = 5
STREAM_MEMBER = 6
STREAM_BOOTSTRAP = 7
STREAM_GENERALIST = 8
STREAM_RUN = 9


def derive_seed(*parts: int) -> int:
    """Collapse integer identifiers into a single 64-bit seed."""
    if not parts:
        raise ValueError("derive_seed needs at least one identifier")
    ss = np.random.SeedSequence([int(p) for p in parts])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(*parts: int) -> np.random.Generator:
    """Counter-based generator keyed by the identifier tuple."""
    ss = np.random.SeedSequence([int(p) for p in parts])
    return np.random.Generator(np.random.Philox(ss))
