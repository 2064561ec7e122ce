import itertools

import numpy as np
import pytest

from skelaug.augment import AugmentationSpec, get_preset
from skelaug.core import LabeledDataset, LandmarkSequence, SkeletonTopology
from skelaug.ensemble import (
    EnsembleModel,
    bootstrap_indices,
    hard_vote,
    hard_vote_batch,
    load_ensemble,
    predict_ensemble,
    save_ensemble,
    soft_vote,
    train_bagging,
    train_generalist,
    train_specialist_ensemble,
    _member_dataset,
)
from skelaug.model import ModelConfig, TrainConfig, predict, train
from skelaug.seeding import STREAM_BOOTSTRAP, STREAM_MEMBER, STREAM_TRAIN, derive_seed, make_rng


def brute_force_vote(labels, probs):
    """Independent oracle: explicit counting with the documented tie policy."""
    c = probs.shape[1]
    counts = [sum(1 for l in labels if l == cls) for cls in range(c)]
    best_count = max(counts)
    tied = [cls for cls in range(c) if counts[cls] == best_count]
    if len(tied) == 1:
        return tied[0]
    sums = probs.sum(axis=0)
    best_sum = max(sums[cls] for cls in tied)
    return min(cls for cls in tied if sums[cls] == best_sum)


def random_probs(rng, m, c):
    p = rng.random((m, c))
    return p / p.sum(axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# voting
# ---------------------------------------------------------------------------

def test_hard_vote_plurality():
    probs = np.full((3, 2), 0.5)
    assert hard_vote([0, 0, 1], probs) == 0


def test_hard_vote_tie_by_summed_probability():
    probs = np.array([[0.6, 0.4], [0.5, 0.5]])  # sums: A=1.1, B=0.9
    assert hard_vote([0, 1], probs) == 0
    probs = np.array([[0.4, 0.6], [0.45, 0.55]])  # sums: A=0.85, B=1.15
    assert hard_vote([0, 1], probs) == 1


def test_hard_vote_tie_falls_to_lowest_index():
    probs = np.full((2, 2), 0.5)
    assert hard_vote([0, 1], probs) == 0
    assert hard_vote([1, 0], probs) == 0


def test_hard_vote_single_member():
    assert hard_vote([2], np.array([[0.1, 0.2, 0.7]])) == 2


def test_hard_vote_full_enumeration_oracle():
    # all label matrices with M <= 4, C <= 3, fixed random probabilities
    rng = make_rng(41, 0)
    for c in (1, 2, 3):
        for m in (1, 2, 3, 4):
            probs = random_probs(rng, m, c)
            for labels in itertools.product(range(c), repeat=m):
                assert hard_vote(list(labels), probs) == brute_force_vote(labels, probs)


def test_hard_vote_random_oracle_with_ties():
    rng = make_rng(41, 1)
    for trial in range(2000):
        m = int(rng.integers(1, 10))
        c = int(rng.integers(2, 6))
        labels = rng.integers(0, c, size=m)
        if trial % 3 == 0:
            probs = np.full((m, c), 1.0 / c)  # exact prob ties
        else:
            probs = random_probs(rng, m, c)
        assert hard_vote(labels, probs) == brute_force_vote(labels, probs)


def test_hard_vote_member_permutation_invariant():
    rng = make_rng(41, 2)
    for _ in range(200):
        m, c = 5, 4
        labels = rng.integers(0, c, size=m)
        probs = random_probs(rng, m, c)
        base = hard_vote(labels, probs)
        perm = rng.permutation(m)
        assert hard_vote(labels[perm], probs[perm]) == base


def test_hard_vote_strict_majority_wins():
    rng = make_rng(41, 3)
    for _ in range(200):
        c = 4
        labels = rng.integers(0, c, size=5)
        majority = int(rng.integers(0, c))
        labels[:3] = majority
        probs = random_probs(rng, 5, c)
        assert hard_vote(labels, probs) == majority


def test_soft_vote_examples():
    assert soft_vote(np.array([[0.6, 0.4], [0.3, 0.7]])) == 1  # mean (0.45, 0.55)
    assert soft_vote(np.array([[0.2, 0.8], [0.2, 0.8]])) == 1
    assert soft_vote(np.array([[0.5, 0.5], [0.5, 0.5]])) == 0  # tie -> lowest


def test_vote_batch_matches_scalar():
    rng = make_rng(41, 4)
    m, b, c = 6, 40, 5
    labels = rng.integers(0, c, size=(m, b))
    probs = rng.random((m, b, c))
    probs /= probs.sum(axis=2, keepdims=True)
    batch = hard_vote_batch(labels, probs)
    for i in range(b):
        assert batch[i] == hard_vote(labels[:, i], probs[:, i])


# ---------------------------------------------------------------------------
# training protocols
# ---------------------------------------------------------------------------

HAND_TOPO = SkeletonTopology(
    joint_count=8,
    hand_joints={"right": (3, 4, 5, 6, 7)},
    wrist_index={"right": 3},
    finger_chains=((4, 5, 6, 7),),
    torso_reference=(0, 1),
)


def tiny_dataset(n_per_class=12, seed=0):
    rng = make_rng(42, seed)
    seqs, labels, subjects = [], [], []
    for c in (0, 1):
        for i in range(n_per_class):
            frames = rng.normal(scale=0.1, size=(6, 8, 3)) + (0.5 if c else -0.5)
            seqs.append(LandmarkSequence(frames))
            labels.append(c)
            subjects.append(f"s{i % 4}")
    return LabeledDataset(seqs, np.array(labels), ["a", "b"], subjects, HAND_TOPO)


def tiny_splits(ds):
    n = len(ds)
    idx = list(range(n))
    return {"train": idx[: int(0.6 * n)], "validation": idx[int(0.6 * n) : int(0.8 * n)], "test": idx[int(0.8 * n) :]}


MC = ModelConfig(arch="linear-pooled", input_dim=24, class_count=2, seq_len=6, dropout=0.0)
TC = TrainConfig(learning_rate=0.05, batch_size=8, max_epochs=8, patience=0, seed=3)


def test_ensemble_single_member_equals_member():
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    ens = train_specialist_ensemble(ds, splits, [get_preset("camdepth.far")], MC, TC)
    assert ens.size == 1
    labels, member_labels, _ = predict_ensemble(ens, ds.sequences[:8])
    direct, _ = predict(ens.members[0], ds.sequences[:8])
    assert np.array_equal(labels, direct)
    assert np.array_equal(member_labels[0], direct)


def test_ensemble_identical_members_reproduce_single():
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    neutral = AugmentationSpec("camdepth", {"s_range": (1.0, 1.0)})
    single = train_specialist_ensemble(ds, splits, [neutral], MC, TC)
    triple = EnsembleModel(members=[single.members[0]] * 3, aggregation="hard")
    labels_1, _, _ = predict_ensemble(single, ds.sequences)
    labels_3, _, _ = predict_ensemble(triple, ds.sequences)
    assert np.array_equal(labels_1, labels_3)


def test_ensemble_default_preset_count():
    from skelaug.augment import default_specialist_presets

    assert len(default_specialist_presets(HAND_TOPO)) == 8


def test_ensemble_member_count_and_tags():
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    specs = [get_preset("camdepth.far"), get_preset("viewrot.yaw")]
    ens = train_specialist_ensemble(ds, splits, specs, MC, TC)
    assert ens.size == 2
    assert [m.augmentation_tag for m in ens.members] == ["camdepth.far", "viewrot.yaw"]


def test_ensemble_parallel_jobs_identical():
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    specs = [get_preset("camdepth.far"), get_preset("viewrot.yaw")]
    seq_ens = train_specialist_ensemble(ds, splits, specs, MC, TC, jobs=1)
    par_ens = train_specialist_ensemble(ds, splits, specs, MC, TC, jobs=2)
    for a, b in zip(seq_ens.members, par_ens.members):
        for k in a.params:
            assert np.array_equal(a.params[k], b.params[k])


def test_generalist_neutral_equals_baseline_log():
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    neutral = AugmentationSpec("camdepth", {"s_range": (1.0, 1.0)})
    base = train(ds, splits, MC, TC, augmentation="baseline")
    gen = train_generalist(ds, splits, [neutral], MC, TC)
    assert base.train_loss == gen.train_loss
    assert base.val_accuracy == gen.val_accuracy
    for k in base.params:
        assert np.array_equal(base.params[k], gen.params[k])


def test_generalist_requires_augmentations():
    ds = tiny_dataset()
    with pytest.raises(ValueError, match="generalist requires"):
        train_generalist(ds, tiny_splits(ds), [], MC, TC)


def test_generalist_deterministic():
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    specs = [get_preset("camdepth.far"), get_preset("hvshift.linear")]
    a = train_generalist(ds, splits, specs, MC, TC)
    b = train_generalist(ds, splits, specs, MC, TC)
    assert a.train_loss == b.train_loss


def test_bagging_bootstrap_reproducible():
    seed_a = derive_seed(derive_seed(3, STREAM_MEMBER, 0), STREAM_BOOTSTRAP)
    idx1 = bootstrap_indices(make_rng(seed_a), 50)
    idx2 = bootstrap_indices(make_rng(seed_a), 50)
    assert np.array_equal(idx1, idx2)


def test_bagging_unique_fraction():
    # expected unique fraction over a bootstrap approaches 1 - 1/e
    rng = make_rng(43, 0)
    n = 1000
    fractions = [len(set(bootstrap_indices(rng, n).tolist())) / n for _ in range(100)]
    assert abs(np.mean(fractions) - (1 - np.exp(-1))) < 0.02


def test_bagging_identity_resample_equals_baseline():
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    # a member trained on the identity "resample" is exactly the baseline path
    member_seed = derive_seed(TC.seed, STREAM_MEMBER, 0)
    from dataclasses import replace

    cfg = replace(TC, seed=derive_seed(member_seed, STREAM_TRAIN))
    resampled = ds.subset(splits["train"])
    member_ds, member_splits = _member_dataset(ds, splits, resampled)
    member = train(member_ds, member_splits, MC, cfg)
    base = train(ds, splits, MC, cfg)
    for k in member.params:
        assert np.array_equal(member.params[k], base.params[k])


def test_bagging_trains_m_members():
    ds = tiny_dataset()
    ens = train_bagging(ds, tiny_splits(ds), 3, MC, TC)
    assert ens.size == 3
    assert [m.augmentation_tag for m in ens.members] == ["bagging.0", "bagging.1", "bagging.2"]


def test_predict_ensemble_unanimous():
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    neutral = AugmentationSpec("camdepth", {"s_range": (1.0, 1.0)})
    single = train_specialist_ensemble(ds, splits, [neutral], MC, TC)
    ens = EnsembleModel(members=[single.members[0]] * 5)
    labels, member_labels, member_probs = predict_ensemble(ens, ds.sequences[:6])
    assert member_labels.shape == (5, 6)
    assert member_probs.shape == (5, 6, 2)
    for i in range(5):
        assert np.array_equal(member_labels[i], labels)


def test_ensemble_validation():
    with pytest.raises(ValueError, match="at least one member"):
        EnsembleModel(members=[])


# ---------------------------------------------------------------------------
# manifest round-trip
# ---------------------------------------------------------------------------

def test_ensemble_save_load_roundtrip(tmp_path):
    ds = tiny_dataset()
    splits = tiny_splits(ds)
    specs = [get_preset("camdepth.far"), get_preset("viewrot.yaw")]
    ens = train_specialist_ensemble(ds, splits, specs, MC, TC)
    save_ensemble(ens, tmp_path / "ens")
    loaded = load_ensemble(tmp_path / "ens")
    assert loaded.size == 2
    assert loaded.aggregation == ens.aggregation
    assert loaded.master_seed == TC.seed
    a, _, pa = predict_ensemble(ens, ds.sequences[:6])
    b, _, pb = predict_ensemble(loaded, ds.sequences[:6])
    assert np.array_equal(a, b)
    assert np.array_equal(pa, pb)
    assert (tmp_path / "ens" / "manifest.json").exists()


def test_load_ensemble_missing_manifest(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_ensemble(tmp_path)
