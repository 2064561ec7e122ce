import itertools
import math

import numpy as np
import pytest

from skelaug.ensemble import hard_vote
from skelaug.evaluation import (
    accuracy,
    error_indices,
    jaccard_error_overlap,
    jaccard_matrix,
    jaccard_summary,
    mean_ci,
    subset_sweep,
)
from skelaug.seeding import make_rng


# ---------------------------------------------------------------------------
# accuracy
# ---------------------------------------------------------------------------

def test_accuracy_basic():
    assert accuracy([1, 2, 3], [1, 2, 3]) == 1.0
    assert accuracy([0, 1], [0, 0]) == 0.5
    assert accuracy([1, 1], [0, 0]) == 0.0


def test_accuracy_empty_rejected():
    with pytest.raises(ValueError):
        accuracy([], [])


# ---------------------------------------------------------------------------
# mean_ci
# ---------------------------------------------------------------------------

def test_mean_ci_constant_values():
    ci = mean_ci([0.5, 0.5, 0.5])
    assert ci.mean == 0.5
    assert ci.half_width == 0.0


def test_mean_ci_two_point_oracle():
    # t_{0.975,1} = 12.706; std = 0.7071; hw = 12.706 * 0.7071 / 1.4142 = 6.353
    ci = mean_ci([0.0, 1.0])
    assert abs(ci.mean - 0.5) < 1e-12
    assert abs(ci.half_width - 6.353) < 1e-3


def test_mean_ci_n5_quantile():
    values = [0.1, 0.2, 0.3, 0.4, 0.5]
    ci = mean_ci(values)
    s = np.std(values, ddof=1)
    implied_t = ci.half_width * math.sqrt(5) / s
    assert abs(implied_t - 2.776) < 1e-3


def test_mean_ci_single_value_undefined():
    ci = mean_ci([0.7])
    assert ci.mean == 0.7
    assert not ci.defined
    assert math.isnan(ci.half_width)


def test_mean_ci_scaling_with_n():
    # half-width ~ 1/sqrt(n) for constant sample variance
    rng = make_rng(51, 0)
    base = rng.normal(size=400)
    hw_100 = mean_ci(base[:100]).half_width
    hw_400 = mean_ci(np.concatenate([base, base, base, base])[:400]).half_width
    # same sample variance by construction on the repeated sample
    assert hw_400 < hw_100


# ---------------------------------------------------------------------------
# jaccard
# ---------------------------------------------------------------------------

def test_jaccard_hand_cases():
    assert jaccard_error_overlap({1, 2, 3}, {2, 3, 4}) == 0.5
    assert jaccard_error_overlap({1, 2}, {1, 2}) == 1.0
    assert jaccard_error_overlap({1}, {2}) == 0.0
    assert jaccard_error_overlap(set(), set()) is None


def test_jaccard_matrix_symmetry_and_diagonal():
    sets = [{1, 2, 3}, {2, 3, 4}, set()]
    m = jaccard_matrix(sets)
    assert m[0, 1] == m[1, 0] == 0.5
    assert m[0, 0] == 1.0 and m[1, 1] == 1.0
    assert math.isnan(m[2, 2])  # zero-error model: undefined diagonal
    assert m[0, 2] == 0.0  # union nonempty, intersection empty


def test_jaccard_with_empty_one_side_is_zero():
    assert jaccard_error_overlap({1, 2, 3}, set()) == 0.0


def test_jaccard_monotone_under_shared_error():
    a, b = {1, 2}, {2, 3}
    before = jaccard_error_overlap(a, b)
    after = jaccard_error_overlap(a | {9}, b | {9})
    assert after > before


def test_jaccard_summary_excludes_undefined():
    m = jaccard_matrix([{1, 2}, {2, 3}, set()])
    s = jaccard_summary(m)
    # defined off-diagonal pairs: (0,1) = 1/3, (0,2) = 0, (1,2) = 0
    assert abs(s["min"] - 0.0) < 1e-12
    assert abs(s["max"] - 1 / 3) < 1e-12
    assert jaccard_summary(jaccard_matrix([set(), set()])) is None


def test_error_indices():
    assert error_indices([0, 1, 1], [0, 1, 0]) == {2}


# ---------------------------------------------------------------------------
# subset sweep
# ---------------------------------------------------------------------------

def test_subset_sweep_k1_and_kM():
    rng = make_rng(52, 0)
    m, b, c = 3, 30, 4
    labels = rng.integers(0, c, size=(m, b))
    probs = rng.random((m, b, c))
    probs /= probs.sum(axis=2, keepdims=True)
    true = rng.integers(0, c, size=b)
    points = subset_sweep(labels, probs, true)
    assert [p.k for p in points] == [1, 2, 3]
    member_accs = [accuracy(labels[i], true) for i in range(m)]
    assert abs(points[0].mean - np.mean(member_accs)) < 1e-12
    from skelaug.ensemble import hard_vote_batch

    full = accuracy(hard_vote_batch(labels, probs), true)
    assert points[-1].mean == full
    assert points[-1].n_subsets == 1
    assert not points[-1].defined  # single subset: CI undefined


def test_subset_sweep_hand_enumeration():
    # M=3 with hand-set predictions; oracle = manual enumeration of all subsets
    true = np.array([0, 0, 1, 1])
    labels = np.array([
        [0, 0, 1, 0],   # member 0: 3/4
        [0, 1, 1, 1],   # member 1: 3/4
        [1, 0, 0, 1],   # member 2: 1/4
    ])
    probs = np.zeros((3, 4, 2))
    for i in range(3):
        for j in range(4):
            probs[i, j, labels[i, j]] = 0.9
            probs[i, j, 1 - labels[i, j]] = 0.1
    points = subset_sweep(labels, probs, true)
    expected_k = {}
    for k in (1, 2, 3):
        accs = []
        for sub in itertools.combinations(range(3), k):
            votes = [hard_vote(labels[list(sub), j], probs[list(sub), j]) for j in range(4)]
            accs.append(accuracy(votes, true))
        expected_k[k] = np.mean(accs)
    for p in points:
        assert abs(p.mean - expected_k[p.k]) < 1e-12


def test_subset_sweep_combinatorial_guard():
    m, b, c = 21, 4, 2
    labels = np.zeros((m, b), dtype=int)
    probs = np.full((m, b, c), 0.5)
    true = np.zeros(b, dtype=int)
    with pytest.raises(ValueError, match="guard"):
        subset_sweep(labels, probs, true)
    points = subset_sweep(labels, probs, true, sample=10)
    assert len(points) == m
    assert all(p.n_subsets <= 10 for p in points)
