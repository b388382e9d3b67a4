import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrmm.metrics import align_labels, clustering_error, confusion, frob_loss, hamming_error
from lrmm.model import CenterSet, separation_strength

from oracles import brute_force_frob, brute_force_hamming, random_ground_truth

seeds = st.integers(0, 2**32 - 1)


def lexicographic_brute_force(s_hat, s_star, K):
    """First optimal permutation in lexicographic order (perm[true] = estimated)."""
    best, arg = None, None
    for perm in itertools.permutations(range(K)):
        m = int(np.sum(np.asarray(s_hat) != np.asarray(perm)[np.asarray(s_star)]))
        if best is None or m < best:
            best, arg = m, perm
    return best, arg


def test_identity():
    s = np.array([0, 1, 2, 2, 1])
    res = hamming_error(s, s, 3)
    assert res.hamming == 0 and res.rate == 0.0 and res.permutation == (0, 1, 2)


def test_global_swap():
    s = np.array([0, 1, 1, 0, 1])
    res = hamming_error(1 - s, s, 2)
    assert res.hamming == 0 and res.permutation == (1, 0)


def test_k4_n12_brute_force(rng):
    for _ in range(50):
        a, b = rng.integers(0, 4, 12), rng.integers(0, 4, 12)
        assert hamming_error(a, b, 4).hamming == brute_force_hamming(a, b, 4)


@given(seeds, st.integers(2, 6), st.integers(1, 25))
def test_matches_brute_force_with_lexicographic_ties(seed, K, n):
    r = np.random.default_rng(seed)
    a, b = r.integers(0, K, n), r.integers(0, K, n)
    res = hamming_error(a, b, K)
    best, perm = lexicographic_brute_force(a, b, K)
    assert res.hamming == best
    assert res.permutation == perm
    assert res.rate == pytest.approx(best / n)
    assert sorted(res.permutation) == list(range(K))


@given(seeds, st.integers(2, 6))
def test_symmetric(seed, K):
    r = np.random.default_rng(seed)
    a, b = r.integers(0, K, 20), r.integers(0, K, 20)
    assert hamming_error(a, b, K).hamming == hamming_error(b, a, K).hamming


def test_errors():
    with pytest.raises(ValueError):
        hamming_error([0, 1], [0, 1, 1], 2)
    with pytest.raises(ValueError):
        hamming_error([0, 2], [0, 1], 2)


def test_confusion_examples(rng):
    s = np.array([0, 1, 1, 2, 2, 2])
    np.testing.assert_array_equal(confusion(s, s, 3), np.diag([1, 2, 3]))
    c = confusion(np.zeros(6, int), s, 3)
    assert np.count_nonzero(c.sum(axis=1)) == 1 and c[0].tolist() == [1, 2, 3]
    a, b = rng.integers(0, 4, 50), rng.integers(0, 4, 50)
    c = confusion(a, b, 4)
    assert c.sum() == 50
    np.testing.assert_array_equal(c.sum(axis=1), np.bincount(a, minlength=4))
    np.testing.assert_array_equal(c.sum(axis=0), np.bincount(b, minlength=4))


def test_frob_loss_examples(rng):
    b = np.zeros((2, 2))
    b[0, 0] = 3.0
    cs = CenterSet(np.stack([np.eye(2), np.eye(2) + b]), (2, 2))
    s = np.array([0, 0, 1, 1, 1])
    assert frob_loss(s, s, cs) == 0.0
    flipped = s.copy()
    flipped[0] = 1
    assert frob_loss(flipped, s, cs) == pytest.approx(9.0)
    gt = random_ground_truth(rng, K=3)
    for _ in range(20):
        x, y = rng.integers(0, 3, 15), rng.integers(0, 3, 15)
        assert frob_loss(x, y, gt.center_set) == pytest.approx(brute_force_frob(x, y, gt.center_set.centers), rel=1e-12)


@given(seeds)
def test_hamming_bounded_by_scaled_frobenius_loss(seed):
    r = np.random.default_rng(seed)
    gt = random_ground_truth(r)
    delta = separation_strength(gt.center_set)
    K = gt.K
    for _ in range(10):
        a, b = r.integers(0, K, 20), r.integers(0, K, 20)
        assert hamming_error(a, b, K).hamming <= frob_loss(a, b, gt.center_set) / delta**2 + 1e-9


def test_align_labels(rng):
    s = rng.integers(0, 3, 30)
    perm = np.array([2, 0, 1])
    est = perm[s]
    np.testing.assert_array_equal(align_labels(est, s, 3), s)
    assert clustering_error(est, s, 3) == 0.0
