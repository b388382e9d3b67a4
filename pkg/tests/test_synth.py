import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import subspace_angles

from lrmm.cluster import lr_lloyd
from lrmm.model import separation_strength, signal_tensor
from lrmm.synth import (
    LrMMSpec,
    MMSBMSpec,
    gen_lrmm,
    gen_mmsbm,
    random_orthonormal,
    sample_adjacency,
)

seeds = st.integers(0, 2**32 - 1)


# --- random_orthonormal ---------------------------------------------------------


@given(seeds, st.integers(1, 12), st.integers(0, 5))
def test_orthonormal_columns(seed, r, extra):
    q = random_orthonormal(r + extra, r, seed)
    np.testing.assert_allclose(q.T @ q, np.eye(r), atol=1e-10)
    np.testing.assert_array_equal(q, random_orthonormal(r + extra, r, seed))


def test_square_case_is_orthogonal():
    q = random_orthonormal(7, 7, 3)
    assert abs(abs(np.linalg.det(q)) - 1.0) < 1e-8


def test_different_seeds_give_different_spans():
    angles = [subspace_angles(random_orthonormal(10, 2, s), random_orthonormal(10, 2, s + 1000)).min()
              for s in range(100)]
    assert min(angles) > 1e-2


def test_random_orthonormal_errors():
    with pytest.raises(ValueError):
        random_orthonormal(3, 4)


# --- gen_lrmm ------------------------------------------------------------------


def test_noiseless_explicit_equals_signal(rng):
    c = np.stack([np.outer(rng.standard_normal(4), rng.standard_normal(3)) for _ in range(3)])
    labels = [0, 2, 1, 1, 0, 2, 2]
    x, gt = gen_lrmm(LrMMSpec(4, 3, 7, K=3, recipe="explicit", centers=c, labels=labels, noise_sd=0.0))
    np.testing.assert_array_equal(x.slices, signal_tensor(gt).slices)
    np.testing.assert_array_equal(gt.labels, labels)


def test_s1_1_separation_matches_reference():
    deltas = [separation_strength(gen_lrmm(LrMMSpec(50, 50, 200, recipe="s1_1", lam=2.5), s)[1].center_set)
              for s in range(20)]
    assert all(abs(d / 5.45 - 1) <= 0.10 for d in deltas)


def test_noise_variance():
    x, gt = gen_lrmm(LrMMSpec(50, 50, 200, recipe="s1_1", lam=2.5), 4)
    v = np.var(x.slices - signal_tensor(gt).slices)
    assert 0.95 <= v <= 1.05


def test_s2_1_shared_subspaces():
    _, gt = gen_lrmm(LrMMSpec(30, 20, 10, recipe="s2_1", delta_param=5.0), 2)
    (u1, _, v1t), (u2, _, v2t) = (np.linalg.svd(m) for m in gt.center_set.centers)
    assert subspace_angles(u1[:, :3], u2[:, :3]).max() < 1e-8
    assert subspace_angles(v1t[:3].T, v2t[:3].T).max() < 1e-8


@pytest.mark.parametrize("lam", [1.0, 2.5, 3.3])
def test_s2_2_singular_values(lam):
    _, gt = gen_lrmm(LrMMSpec(40, 30, 10, recipe="s2_2", lam=lam), 5)
    s1 = np.linalg.svd(gt.center_set.centers[0], compute_uv=False)
    s2 = np.linalg.svd(gt.center_set.centers[1], compute_uv=False)
    assert s1[2] == pytest.approx(lam, abs=1e-10)
    assert s2[0] == pytest.approx(0.36, abs=1e-10)


@given(seeds)
def test_gen_lrmm_deterministic(seed):
    spec = LrMMSpec(6, 5, 12, K=3, recipe="random_factors", sigmas=[[2.0], [1.0, 0.5], [3.0]])
    (a, ga), (b, gb) = gen_lrmm(spec, seed), gen_lrmm(spec, seed)
    assert a.slices.tobytes() == b.slices.tobytes()
    np.testing.assert_array_equal(ga.labels, gb.labels)


@given(seeds)
def test_noiseless_truth_is_a_lloyd_fixed_point(seed):
    spec = LrMMSpec(7, 6, 20, K=2, recipe="s1_1", lam=1.0, noise_sd=0.0)
    x, gt = gen_lrmm(spec, seed)
    res = lr_lloyd(x, gt.labels, gt.center_set.ranks, gt=gt)
    assert res.trace.error_per_iter[-1] == 0.0
    np.testing.assert_array_equal(res.labels, gt.labels)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(recipe="s1_1", delta_param=1.0),
        dict(recipe="s2_1"),
        dict(recipe="bogus"),
        dict(recipe="s2_2", K=3),
        dict(recipe="random_factors", sigmas=[[1.0, 2.0], [1.0]]),
        dict(recipe="random_factors", sigmas=[[1.0]]),
        dict(recipe="explicit"),
        dict(recipe="s1_1", noise_sd=-1.0),
        dict(recipe="s1_1", labels=[0, 1]),
    ],
)
def test_spec_errors(kwargs):
    with pytest.raises(ValueError):
        LrMMSpec(5, 5, 6, **kwargs)


# --- gen_mmsbm ------------------------------------------------------------------


def test_mmsbm_separation_matches_reference():
    deltas = [separation_strength(gen_mmsbm(MMSBMSpec(pbar=0.15), s)[1].center_set) for s in range(10)]
    assert abs(np.mean(deltas) / 2.15 - 1) <= 0.15


@given(seeds)
def test_mmsbm_symmetric_without_self_loops(seed):
    x, _ = gen_mmsbm(MMSBMSpec(K=3, d=12, pbar=0.5, n=8), seed)
    s = x.slices
    np.testing.assert_array_equal(s, np.transpose(s, (0, 2, 1)))
    assert np.all(np.diagonal(s, axis1=1, axis2=2) == 0)
    assert set(np.unique(s)) <= {0.0, 1.0}


def test_degenerate_probabilities_give_the_mean():
    mean = np.kron(np.eye(2), np.ones((3, 3)))
    a = sample_adjacency(mean, 1)
    np.testing.assert_array_equal(a, mean - np.eye(6))
    # one node block with pbar = 1: the last cluster connects every pair surely
    x, gt = gen_mmsbm(MMSBMSpec(K=2, d=6, pbar=1.0, n=10, n_blocks=1), 3)
    for i in np.flatnonzero(gt.labels == 1):
        np.testing.assert_array_equal(x.slice(i), np.ones((6, 6)) - np.eye(6))


def test_mmsbm_deterministic():
    a, _ = gen_mmsbm(MMSBMSpec(d=20, n=15), 9)
    b, _ = gen_mmsbm(MMSBMSpec(d=20, n=15), 9)
    assert a.slices.tobytes() == b.slices.tobytes()


@pytest.mark.parametrize("kwargs", [dict(pbar=0.0), dict(pbar=1.5), dict(K=1), dict(node_blocks="other"),
                                    dict(node_blocks="explicit")])
def test_mmsbm_spec_errors(kwargs):
    with pytest.raises(ValueError):
        MMSBMSpec(**kwargs)
