import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hpcs.gridgraph import compute_weights, lattice_2d
from hpcs.mrf import (EnergyModel, ExpansionSolver, NotSubmodularError,
                      check_expansion_submodular, expansion_move, minimize, pairwise_table)


def naive_energy(x, centers, edges, weights, lam, labels, sizes=None):
    """Term-by-term loop over nodes and edges."""
    total = 0.0
    for p in range(len(x)):
        u = sum((x[p][j] - centers[labels[p]][j]) ** 2 for j in range(len(x[p])))
        total += u * (1 if sizes is None else sizes[p])
    for (p, q), w in zip(edges, weights):
        total += lam * w * sum(abs(a - b) for a, b in zip(centers[labels[p]], centers[labels[q]]))
    return total


def random_model(rng, h, w, k, lam=0.1, gamma=None):
    feats = rng.random((h, w, 3))
    g = lattice_2d(feats, 4)
    g = compute_weights(g, rng.uniform(0, 10) if gamma is None else gamma)
    centers = rng.random((k, 3))
    return EnergyModel(g.features, centers, g.edges, g.weights, lam=lam)


def test_unary_examples():
    m = EnergyModel(np.array([[0.0, 0, 0], [0.5, 0.5, 0.5]]), np.array([[1.0, 0, 0], [0, 0, 0]]),
                    np.array([[0, 1]]), np.array([1.0]))
    assert m.unary_cost(0, 0) == 1.0
    assert m.unary_cost(0, 1) == 0.0
    assert m.unary_cost(1, 1) == pytest.approx(0.75)


def test_pairwise_examples():
    t = pairwise_table(np.array([[0.0, 0, 0], [0.2, 0.3, 0.1]]))
    assert t[0, 0] == t[1, 1] == 0.0
    assert t[0, 1] == pytest.approx(0.6)
    rng = np.random.default_rng(0)
    t = pairwise_table(rng.random((10, 3)))
    np.testing.assert_array_equal(t, t.T)


def test_negative_lambda_rejected():
    with pytest.raises(ValueError):
        EnergyModel(np.zeros((1, 3)), np.zeros((1, 3)), np.zeros((0, 2)), np.zeros(0), lam=-0.1)


def test_total_energy_hand_sum():
    rng = np.random.default_rng(1)
    m = random_model(rng, 2, 2, 2)
    labels = np.array([0, 1, 1, 0])
    expected = naive_energy(m.features, m.centers, m.edges, m.weights, m.lam, labels)
    assert m.total_energy(labels) == pytest.approx(expected, rel=1e-13)


def test_constant_image_has_no_pairwise_energy():
    feats = np.full((3, 4, 3), 0.3)
    g = compute_weights(lattice_2d(feats, 4), 1.0)
    m = EnergyModel(g.features, np.array([[0.3, 0.3, 0.3], [0.9, 0.1, 0.2]]), g.edges, g.weights)
    labels = m.nearest_labels()
    assert np.all(labels == 0)
    assert m.total_energy(labels) == m.unary[np.arange(12), labels].sum()


def test_lambda_zero_gives_nearest_centers():
    rng = np.random.default_rng(2)
    m = random_model(rng, 5, 5, 4, lam=0.0)
    out = minimize(m)
    np.testing.assert_array_equal(out, np.argmin(m.unary, axis=1))


def test_single_label_is_unchanged():
    rng = np.random.default_rng(3)
    m = random_model(rng, 3, 3, 1)
    np.testing.assert_array_equal(minimize(m), np.zeros(9, dtype=int))


def test_matches_enumeration_2x3():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = random_model(rng, 2, 3, 2, lam=0.1)
        best = min(m.total_energy(np.array(l)) for l in itertools.product([0, 1], repeat=6))
        assert m.total_energy(minimize(m)) == pytest.approx(best, abs=1e-12)


def test_expansion_move_is_exact():
    rng = np.random.default_rng(5)
    for _ in range(15):
        m = random_model(rng, 2, 2, 3, lam=rng.choice([0.1, 1.0, 10.0]))
        labels = rng.integers(0, 3, size=4)
        for alpha in range(3):
            move = expansion_move(m, labels, alpha)
            assert set(np.flatnonzero(move != labels)) <= set(np.flatnonzero(move == alpha))
            best = min(m.total_energy(np.where(np.array(b, bool), alpha, labels))
                       for b in itertools.product([0, 1], repeat=4))
            assert m.total_energy(move) == pytest.approx(best, abs=1e-12)


def test_expansion_noop_when_all_alpha():
    rng = np.random.default_rng(6)
    m = random_model(rng, 3, 3, 4)
    labels = np.full(9, 2)
    np.testing.assert_array_equal(expansion_move(m, labels, 2), labels)


def test_single_node_switches():
    m = EnergyModel(np.array([[0.9, 0.9, 0.9]]), np.array([[0.0, 0, 0], [1.0, 1, 1]]),
                    np.zeros((0, 2)), np.zeros(0))
    assert expansion_move(m, np.array([0]), 1).tolist() == [1]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.sampled_from([0.05, 0.1, 1.0]))
def test_each_move_descends(seed, k, lam):
    rng = np.random.default_rng(seed)
    m = random_model(rng, 6, 6, k, lam=lam)
    labels = rng.integers(0, k, size=36)
    e = m.total_energy(labels)
    for alpha in range(k):
        labels = expansion_move(m, labels, alpha)
        e2 = m.total_energy(labels)
        assert e2 <= e
        e = e2


def test_minimize_history_is_monotone():
    rng = np.random.default_rng(7)
    m = random_model(rng, 10, 10, 6, lam=1.0)
    init = rng.integers(0, 6, size=100)
    labels, energy, history = ExpansionSolver(m).minimize(init)
    assert history[0] == m.total_energy(init)
    assert all(b < a for a, b in zip(history, history[1:]))
    assert energy == m.total_energy(labels) == history[-1]


def test_size_weighting_toggle():
    x = np.array([[0.1, 0.1, 0.1], [0.8, 0.8, 0.8]])
    c = np.array([[0.0, 0, 0], [1.0, 1, 1]])
    sizes = np.array([5, 2])
    on = EnergyModel(x, c, np.array([[0, 1]]), np.array([1.0]), sizes=sizes)
    off = EnergyModel(x, c, np.array([[0, 1]]), np.array([1.0]), sizes=sizes, size_weighted=False)
    labels = np.array([0, 1])
    assert on.total_energy(labels) == pytest.approx(
        naive_energy(x, c, [[0, 1]], [1.0], 0.1, labels, sizes))
    assert off.total_energy(labels) == pytest.approx(
        naive_energy(x, c, [[0, 1]], [1.0], 0.1, labels))


def gray_denoise_energy(img, levels, lam, weights_map, labels_img):
    """Direct gray-scale denoising energy over a 4-connected image."""
    h, w = img.shape
    total = 0.0
    for y in range(h):
        for x in range(w):
            total += (img[y, x] - levels[labels_img[y, x]]) ** 2
    for (p, q), wt in weights_map.items():
        (y0, x0), (y1, x1) = p, q
        total += lam * wt * abs(levels[labels_img[y0, x0]] - levels[labels_img[y1, x1]])
    return total


def test_gray_scale_recovery():
    rng = np.random.default_rng(8)
    levels = np.arange(256) / 255.0
    img = rng.integers(0, 256, size=(4, 5)) / 255.0
    g = compute_weights(lattice_2d(img[..., None], 4), 3.0)
    m = EnergyModel(g.features, levels, g.edges, g.weights, lam=0.1)
    labels = rng.integers(0, 256, size=20)
    wmap = {(divmod(int(p), 5), divmod(int(q), 5)): wt for (p, q), wt in zip(g.edges, g.weights)}
    ref = gray_denoise_energy(img, levels, 0.1, wmap, labels.reshape(4, 5))
    assert m.total_energy(labels) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("k", [2, 5, 16, 64])
def test_pairwise_table_is_metric(k):
    rng = np.random.default_rng(k)
    t = pairwise_table(rng.random((k, 3)))
    for a, b in itertools.product(range(k), repeat=2):
        assert t[a, a] + t[b, b] <= t[a, b] + t[b, a]
    check_expansion_submodular(t)


def test_non_metric_table_rejected():
    c = np.array([[0.0], [1.0], [2.0]])
    sq = (c - c.T) ** 2        # squared distance breaks the triangle inequality
    with pytest.raises(NotSubmodularError):
        check_expansion_submodular(sq)
    with pytest.raises(NotSubmodularError):
        check_expansion_submodular(np.ones((2, 2)))
