"""Feature palette via sampled k-means with k-means++ seeding."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuantizeConfig:
    k: int = 16
    samples: int = 10000
    restarts: int = 10
    seed: int | None = 0
    max_iter: int = 300

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.samples < self.k:
            raise ValueError("samples must be >= k")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class Palette:
    centers: np.ndarray          # (K, d)
    inertia: float
    requested_k: int | None = None

    @property
    def k(self):
        return len(self.centers)

    @property
    def reduced(self):
        return self.requested_k is not None and self.requested_k != self.k


def squared_distances(x, centers):
    """(n, K) squared Euclidean distances."""
    out = np.zeros((len(x), len(centers)))
    for j in range(x.shape[1]):
        out += (x[:, j, None] - centers[None, :, j]) ** 2
    return out


def assign(x, centers):
    """Nearest center index per row; ties go to the lowest index."""
    return np.argmin(squared_distances(x, centers), axis=1)


def nearest_center(palette, x):
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    return int(assign(x, palette.centers)[0])


def kmeans_plusplus(x, k, rng):
    n = len(x)
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = np.sum((x - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total <= 0:
            # fewer distinct points than k; caller guards against this
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=closest / total)
        centers[i] = x[idx]
        closest = np.minimum(closest, np.sum((x - centers[i]) ** 2, axis=1))
    return centers


def lloyd(x, centers, max_iter=300):
    """Plain Lloyd iterations until assignments stop changing.

    An emptied cluster is re-seeded at the sample lying farthest from its
    current center. Returns ``(centers, labels, inertia, n_iter)``.
    """
    centers = centers.copy()
    k = len(centers)
    labels = None
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = squared_distances(x, centers)
        new_labels = np.argmin(d2, axis=1)
        counts = np.bincount(new_labels, minlength=k)
        if np.any(counts == 0):
            far = d2[np.arange(len(x)), new_labels]
            for j in np.flatnonzero(counts == 0):
                idx = int(np.argmax(far))
                new_labels[idx] = j
                far[idx] = -1.0
            counts = np.bincount(new_labels, minlength=k)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for dim in range(x.shape[1]):
            centers[:, dim] = np.bincount(labels, weights=x[:, dim], minlength=k) / counts
    d2 = squared_distances(x, centers)
    inertia = float(np.sum(d2[np.arange(len(x)), labels]))
    return centers, labels, inertia, n_iter


def fit_palette(features, cfg=None):
    """Fit ``cfg.k`` quantized features to ``features`` (any shape ``(..., d)``).

    A single sample of ``cfg.samples`` features is drawn without replacement
    (or all of them if there are fewer) and k-means is run ``cfg.restarts``
    times from k-means++ seeds; the run with the lowest sample inertia wins.
    If the sample holds fewer than ``k`` distinct vectors, ``k`` shrinks to
    that count and the palette remembers the requested value.
    """
    cfg = cfg or QuantizeConfig()
    x = np.asarray(features, dtype=np.float64)
    x = x.reshape(-1, x.shape[-1]) if x.ndim > 1 else x.reshape(-1, 1)
    if len(x) == 0:
        raise ValueError("no features")

    rng = np.random.default_rng(cfg.seed)
    if len(x) > cfg.samples:
        x = x[np.sort(rng.choice(len(x), size=cfg.samples, replace=False))]

    distinct = np.unique(x, axis=0)
    k = min(cfg.k, len(distinct))
    if k == len(distinct):
        # exact clustering: one center per distinct vector
        centers = distinct
        inertia = 0.0
    else:
        best = None
        for _ in range(cfg.restarts):
            run = lloyd(x, kmeans_plusplus(x, k, rng), cfg.max_iter)
            if best is None or run[2] < best[2]:
                best = run
        centers, inertia = best[0], best[2]
    return Palette(centers, inertia, requested_k=cfg.k)
