"""Pixel/voxel lattices and region graphs with contrast-sensitive weights."""

from dataclasses import dataclass, replace
import itertools

import numpy as np


@dataclass(frozen=True)
class RegionGraph:
    """Nodes with features and sizes, undirected edges stored as ``p < q``.

    ``shape`` is the lattice shape for pixel/voxel graphs and ``None`` for
    graphs whose nodes are regions.
    """

    features: np.ndarray   # (n, d)
    sizes: np.ndarray      # (n,) base-pixel counts
    edges: np.ndarray      # (E, 2) int64, sorted, p < q
    weights: np.ndarray    # (E,)
    shape: tuple | None = None

    @property
    def node_count(self):
        return len(self.features)

    @property
    def edge_count(self):
        return len(self.edges)

    def with_weights(self, weights):
        return replace(self, weights=np.asarray(weights, dtype=np.float64))

    def csr(self):
        """Symmetric adjacency as ``(indptr, indices)``, neighbours ascending."""
        n = self.node_count
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((dst, src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return indptr, dst[order]


STENCILS = {
    4: [(0, 1), (1, 0)],
    8: [(0, 1), (1, -1), (1, 0), (1, 1)],
}


def half_stencil_3d(connectivity):
    """Lexicographically positive offsets of the 6/18/26 neighbourhoods."""
    max_nonzero = {6: 1, 18: 2, 26: 3}.get(connectivity)
    if max_nonzero is None:
        raise ValueError(f"3D connectivity must be 6, 18 or 26, got {connectivity}")
    out = []
    for off in itertools.product((-1, 0, 1), repeat=3):
        nz = sum(o != 0 for o in off)
        if 0 < nz <= max_nonzero and off > (0, 0, 0):
            out.append(off)
    return out


def lattice_edges(shape, offsets):
    """All ``(p, q)`` pairs of row-major indices joined by one of ``offsets``."""
    shape = tuple(shape)
    idx = np.arange(int(np.prod(shape))).reshape(shape)
    chunks = []
    for off in offsets:
        src = tuple(slice(max(0, -o), s - max(0, o)) for o, s in zip(off, shape))
        dst = tuple(slice(max(0, o), s - max(0, -o)) for o, s in zip(off, shape))
        a, b = idx[src].ravel(), idx[dst].ravel()
        if a.size:
            chunks.append(np.stack([a, b], axis=1))
    if not chunks:
        return np.zeros((0, 2), dtype=np.int64)
    edges = np.concatenate(chunks).astype(np.int64)
    return edges[np.lexsort((edges[:, 1], edges[:, 0]))]


def _from_lattice(features, spatial_shape, offsets):
    n = int(np.prod(spatial_shape))
    feats = np.asarray(features, dtype=np.float64).reshape(n, -1)
    edges = lattice_edges(spatial_shape, offsets)
    return RegionGraph(
        features=feats,
        sizes=np.ones(n, dtype=np.int64),
        edges=edges,
        weights=np.ones(len(edges)),
        shape=tuple(spatial_shape),
    )


def lattice_2d(img, connectivity=4):
    """One node per pixel of an ``(H, W[, d])`` image, row-major."""
    img = np.asarray(img)
    if connectivity not in STENCILS:
        raise ValueError(f"2D connectivity must be 4 or 8, got {connectivity}")
    if img.ndim == 2:
        img = img[..., None]
    if img.shape[0] == 0 or img.shape[1] == 0:
        raise ValueError("empty image")
    return _from_lattice(img, img.shape[:2], STENCILS[connectivity])


def lattice_3d(vol, connectivity=6):
    """One node per voxel of a ``(D, H, W, d)`` volume, slice-major."""
    vol = np.asarray(vol)
    if vol.ndim != 4 or vol.shape[0] < 1:
        raise ValueError(f"expected a (D, H, W, d) volume, got shape {vol.shape}")
    return _from_lattice(vol, vol.shape[:3], half_stencil_3d(connectivity))


def lattice(features, connectivity=None):
    """Dispatch on dimensionality: ``(H, W, d)`` -> 2D, ``(D, H, W, d)`` -> 3D."""
    features = np.asarray(features)
    if features.ndim == 3:
        return lattice_2d(features, connectivity or 4)
    if features.ndim == 4:
        return lattice_3d(features, connectivity or 6)
    raise ValueError(f"cannot build a lattice over shape {features.shape}")


def squared_gaps(g):
    diff = g.features[g.edges[:, 0]] - g.features[g.edges[:, 1]]
    return np.einsum("ed,ed->e", diff, diff)


def compute_weights(g, gamma):
    """Return ``g`` with ``w_pq = exp(-gamma * ||x_p - x_q||^2)`` on every edge."""
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    return g.with_weights(np.exp(-gamma * squared_gaps(g)))


def auto_gamma(g):
    """Contrast-adaptive gamma, ``1 / (2 * mean squared edge gap)``; 0 for flat input."""
    if g.edge_count == 0:
        raise ValueError("auto_gamma needs at least one edge")
    mean = float(np.mean(squared_gaps(g)))
    if mean == 0.0:
        return 0.0
    return 1.0 / (2.0 * mean)
