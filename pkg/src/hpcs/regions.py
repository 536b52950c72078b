"""Super-regions from a piecewise-constant labeling: split, RAG, merge."""

from collections import deque
from dataclasses import dataclass
import heapq
import math

import numpy as np

from .mrf import pairwise_table


@dataclass(frozen=True)
class SizeBounds:
    """Region size limits in base pixels; ``s_min`` is compared with strict ``<``."""

    s_min: float = 0.0
    s_max: float = math.inf
    n_target: int | None = None

    def __post_init__(self):
        if self.s_min < 0 or self.s_min >= self.s_max:
            raise ValueError(f"need 0 <= s_min < s_max, got {self.s_min}, {self.s_max}")

    @classmethod
    def from_target(cls, total, n):
        """``s = S / N``, ``s_min = s / 5``, ``s_max = 2 s``."""
        if n < 1:
            raise ValueError("target region count must be >= 1")
        s = total / n
        return cls(s_min=s / 5.0, s_max=2.0 * s, n_target=n)

    @classmethod
    def unconstrained(cls, total):
        return cls(s_min=0.0, s_max=float(total))

    def cap(self):
        """Integer component size limit used by the split."""
        return max(1, int(math.floor(self.s_max))) if math.isfinite(self.s_max) else None


@dataclass
class Rag:
    """Region adjacency graph over a base pixel lattice.

    Region ids are dense and numbered by first occurrence in row-major
    ``pixel_map``. ``labels`` holds the palette index of each region, or -1
    when the regions did not come from a labeling (ingested maps).
    """

    pixel_map: np.ndarray     # base-lattice shape, region id per pixel
    labels: np.ndarray        # (R,)
    sizes: np.ndarray         # (R,) pixel counts
    means: np.ndarray         # (R, d) mean base feature
    edges: np.ndarray         # (E, 2) sorted, p < q

    @property
    def region_count(self):
        return len(self.sizes)

    @property
    def total_size(self):
        return int(self.pixel_map.size)


def canonical_ids(pixel_map):
    """Relabel ids densely in order of first appearance; returns ``(map, old_ids)``."""
    flat = np.asarray(pixel_map).ravel()
    uniq, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[order] = np.arange(len(uniq))
    return rank[inverse].reshape(np.shape(pixel_map)), uniq[order]


def build_rag(pixel_map, features, node_edges, node_ids=None, labels=None):
    """Assemble a :class:`Rag` from a region id per base pixel.

    ``node_edges`` are edges of the graph the regions were grown on and
    ``node_ids[v]`` is the region id (in ``pixel_map``'s numbering) of node
    ``v``; it defaults to ``pixel_map`` itself for pixel graphs. ``labels``
    are indexed by the same pre-renumbering ids.
    """
    pmap, old = canonical_ids(pixel_map)
    flat = pmap.ravel()
    r = len(old)
    feats = np.asarray(features, dtype=np.float64).reshape(flat.size, -1)
    sizes = np.bincount(flat, minlength=r)
    means = np.stack([np.bincount(flat, weights=feats[:, j], minlength=r)
                      for j in range(feats.shape[1])], axis=1) / sizes[:, None]

    node_ids = np.asarray(pixel_map if node_ids is None else node_ids).ravel()
    rank = np.full(int(old.max()) + 1, -1, dtype=np.int64)
    rank[old] = np.arange(r)
    region_of = rank[node_ids]
    e = np.asarray(node_edges, dtype=np.int64).reshape(-1, 2)
    a, b = region_of[e[:, 0]], region_of[e[:, 1]]
    keep = a != b
    pairs = np.stack([np.minimum(a, b)[keep], np.maximum(a, b)[keep]], axis=1)
    edges = np.unique(pairs, axis=0) if len(pairs) else np.zeros((0, 2), dtype=np.int64)

    if labels is None:
        lab = np.full(r, -1, dtype=np.int64)
    else:
        lab = np.asarray(labels, dtype=np.int64)[old]
    return Rag(pmap, lab, sizes, means, edges.astype(np.int64))


def split_groups(graph, labels, s_max=None):
    """Size-capped same-label flood fill over ``graph``; returns a group id per node.

    Seeds are taken in ascending node order and flooding is FIFO with
    neighbours visited in ascending order. A group is closed once its total
    size reaches ``s_max``; a neighbour that would push it past the cap is
    left for a later seed.
    """
    n = graph.node_count
    labels = np.asarray(labels)
    indptr, indices = graph.csr()
    indptr, indices = indptr.tolist(), indices.tolist()
    lab = labels.tolist()
    size = np.asarray(graph.sizes).tolist()
    cap = math.inf if s_max is None else s_max
    group = [-1] * n
    g = 0
    for seed in range(n):
        if group[seed] >= 0:
            continue
        group[seed] = g
        total = size[seed]
        queue = deque([seed])
        lbl = lab[seed]
        while queue and total < cap:
            v = queue.popleft()
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if group[u] >= 0 or lab[u] != lbl or total + size[u] > cap:
                    continue
                group[u] = g
                total += size[u]
                queue.append(u)
                if total >= cap:
                    break
        g += 1
    return np.asarray(group, dtype=np.int64)


def split_components(graph, labels, s_max=None, base=None, base_features=None):
    """Split a labeling into size-capped connected components.

    For a pixel/voxel graph ``base`` and ``base_features`` default to the
    graph itself. For a region graph pass the pixel -> node map and the
    pixel features so the result stays anchored to the pixel lattice.
    """
    labels = np.asarray(labels)
    group = split_groups(graph, labels, s_max)
    if base is None:
        pixel_groups = group.reshape(graph.shape)
        feats = graph.features
    else:
        pixel_groups = group[base]
        feats = base_features
    group_labels = np.empty(group.max() + 1 if len(group) else 0, dtype=np.int64)
    group_labels[group] = labels
    return build_rag(pixel_groups, feats, graph.edges, node_ids=group, labels=group_labels)


def merge_small(rag, palette, s_min, features):
    """Merge every region smaller than ``s_min`` into its most similar neighbour.

    Edges are processed in ascending ``||theta_fp - theta_fq||_1`` order
    (ties by smaller id pair). Popping an edge with an undersized endpoint
    merges the pair: the larger region survives (lower id on ties), keeps
    its label, absorbs the size, and inherits the absorbed region's edges.
    Stale heap entries are skipped. ``features`` are the base pixel
    features used to recompute region means.
    """
    if s_min <= 0 or rag.region_count <= 1 or not np.any(rag.sizes < s_min):
        return rag
    centers = palette.centers if hasattr(palette, "centers") else np.asarray(palette)
    table = pairwise_table(centers)
    labels = rag.labels.tolist()
    sizes = rag.sizes.astype(np.int64).tolist()
    r = rag.region_count
    nbrs = [set() for _ in range(r)]
    for p, q in rag.edges.tolist():
        nbrs[p].add(q)
        nbrs[q].add(p)
    owner = list(range(r))
    heap = [(float(table[labels[p], labels[q]]), p, q) for p, q in rag.edges.tolist()]
    heapq.heapify(heap)
    alive = [True] * r
    while heap:
        _, p, q = heapq.heappop(heap)
        if not (alive[p] and alive[q]) or q not in nbrs[p]:
            continue
        if not (sizes[p] < s_min or sizes[q] < s_min):
            continue
        keep, gone = (p, q) if sizes[p] >= sizes[q] else (q, p)
        sizes[keep] += sizes[gone]
        alive[gone] = False
        owner[gone] = keep
        nbrs[keep].discard(gone)
        for w in nbrs[gone]:
            if w == keep:
                continue
            nbrs[w].discard(gone)
            if w not in nbrs[keep]:
                nbrs[keep].add(w)
                nbrs[w].add(keep)
                a, b = min(keep, w), max(keep, w)
                heapq.heappush(heap, (float(table[labels[a], labels[b]]), a, b))
        nbrs[gone] = set()

    # resolve merge chains to surviving ids
    root = np.arange(r)
    for i in range(r):
        j = i
        while owner[j] != j:
            j = owner[j]
        root[i] = j
    return build_rag(root[rag.pixel_map], features, rag.edges, node_ids=root, labels=labels)


def enforce_count(graph, labels, bounds, palette, base=None, base_features=None):
    """Split at ``bounds.s_max`` then merge below ``bounds.s_min``."""
    rag = split_components(graph, labels, bounds.cap(), base=base, base_features=base_features)
    feats = graph.features if base is None else base_features
    return merge_small(rag, palette, bounds.s_min, feats)


def connected_components(graph, labels):
    """Plain same-label connected components (no size limits)."""
    return split_components(graph, labels, None)
