"""n-th order super-regions: each layer's RAG feeds the next layer."""

from dataclasses import dataclass, field, asdict
import logging
import time

import numpy as np

from . import gridgraph
from .gridgraph import RegionGraph
from .mrf import EnergyModel, ExpansionSolver
from .quantize import QuantizeConfig, fit_palette
from .regions import SizeBounds, build_rag, enforce_count, merge_small, split_groups

log = logging.getLogger(__name__)


@dataclass
class LevelConfig:
    """Parameters of one layer.

    ``n`` sets the size bounds from a target region count; ``bounds`` gives
    them explicitly; with neither the layer runs unconstrained
    (``s_max = S``, ``s_min = 0``). ``gamma=None`` selects the contrast
    adaptive value.
    """

    k: int = 16
    lam: float = 0.1
    n: int | None = None
    bounds: SizeBounds | None = None
    gamma: float | None = None
    connectivity: int | None = None
    samples: int = 10000
    restarts: int = 10
    max_cycles: int = 5
    size_weighted: bool = True

    def resolve_bounds(self, total):
        if self.bounds is not None:
            return self.bounds
        if self.n is not None:
            return SizeBounds.from_target(total, self.n)
        return SizeBounds.unconstrained(total)


@dataclass
class LevelInfo:
    """What a layer actually ran with."""

    level: int
    k: int
    lam: float
    gamma: float
    s_min: float
    s_max: float
    region_count: int
    energy: float
    seconds: float
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        d = asdict(self)
        d.update(d.pop("extra"))
        return d


@dataclass
class HierarchyResult:
    levels: list            # Rag per level, level 1 first
    provenance: list        # LevelInfo per level

    def __len__(self):
        return len(self.levels)


def level_seed(seed, level):
    return None if seed is None else [int(seed), int(level)]


def _optimize(graph, cfg, seed, level):
    """Quantize, weight and minimize on ``graph``; shared by all layers."""
    qcfg = QuantizeConfig(k=cfg.k, samples=max(cfg.samples, cfg.k),
                          restarts=cfg.restarts, seed=level_seed(seed, level))
    palette = fit_palette(graph.features, qcfg)
    if cfg.gamma is None:
        gamma = gridgraph.auto_gamma(graph) if graph.edge_count else 0.0
    else:
        gamma = float(cfg.gamma)
    graph = gridgraph.compute_weights(graph, gamma)
    model = EnergyModel.from_graph(graph, palette, lam=cfg.lam, size_weighted=cfg.size_weighted)
    labels, energy, _ = ExpansionSolver(model).minimize(max_cycles=cfg.max_cycles)
    return graph, palette, labels, energy, gamma


def segment_image(lab, cfg=None, seed=0, level=1):
    """First layer: pixels (or voxels) to superpixels.

    ``lab`` is an ``(H, W, d)`` image or ``(D, H, W, d)`` volume of
    normalized features. Returns ``(rag, info, palette)``.
    """
    cfg = cfg or LevelConfig()
    t0 = time.perf_counter()
    lab = np.asarray(lab)
    connectivity = cfg.connectivity or (4 if lab.ndim == 3 else 6)
    graph = gridgraph.lattice(lab, connectivity)
    graph, palette, labels, energy, gamma = _optimize(graph, cfg, seed, level)
    bounds = cfg.resolve_bounds(graph.node_count)
    rag = enforce_count(graph, labels, bounds, palette)
    info = LevelInfo(level, palette.k, cfg.lam, gamma, bounds.s_min, bounds.s_max,
                     rag.region_count, energy, time.perf_counter() - t0,
                     extra={"connectivity": connectivity})
    return rag, info, palette


def region_graph(rag):
    """Region graph of a RAG: nodes are regions with their mean feature and size."""
    return RegionGraph(
        features=rag.means,
        sizes=rag.sizes,
        edges=rag.edges,
        weights=np.ones(len(rag.edges)),
    )


def run_level(prev, cfg, features, prev_k=None, seed=0, level=2):
    """One layer on top of ``prev``: nodes are its regions, features their means.

    ``features`` are the base pixel features (used for the output means).
    Groups of previous regions are formed by the same split & merge as the
    first layer, with sizes counted in base pixels.
    """
    if prev_k is not None and cfg.k > prev_k:
        raise ValueError(f"level {level}: k={cfg.k} exceeds previous level k={prev_k}")
    t0 = time.perf_counter()
    total = prev.total_size
    bounds = cfg.resolve_bounds(total)
    if prev.region_count == 1:
        rag = build_rag(prev.pixel_map, features, prev.edges,
                        node_ids=np.zeros(1, dtype=np.int64), labels=[0])
        info = LevelInfo(level, 1, cfg.lam, 0.0, bounds.s_min, bounds.s_max, 1, 0.0,
                         time.perf_counter() - t0, extra={"connectivity": "region-adjacency"})
        return rag, info, None

    graph = region_graph(prev)
    graph, palette, labels, energy, gamma = _optimize(graph, cfg, seed, level)

    group = split_groups(graph, labels, bounds.cap())
    group_labels = np.empty(group.max() + 1, dtype=np.int64)
    group_labels[group] = labels
    split = build_rag(group[prev.pixel_map], features, graph.edges,
                      node_ids=group, labels=group_labels)
    rag = merge_small(split, palette, bounds.s_min, features)
    info = LevelInfo(level, palette.k, cfg.lam, gamma, bounds.s_min, bounds.s_max,
                     rag.region_count, energy, time.perf_counter() - t0,
                     extra={"connectivity": "region-adjacency"})
    return rag, info, palette


def run_hierarchy(lab, configs, seed=0):
    """Run ``len(configs)`` layers; layer 1 on pixels, the rest on region graphs."""
    if not configs:
        raise ValueError("need at least one level")
    lab = np.asarray(lab, dtype=np.float64)
    features = lab.reshape(-1, lab.shape[-1])
    rag, info, palette = segment_image(lab, configs[0], seed=seed, level=1)
    levels, provenance = [rag], [info]
    prev_k = configs[0].k
    for i, cfg in enumerate(configs[1:], start=2):
        rag, info, palette = run_level(levels[-1], cfg, features, prev_k=prev_k,
                                       seed=seed, level=i)
        log.info("level %d: %d regions", i, rag.region_count)
        levels.append(rag)
        provenance.append(info)
        prev_k = cfg.k
    return HierarchyResult(levels, provenance)


def is_refinement(fine, coarse):
    """True when every region of ``fine`` lies inside one region of ``coarse``."""
    fine = np.asarray(fine).ravel()
    coarse = np.asarray(coarse).ravel()
    target = np.full(fine.max() + 1, -1, dtype=np.int64)
    target[fine] = coarse
    return bool(np.array_equal(target[fine], coarse))


def ingest_label_map(pixel_labels, lab, connectivity=None):
    """RAG of a foreign segmentation (e.g. SLIC) with per-region mean features.

    Ids sharing a value but split into several connected pieces become
    separate regions; ids are renumbered densely. Region labels are -1 until
    a layer assigns palette indices.
    """
    pixel_labels = np.asarray(pixel_labels)
    lab = np.asarray(lab, dtype=np.float64)
    if pixel_labels.shape != lab.shape[:-1]:
        raise ValueError(f"label map shape {pixel_labels.shape} does not match image "
                         f"shape {lab.shape[:-1]}")
    graph = gridgraph.lattice(lab, connectivity)
    _, dense = np.unique(pixel_labels, return_inverse=True)
    group = split_groups(graph, dense.ravel(), None)
    return build_rag(group.reshape(pixel_labels.shape), graph.features, graph.edges)
