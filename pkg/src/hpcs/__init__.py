"""Hierarchical piecewise-constant super-regions.

Superpixels and supervoxels from MRF denoising in a quantized colour space,
size-bounded split & merge, n-th order hierarchies and benchmark metrics.
"""

__version__ = "0.1.0"

from .color import rgb_to_lab_normalized
from .gridgraph import RegionGraph, auto_gamma, compute_weights, lattice, lattice_2d, lattice_3d
from .hierarchy import (HierarchyResult, LevelConfig, ingest_label_map, run_hierarchy,
                        run_level, segment_image)
from .metrics import MetricReport, asa, boundary_recall, cue, evaluate
from .mrf import EnergyModel, ExpansionSolver, expansion_move, minimize, total_energy
from .quantize import Palette, QuantizeConfig, fit_palette, nearest_center
from .regions import Rag, SizeBounds, enforce_count, merge_small, split_components

__all__ = [
    "rgb_to_lab_normalized",
    "RegionGraph", "auto_gamma", "compute_weights", "lattice", "lattice_2d", "lattice_3d",
    "HierarchyResult", "LevelConfig", "ingest_label_map", "run_hierarchy", "run_level",
    "segment_image",
    "MetricReport", "asa", "boundary_recall", "cue", "evaluate",
    "EnergyModel", "ExpansionSolver", "expansion_move", "minimize", "total_energy",
    "Palette", "QuantizeConfig", "fit_palette", "nearest_center",
    "Rag", "SizeBounds", "enforce_count", "merge_small", "split_components",
]
