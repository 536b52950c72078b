"""Superpixel benchmark measures: boundary recall, CUE and ASA."""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage


@dataclass
class MetricReport:
    br: float
    cue: float
    asa: float
    region_count: int
    per_annotation: list = field(default_factory=list)

    def lines(self):
        return [f"br={self.br:.6f}", f"cue={self.cue:.6f}", f"asa={self.asa:.6f}",
                f"region_count={self.region_count}"]


def _check(seg, gt):
    seg, gt = np.asarray(seg), np.asarray(gt)
    if seg.shape != gt.shape:
        raise ValueError(f"shape mismatch: segmentation {seg.shape} vs ground truth {gt.shape}")
    return seg, gt


def boundary_mask(labels):
    """Pixels with a 4-neighbour carrying a different id (both sides marked)."""
    labels = np.asarray(labels)
    mask = np.zeros(labels.shape, dtype=bool)
    for axis in range(labels.ndim):
        a = [slice(None)] * labels.ndim
        b = [slice(None)] * labels.ndim
        a[axis] = slice(1, None)
        b[axis] = slice(None, -1)
        diff = labels[tuple(a)] != labels[tuple(b)]
        mask[tuple(a)] |= diff
        mask[tuple(b)] |= diff
    return mask


def boundary_recall(seg, gt, tol=2):
    """Fraction of ground-truth boundary pixels within Chebyshev distance ``tol``
    of a segmentation boundary pixel. A ground truth with no boundary scores 1.
    """
    seg, gt = _check(seg, gt)
    gt_b = boundary_mask(gt)
    n = int(gt_b.sum())
    if n == 0:
        return 1.0
    near = ndimage.maximum_filter(boundary_mask(seg), size=2 * int(tol) + 1, mode="constant")
    return float(np.count_nonzero(near & gt_b)) / n


def _overlap_max(seg, gt):
    """Per region, the pixel count of its largest ground-truth overlap."""
    _, s = np.unique(seg.ravel(), return_inverse=True)
    _, g = np.unique(gt.ravel(), return_inverse=True)
    ng = int(g.max()) + 1
    pair = s.astype(np.int64) * ng + g
    keys, counts = np.unique(pair, return_counts=True)
    regions = keys // ng
    best = np.zeros(int(s.max()) + 1, dtype=np.int64)
    np.maximum.at(best, regions, counts)
    return best


def asa(seg, gt):
    """Achievable segmentation accuracy: sum of best overlaps over total pixels."""
    seg, gt = _check(seg, gt)
    return float(_overlap_max(seg, gt).sum()) / seg.size


def cue(seg, gt):
    """Corrected under-segmentation error: pixels of each region outside its
    best-overlapping ground-truth segment, over total pixels."""
    seg, gt = _check(seg, gt)
    return float(seg.size - _overlap_max(seg, gt).sum()) / seg.size


def evaluate(seg, gts, tol=2):
    """Mean of each measure over one or several ground-truth annotations."""
    if isinstance(gts, np.ndarray) and gts.ndim == np.ndim(seg):
        gts = [gts]
    gts = list(gts)
    if not gts:
        raise ValueError("need at least one ground truth")
    seg = np.asarray(seg)
    per = []
    for gt in gts:
        per.append({"br": boundary_recall(seg, gt, tol), "cue": cue(seg, gt), "asa": asa(seg, gt)})
    mean = {k: float(np.mean([p[k] for p in per])) for k in ("br", "cue", "asa")}
    return MetricReport(region_count=len(np.unique(seg)), per_annotation=per, **mean)
