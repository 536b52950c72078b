"""Stage timings of one first-layer run on a BSD-sized (321 x 481) image.

    python scripts/benchmark_speed.py [image.png] [--n 200] [--repeats 3]
"""

import argparse
import time

import numpy as np

from hpcs import gridgraph
from hpcs.color import rgb_to_lab_normalized
from hpcs.imgio import read_image
from hpcs.mrf import EnergyModel, ExpansionSolver
from hpcs.quantize import QuantizeConfig, fit_palette
from hpcs.regions import SizeBounds, enforce_count


def default_image():
    try:
        from skimage import data
        return data.astronaut()[:321, :481].copy()
    except ImportError:
        return np.random.default_rng(0).integers(0, 256, (321, 481, 3), dtype=np.uint8)


def run_once(rgb, n, seed):
    t = {}
    t0 = time.perf_counter()
    lab = rgb_to_lab_normalized(rgb)
    t["lab"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    g = gridgraph.lattice(lab, 4)
    g = gridgraph.compute_weights(g, gridgraph.auto_gamma(g))
    t["graph"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    palette = fit_palette(g.features, QuantizeConfig(seed=[seed, 1]))
    t["kmeans"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    model = EnergyModel.from_graph(g, palette, lam=0.1)
    labels, _, history = ExpansionSolver(model).minimize()
    t["expansion"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rag = enforce_count(g, labels, SizeBounds.from_target(g.node_count, n), palette)
    t["split_merge"] = time.perf_counter() - t0
    return t, rag.region_count, len(history) - 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("image", nargs="?")
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    rgb = read_image(args.image) if args.image else default_image()

    # first call compiles the max-flow kernel
    run_once(rgb[:16, :16], 4, 0)
    rows = [run_once(rgb, args.n, seed) for seed in range(args.repeats)]
    stages = list(rows[0][0])
    print(f"image {rgb.shape[1]}x{rgb.shape[0]}, N={args.n}, {args.repeats} runs")
    for s in stages:
        vals = [r[0][s] for r in rows]
        print(f"  {s:<12} {np.mean(vals):7.3f} s")
    totals = [sum(r[0].values()) for r in rows]
    post = np.mean([r[0]["split_merge"] / sum(r[0].values()) for r in rows])
    print(f"  {'total':<12} {np.mean(totals):7.3f} s  (split & merge {100 * post:.1f}%)")
    print(f"  regions {[r[1] for r in rows]}, accepted expansion moves {[r[2] for r in rows]}")


if __name__ == "__main__":
    main()
