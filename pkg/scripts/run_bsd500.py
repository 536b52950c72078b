"""Coarsen 400-region superpixel maps of BSD500 test images and score them.

Expected layout under ROOT (convert the dataset's .mat/.jpg files beforehand):

    images/<id>.png            RGB image
    slic400/<id>.png|csv       input superpixel label map
    groundtruth/<id>/*.png|csv one label map per annotation

Writes per-image rows to ROOT/results.csv (or --out) and prints the means.

    python scripts/run_bsd500.py ROOT [--out results.csv] [--lambda 0.1]
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from hpcs import LevelConfig, evaluate, ingest_label_map, rgb_to_lab_normalized, run_level
from hpcs.imgio import read_image, read_label_map


def find_map(directory, stem):
    for suffix in (".png", ".csv"):
        p = directory / f"{stem}{suffix}"
        if p.exists():
            return p
    return None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("root")
    ap.add_argument("--out")
    ap.add_argument("--k", type=int, default=16)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.1)
    ap.add_argument("--no-size-weighting", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    root = Path(args.root)
    cfg = LevelConfig(k=args.k, lam=args.lam, size_weighted=not args.no_size_weighting)

    rows = []
    for img_path in sorted((root / "images").glob("*.png")):
        sp = find_map(root / "slic400", img_path.stem)
        gts = sorted((root / "groundtruth" / img_path.stem).glob("*"))
        if sp is None or not gts:
            continue
        rgb = read_image(img_path)
        lab = rgb_to_lab_normalized(rgb)
        prev = ingest_label_map(read_label_map(sp), lab)
        rag, _, _ = run_level(prev, cfg, lab.reshape(-1, 3), seed=args.seed)
        rep = evaluate(rag.pixel_map, [read_label_map(g) for g in gts])
        rows.append({"image": img_path.stem, "input_regions": prev.region_count,
                     "regions": rag.region_count, "br": rep.br, "cue": rep.cue, "asa": rep.asa})
        print(f"{img_path.stem}: {prev.region_count} -> {rag.region_count} regions, "
              f"BR {rep.br:.3f} CUE {rep.cue:.3f} ASA {rep.asa:.3f}")
    if not rows:
        raise SystemExit(f"no usable images under {root}")

    out = Path(args.out) if args.out else root / "results.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    means = {k: np.mean([r[k] for r in rows]) for k in ("regions", "br", "cue", "asa")}
    print(f"{len(rows)} images: regions {means['regions']:.1f}  BR {means['br']:.3f}  "
          f"CUE {means['cue']:.3f}  ASA {means['asa']:.3f}")


if __name__ == "__main__":
    main()
