"""Command-line front end: segment, hierarchy, coarsen, eval.

Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 internal
invariant violation.
"""

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .color import rgb_to_lab_normalized
from .hierarchy import LevelConfig, ingest_label_map, is_refinement, run_hierarchy, run_level
from .imgio import (ImageFormatError, atomic_write_text, read_image, read_input,
                    read_label_map, write_boundary_map, write_label_map, write_overlay,
                    write_volume_labels)
from .metrics import evaluate

log = logging.getLogger("hpcs")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 1, 2, 3
SEED_ENV = "HPCS_SEED"


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _gamma(text):
    if text == "auto":
        return None
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError("gamma must be >= 0 or 'auto'")
    return value


def _level_triple(text):
    """``k,lambda,n`` with ``n`` empty or ``-`` for an unconstrained layer."""
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected k,lambda,n; got {text!r}")
    k, lam, n = parts
    try:
        return int(k), float(lam), (None if n.strip() in ("", "-", "none") else int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_model_args(p, with_n=True):
    if with_n:
        p.add_argument("--n", type=int, help="target number of regions")
    p.add_argument("--k", type=int, default=16, help="palette size (default 16)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.1,
                   help="smoothness weight (default 0.1)")
    p.add_argument("--gamma", type=_gamma, default=None,
                   help="edge contrast factor or 'auto' (default auto)")
    p.add_argument("--connectivity", type=int, choices=[4, 8, 6, 18, 26])
    p.add_argument("--samples", type=int, default=10000, help="k-means sample size M")
    p.add_argument("--restarts", type=int, default=10, help="k-means++ restarts")
    p.add_argument("--max-cycles", type=int, default=5, help="alpha-expansion sweeps")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    p.add_argument("--no-size-constraint", action="store_true",
                   help="plain connected components (s_max = S, s_min = 0)")
    p.add_argument("--no-size-weighting", action="store_true",
                   help="do not scale region unaries by region size")


def build_parser():
    parser = _Parser(prog="hpcs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("segment", help="superpixels / supervoxels from an image or slice directory")
    p.add_argument("input")
    p.add_argument("-o", "--out", required=True, help="label map (.png/.csv) or directory for volumes")
    p.add_argument("--overlay", help="PNG with boundaries drawn over the image")
    p.add_argument("--boundary-map", help="black/white boundary PNG")
    _add_model_args(p)

    p = sub.add_parser("hierarchy", help="n-th order super-regions")
    p.add_argument("input")
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--levels", type=_level_triple, action="append",
                   help="per-level k,lambda,n (repeat; n may be '-' for unconstrained)")
    p.add_argument("--num-levels", type=int, default=2,
                   help="levels when --levels is absent (level 1 uses --n)")
    p.add_argument("--format", choices=["png", "csv"], default="png")
    _add_model_args(p)

    p = sub.add_parser("coarsen", help="one layer over a foreign segmentation")
    p.add_argument("labels", help="input label map (.png/.csv)")
    p.add_argument("image")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--level", type=int, default=2, help="layer index used for seeding")
    p.add_argument("--prev-k", type=int, default=None,
                   help="palette size of the layer that produced the input map")
    p.add_argument("--overlay")
    _add_model_args(p)

    p = sub.add_parser("eval", help="BR / CUE / ASA against ground truth maps")
    p.add_argument("seg")
    p.add_argument("gt", nargs="+")
    p.add_argument("--tol", type=int, default=2)
    p.add_argument("--csv", help="append one CSV row of results here")
    return parser


def _level_config(args, n=None, k=None, lam=None, constrained=True):
    if args.samples < 1 or args.restarts < 1 or args.max_cycles < 1:
        raise UsageError("--samples, --restarts and --max-cycles must be positive")
    k = args.k if k is None else k
    if k < 1:
        raise UsageError("--k must be >= 1")
    if n is not None and n < 1:
        raise UsageError("--n must be >= 1")
    if args.no_size_constraint and n is not None and constrained:
        raise UsageError("--n and --no-size-constraint are mutually exclusive")
    return LevelConfig(
        k=k,
        lam=args.lam if lam is None else lam,
        n=None if args.no_size_constraint else n,
        gamma=args.gamma,
        connectivity=args.connectivity,
        samples=max(args.samples, k),
        restarts=args.restarts,
        max_cycles=args.max_cycles,
        size_weighted=not args.no_size_weighting,
    )


def _seed(args):
    return _default_seed() if args.seed is None else args.seed


def write_manifest(base, record):
    """``<base>.manifest.txt`` (key=value) and ``<base>.manifest.json``."""
    base = Path(base)
    text = "".join(f"{k}={_fmt(v)}\n" for k, v in record.items())
    atomic_write_text(base.with_name(base.name + ".manifest.txt"), text)
    atomic_write_text(base.with_name(base.name + ".manifest.json"),
                      json.dumps(record, indent=2, sort_keys=False, default=_jsonable) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, default=_jsonable)
    return str(v)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return str(v)


def _config_record(cfg, seed):
    return {"k": cfg.k, "lambda": cfg.lam, "n": cfg.n, "gamma_flag": "auto" if cfg.gamma is None
            else cfg.gamma, "samples": cfg.samples,
            "restarts": cfg.restarts, "max_cycles": cfg.max_cycles,
            "size_weighted": cfg.size_weighted, "seed": seed}


def _info_record(info):
    d = info.as_dict()
    return {"level": d["level"], "palette_k": d["k"], "gamma": d["gamma"],
            "connectivity": d.get("connectivity"),
            "s_min": d["s_min"], "s_max": d["s_max"], "region_count": d["region_count"],
            "energy": d["energy"], "wall_seconds": d["seconds"]}


def _write_map(pixel_map, out):
    if np.ndim(pixel_map) == 3:
        write_volume_labels(pixel_map, out)
    else:
        write_label_map(pixel_map, out)


def cmd_segment(args):
    seed = _seed(args)
    cfg = _level_config(args, n=args.n)
    rgb = read_input(args.input)
    if (args.overlay or args.boundary_map) and rgb.ndim != 3:
        raise UsageError("overlays are only available for 2D images")
    t0 = time.perf_counter()
    result = run_hierarchy(rgb_to_lab_normalized(rgb), [cfg], seed=seed)
    rag, info = result.levels[0], result.provenance[0]
    wall = time.perf_counter() - t0
    _write_map(rag.pixel_map, args.out)
    if args.overlay:
        write_overlay(rgb, rag, args.overlay, boundary_path=args.boundary_map)
    elif args.boundary_map:
        write_boundary_map(rag, args.boundary_map)
    record = {"command": "segment", "input": str(args.input), "output": str(args.out),
              **_config_record(cfg, seed), **_info_record(info), "wall_seconds": wall}
    write_manifest(args.out, record)
    print(f"regions={rag.region_count}")
    return EXIT_OK


def _hierarchy_configs(args):
    if args.levels:
        configs = [_level_config(args, n=n, k=k, lam=lam, constrained=False)
                   for k, lam, n in args.levels]
    else:
        if args.num_levels < 1:
            raise UsageError("--num-levels must be >= 1")
        configs = [_level_config(args, n=args.n)]
        configs += [_level_config(args, n=None) for _ in range(args.num_levels - 1)]
    for i in range(1, len(configs)):
        if configs[i].k > configs[i - 1].k:
            raise UsageError(f"level {i + 1}: k={configs[i].k} exceeds level {i} "
                             f"k={configs[i - 1].k}")
    return configs


def cmd_hierarchy(args):
    seed = _seed(args)
    configs = _hierarchy_configs(args)
    rgb = read_input(args.input)
    t0 = time.perf_counter()
    result = run_hierarchy(rgb_to_lab_normalized(rgb), configs, seed=seed)
    wall = time.perf_counter() - t0
    for i in range(1, len(result.levels)):
        if not is_refinement(result.levels[i - 1].pixel_map, result.levels[i].pixel_map):
            raise InvariantError(f"level {i + 1} does not refine level {i}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    volume = rgb.ndim == 4
    for cfg, rag, info in zip(configs, result.levels, result.provenance):
        name = f"level_{info.level}"
        out = out_dir / (name if volume else f"{name}.{args.format}")
        _write_map(rag.pixel_map, out)
        record = {"command": "hierarchy", "input": str(args.input), "output": str(out),
                  **_config_record(cfg, seed), **_info_record(info), "total_wall_seconds": wall}
        write_manifest(out, record)
        print(f"level={info.level} regions={rag.region_count}")
    return EXIT_OK


def cmd_coarsen(args):
    seed = _seed(args)
    cfg = _level_config(args, n=args.n)
    labels = read_label_map(args.labels)
    rgb = read_image(args.image)
    if labels.shape != rgb.shape[:2]:
        raise UsageError(f"label map {labels.shape} and image {rgb.shape[:2]} differ in size")
    lab = rgb_to_lab_normalized(rgb)
    t0 = time.perf_counter()
    prev = ingest_label_map(labels, lab, connectivity=args.connectivity)
    rag, info, _ = run_level(prev, cfg, lab.reshape(-1, 3), prev_k=args.prev_k,
                             seed=seed, level=args.level)
    wall = time.perf_counter() - t0
    if not is_refinement(prev.pixel_map, rag.pixel_map):
        raise InvariantError("coarsened map does not refine the input map")
    write_label_map(rag, args.out)
    if args.overlay:
        write_overlay(rgb, rag, args.overlay)
    record = {"command": "coarsen", "labels": str(args.labels), "image": str(args.image),
              "output": str(args.out), "input_regions": prev.region_count,
              **_config_record(cfg, seed), **_info_record(info), "wall_seconds": wall}
    write_manifest(args.out, record)
    print(f"input_regions={prev.region_count} regions={rag.region_count}")
    return EXIT_OK


def cmd_eval(args):
    seg = read_label_map(args.seg)
    gts = [read_label_map(p) for p in args.gt]
    for p, gt in zip(args.gt, gts):
        if gt.shape != seg.shape:
            raise UsageError(f"{p}: shape {gt.shape} differs from segmentation {seg.shape}")
    report = evaluate(seg, gts, tol=args.tol)
    print(f"{'metric':<14}{'value':>10}")
    print(f"{'regions':<14}{report.region_count:>10d}")
    for name in ("br", "cue", "asa"):
        print(f"{name.upper():<14}{getattr(report, name):>10.4f}")
    for line in report.lines():
        print(line)
    if args.csv:
        new = not Path(args.csv).exists()
        with open(args.csv, "a") as fh:
            if new:
                fh.write("seg,region_count,br,cue,asa\n")
            fh.write(f"{args.seg},{report.region_count},{report.br:.6f},"
                     f"{report.cue:.6f},{report.asa:.6f}\n")
    return EXIT_OK


COMMANDS = {"segment": cmd_segment, "hierarchy": cmd_hierarchy,
            "coarsen": cmd_coarsen, "eval": cmd_eval}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"hpcs {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImageFormatError, OSError) as exc:
        print(f"hpcs {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvariantError, AssertionError) as exc:
        print(f"hpcs {args.command}: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
