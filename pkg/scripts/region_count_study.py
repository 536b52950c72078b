"""How close does the split & merge land to the requested region count?

Prints count / N for 1/f-spectrum synthetic images, piecewise-constant
Voronoi mosaics and the colour photographs bundled with scikit-image.

    python scripts/region_count_study.py [--targets 100 200 400] [--synthetic 5]
"""

import argparse

import numpy as np

from hpcs import LevelConfig, rgb_to_lab_normalized, segment_image


def pink_noise(rng, h, w, beta=1.0, contrast=0.18):
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None]
    f = np.hypot(fy, fx)
    f[0, 0] = 1.0
    chans = []
    for _ in range(3):
        amp = (rng.normal(size=(h, w)) + 1j * rng.normal(size=(h, w))) / f ** beta
        amp[0, 0] = 0.0
        x = np.real(np.fft.ifft2(amp))
        chans.append((x - x.mean()) / x.std())
    img = np.stack(chans, -1) * contrast + rng.random(3) * 0.4 + 0.3
    return (np.clip(img, 0, 1) * 255).astype(np.uint8)


def voronoi(rng, h, w, sites=25):
    pts = rng.random((sites, 2)) * [h, w]
    yy, xx = np.mgrid[:h, :w]
    cell = np.argmin((yy[..., None] - pts[:, 0]) ** 2 + (xx[..., None] - pts[:, 1]) ** 2, -1)
    img = rng.random((sites, 3))[cell] + rng.normal(scale=0.03, size=(h, w, 3))
    return (np.clip(img, 0, 1) * 255).astype(np.uint8)


def photos():
    try:
        from skimage import data
    except ImportError:
        return {}
    out = {}
    for name in ("astronaut", "chelsea", "coffee", "rocket", "immunohistochemistry"):
        try:
            out[name] = getattr(data, name)()[..., :3]
        except Exception:       # sample not available offline
            pass
    return out


def ratio(rgb, n, seed):
    rag, _, _ = segment_image(rgb_to_lab_normalized(rgb), LevelConfig(n=n), seed=seed)
    return rag.region_count / n


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--targets", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--synthetic", type=int, default=5, help="synthetic images per kind")
    ap.add_argument("--size", type=int, nargs=2, default=[241, 321])
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    h, w = args.size

    print(f"{'input':<24}" + "".join(f"{'N=' + str(n):>10}" for n in args.targets))
    for kind, make in (("1/f synthetic", lambda: pink_noise(rng, h, w)),
                       ("voronoi mosaic", lambda: voronoi(rng, h, w))):
        imgs = [make() for _ in range(args.synthetic)]
        row = [np.mean([ratio(im, n, i) for i, im in enumerate(imgs)]) for n in args.targets]
        print(f"{kind + ' (mean)':<24}" + "".join(f"{r:>10.2f}" for r in row))
    for name, img in photos().items():
        print(f"{name:<24}" + "".join(f"{ratio(img, n, 0):>10.2f}" for n in args.targets))


if __name__ == "__main__":
    main()
