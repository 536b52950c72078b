import numpy as np
import pytest


def voronoi_image(rng, h, w, n_sites, noise=0.02):
    """Piecewise-constant colour cells plus mild noise, as normalized features."""
    sites = rng.random((n_sites, 2)) * [h, w]
    colors = rng.random((n_sites, 3))
    yy, xx = np.mgrid[:h, :w]
    d = (yy[..., None] - sites[:, 0]) ** 2 + (xx[..., None] - sites[:, 1]) ** 2
    cell = np.argmin(d, axis=-1)
    img = colors[cell] + rng.normal(scale=noise, size=(h, w, 3))
    return np.clip(img, 0, 1), cell


def random_blocks(rng, h, w, n_labels, block=1):
    """Random label map of ``block``-sized squares."""
    small = rng.integers(n_labels, size=(-(-h // block), -(-w // block)))
    return np.kron(small, np.ones((block, block), dtype=int))[:h, :w]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pink_noise_image(rng, h, w, beta=1.0, contrast=0.18):
    """Colour image with a 1/f^beta amplitude spectrum per channel, in [0, 1]."""
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
    img = np.stack(chans, axis=-1) * contrast + rng.random(3) * 0.4 + 0.3
    return np.clip(img, 0.0, 1.0)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL (or SKIP) line per criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(criterion, ok, detail):
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"criterion {criterion:>2}: {status}  {detail}"
        lines.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":").rstrip("ab"))):
            terminalreporter.write_line(line)
