"""sRGB (D65) to CIE L*a*b*, rescaled to the unit cube."""

import numpy as np

# sRGB primaries -> XYZ, D65 white
_RGB_TO_XYZ = np.array([
    [0.412453, 0.357580, 0.180423],
    [0.212671, 0.715160, 0.072169],
    [0.019334, 0.119193, 0.950227],
])
_WHITE_D65 = np.array([0.95047, 1.0, 1.08883])

_EPS = 216.0 / 24389.0
_KAPPA = 24389.0 / 27.0


def _linearize(c):
    return np.where(c > 0.04045, ((c + 0.055) / 1.055) ** 2.4, c / 12.92)


def _f(t):
    return np.where(t > _EPS, np.cbrt(t), (_KAPPA * t + 16.0) / 116.0)


def rgb_to_lab(rgb):
    """Raw CIE L*a*b* of an 8-bit RGB array (last axis = channels)."""
    rgb = np.asarray(rgb, dtype=np.float64) / 255.0
    lin = _linearize(rgb)
    # elementwise products keep the map exactly pointwise (no batched BLAS)
    xyz = sum(lin[..., j, None] * _RGB_TO_XYZ[:, j] for j in range(3))
    fx, fy, fz = np.moveaxis(_f(xyz / _WHITE_D65), -1, 0)
    L = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return np.stack([L, a, b], axis=-1)


def rgb_to_lab_normalized(img):
    """Map an RGB image (``(..., 3)`` uint8) to normalized L*a*b features.

    L* in [0, 100] becomes L/100 and a*, b* in [-128, 127] become
    (v + 128) / 255. Every output component is clamped to [0, 1], and the
    result has the same leading shape as the input.
    """
    img = np.asarray(img)
    if img.shape[-1] != 3:
        raise ValueError(f"expected 3 channels, got shape {img.shape}")
    lab = rgb_to_lab(img)
    out = np.empty_like(lab)
    out[..., 0] = lab[..., 0] / 100.0
    out[..., 1:] = (lab[..., 1:] + 128.0) / 255.0
    return np.clip(out, 0.0, 1.0)
