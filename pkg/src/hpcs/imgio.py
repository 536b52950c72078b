"""Image, volume and label-map files."""

import os
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .metrics import boundary_mask

IMAGE_SUFFIXES = {".png", ".ppm", ".pnm"}
PNG16_MAX = 65535


class ImageFormatError(OSError):
    pass


def read_image(path):
    """Decode PNG or binary PPM (P6) into an ``(H, W, 3)`` uint8 array.

    Grayscale input is replicated to three channels and alpha is dropped.
    """
    path = Path(path)
    fmt = path.suffix.lstrip(".").upper() or "unknown"
    try:
        with Image.open(path) as im:
            fmt = im.format or fmt
            if fmt not in ("PNG", "PPM"):
                raise ImageFormatError(f"{path}: unsupported format {fmt} (expected PNG or PPM)")
            im.load()
            if im.mode in ("I;16", "I;16B", "I"):
                arr = np.asarray(im)
                arr = (arr >> 8).astype(np.uint8) if arr.max() > 255 else arr.astype(np.uint8)
                return np.repeat(arr[..., None], 3, axis=2)
            return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
    except ImageFormatError:
        raise
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise ImageFormatError(f"{path}: cannot decode {fmt} image: {exc}") from exc


def read_volume(directory):
    """Stack the images of a slice directory (sorted by file name) into ``(D, H, W, 3)``."""
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise ImageFormatError(f"{directory}: no PNG/PPM slices found")
    slices = [read_image(p) for p in files]
    if len({s.shape for s in slices}) != 1:
        raise ImageFormatError(f"{directory}: slices differ in size")
    return np.stack(slices)


def read_input(path):
    path = Path(path)
    return read_volume(path) if path.is_dir() else read_image(path)


def dense_ids(pixel_map):
    _, inv = np.unique(np.asarray(pixel_map), return_inverse=True)
    return inv.reshape(np.shape(pixel_map)).astype(np.int64)


def write_label_map(labels, path):
    """Write region ids as a 16-bit PNG or a CSV (by suffix), densely renumbered.

    ``labels`` is a 2D id array or anything with a ``pixel_map`` attribute.
    """
    pixel_map = getattr(labels, "pixel_map", labels)
    ids = dense_ids(pixel_map)
    if ids.ndim != 2:
        raise ValueError(f"label maps are 2D; got shape {ids.shape}")
    path = Path(path)
    if path.suffix.lower() == ".csv":
        np.savetxt(path, ids, fmt="%d", delimiter=",")
    elif path.suffix.lower() == ".png":
        if ids.max() > PNG16_MAX:
            raise ValueError(f"{ids.max() + 1} regions do not fit a 16-bit PNG; "
                             "write a .csv label map instead")
        Image.fromarray(ids.astype(np.uint16)).save(path)
    else:
        raise ValueError(f"{path}: label maps must be .png or .csv")
    return path


def read_label_map(path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            arr = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)
        except ValueError as exc:
            raise ImageFormatError(f"{path}: malformed CSV label map: {exc}") from exc
    else:
        try:
            with Image.open(path) as im:
                arr = np.asarray(im).astype(np.int64)
        except (UnidentifiedImageError, OSError) as exc:
            raise ImageFormatError(f"{path}: cannot decode label map: {exc}") from exc
        if arr.ndim == 3:
            raise ImageFormatError(f"{path}: label maps must be single-channel")
    if np.any(arr < 0):
        raise ImageFormatError(f"{path}: negative region ids")
    return arr


def write_volume_labels(pixel_map, directory):
    """One 16-bit PNG (or CSV when ids overflow) per slice of a 3D id map."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ids = dense_ids(pixel_map)
    suffix = ".png" if ids.max() <= PNG16_MAX else ".csv"
    width = max(4, len(str(len(ids))))
    paths = []
    for z, sl in enumerate(ids):
        p = directory / f"slice_{z:0{width}d}{suffix}"
        if suffix == ".png":
            Image.fromarray(sl.astype(np.uint16)).save(p)
        else:
            np.savetxt(p, sl, fmt="%d", delimiter=",")
        paths.append(p)
    return paths


def overlay(img, pixel_map, color=(255, 0, 0)):
    """Copy of ``img`` with region boundary pixels painted in ``color``."""
    img = np.asarray(img)
    pixel_map = getattr(pixel_map, "pixel_map", pixel_map)
    if img.shape[:2] != np.shape(pixel_map):
        raise ValueError(f"image {img.shape[:2]} and label map {np.shape(pixel_map)} differ")
    out = img.copy()
    out[boundary_mask(pixel_map)] = color
    return out


def write_overlay(img, rag, path, boundary_path=None, color=(255, 0, 0)):
    """PNG of the image with boundaries drawn; optionally a black/white boundary map."""
    out = overlay(img, rag, color)
    Image.fromarray(out.astype(np.uint8)).save(path)
    if boundary_path is not None:
        write_boundary_map(rag, boundary_path)
    return path


def write_boundary_map(rag, path):
    mask = boundary_mask(getattr(rag, "pixel_map", rag))
    Image.fromarray((mask * 255).astype(np.uint8)).save(path)
    return path


def atomic_write_text(path, text):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)
