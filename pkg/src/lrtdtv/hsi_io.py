"""Native cube storage, band normalization and PNG export.

A cube stored at ``path`` occupies two files: ``path + ".json"`` holds the
header and ``path + ".bin"`` the raw little-endian payload, band-sequential
and row-major within each band.
"""

import json
import os

import numpy as np

__all__ = [
    "HSIFormatError",
    "MAGIC",
    "write_cube",
    "read_cube",
    "read_header",
    "normalize_bands",
    "denormalize_bands",
    "export_band_png",
]

MAGIC = "HSICUBE1"
LAYOUT = "band-sequential"
_DTYPES = {"f32": np.dtype("<f4"), "f64": np.dtype("<f8")}


class HSIFormatError(ValueError):
    """A cube header or payload is malformed."""


def _paths(path):
    path = os.fspath(path)
    return path + ".json", path + ".bin"


def write_cube(path, cube, dtype="f64", value_range=None):
    cube = np.asarray(cube, dtype=np.float64)
    if cube.ndim != 3 or min(cube.shape) < 1:
        raise ValueError(f"expected a non-empty 3-D cube, got shape {cube.shape}")
    if dtype not in _DTYPES:
        raise ValueError(f"dtype must be one of {sorted(_DTYPES)}, got {dtype!r}")
    h, w, b = cube.shape
    header = {
        "magic": MAGIC,
        "height": h,
        "width": w,
        "bands": b,
        "dtype": dtype,
        "layout": LAYOUT,
        "value_range": None if value_range is None else [float(v) for v in value_range],
    }
    hdr_path, bin_path = _paths(path)
    payload = np.ascontiguousarray(cube.transpose(2, 0, 1), dtype=_DTYPES[dtype])
    with open(bin_path, "wb") as fh:
        fh.write(payload.tobytes())
    with open(hdr_path, "w") as fh:
        json.dump(header, fh, indent=2)


def read_header(path):
    hdr_path, _ = _paths(path)
    try:
        with open(hdr_path) as fh:
            header = json.load(fh)
    except json.JSONDecodeError as exc:
        raise HSIFormatError(f"{hdr_path}: header is not valid JSON ({exc})") from exc
    if not isinstance(header, dict):
        raise HSIFormatError(f"{hdr_path}: header must be a JSON object")
    if header.get("magic") != MAGIC:
        raise HSIFormatError(f"{hdr_path}: bad magic {header.get('magic')!r}")
    for key in ("height", "width", "bands"):
        v = header.get(key)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise HSIFormatError(f"{hdr_path}: {key} must be a positive integer, got {v!r}")
    if header.get("dtype") not in _DTYPES:
        raise HSIFormatError(f"{hdr_path}: unsupported dtype {header.get('dtype')!r}")
    if header.get("layout") != LAYOUT:
        raise HSIFormatError(f"{hdr_path}: unsupported layout {header.get('layout')!r}")
    vr = header.get("value_range")
    if vr is not None and (not isinstance(vr, list) or len(vr) != 2):
        raise HSIFormatError(f"{hdr_path}: value_range must be [min, max] or null")
    return header


def read_cube(path):
    """Load a cube as float64 after validating header and payload size."""
    header = read_header(path)
    _, bin_path = _paths(path)
    h, w, b = header["height"], header["width"], header["bands"]
    dt = _DTYPES[header["dtype"]]
    with open(bin_path, "rb") as fh:
        raw = fh.read()
    expected = h * w * b * dt.itemsize
    if len(raw) != expected:
        raise HSIFormatError(
            f"{bin_path}: payload length {len(raw)} bytes, expected {expected} "
            f"for {h}x{w}x{b} {header['dtype']}"
        )
    data = np.frombuffer(raw, dtype=dt).reshape(b, h, w)
    return np.ascontiguousarray(data.transpose(1, 2, 0), dtype=np.float64)


def normalize_bands(cube):
    """Map each band affinely onto [0, 1].

    Returns the normalized cube and the per-band ``(min, max)`` list.
    Constant bands map to zeros.
    """
    cube = np.asarray(cube, dtype=np.float64)
    lo = cube.min(axis=(0, 1))
    hi = cube.max(axis=(0, 1))
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    out = (cube - lo) / safe
    out[:, :, span == 0] = 0.0
    return out, [(float(a), float(b)) for a, b in zip(lo, hi)]


def denormalize_bands(cube, ranges):
    cube = np.asarray(cube, dtype=np.float64)
    if len(ranges) != cube.shape[2]:
        raise ValueError(f"{len(ranges)} ranges for {cube.shape[2]} bands")
    lo = np.array([r[0] for r in ranges])
    hi = np.array([r[1] for r in ranges])
    return cube * (hi - lo) + lo


def export_band_png(cube, band, path):
    """Write one band (zero-based) as an 8-bit grayscale PNG."""
    from PIL import Image

    cube = np.asarray(cube, dtype=np.float64)
    if not 0 <= band < cube.shape[2]:
        raise ValueError(f"band {band} out of range for {cube.shape[2]} bands")
    img = np.clip(cube[:, :, band], 0.0, 1.0)
    pixels = np.floor(img * 255.0 + 0.5).astype(np.uint8)
    try:
        Image.fromarray(pixels).save(os.fspath(path), format="PNG")
    except OSError as exc:
        raise OSError(f"cannot write PNG to {path}: {exc}") from exc
