"""Synthetic clean cubes for desk-scale experiments.

The cube is a Tucker model with smooth, low-frequency factors, multiplied
band by band with a piecewise-constant spatial map (a stand-in for a class
label map), then normalized band by band to [0, 1].
"""

import numpy as np

from .hsi_io import normalize_bands
from .tensor_core import TuckerFactors, tucker_reconstruct

__all__ = ["smooth_factor", "piecewise_map", "make_clean_cube"]


def smooth_factor(n, r, rng):
    """``n x r`` orthonormal basis spanned by a constant and slow cosines."""
    t = np.linspace(0.0, 1.0, n)
    cols = [np.ones(n)]
    for k in range(1, r):
        cols.append(np.cos(np.pi * k / max(r - 1, 1) * t + rng.uniform(0.0, np.pi)))
    q, _ = np.linalg.qr(np.stack(cols, axis=1))
    return q


def piecewise_map(h, w, rng, regions=6):
    """Background of ones overlaid with random constant rectangles."""
    out = np.ones((h, w))
    for _ in range(regions):
        rh = int(rng.integers(max(1, h // 6), max(2, h // 2)))
        rw = int(rng.integers(max(1, w // 6), max(2, w // 2)))
        r0 = int(rng.integers(0, h - rh + 1))
        c0 = int(rng.integers(0, w - rw + 1))
        out[r0:r0 + rh, c0:c0 + rw] = rng.uniform(0.2, 2.0)
    return out


def make_clean_cube(shape=(40, 40, 20), ranks=(4, 4, 3), seed=0, regions=6):
    h, w, b = shape
    rng = np.random.default_rng(seed)
    core = rng.standard_normal(ranks)
    # dominant mean component keeps the cube away from sign changes
    core[0, 0, 0] = 10.0
    factors = tuple(smooth_factor(n, r, rng) for n, r in zip(shape, ranks))
    base = tucker_reconstruct(TuckerFactors(core, factors))
    cube = base * piecewise_map(h, w, rng, regions)[:, :, None]
    return normalize_bands(cube)[0]
