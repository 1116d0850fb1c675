"""Weighted circular difference operator and the SSTV seminorm.

A stacked gradient is an array of shape ``(3, h, w, b)``. Channel 0 holds
spectral differences (weight ``w1``), channel 1 horizontal differences along
the width axis (``w2``) and channel 2 vertical differences along the height
axis (``w3``). All differences wrap around periodically, which is what makes
``D*D`` diagonal in the 3-D Fourier basis.
"""

from typing import NamedTuple

import numpy as np

from .tensor_core import as_cube

__all__ = [
    "TVWeights",
    "dw_forward",
    "dw_adjoint",
    "tz_spectrum",
    "sstv_norm",
]

# channel index -> cube axis it differentiates along
_AXES = (2, 1, 0)


class TVWeights(NamedTuple):
    w1: float = 0.5  # spectral
    w2: float = 1.0  # horizontal
    w3: float = 1.0  # vertical

    def check(self):
        if min(self) < 0:
            raise ValueError(f"TV weights must be non-negative, got {tuple(self)}")
        if max(self) <= 0:
            raise ValueError("at least one TV weight must be positive")
        return self


def _weights(w):
    return TVWeights(*(float(v) for v in w)).check()


def dw_forward(cube, w):
    """Apply ``D_w``: weighted backward differences ``x[i] - x[i-1]``."""
    x = np.asarray(cube, dtype=np.float64)
    w = _weights(w)
    out = np.empty((3, *x.shape))
    for c, (axis, wc) in enumerate(zip(_AXES, w)):
        out[c] = wc * (x - np.roll(x, 1, axis=axis))
    return out


def dw_adjoint(g, w):
    """Apply ``D_w^*``, the adjoint of :func:`dw_forward`."""
    g = np.asarray(g, dtype=np.float64)
    if g.ndim != 4 or g.shape[0] != 3:
        raise ValueError(f"stacked gradient must have shape (3, h, w, b), got {g.shape}")
    w = _weights(w)
    out = np.zeros(g.shape[1:])
    for c, (axis, wc) in enumerate(zip(_AXES, w)):
        if wc:
            out += wc * (g[c] - np.roll(g[c], -1, axis=axis))
    return out


def tz_spectrum(shape, w):
    """Eigenvalues of ``D_w^* D_w`` on the 3-D DFT grid.

    ``T(p, q, r) = w1^2 |1 - e^{-2 pi i r/b}|^2 + w2^2 |1 - e^{-2 pi i q/w}|^2
    + w3^2 |1 - e^{-2 pi i p/h}|^2``.
    """
    h, wd, b = (int(s) for s in shape)
    if min(h, wd, b) < 1:
        raise ValueError(f"shape must be positive, got {shape}")
    w = _weights(w)

    def axis_eig(n):
        # |1 - e^{-2 pi i k/n}|^2 = 2 - 2 cos(2 pi k/n)
        return 2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)

    return (
        w.w3**2 * axis_eig(h)[:, None, None]
        + w.w2**2 * axis_eig(wd)[None, :, None]
        + w.w1**2 * axis_eig(b)[None, None, :]
    )


def sstv_norm(cube, w):
    """Anisotropic spatial-spectral TV: sum of ``|D_w x|`` over all channels."""
    return float(np.abs(dw_forward(as_cube(cube), w)).sum())
