"""3-D discrete Fourier transforms of arbitrary size.

Backed by numpy's pocketfft, which covers prime lengths through Bluestein's
algorithm. Forward transforms use the negative exponent and are
unnormalized; the inverse carries the ``1/(h*w*b)`` factor.
"""

import numpy as np

__all__ = ["fftn", "ifftn"]


def _check(x):
    x = np.asarray(x)
    if x.ndim != 3:
        raise ValueError(f"expected a 3-D array, got shape {x.shape}")
    if min(x.shape) < 1:
        raise ValueError(f"zero-size dimension in shape {x.shape}")
    return x


def fftn(cube):
    return np.fft.fftn(_check(cube), axes=(0, 1, 2))


def ifftn(spectrum):
    return np.fft.ifftn(_check(spectrum), axes=(0, 1, 2))
