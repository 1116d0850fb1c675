"""Dense third-order tensor algebra.

Cubes are plain ``numpy.ndarray`` objects of shape ``(height, width, bands)``
holding float64 values. Unfoldings follow the column ordering in which the
lowest remaining mode index varies fastest, so the mode-1 unfolding of a
2x2x2 cube has first row ``[x111, x121, x112, x122]``.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TuckerFactors",
    "as_cube",
    "unfold",
    "fold",
    "mode_mul",
    "inner",
    "frob_norm",
    "tucker_reconstruct",
]


def _check_mode(mode):
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2 or 3, got {mode!r}")


def as_cube(data, name="cube"):
    """Validate ``data`` as a finite third-order float64 array."""
    cube = np.asarray(data, dtype=np.float64)
    if cube.ndim != 3:
        raise ValueError(f"{name} must be 3-D, got shape {cube.shape}")
    if min(cube.shape) < 1:
        raise ValueError(f"{name} has an empty dimension: {cube.shape}")
    if not np.all(np.isfinite(cube)):
        raise ValueError(f"{name} contains non-finite values")
    return cube


def unfold(cube, mode):
    """Mode-``mode`` matricization of a third-order tensor.

    Returns a fresh contiguous matrix of shape ``(I_n, prod(I_k, k != n))``.
    """
    _check_mode(mode)
    cube = np.asarray(cube)
    if cube.ndim != 3:
        raise ValueError(f"expected a 3-D array, got shape {cube.shape}")
    n = mode - 1
    mat = np.moveaxis(cube, n, 0).reshape(cube.shape[n], -1, order="F")
    return np.ascontiguousarray(mat)


def fold(mat, mode, shape):
    """Inverse of :func:`unfold`."""
    _check_mode(mode)
    mat = np.asarray(mat)
    shape = tuple(int(s) for s in shape)
    if len(shape) != 3:
        raise ValueError(f"shape must have three entries, got {shape}")
    n = mode - 1
    rest = [s for i, s in enumerate(shape) if i != n]
    expected = (shape[n], rest[0] * rest[1])
    if mat.shape != expected:
        raise ValueError(
            f"matrix shape {mat.shape} does not match mode-{mode} unfolding "
            f"of {shape} (expected {expected})"
        )
    moved = mat.reshape((shape[n], *rest), order="F")
    return np.ascontiguousarray(np.moveaxis(moved, 0, n))


def mode_mul(cube, mat, mode):
    """Mode-n product ``cube x_n mat``.

    The mode-n unfolding of the result equals ``mat @ unfold(cube, mode)``.
    """
    _check_mode(mode)
    cube = np.asarray(cube)
    mat = np.asarray(mat)
    if mat.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {mat.shape}")
    n = mode - 1
    if mat.shape[1] != cube.shape[n]:
        raise ValueError(
            f"matrix has {mat.shape[1]} columns but cube dimension {mode} "
            f"is {cube.shape[n]}"
        )
    # contract over axis n, then put the new axis back in place
    out = np.tensordot(mat, cube, axes=([1], [n]))
    return np.ascontiguousarray(np.moveaxis(out, 0, n))


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def inner(a, b):
    """Sum of elementwise products of two same-sized tensors."""
    a = np.asarray(a)
    b = np.asarray(b)
    _check_same_shape(a, b)
    return float(np.dot(a.ravel(), b.ravel()))


def frob_norm(a):
    a = np.asarray(a)
    return float(np.sqrt(np.dot(a.ravel(), a.ravel())))


@dataclass
class TuckerFactors:
    """Core tensor plus three column-orthonormal factor matrices."""

    core: np.ndarray
    factors: tuple

    def __post_init__(self):
        self.core = np.asarray(self.core, dtype=np.float64)
        self.factors = tuple(np.asarray(u, dtype=np.float64) for u in self.factors)
        if self.core.ndim != 3 or len(self.factors) != 3:
            raise ValueError("Tucker model needs a 3-D core and three factors")
        for i, u in enumerate(self.factors):
            if u.ndim != 2 or u.shape[1] != self.core.shape[i]:
                raise ValueError(
                    f"factor {i + 1} has shape {u.shape}, incompatible with "
                    f"core shape {self.core.shape}"
                )
            if u.shape[1] > u.shape[0]:
                raise ValueError(
                    f"rank {u.shape[1]} exceeds dimension {u.shape[0]} in mode {i + 1}"
                )

    @property
    def ranks(self):
        return self.core.shape

    @property
    def shape(self):
        return tuple(u.shape[0] for u in self.factors)


def tucker_reconstruct(tf):
    """Full cube ``C x_1 U1 x_2 U2 x_3 U3``."""
    out = tf.core
    for mode, u in enumerate(tf.factors, start=1):
        out = mode_mul(out, u, mode)
    return out
