"""Seeded mixed-noise generator for the six simulated corruption cases.

=====  ==============================================================
Case   Corruption
=====  ==============================================================
1      Gaussian, variance 0.1 in every band
2      Case 1 + dead lines on a 40-band window (91-130 of 224)
3      Gaussian, variance 0.075 + salt-and-pepper, fraction 0.15
4      Case 3 + dead lines
5      per-band variance ~ U[0, 0.2], per-band impulse ~ U[0, 0.2],
       + dead lines
6      Case 5 + stripes on a 30-band window (161-190 of 224)
=====  ==============================================================

Band windows are 1-based and inclusive; for cubes with other than 224
bands the default windows are rescaled proportionally. Under Cases 5 and
6, ``gaussian_sigma`` and ``impulse_fraction`` act as upper bounds
(variance is drawn from ``U[0, gaussian_sigma**2]``).

Every band and noise kind draws from its own ``SeedSequence`` substream,
``SeedSequence(seed, spawn_key=(kind, band))``, so the noise in one band
does not depend on how many other bands were processed.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .tensor_core import as_cube

__all__ = ["NoiseSpec", "apply_noise", "band_window", "substream"]

_REF_BANDS = 224
_DEADLINE_WINDOW = (91, 130)
_STRIPE_WINDOW = (161, 190)

# substream kinds
_GAUSS, _IMPULSE, _DEADLINE, _STRIPE, _PARAMS = range(5)


@dataclass(frozen=True)
class NoiseSpec:
    case_id: int
    seed: int = 0
    gaussian_sigma: float | None = None
    impulse_fraction: float | None = None
    deadline_band_range: tuple | None = None
    stripe_band_range: tuple | None = None

    def __post_init__(self):
        if self.case_id not in range(1, 7):
            raise ValueError(f"case_id must be in 1..6, got {self.case_id}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.gaussian_sigma is not None and self.gaussian_sigma < 0:
            raise ValueError("gaussian_sigma must be >= 0")
        if self.impulse_fraction is not None and not 0 <= self.impulse_fraction <= 1:
            raise ValueError("impulse_fraction must lie in [0, 1]")
        for name in ("deadline_band_range", "stripe_band_range"):
            rng = getattr(self, name)
            if rng is not None:
                a, b = (int(v) for v in rng)
                if not 1 <= a <= b:
                    raise ValueError(f"{name} must satisfy 1 <= first <= last, got {rng}")
                object.__setattr__(self, name, (a, b))

    def to_json(self):
        d = asdict(self)
        for k in ("deadline_band_range", "stripe_band_range"):
            if d[k] is not None:
                d[k] = list(d[k])
        return json.dumps(d, indent=2)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    # -- resolved case parameters -------------------------------------------

    @property
    def per_band_random(self):
        return self.case_id >= 5

    @property
    def sigma(self):
        if self.gaussian_sigma is not None:
            return self.gaussian_sigma
        return math.sqrt({1: 0.1, 2: 0.1, 3: 0.075, 4: 0.075}.get(self.case_id, 0.2))

    @property
    def impulse(self):
        if self.case_id <= 2:
            return 0.0
        if self.impulse_fraction is not None:
            return self.impulse_fraction
        return 0.15 if self.case_id <= 4 else 0.2


def band_window(bands, default, override=None):
    """Zero-based band indices of a 1-based inclusive window.

    Without an override the reference window (defined for 224 bands) is
    rescaled to ``bands``.
    """
    if override is not None:
        a, b = override
        if b > bands:
            raise ValueError(f"band window {override} exceeds the {bands} available bands")
    else:
        a = int(round((default[0] - 1) * bands / _REF_BANDS)) + 1
        b = max(a, int(round(default[1] * bands / _REF_BANDS)))
        b = min(b, bands)
    return np.arange(a - 1, b)


def substream(seed, kind, band):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(kind, band)))


def _add_deadlines(noisy, mask, band, rng):
    width = noisy.shape[1]
    for _ in range(rng.integers(3, 11)):
        lw = int(rng.integers(1, 4))
        lw = min(lw, width)
        c0 = int(rng.integers(0, width - lw + 1))
        noisy[:, c0:c0 + lw, band] = 0.0
        mask[:, c0:c0 + lw, band] = True


def _add_stripes(noisy, mask, band, rng):
    width = noisy.shape[1]
    count = min(int(rng.integers(20, 41)), width)
    cols = rng.choice(width, size=count, replace=False)
    offsets = rng.uniform(0.2, 0.5, size=count) * rng.choice([-1.0, 1.0], size=count)
    for c, off in zip(cols, offsets):
        noisy[:, c, band] += off
        mask[:, c, band] = True


def apply_noise(clean, spec):
    """Corrupt ``clean`` according to ``spec``.

    Parameters
    ----------
    clean : array_like, shape (h, w, b)
        Clean cube with entries in [0, 1].
    spec : NoiseSpec

    Returns
    -------
    noisy : ndarray
        Corrupted cube; values are not clipped.
    masks : dict of str -> ndarray of bool
        ``impulse``, ``deadline`` and ``stripe`` locations.
    """
    clean = as_cube(clean, "clean cube")
    if clean.min() < 0 or clean.max() > 1:
        raise ValueError("clean cube entries must lie in [0, 1]")
    h, w, b = clean.shape
    noisy = clean.copy()
    masks = {k: np.zeros(clean.shape, dtype=bool) for k in ("impulse", "deadline", "stripe")}

    for k in range(b):
        if spec.per_band_random:
            prng = substream(spec.seed, _PARAMS, k)
            sigma = math.sqrt(prng.uniform(0.0, spec.sigma**2))
            frac = prng.uniform(0.0, spec.impulse)
        else:
            sigma, frac = spec.sigma, spec.impulse

        if sigma > 0:
            noisy[:, :, k] += sigma * substream(spec.seed, _GAUSS, k).standard_normal((h, w))

        if frac > 0:
            rng = substream(spec.seed, _IMPULSE, k)
            count = int(round(frac * h * w))
            idx = rng.choice(h * w, size=count, replace=False)
            rows, cols = np.unravel_index(idx, (h, w))
            noisy[rows, cols, k] = rng.integers(0, 2, size=count).astype(np.float64)
            masks["impulse"][rows, cols, k] = True

    if spec.case_id in (2, 4, 5, 6):
        for k in band_window(b, _DEADLINE_WINDOW, spec.deadline_band_range):
            _add_deadlines(noisy, masks["deadline"], k, substream(spec.seed, _DEADLINE, k))

    if spec.case_id == 6:
        for k in band_window(b, _STRIPE_WINDOW, spec.stripe_band_range):
            _add_stripes(noisy, masks["stripe"], k, substream(spec.seed, _STRIPE, k))

    return noisy, masks
