"""Full-reference quality metrics for data cubes."""

import csv
import json
from dataclasses import asdict, dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "MetricsReport",
    "psnr_band",
    "ssim_band",
    "ergas",
    "mean_profile",
    "evaluate",
]

PSNR_CAP = 100.0


def _pair(ref, test, ndim):
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ValueError(f"shape mismatch: reference {ref.shape} vs test {test.shape}")
    if ref.ndim != ndim:
        raise ValueError(f"expected {ndim}-D inputs, got shape {ref.shape}")
    return ref, test


def psnr_band(ref, test, peak=1.0):
    """PSNR in dB, capped at ``PSNR_CAP`` for identical inputs."""
    ref, test = _pair(ref, test, 2)
    if peak <= 0:
        raise ValueError("peak must be positive")
    mse = np.mean((ref - test) ** 2)
    if mse == 0:
        return PSNR_CAP
    return float(min(PSNR_CAP, 10.0 * np.log10(peak**2 / mse)))


def gaussian_window(size=11, sigma=1.5):
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x**2) / (2.0 * sigma**2))
    return g / g.sum()


def _filter_valid(img, g):
    # separable 'valid' correlation with a symmetric 1-D kernel
    rows = sliding_window_view(img, g.size, axis=0) @ g
    return sliding_window_view(rows, g.size, axis=1) @ g


def ssim_band(ref, test, win_size=11, sigma=1.5, data_range=1.0, k1=0.01, k2=0.03):
    """Mean SSIM over all fully contained Gaussian windows.

    Local statistics use the normalized Gaussian window as weights
    (population covariance), with ``C1 = (k1 L)^2`` and ``C2 = (k2 L)^2``.
    """
    ref, test = _pair(ref, test, 2)
    if min(ref.shape) < win_size:
        raise ValueError(
            f"band of shape {ref.shape} is smaller than the {win_size}x{win_size} "
            "SSIM window; pass a smaller win_size"
        )
    if np.array_equal(ref, test):
        return 1.0
    g = gaussian_window(win_size, sigma)
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2

    mx = _filter_valid(ref, g)
    my = _filter_valid(test, g)
    sxx = _filter_valid(ref * ref, g) - mx * mx
    syy = _filter_valid(test * test, g) - my * my
    sxy = _filter_valid(ref * test, g) - mx * my

    num = (2 * mx * my + c1) * (2 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


def ergas(ref, test):
    """``100 * sqrt(mean_i(MSE_i / mean(ref_i)^2))`` over bands ``i``."""
    ref, test = _pair(ref, test, 3)
    means = ref.mean(axis=(0, 1))
    if np.any(means == 0):
        bad = np.flatnonzero(means == 0).tolist()
        raise ValueError(f"reference bands {bad} have zero mean; ERGAS is undefined")
    mse = np.mean((ref - test) ** 2, axis=(0, 1))
    return float(100.0 * np.sqrt(np.mean(mse / means**2)))


def mean_profile(cube, band, axis):
    """Mean profile of one band.

    ``axis="horizontal"`` averages each row across columns (length h);
    ``axis="vertical"`` averages each column across rows (length w).
    ``band`` is zero-based.
    """
    cube = np.asarray(cube, dtype=np.float64)
    if not 0 <= band < cube.shape[2]:
        raise ValueError(f"band {band} out of range for {cube.shape[2]} bands")
    img = cube[:, :, band]
    if axis == "horizontal":
        return img.mean(axis=1)
    if axis == "vertical":
        return img.mean(axis=0)
    raise ValueError(f"axis must be 'horizontal' or 'vertical', got {axis!r}")


@dataclass
class MetricsReport:
    per_band_psnr: list
    per_band_ssim: list
    mpsnr: float
    mssim: float
    ergas: float

    def summary(self):
        return f"MPSNR={self.mpsnr:.4f} dB  MSSIM={self.mssim:.4f}  ERGAS={self.ergas:.4f}"

    def to_json(self, path=None):
        text = json.dumps(asdict(self), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def to_csv(self, path):
        """One ``band,psnr_db,ssim`` row per band (1-based), then aggregates."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["band", "psnr_db", "ssim"])
            for i, (p, s) in enumerate(zip(self.per_band_psnr, self.per_band_ssim), start=1):
                w.writerow([i, repr(p), repr(s)])
            w.writerow(["mpsnr", repr(self.mpsnr)])
            w.writerow(["mssim", repr(self.mssim)])
            w.writerow(["ergas", repr(self.ergas)])


def evaluate(ref, test, peak=1.0, win_size=11):
    ref, test = _pair(ref, test, 3)
    psnrs = [psnr_band(ref[:, :, k], test[:, :, k], peak) for k in range(ref.shape[2])]
    ssims = [ssim_band(ref[:, :, k], test[:, :, k], win_size) for k in range(ref.shape[2])]
    return MetricsReport(
        per_band_psnr=psnrs,
        per_band_ssim=ssims,
        mpsnr=float(np.mean(psnrs)),
        mssim=float(np.mean(ssims)),
        ergas=ergas(ref, test),
    )
