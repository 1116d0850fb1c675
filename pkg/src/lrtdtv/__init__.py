"""Mixed-noise restoration of hyperspectral cubes by TV-regularized low-rank
Tucker decomposition."""

__version__ = "0.1.0"

from .diff_ops import TVWeights, dw_adjoint, dw_forward, sstv_norm, tz_spectrum
from .metrics import MetricsReport, ergas, evaluate, mean_profile, psnr_band, ssim_band
from .noise_sim import NoiseSpec, apply_noise
from .solver import Model, RestoreReport, SolverConfig, restore, soft_threshold
from .tensor_core import TuckerFactors, fold, frob_norm, inner, mode_mul, tucker_reconstruct, unfold
from .tucker import hooi, hosvd, truncated_svd_factors

__all__ = [
    "Model",
    "MetricsReport",
    "NoiseSpec",
    "RestoreReport",
    "SolverConfig",
    "TVWeights",
    "TuckerFactors",
    "apply_noise",
    "dw_adjoint",
    "dw_forward",
    "ergas",
    "evaluate",
    "fold",
    "frob_norm",
    "hooi",
    "hosvd",
    "inner",
    "mean_profile",
    "mode_mul",
    "psnr_band",
    "restore",
    "soft_threshold",
    "sstv_norm",
    "ssim_band",
    "truncated_svd_factors",
    "tucker_reconstruct",
    "tz_spectrum",
    "unfold",
]
