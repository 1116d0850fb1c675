"""Augmented Lagrangian solver for TV-regularized low-rank Tucker restoration.

The observed cube ``Y`` is split as ``Y = X + S + N`` where ``X`` has a
Tucker structure of fixed multilinear rank and small spatial-spectral total
variation, ``S`` is sparse and ``N`` is dense Gaussian noise. The
``approximate`` model drops ``N``.

Each iteration updates, in order: X (one warm-started HOOI pass on the
averaged target), Z (FFT-diagonal linear solve), F (soft-threshold of the
weighted gradient), S (soft-threshold of the fidelity residual), N
(closed-form shrinkage, general model only), the three multipliers, and
finally the penalty ``mu``.
"""

import enum
import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import fft3d
from .diff_ops import TVWeights, dw_adjoint, dw_forward, tz_spectrum
from .tensor_core import TuckerFactors, as_cube, frob_norm, tucker_reconstruct
from .tucker import hooi

__all__ = [
    "Model",
    "SolverConfig",
    "SolverState",
    "RestoreReport",
    "auto_ranks",
    "beta_from_variance",
    "soft_threshold",
    "x_target",
    "update_x",
    "update_z",
    "update_f",
    "update_s",
    "update_n",
    "update_multipliers",
    "initial_state",
    "step",
    "restore",
]

logger = logging.getLogger(__name__)

# beta used by the general model when no noise variance is supplied
DEFAULT_BETA = 100.0


class Model(str, enum.Enum):
    GENERAL = "general"
    APPROXIMATE = "approximate"


def auto_ranks(shape, spectral_rank=10):
    """80% of each spatial size and a fixed spectral rank, clipped to the cube."""
    h, w, b = shape
    return (
        max(1, min(h, int(round(0.8 * h)))),
        max(1, min(w, int(round(0.8 * w)))),
        max(1, min(b, spectral_rank)),
    )


def beta_from_variance(variance):
    """Frobenius weight as the reciprocal of the Gaussian noise variance."""
    if variance <= 0:
        raise ValueError("noise variance must be positive")
    return 1.0 / variance


@dataclass(frozen=True)
class SolverConfig:
    """Model and algorithm parameters.

    ``ranks=None`` selects :func:`auto_ranks` for the input shape. The sparse
    weight is ``lambda = 100 * lambda_c / sqrt(height * width)``.
    ``beta=None`` under the general model falls back to ``DEFAULT_BETA``.
    """

    model: Model = Model.APPROXIMATE
    tau: float = 1.0
    lambda_c: float = 10.0
    beta: float | None = None
    weights: TVWeights = TVWeights(0.5, 1.0, 1.0)
    ranks: tuple | None = None
    mu0: float = 1e-2
    rho: float = 1.5
    mu_max: float = 1e6
    eps: float = 1e-6
    max_iter: int = 100
    hooi_sweeps: int = 1
    hooi_tol: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "weights", TVWeights(*self.weights).check())
        if self.ranks is not None:
            object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.lambda_c <= 0:
            raise ValueError("lambda_c must be > 0")
        if self.beta is not None and self.beta < 0:
            raise ValueError("beta must be >= 0")
        if not self.rho > 1:
            raise ValueError("rho must be > 1")
        if not 0 < self.mu0 <= self.mu_max:
            raise ValueError("need 0 < mu0 <= mu_max")
        if not self.eps > 0:
            raise ValueError("eps must be > 0")
        if self.max_iter < 1 or self.hooi_sweeps < 1:
            raise ValueError("max_iter and hooi_sweeps must be >= 1")

    @property
    def general(self):
        return self.model is Model.GENERAL

    def ranks_for(self, shape):
        ranks = auto_ranks(shape) if self.ranks is None else self.ranks
        if len(ranks) != 3 or any(not 1 <= r <= n for r, n in zip(ranks, shape)):
            raise ValueError(f"ranks {ranks} invalid for cube shape {tuple(shape)}")
        return ranks

    def lambda_for(self, shape):
        return 100.0 * self.lambda_c / np.sqrt(shape[0] * shape[1])

    @property
    def beta_value(self):
        return DEFAULT_BETA if self.beta is None else self.beta

    def to_dict(self):
        d = asdict(self)
        d["model"] = self.model.value
        d["weights"] = list(self.weights)
        d["ranks"] = None if self.ranks is None else list(self.ranks)
        return d


@dataclass
class SolverState:
    X: np.ndarray
    Z: np.ndarray
    S: np.ndarray
    N: np.ndarray
    F: np.ndarray  # stacked gradient, shape (3, h, w, b)
    G1: np.ndarray
    G2: np.ndarray
    G3: np.ndarray  # stacked gradient
    mu: float
    tf: TuckerFactors | None = None
    iter: int = 0


@dataclass
class RestoreReport:
    restored: np.ndarray
    sparse: np.ndarray
    gaussian: np.ndarray
    iterations: int
    rel_change_history: list
    converged: bool
    residual_history: list = field(default_factory=list)
    mu_history: list = field(default_factory=list)
    ranks: tuple = ()
    lam: float = 0.0
    beta: float | None = None

    def summary(self):
        """JSON-friendly diagnostics (no cube payloads)."""
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "ranks": list(self.ranks),
            "lambda": self.lam,
            "beta": self.beta,
            "rel_change_history": list(self.rel_change_history),
            "residual_history": list(self.residual_history),
            "mu_history": list(self.mu_history),
        }


def soft_threshold(x, delta):
    """Elementwise shrinkage ``sign(x) * max(|x| - delta, 0)``."""
    if delta < 0:
        raise ValueError(f"threshold must be non-negative, got {delta}")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - delta, 0.0)


def initial_state(shape, cfg):
    shape = tuple(shape)
    zero = np.zeros(shape)
    zgrad = np.zeros((3, *shape))
    return SolverState(
        X=zero, Z=zero, S=zero, N=zero, F=zgrad,
        G1=zero, G2=zero, G3=zgrad, mu=cfg.mu0,
    )


def x_target(state, Y, cfg):
    """Cube whose best rank-constrained Tucker fit is the X update."""
    r = Y - state.S + state.Z + (state.G1 - state.G2) / state.mu
    if cfg.general:
        r = r - state.N
    return 0.5 * r


def update_x(state, Y, cfg):
    target = x_target(state, Y, cfg)
    ranks = cfg.ranks_for(Y.shape)
    warm = state.tf if state.tf is not None and tuple(state.tf.ranks) == ranks else None
    tf = hooi(target, ranks, warm=warm, sweeps=cfg.hooi_sweeps, tol=cfg.hooi_tol)
    return replace(state, X=tucker_reconstruct(tf), tf=tf)


def update_z(state, cfg):
    """Solve ``(mu I + mu D*D) Z = H`` in the Fourier domain."""
    mu = state.mu
    if mu <= 0:
        raise RuntimeError("penalty parameter must be positive")
    w = cfg.weights
    H = mu * state.X + mu * dw_adjoint(state.F, w) + state.G2 - dw_adjoint(state.G3, w)
    denom = mu * (1.0 + tz_spectrum(H.shape, w))
    Zc = fft3d.ifftn(fft3d.fftn(H) / denom)
    if __debug__:
        resid = np.max(np.abs(Zc.imag)) if Zc.size else 0.0
        assert resid <= 1e-9 * max(1.0, np.max(np.abs(Zc.real))), resid
    return replace(state, Z=np.ascontiguousarray(Zc.real))


def update_f(state, cfg):
    v = dw_forward(state.Z, cfg.weights) + state.G3 / state.mu
    return replace(state, F=soft_threshold(v, cfg.tau / state.mu))


def update_s(state, Y, cfg):
    r = Y - state.X + state.G1 / state.mu
    if cfg.general:
        r = r - state.N
    lam = cfg.lambda_for(Y.shape)
    return replace(state, S=soft_threshold(r, lam / state.mu))


def update_n(state, Y, cfg):
    if not cfg.general:
        raise RuntimeError("the Gaussian component is only updated under the general model")
    mu = state.mu
    N = (mu * (Y - state.X - state.S) + state.G1) / (mu + 2.0 * cfg.beta_value)
    return replace(state, N=N)


def update_multipliers(state, Y, cfg):
    mu = state.mu
    r1 = Y - state.X - state.S
    if cfg.general:
        r1 = r1 - state.N
    return replace(
        state,
        G1=state.G1 + mu * r1,
        G2=state.G2 + mu * (state.X - state.Z),
        G3=state.G3 + mu * (dw_forward(state.Z, cfg.weights) - state.F),
        mu=min(cfg.rho * mu, cfg.mu_max),
    )


def step(state, Y, cfg):
    """One full ALM iteration."""
    state = update_x(state, Y, cfg)
    state = update_z(state, cfg)
    state = update_f(state, cfg)
    state = update_s(state, Y, cfg)
    if cfg.general:
        state = update_n(state, Y, cfg)
    state = update_multipliers(state, Y, cfg)
    return replace(state, iter=state.iter + 1)


def restore(Y, cfg=None):
    """Restore a noisy cube.

    Parameters
    ----------
    Y : array_like, shape (h, w, b)
        Observed cube, ideally with bands normalized to [0, 1].
    cfg : SolverConfig, optional

    Returns
    -------
    RestoreReport
        Stops once ``||X_k - X_{k+1}||_F^2 / ||Y||_F^2 <= eps`` or after
        ``max_iter`` iterations (``converged=False``).
    """
    Y = as_cube(Y, "input cube")
    cfg = SolverConfig() if cfg is None else cfg
    ranks = cfg.ranks_for(Y.shape)
    ynorm2 = frob_norm(Y) ** 2
    denom = ynorm2 if ynorm2 > 0 else 1.0
    ynorm = np.sqrt(denom)

    state = initial_state(Y.shape, cfg)
    history, residuals, mus = [], [], []
    converged = False
    for _ in range(cfg.max_iter):
        x_old = state.X
        state = step(state, Y, cfg)
        rel = frob_norm(x_old - state.X) ** 2 / denom
        history.append(rel)
        mus.append(state.mu)
        resid = Y - state.X - state.S
        if cfg.general:
            resid = resid - state.N
        residuals.append(frob_norm(resid) / ynorm)
        logger.debug("iter %d rel_change %.3e mu %.3e", state.iter, rel, state.mu)
        if rel <= cfg.eps:
            converged = True
            break

    return RestoreReport(
        restored=state.X,
        sparse=state.S,
        gaussian=state.N,
        iterations=state.iter,
        rel_change_history=history,
        converged=converged,
        residual_history=residuals,
        mu_history=mus,
        ranks=ranks,
        lam=cfg.lambda_for(Y.shape),
        beta=cfg.beta_value if cfg.general else None,
    )
