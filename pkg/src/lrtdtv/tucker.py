"""Rank-constrained Tucker approximation (HOSVD start, HOOI sweeps)."""

import numpy as np

from .tensor_core import TuckerFactors, frob_norm, mode_mul, tucker_reconstruct, unfold

__all__ = ["truncated_svd_factors", "hosvd", "hooi"]


def _fix_signs(vecs):
    # largest-magnitude entry of each column made positive; first index wins ties
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def truncated_svd_factors(mat, r):
    """Leading ``r`` left singular vectors of ``mat``.

    Computed from the symmetric eigendecomposition of the smaller Gram
    matrix. Tall inputs are first reduced with a thin QR so the returned
    basis stays orthonormal to machine precision.

    Parameters
    ----------
    mat : ndarray, shape (m, n)
    r : int
        Number of vectors, ``1 <= r <= min(m, n)``.

    Returns
    -------
    ndarray, shape (m, r)
        Orthonormal columns ordered by descending singular value.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {mat.shape}")
    m, n = mat.shape
    r = int(r)
    if not 1 <= r <= min(m, n):
        raise ValueError(f"rank {r} out of range for a {m}x{n} matrix")

    if m <= n:
        q = None
        gram = mat @ mat.T
    else:
        q, rmat = np.linalg.qr(mat, mode="reduced")
        gram = rmat @ rmat.T
    gram = 0.5 * (gram + gram.T)
    evals, evecs = np.linalg.eigh(gram)
    # eigh sorts ascending; stable descending order keeps index order on ties
    order = np.argsort(-evals, kind="stable")[:r]
    vecs = evecs[:, order]
    if q is not None:
        vecs = q @ vecs
    return _fix_signs(vecs)


def _core(target, factors):
    core = target
    for mode, u in enumerate(factors, start=1):
        core = mode_mul(core, u.T, mode)
    return core


def _check_ranks(shape, ranks):
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != 3:
        raise ValueError(f"need three ranks, got {ranks}")
    for i, (r, n) in enumerate(zip(ranks, shape)):
        if not 1 <= r <= n:
            raise ValueError(f"rank {r} out of range for mode {i + 1} of size {n}")
    return ranks


def hosvd(target, ranks):
    """Truncated higher-order SVD."""
    target = np.asarray(target, dtype=np.float64)
    ranks = _check_ranks(target.shape, ranks)
    factors = tuple(
        truncated_svd_factors(unfold(target, mode), r)
        for mode, r in enumerate(ranks, start=1)
    )
    return TuckerFactors(_core(target, factors), factors)


def hooi(target, ranks, warm=None, sweeps=1, tol=1e-8, history=None):
    """Higher-order orthogonal iteration.

    Parameters
    ----------
    target : ndarray, shape (h, w, b)
    ranks : tuple of int
    warm : TuckerFactors, optional
        Starting factors. Defaults to the truncated HOSVD of ``target``.
    sweeps : int
        Maximum number of full passes over the three modes.
    tol : float
        Stop once the relative reconstruction error changes by less than this.
    history : list, optional
        If given, receives the relative error of the starting point followed
        by the error after every sweep.

    Returns
    -------
    TuckerFactors
    """
    target = np.asarray(target, dtype=np.float64)
    ranks = _check_ranks(target.shape, ranks)
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")

    if warm is None:
        start = hosvd(target, ranks)
        factors = list(start.factors)
        core = start.core
    else:
        if tuple(warm.ranks) != ranks or tuple(warm.shape) != target.shape:
            raise ValueError(
                f"warm start has ranks {warm.ranks} / shape {warm.shape}, "
                f"expected {ranks} / {target.shape}"
            )
        factors = list(warm.factors)
        core = _core(target, factors)

    tnorm = frob_norm(target) or 1.0

    def rel_err(c):
        return frob_norm(target - tucker_reconstruct(TuckerFactors(c, factors))) / tnorm

    err = rel_err(core)
    if history is not None:
        history.append(err)

    for _ in range(sweeps):
        for n in range(3):
            proj = target
            for m in range(3):
                if m != n:
                    proj = mode_mul(proj, factors[m].T, m + 1)
            factors[n] = truncated_svd_factors(unfold(proj, n + 1), ranks[n])
        core = _core(target, factors)
        new_err = rel_err(core)
        if history is not None:
            history.append(new_err)
        done = abs(err - new_err) < tol
        err = new_err
        if done:
            break

    return TuckerFactors(core, tuple(factors))
