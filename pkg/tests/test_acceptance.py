"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances."""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from lrtdtv.diff_ops import TVWeights, dw_adjoint, dw_forward, tz_spectrum
from lrtdtv.fft3d import fftn, ifftn
from lrtdtv.metrics import ergas, evaluate
from lrtdtv.noise_sim import NoiseSpec, apply_noise
from lrtdtv.solver import SolverConfig, initial_state, restore, soft_threshold, update_z
from lrtdtv.synthetic import make_clean_cube
from lrtdtv.tensor_core import TuckerFactors, frob_norm, tucker_reconstruct
from lrtdtv.tucker import hooi


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def run_case(noise_spec, cfg):
    clean = make_clean_cube((40, 40, 20), ranks=(4, 4, 3), seed=0)
    noisy, masks = apply_noise(clean, noise_spec)
    rep, secs = timed(lambda: restore(noisy, cfg))
    return {
        "clean": clean,
        "noisy": noisy,
        "masks": masks,
        "report": rep,
        "seconds": secs,
        "before": evaluate(clean, noisy),
        "after": evaluate(clean, rep.restored),
    }


def case1():
    return run_case(NoiseSpec(1, seed=42, gaussian_sigma=0.1), SolverConfig())


def case5():
    spec = NoiseSpec(5, seed=43, gaussian_sigma=math.sqrt(0.1), impulse_fraction=0.2,
                     deadline_band_range=(8, 12))
    return run_case(spec, SolverConfig(model="general", beta=10.0))


@pytest.fixture(scope="module")
def run1():
    return case1()


@pytest.fixture(scope="module")
def run5():
    return case5()


def test_criterion_1_operators(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    w = TVWeights(0.5, 1.0, 1.0)
    worst_adj = 0.0
    for _ in range(100):
        shape = tuple(int(v) for v in rng.integers(2, 9, 3))
        x = rng.standard_normal(shape)
        g = rng.standard_normal((3, *shape))
        lhs = np.vdot(dw_forward(x, w), g)
        rhs = np.vdot(x, dw_adjoint(g, w))
        worst_adj = max(worst_adj, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))

    worst_diag = 0.0
    for shape in [(6, 5, 4), (7, 13, 3), (13, 7, 5)]:
        x = rng.standard_normal(shape)
        direct = dw_adjoint(dw_forward(x, w), w)
        spectral = ifftn(tz_spectrum(shape, w) * fftn(x)).real
        worst_diag = max(worst_diag, np.max(np.abs(direct - spectral)) / np.max(np.abs(direct)))

    worst_fft = 0.0
    for shape in [(7, 13, 5), (13, 7, 11), (17, 8, 3), (1, 1, 1)]:
        x = rng.standard_normal(shape)
        worst_fft = max(worst_fft, np.max(np.abs(ifftn(fftn(x)) - x)))
    secs = time.perf_counter() - t0

    ok = worst_adj <= 1e-12 and worst_diag <= 1e-9 and worst_fft <= 1e-10 and secs < 10
    report(capsys, 1, ok, f"adjoint {worst_adj:.1e}, diag {worst_diag:.1e}, "
                          f"fft {worst_fft:.1e}, {secs:.2f}s")
    assert ok


def test_criterion_2_z_update(capsys):
    t0 = time.perf_counter()
    shape = (6, 5, 4)
    rng = np.random.default_rng(202)
    w = TVWeights(0.5, 1.0, 1.0)
    st = replace(
        initial_state(shape, SolverConfig()),
        X=rng.standard_normal(shape), F=rng.standard_normal((3, *shape)),
        G2=rng.standard_normal(shape), G3=rng.standard_normal((3, *shape)), mu=0.8,
    )
    n = int(np.prod(shape))
    D = np.stack([dw_forward(e.reshape(shape), w).ravel() for e in np.eye(n)], axis=1)
    H = st.mu * st.X.ravel() + st.mu * D.T @ st.F.ravel() + st.G2.ravel() - D.T @ st.G3.ravel()
    z_dense = np.linalg.solve(st.mu * np.eye(n) + st.mu * D.T @ D, H)
    z = update_z(st, SolverConfig(weights=w)).Z.ravel()
    rel = np.linalg.norm(z - z_dense) / np.linalg.norm(z_dense)
    secs = time.perf_counter() - t0
    ok = rel <= 1e-8 and secs < 5
    report(capsys, 2, ok, f"relative error {rel:.1e}, {secs:.2f}s")
    assert ok


def _orth(rng, n, r):
    return np.linalg.qr(rng.standard_normal((n, r)))[0]


def test_criterion_3_hooi(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    worst_rec = 0.0
    for _ in range(5):
        tf = TuckerFactors(rng.standard_normal((2, 2, 2)),
                           tuple(_orth(rng, n, 2) for n in (12, 12, 8)))
        cube = tucker_reconstruct(tf)
        fit = hooi(cube, (2, 2, 2), sweeps=3)
        worst_rec = max(worst_rec, frob_norm(tucker_reconstruct(fit) - cube) / frob_norm(cube))

    violations = 0
    for _ in range(50):
        target = rng.standard_normal((12, 12, 8))
        hist = []
        hooi(target, (3, 3, 2), sweeps=6, tol=0.0, history=hist)
        violations += int(np.any(np.diff(hist) > 1e-12))
    secs = time.perf_counter() - t0
    ok = worst_rec <= 1e-8 and violations == 0 and secs < 10
    report(capsys, 3, ok, f"recovery error {worst_rec:.1e}, "
                          f"monotonicity violations {violations}/50, {secs:.2f}s")
    assert ok


def test_criterion_4_prox(capsys):
    rng = np.random.default_rng(404)
    xs = rng.uniform(-3, 3, 1000)
    deltas = rng.uniform(0, 1.5, 1000)
    grid = np.arange(-4.0, 4.0 + 5e-5, 1e-4)
    worst = 0.0
    for x, d in zip(xs, deltas):
        best = grid[np.argmin(d * np.abs(grid) + 0.5 * (grid - x) ** 2)]
        worst = max(worst, abs(float(soft_threshold(x, d)) - best))
    ok = worst <= 1e-4
    report(capsys, 4, ok, f"max deviation from grid minimizer {worst:.1e} (grid step 1e-4)")
    assert ok


def test_criterion_5_case1(capsys, run1):
    b, a = run1["before"], run1["after"]
    checks = {
        "mpsnr": a.mpsnr >= b.mpsnr + 8.0,
        "mssim": a.mssim >= b.mssim + 0.15,
        "ergas": a.ergas <= 0.5 * b.ergas,
        "time": run1["seconds"] < 120,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    report(capsys, 5, ok,
           f"MPSNR {b.mpsnr:.2f}->{a.mpsnr:.2f} dB (gain {a.mpsnr - b.mpsnr:+.2f}, need +8), "
           f"MSSIM {b.mssim:.3f}->{a.mssim:.3f}, ERGAS {b.ergas:.2f}->{a.ergas:.2f}, "
           f"{run1['seconds']:.1f}s" + (f"; failed: {', '.join(failed)}" if failed else ""))
    assert ok, failed


def test_criterion_6_case5(capsys, run5):
    b, a = run5["before"], run5["after"]
    dl = run5["masks"]["deadline"]
    absorbed = float(np.mean(np.abs(run5["report"].sparse[dl]) > 0)) if dl.any() else 0.0
    checks = {
        "mpsnr": a.mpsnr >= b.mpsnr + 6.0,
        "deadline absorption": absorbed >= 0.95,
        "time": run5["seconds"] < 180,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    report(capsys, 6, ok,
           f"MPSNR {b.mpsnr:.2f}->{a.mpsnr:.2f} dB (gain {a.mpsnr - b.mpsnr:+.2f}, need +6), "
           f"dead-line pixels in S {100 * absorbed:.1f}% of {int(dl.sum())} (need 95%), "
           f"{run5['seconds']:.1f}s" + (f"; failed: {', '.join(failed)}" if failed else ""))
    assert ok, failed


def test_criterion_7_convergence(capsys, run1):
    rep = run1["report"]
    hist = rep.rel_change_history
    tail = hist[-10:]
    monotone = len(tail) == 10 and all(y <= x for x, y in zip(tail, tail[1:]))
    ok = rep.converged and rep.iterations <= 100 and hist[-1] <= 1e-6 and monotone
    report(capsys, 7, ok, f"converged={rep.converged} after {rep.iterations} iterations, "
                          f"final rel change {hist[-1]:.1e}, last-10 monotone={monotone}")
    assert ok


def test_criterion_8_metrics(capsys):
    rng = np.random.default_rng(808)
    cube = rng.uniform(0.1, 1.0, (16, 16, 5))
    same = evaluate(cube, cube)
    const = np.full((8, 9, 4), 0.5)
    e = ergas(const, const + 0.1)
    ok = same.mpsnr == 100.0 and same.mssim == 1.0 and same.ergas == 0.0 and abs(e - 20.0) <= 1e-9
    report(capsys, 8, ok, f"identical: {same.mpsnr}, {same.mssim}, {same.ergas}; "
                          f"offset ERGAS {e:.12f}")
    assert ok


def test_criterion_9_determinism(capsys, run1, run5):
    again1, again5 = case1(), case5()
    same = True
    for first, second in ((run1, again1), (run5, again5)):
        same &= np.array_equal(first["noisy"], second["noisy"])
        same &= np.array_equal(first["report"].restored, second["report"].restored)
        same &= np.array_equal(first["report"].sparse, second["report"].sparse)
        same &= first["report"].summary() == second["report"].summary()
    report(capsys, 9, bool(same), "restored cubes, sparse parts and reports bitwise identical"
           if same else "reruns differ")
    assert same


def test_residual_small_at_convergence(run1):
    rep = run1["report"]
    assert rep.converged
    resid = frob_norm(run1["noisy"] - rep.restored - rep.sparse)
    assert resid <= 1e-3 * frob_norm(run1["noisy"])
