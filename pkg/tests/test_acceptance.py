"""Acceptance suite: one test per criterion A1-A11, each printing a pass/fail
line (run with `pytest -s tests/test_acceptance.py` to watch them live).

Criteria pin n, dimensions, tolerances, and estimators; remaining knobs
(dt, K, hidden width, pretraining budget) are desk-scale choices recorded
inline. Seeds are fixed a priori (0, or 0,1,2 where several are required).
"""

import itertools
import math
import os
import time

import numpy as np
import pytest

from scorepic.collision import build_cell_index, collision_force
from scorepic.config import build_config
from scorepic.diagnostics import read_snapshot
from scorepic.equilibrium import vml_equilibrium, vpl_equilibrium
from scorepic.pic import Grid, deposit
from scorepic.run import run, score_test
from scorepic.sampling import initial_fields, sample_ensemble
from scorepic.score import (BlobEstimator, MlpScoreNet, SbtmEstimator,
                            exact_divergence, hutchinson_divergence,
                            ism_loss_and_grad, mlp_forward)
from scorepic.state import ParticleEnsemble, seeded_rng

from oracles import brute_collision_force_vec, fd_loss_gradient


def check(name: str, passed: bool, detail: str) -> None:
    print(f"[{name}] {'PASS' if passed else 'FAIL'}: {detail}")
    assert passed, f"{name}: {detail}"


def _random_collision_ensembles():
    """100 random ensembles across n in {1e2, 1e3, 1e4} and dv in {2, 3}."""
    rng = seeded_rng(0)
    sizes = [100] * 40 + [1000] * 40 + [10000] * 20
    out = []
    for i, n in enumerate(sizes):
        dv = 2 if i % 2 == 0 else 3
        L = float(rng.uniform(3.0, 15.0))
        M = int(rng.integers(1, 17))
        grid = Grid(M, L / M)
        p = ParticleEnsemble(x=rng.uniform(0, L, n),
                             v=rng.normal(size=(n, dv)) * rng.uniform(0.2, 2.0),
                             w=np.full(n, L / n))
        s = rng.normal(size=(n, dv)) * rng.uniform(0.1, 5.0)
        ci = build_cell_index(p, grid)
        U = collision_force(p, s, ci, grid, gamma=-float(dv))
        out.append((p, s, U))
    return out


@pytest.fixture(scope="module")
def collision_ensembles():
    return _random_collision_ensembles()


def test_A1_collision_conservation(collision_ensembles):
    t0 = time.perf_counter()
    worst_mom = worst_en = 0.0
    for p, s, U in collision_ensembles:
        wU = p.w[:, None] * U
        mom = np.max(np.abs(wU.sum(axis=0)))
        mom_scale = max(np.max(np.abs(wU)), 1e-300) * p.n
        worst_mom = max(worst_mom, mom / mom_scale)
        en = abs(float(np.sum(p.w * np.einsum("ij,ij->i", p.v, U))))
        en_scale = max(float(np.sum(p.w * np.linalg.norm(p.v, axis=1)
                                    * np.linalg.norm(U, axis=1))), 1e-300)
        worst_en = max(worst_en, en / en_scale)
    elapsed = time.perf_counter() - t0
    check("A1", worst_mom <= 1e-10 and worst_en <= 1e-10,
          f"momentum {worst_mom:.2e}, energy {worst_en:.2e} (rel, 100 ensembles, "
          f"tol 1e-10, {elapsed:.1f}s)")


def test_A2_entropy_sign(collision_ensembles):
    worst = 0.0
    for p, s, U in collision_ensembles:
        h_dot = float(np.sum(p.w * np.einsum("ij,ij->i", s, U)))
        scale = max(float(np.sum(p.w * np.linalg.norm(s, axis=1)
                                 * np.linalg.norm(U, axis=1))), 1e-300)
        worst = min(worst, h_dot / scale) if h_dot < 0 else worst
    check("A2", worst >= -1e-10,
          f"most negative H_dot/scale {worst:.2e} (tol -1e-10, 100 ensembles)")


def test_A3_binned_equals_brute_force():
    t0 = time.perf_counter()
    rng = seeded_rng(0)
    worst = 0.0
    for trial in range(20):
        n = int(rng.integers(20, 201))
        dv = 2 if trial % 2 == 0 else 3
        L = float(rng.uniform(3.0, 12.0))
        M = int(rng.integers(1, 11))
        grid = Grid(M, L / M)
        p = ParticleEnsemble(x=rng.uniform(0, L, n), v=rng.normal(size=(n, dv)),
                             w=np.full(n, L / n))
        s = rng.normal(size=(n, dv))
        U = collision_force(p, s, build_cell_index(p, grid), grid, -float(dv))
        U_ref = brute_collision_force_vec(p.x, p.v, p.w, s, grid.eta, L,
                                          -float(dv))
        scale = max(1.0, np.max(np.abs(U_ref)))
        worst = max(worst, np.max(np.abs(U - U_ref)) / scale)
    elapsed = time.perf_counter() - t0
    check("A3", worst <= 1e-13,
          f"max |binned - brute|/scale {worst:.2e} over 20 instances "
          f"(tol 1e-13, {elapsed:.1f}s)")


def test_A4_ism_gradient_correctness():
    t0 = time.perf_counter()
    rng = seeded_rng(0)
    n, hidden, dv = 64, 16, 3
    worst = 0.0
    for mode in ("exact", "hutchinson"):
        net = MlpScoreNet.init_glorot(dv, hidden, rng)
        net.b1 = rng.normal(size=hidden) * 0.1
        net.b2 = rng.normal(size=dv) * 0.1
        x = rng.random(n)
        v = rng.normal(size=(n, dv))
        w = np.full(n, 4 * math.pi / n)
        z = rng.integers(0, 2, size=dv) * 2.0 - 1.0 if mode == "hutchinson" else None
        _, grads = ism_loss_and_grad(net, x, v, w, divergence=mode, z=z)
        params = net.params()
        coords = [(int(rng.integers(4)), 0) for _ in range(24)]
        coords = [(ai, int(rng.integers(params[ai].size))) for ai, _ in coords]

        def loss_fn(_p, mode=mode, z=z, net=net, x=x, v=v, w=w):
            s = mlp_forward(net, x, v)
            div = (exact_divergence(net, x, v) if mode == "exact"
                   else hutchinson_divergence(net, x, v, z))
            return float(np.sum(w * (np.einsum("ij,ij->i", s, s) + 2.0 * div)))

        fd = fd_loss_gradient(loss_fn, params, coords)
        an = np.array([grads[ai].flat[off] for ai, off in coords])
        scale = np.maximum(np.abs(an), 1e-10 * max(np.abs(an).max(), 1.0))
        worst = max(worst, float(np.max(np.abs(fd - an) / scale)))
    elapsed = time.perf_counter() - t0
    check("A4", worst <= 1e-5,
          f"max relative grad error {worst:.2e} over 48 coordinates, both "
          f"divergence modes (tol 1e-5, {elapsed:.1f}s)")


def test_A5_hutchinson_unbiasedness():
    rng = seeded_rng(0)
    worst = 0.0
    for trial in range(50):
        dv = 2 if trial % 2 == 0 else 3
        net = MlpScoreNet.init_glorot(dv, int(rng.integers(4, 33)), rng)
        net.b1 = rng.normal(size=net.hidden) * 0.2
        x = float(rng.random())
        v = rng.normal(size=dv)
        probes = [np.array(zz, dtype=float)
                  for zz in itertools.product([-1.0, 1.0], repeat=dv)]
        mean = float(np.mean([hutchinson_divergence(net, x, v, zz)
                              for zz in probes]))
        exact = exact_divergence(net, x, v)
        worst = max(worst, abs(mean - exact) / max(1.0, abs(exact)))
    check("A5", worst <= 1e-12,
          f"max |sign-average - exact| {worst:.2e} over 50 random nets "
          f"(tol 1e-12)")


def test_A6_equilibrium_relaxation(tmp_path):
    # pinned: VPL landau_damping, dv=2, n=2e4, M=32, nu=1.0, t_final=10, sbtm.
    # desk-scale choices: dt=0.02, K=10, hidden=64, pretraining budget 3000.
    #
    # Known-red momentum sub-criterion: with the pinned field evolution
    # (E1 advanced by -dt*J1 after a Poisson init) the spatially uniform mode
    # of E1 reacts to the net sampled current, so the total momentum P1 and
    # the mean field form an undamped oscillator at the plasma frequency:
    # P1(t) ~ P1(0) cos(t) with P1(0) pure sampling noise of std L/sqrt(n).
    # Collisions cannot damp it (the collision force conserves P for any
    # score input), so ||P(10) - P(0)|| ~ 1.84 |P1(0)| ~ 0.16 |N(0,1)| at
    # n = 2e4, and the 1e-2 bound holds for only ~5% of seeds. The a-priori
    # seed 0 is used; the decomposition below separates the structural mode
    # from all other drift sources.
    t0 = time.perf_counter()
    cfg = build_config(overrides=dict(
        preset="landau_damping", dv=2, n=20000, M=32, nu=1.0, t_final=10.0,
        dt=0.02, K=10, hidden=64, estimator="sbtm", pretrain_budget=3000,
        seed=0))
    out = str(tmp_path / "a6")
    records = run(cfg, out)
    final_snap = os.path.join(out, f"snapshot_{cfg.n_steps:06d}.bin")
    particles, _, _ = read_snapshot(final_snap)
    eq = vpl_equilibrium(records[0].E_total, records[0].P, rho_ion=1.0,
                         volume=cfg.L)
    wsum = particles.w.sum()
    u_hat = particles.w @ particles.v / wsum
    temps = np.array([float(np.sum(particles.w * (particles.v[:, i] - u_hat[i]) ** 2) / wsum)
                      for i in range(cfg.dv)])
    dP_vec = records[-1].P - records[0].P
    dP = float(np.linalg.norm(dP_vec))
    slosh = records[0].P[0] * (math.cos(cfg.t_final) - 1.0)
    residual = float(np.linalg.norm(dP_vec - np.array([slosh, 0.0])))
    elapsed = time.perf_counter() - t0
    temp_ok = bool(np.all(np.abs(temps - eq.T_inf) <= 0.05 * eq.T_inf))
    mom_ok = dP < 1e-2
    print(f"[A6] temperature {'PASS' if temp_ok else 'FAIL'}: per component "
          f"{np.round(temps, 4)} vs T_inf {eq.T_inf:.4f} (tol 5%)")
    print(f"[A6] momentum {'PASS' if mom_ok else 'FAIL'}: |dP| {dP:.3e} "
          f"(tol 1e-2); uniform-mode prediction P1(0)(cos(10)-1) = {slosh:.3e}, "
          f"drift beyond that mode {residual:.3e}")
    check("A6", temp_ok and mom_ok,
          f"T within 5% of T_inf: {temp_ok}; |dP| {dP:.3e} < 1e-2: {mom_ok} "
          f"({elapsed:.0f}s)")


def test_A7_collisionless_estimator_equivalence(tmp_path):
    t0 = time.perf_counter()
    blobs = {}
    for est in ("blob", "sbtm"):
        cfg = build_config(overrides=dict(preset="landau_damping", dv=2,
                                          n=10000, M=64, nu=0.0, t_final=1.0,
                                          estimator=est, seed=0))
        out = str(tmp_path / f"a7_{est}")
        run(cfg, out)
        blobs[est] = open(os.path.join(out, "diagnostics.csv"), "rb").read()
    elapsed = time.perf_counter() - t0
    check("A7", blobs["blob"] == blobs["sbtm"],
          f"nu=0 blob vs sbtm diagnostics CSVs bit-identical "
          f"({len(blobs['blob'])} bytes, {elapsed:.1f}s)")


def test_A8_initial_score_mse_ordering(tmp_path):
    # pinned: two_stream, n=1e5, dv=3, 3 seeds, median comparison.
    # desk-scale pretraining: budget 1500, batch 8192.
    t0 = time.perf_counter()
    blob_mses, sbtm_mses = [], []
    for seed in (0, 1, 2):
        cfg = build_config(overrides=dict(preset="two_stream", n=100000, dv=3,
                                          pretrain_budget=1500, seed=seed))
        cfg.pretrain_batch = 8192
        report = score_test(cfg, str(tmp_path / f"a8_seed{seed}"),
                            compute_force=False)
        blob_mses.append(report["blob"]["mse"])
        sbtm_mses.append(report["sbtm"]["mse"])
    blob_med = float(np.median(blob_mses))
    sbtm_med = float(np.median(sbtm_mses))
    elapsed = time.perf_counter() - t0
    check("A8", sbtm_med < blob_med,
          f"median MSE sbtm {sbtm_med:.4f} < blob {blob_med:.4f} over 3 seeds "
          f"({elapsed:.0f}s)")


def test_A9_energy_bookkeeping():
    rng = seeded_rng(0)
    n, dv = 100000, 3
    L = 4 * math.pi
    v = rng.normal(size=(n, dv))
    w = np.full(n, L / n)
    E_K = 0.5 * float(np.sum(w * np.einsum("ij,ij->i", v, v)))
    expected_K = 0.5 * dv * L
    sigma_K = 0.5 * L * math.sqrt(2.0 * dv / n)
    kinetic_ok = abs(E_K - expected_K) <= 4 * sigma_K

    cfg = build_config(overrides=dict(preset="landau_damping", n=n, seed=0))
    grid = Grid(cfg.M, cfg.eta)
    ens = sample_ensemble(cfg, seeded_rng(0))
    rho, J = deposit(ens, grid)
    fields = initial_fields(cfg, grid, rho, J)
    E_E = 0.5 * grid.eta * float(np.sum(fields.E1 ** 2))
    expected_E = cfg.alpha ** 2 * cfg.L / (4 * cfg.k ** 2)
    # mode-amplitude shot noise sqrt(2/n) enters the energy quadratically;
    # the other modes add the deposition noise floor
    sig = math.sqrt(2.0 / n)
    k_m = 2 * math.pi * np.arange(1, cfg.M // 2 + 1) / cfg.L
    noise_floor = cfg.L / (2 * n) * float(np.sum(1.0 / k_m ** 2))
    hi = (cfg.alpha + 4 * sig) ** 2 * cfg.L / (4 * cfg.k ** 2) + 4 * noise_floor
    lo = (cfg.alpha - 4 * sig) ** 2 * cfg.L / (4 * cfg.k ** 2)
    field_ok = lo <= E_E <= hi
    check("A9", kinetic_ok and field_ok,
          f"E_K {E_K:.3f} vs {expected_K:.3f} (4sig {4 * sigma_K:.3f}); "
          f"E_E {E_E:.4f} vs {expected_E:.4f} in [{lo:.4f}, {hi:.4f}] "
          f"(~0.13 at benchmark parameters)")


def test_A10_scaling_trend():
    t0 = time.perf_counter()
    sizes = (10000, 20000, 40000)
    L = 10 * math.pi
    rng = seeded_rng(0)

    def particles_of(n):
        return ParticleEnsemble(x=rng.uniform(0, L, n),
                                v=rng.normal(size=(n, 3)),
                                w=np.full(n, L / n))

    # SBTM: K full-batch gradient steps are O(n) each
    sbtm_times = []
    for n in sizes:
        p = particles_of(n)
        net = MlpScoreNet.init_glorot(3, 256, rng)
        est = SbtmEstimator(net, L, K=3, rng=seeded_rng(1))
        est.update(p)  # warm-up (jit compile once)
        reps = []
        for _ in range(3):
            t1 = time.perf_counter()
            est.update(p)
            reps.append(time.perf_counter() - t1)
        sbtm_times.append(float(np.median(reps)))
    sbtm_r1 = sbtm_times[1] / sbtm_times[0]
    sbtm_r2 = sbtm_times[2] / sbtm_times[1]

    # blob with a single global cell: O(n^2) pairwise kernel sums
    grid = Grid(1, L)
    blob = BlobEstimator(grid)
    blob_times = []
    for n in sizes:
        p = particles_of(n)
        ci = build_cell_index(p, grid)
        blob.estimate(p, ci)  # warm-up
        reps = []
        for _ in range(2 if n < sizes[-1] else 1):
            t1 = time.perf_counter()
            blob.estimate(p, ci)
            reps.append(time.perf_counter() - t1)
        blob_times.append(float(np.min(reps)))
    blob_r1 = blob_times[1] / blob_times[0]
    blob_r2 = blob_times[2] / blob_times[1]
    elapsed = time.perf_counter() - t0
    check("A10",
          sbtm_r1 < 2.5 and sbtm_r2 < 2.5 and blob_r1 > 2.5 and blob_r2 > 2.5,
          f"sbtm update ratios {sbtm_r1:.2f}, {sbtm_r2:.2f} (< 2.5); "
          f"blob one-cell ratios {blob_r1:.2f}, {blob_r2:.2f} (> 2.5); "
          f"times sbtm {np.round(sbtm_times, 3)}s blob {np.round(blob_times, 2)}s "
          f"({elapsed:.0f}s)")


def test_A11_weibel_equilibrium_oracle():
    cfg = build_config(overrides=dict(preset="weibel", n=100000, seed=0))
    grid = Grid(cfg.M, cfg.eta)
    ens = sample_ensemble(cfg, seeded_rng(0))
    rho, J = deposit(ens, grid)
    fields = initial_fields(cfg, grid, rho, J)
    E_K = 0.5 * float(np.sum(ens.w * np.einsum("ij,ij->i", ens.v, ens.v)))
    E_B = 0.5 * grid.eta * float(np.sum(fields.B3 ** 2))
    B_mean = np.array([0.0, 0.0, grid.eta * fields.B3.sum() / cfg.L])
    eq = vml_equilibrium(E_K + E_B, B_mean, rho_ion=1.0, volume=cfg.L)
    check("A11", abs(eq.T_inf - 0.035) <= 0.03 * 0.035,
          f"T_inf {eq.T_inf:.5f} vs 0.035 (tol 3%)")
