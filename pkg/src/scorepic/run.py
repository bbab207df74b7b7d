"""Run orchestration: the per-step pipeline and the initial-score comparison mode.

Per-step stage order (fixed; an optional stage log records it for tests):
interpolate -> Lorentz push -> position advance -> deposit -> field update ->
score update -> collision push. Before the loop: sample the initial ensemble,
initialize fields, pretrain the neural estimator on the analytic initial score.
"""

import json
import os

import numpy as np

from .collision import build_cell_index, collision_force, collision_push
from .config import SimConfig, write_manifest
from .diagnostics import compute_diagnostics, write_diagnostics_csv, write_snapshot
from .equilibrium import analytic_initial_score
from .pic import (Grid, advance_positions, deposit, interpolate_fields,
                  lorentz_push, maxwell_step, vpl_field_step)
from .sampling import initial_fields, sample_ensemble
from .score import BlobEstimator, MlpScoreNet, SbtmEstimator, blob_score
from .state import seeded_rng


def make_estimator(config: SimConfig, grid: Grid, rng):
    if config.estimator == "blob":
        return BlobEstimator(grid, bandwidth=config.fixed_bandwidth())
    if config.estimator == "sbtm":
        net = MlpScoreNet.init_glorot(config.dv, config.hidden, rng)
        return SbtmEstimator(net, config.L, config.K, rng, lr=config.lr,
                             weight_decay=config.weight_decay,
                             divergence=config.divergence,
                             rademacher=config.rademacher)
    raise ValueError(f"no estimator for {config.estimator!r}")


def _initial_score_fn(config: SimConfig):
    preset = config.preset if config.preset != "custom" else "landau_damping"
    return lambda x, v: analytic_initial_score(preset, x, v, c=config.c,
                                               beta=config.beta)


def run(config: SimConfig, out_dir: str, *, stage_log: list | None = None,
        progress: bool = False) -> list:
    """Execute a full simulation; returns the per-step diagnostics records.

    Writes manifest.json, diagnostics.csv, and snapshot_<step>.bin(+.json)
    under out_dir.
    """
    config.validate()
    os.makedirs(out_dir, exist_ok=True)
    rng = seeded_rng(config.seed)
    grid = Grid(config.M, config.eta)

    particles = sample_ensemble(config, rng)
    rho, J = deposit(particles, grid)
    fields = initial_fields(config, grid, rho, J)

    estimator = None
    warnings: list[str] = []
    if config.nu > 0:
        estimator = make_estimator(config, grid, rng)
        if config.estimator == "sbtm":
            result = estimator.pretrain(particles, _initial_score_fn(config),
                                        budget=config.pretrain_budget,
                                        batch=config.pretrain_batch,
                                        lr=config.pretrain_lr)
            warnings.extend(estimator.warnings)
            if progress:
                print(f"pretrain: mse={result.final_mse:.3e} steps={result.steps} "
                      f"converged={result.converged}")
    write_manifest(config, out_dir, warnings)

    n_steps = config.n_steps
    stride = config.snapshot_every or max(1, round(n_steps / 10))
    records = [compute_diagnostics(particles, fields, grid.eta, step=0, t=0.0,
                                   nu=config.nu)]
    write_snapshot(particles, fields, 0, 0.0,
                   os.path.join(out_dir, "snapshot_000000.bin"), config)

    for step in range(1, n_steps + 1):
        E_p, B_p = interpolate_fields(particles, fields, grid)
        _log(stage_log, "interpolate")
        lorentz_push(particles, E_p, B_p, config.dt)
        _log(stage_log, "lorentz")
        advance_positions(particles, config.dt, config.L)
        _log(stage_log, "advance")
        rho, J = deposit(particles, grid)
        fields.rho, fields.J = rho, J
        _log(stage_log, "deposit")
        if config.mode == "VML":
            maxwell_step(fields, J, config.dt, grid)
        else:
            vpl_field_step(fields, J, config.dt)
        _log(stage_log, "field")

        U = scores = None
        if estimator is not None:
            cell_index = build_cell_index(particles, grid)
            estimator.update(particles, cell_index)
            _log(stage_log, "score")
            scores = estimator.estimate(particles, cell_index)
            U = collision_force(particles, scores, cell_index, grid, config.gamma)
            collision_push(particles, U, config.nu, config.dt)
            _log(stage_log, "collide")

        particles.validate(config.L)
        fields.validate()
        t = step * config.dt
        records.append(compute_diagnostics(particles, fields, grid.eta, step=step,
                                           t=t, nu=config.nu, U=U, scores=scores))
        if step % stride == 0 or step == n_steps:
            write_snapshot(particles, fields, step, t,
                           os.path.join(out_dir, f"snapshot_{step:06d}.bin"), config)
        if progress and (step % max(1, n_steps // 10) == 0):
            r = records[-1]
            print(f"step {step}/{n_steps} t={t:.3f} E={r.E_total:.6f} "
                  f"E_l2={r.E_l2:.3e} H_dot={r.H_dot:.3e}")

    if estimator is not None and getattr(estimator, "warnings", None):
        new = [w for w in estimator.warnings if w not in warnings]
        if new:
            warnings.extend(new)
            write_manifest(config, out_dir, warnings)
    write_diagnostics_csv(records, os.path.join(out_dir, "diagnostics.csv"))
    return records


def _log(stage_log, tag: str) -> None:
    if stage_log is not None:
        stage_log.append(tag)


def score_test(config: SimConfig, out_dir: str, *, compute_force: bool = True,
               estimators=("blob", "sbtm")) -> dict:
    """Estimate the t=0 score with each estimator and report MSE against the
    analytic initial score; emits one CSV per estimator with columns
    x, v*, s_est*, s_true* (and U* when the collision force is requested)."""
    config.validate()
    if config.preset == "custom":
        raise ValueError("score_test needs a preset with an analytic initial score")
    os.makedirs(out_dir, exist_ok=True)
    grid = Grid(config.M, config.eta)
    score_fn = _initial_score_fn(config)
    report = {}
    for name in estimators:
        rng = seeded_rng(config.seed)
        particles = sample_ensemble(config, rng)
        cell_index = build_cell_index(particles, grid)
        s_true = score_fn(particles.x, particles.v)
        if name == "blob":
            s_est = blob_score(particles, cell_index, grid, config.fixed_bandwidth())
        elif name == "sbtm":
            net = MlpScoreNet.init_glorot(config.dv, config.hidden, rng)
            est = SbtmEstimator(net, config.L, config.K, rng, lr=config.lr,
                                weight_decay=config.weight_decay)
            est.pretrain(particles, score_fn, budget=config.pretrain_budget,
                         batch=config.pretrain_batch, lr=config.pretrain_lr)
            s_est = est.estimate(particles)
        else:
            raise ValueError(f"unknown estimator: {name!r}")
        err = s_est - s_true
        mse = float(np.sum(particles.w * np.einsum("ij,ij->i", err, err))
                    / particles.w.sum())
        cols = [particles.x] + [particles.v[:, i] for i in range(config.dv)]
        names = ["x"] + [f"v{i+1}" for i in range(config.dv)]
        for label, arr in (("s_est", s_est), ("s_true", s_true)):
            cols += [arr[:, i] for i in range(config.dv)]
            names += [f"{label}{i+1}" for i in range(config.dv)]
        if compute_force:
            U = collision_force(particles, s_est, cell_index, grid, config.gamma)
            cols += [U[:, i] for i in range(config.dv)]
            names += [f"U{i+1}" for i in range(config.dv)]
        path = os.path.join(out_dir, f"score_test_{name}.csv")
        data = np.column_stack(cols)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(names) + "\n")
            for row in data:
                fh.write(",".join(f"{val:.17g}" for val in row) + "\n")
        report[name] = {"mse": mse, "csv": path}
    with open(os.path.join(out_dir, "score_test_report.json"), "w",
              encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
