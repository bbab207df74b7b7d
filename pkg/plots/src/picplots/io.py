"""Readers for the simulator's on-disk formats.

These parse the documented layouts directly (diagnostics CSV header
`step,t,E_K,E_E,E_B,E_total,H_dot,P1,...,Pdv,E_l2`; snapshot binary with
magic "VMLS"); the plotting side deliberately shares no code with the
simulator and never mutates its inputs.
"""

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

SNAPSHOT_MAGIC = b"VMLS"


@dataclass
class RunSeries:
    """One diagnostics CSV plus its manifest label."""

    path: str
    columns: dict
    label: str

    @property
    def momentum_names(self):
        return [k for k in self.columns if k.startswith("P")]


def read_diagnostics_csv(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty diagnostics CSV: {path}")
    names = lines[0].split(",")
    required = {"step", "t", "E_K", "E_E", "E_B", "E_total", "H_dot", "E_l2"}
    missing = required - set(names)
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    if len(lines) < 2:
        raise ValueError(f"{path}: header only, no data rows")
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(names):
            raise ValueError(f"{path}: row {i} has {len(parts)} fields, "
                             f"expected {len(names)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ValueError(f"{path}: row {i}: {exc}") from exc
    data = np.array(rows)
    return {name: data[:, j] for j, name in enumerate(names)}


def read_manifest_label(csv_path: str) -> str:
    """Label from the sibling manifest.json; falls back to the directory name."""
    run_dir = os.path.dirname(os.path.abspath(csv_path))
    manifest = os.path.join(run_dir, "manifest.json")
    try:
        with open(manifest, "r", encoding="utf-8") as fh:
            return json.load(fh)["label"]
    except (FileNotFoundError, KeyError, json.JSONDecodeError):
        return os.path.basename(run_dir)


def load_runs(csv_paths) -> list:
    return [RunSeries(path=p, columns=read_diagnostics_csv(p),
                      label=read_manifest_label(p)) for p in csv_paths]


@dataclass
class Snapshot:
    x: np.ndarray
    v: np.ndarray
    w: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    B3: np.ndarray
    meta: dict | None

    @property
    def dv(self) -> int:
        return self.v.shape[1]

    @property
    def config(self) -> dict | None:
        return (self.meta or {}).get("config")


def read_snapshot(path: str) -> Snapshot:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: bad snapshot magic {magic!r}")
        version, n, dv, M = struct.unpack("<IQII", fh.read(20))
        if version != 1:
            raise ValueError(f"{path}: unsupported snapshot version {version}")

        def block(count):
            buf = fh.read(count * 8)
            if len(buf) != count * 8:
                raise ValueError(f"{path}: truncated snapshot")
            return np.frombuffer(buf, dtype="<f8").astype(np.float64)

        x = block(n)
        v = block(n * dv).reshape(n, dv)
        w = block(n)
        E1, E2, B3 = block(M), block(M), block(M)
    meta = None
    try:
        with open(path + ".json", "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except (FileNotFoundError, json.JSONDecodeError):
        pass
    return Snapshot(x=x, v=v, w=w, E1=E1, E2=E2, B3=B3, meta=meta)


def read_score_csv(path: str) -> dict:
    """Columns of a score_test CSV: x, v*, s_est*, s_true*, optionally U*."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 2:
        raise ValueError(f"empty score CSV: {path}")
    names = lines[0].split(",")
    data = np.array([[float(p) for p in ln.split(",")] for ln in lines[1:]])
    if data.shape[1] != len(names):
        raise ValueError(f"{path}: column count mismatch")
    return {name: data[:, j] for j, name in enumerate(names)}


def equilibrium_overlay(snap: Snapshot, component: int):
    """(u, T) of the Maxwellian the run should relax to, from conserved
    quantities of the snapshot: total energy and (VPL) momentum, with
    rho_ion = sum(w)/L. Needs the config sidecar for L, M, and the mode."""
    cfg = snap.config
    if cfg is None:
        raise ValueError("snapshot has no config sidecar; pass u and T explicitly")
    L, M, dv, mode = cfg["L"], cfg["M"], cfg["dv"], cfg["mode"]
    eta = L / M
    wsum = snap.w.sum()
    rho_ion = wsum / L
    E_K = 0.5 * float(np.sum(snap.w * np.einsum("ij,ij->i", snap.v, snap.v)))
    E_E = 0.5 * eta * float(np.sum(snap.E1 ** 2 + snap.E2 ** 2))
    E_B = 0.5 * eta * float(np.sum(snap.B3 ** 2))
    total = E_K + E_E + E_B
    if mode == "VML":
        B_mean = eta * snap.B3.sum() / L
        T = 2.0 / (dv * rho_ion * L) * (total - 0.5 * B_mean ** 2 * L)
        u = 0.0
    else:
        u_vec = snap.w @ snap.v / wsum
        T = 2.0 / (dv * rho_ion * L) * (
            total - 0.5 * rho_ion * float(u_vec @ u_vec) * L)
        u = float(u_vec[component])
    return u, T
