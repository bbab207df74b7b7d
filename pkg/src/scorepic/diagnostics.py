"""Per-step diagnostics and the on-disk formats (CSV and binary snapshots).

The CSV header `step,t,E_K,E_E,E_B,E_total,H_dot,P1,...,Pdv,E_l2` and the
snapshot layout (magic "VMLS", version u32, n u64, dv u32, M u32, then
x[n], v[n*dv] row-major, w[n], E1[M], E2[M], B3[M], all little-endian
float64, plus a JSON sidecar with the SimConfig) are normative and bit-exact.
"""

import json
import struct

import numpy as np

from .state import DiagnosticsRecord, FieldState, ParticleEnsemble, csv_header

SNAPSHOT_MAGIC = b"VMLS"
SNAPSHOT_VERSION = 1


def compute_diagnostics(particles: ParticleEnsemble, fields: FieldState,
                        eta: float, *, step: int, t: float, nu: float = 0.0,
                        U=None, scores=None) -> DiagnosticsRecord:
    """Energies, momentum, field norm, and the estimated entropy production
    H_dot = sum_p w_p s_p . U_p (zero when collisions are disabled)."""
    w, v = particles.w, particles.v
    E_K = 0.5 * float(np.sum(w * np.einsum("ij,ij->i", v, v)))
    e2 = float(np.sum(fields.E1 ** 2 + fields.E2 ** 2))
    E_E = 0.5 * eta * e2
    E_B = 0.5 * eta * float(np.sum(fields.B3 ** 2))
    H_dot = 0.0
    if nu > 0 and U is not None and scores is not None:
        H_dot = float(np.sum(w * np.einsum("ij,ij->i", scores, U)))
    return DiagnosticsRecord(
        step=step, t=t, E_K=E_K, E_E=E_E, E_B=E_B, E_total=E_K + E_E + E_B,
        H_dot=H_dot, P=w @ v, E_l2=float(np.sqrt(eta * e2)))


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def write_diagnostics_csv(records: list, path: str) -> None:
    if not records:
        raise ValueError(f"no diagnostics records to write: {path}")
    dv = records[0].P.shape[0]
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_header(dv) + "\n")
            for rec in records:
                row = rec.row()
                fh.write(str(row[0]) + "," + ",".join(_fmt(v) for v in row[1:]) + "\n")
    except OSError as exc:
        raise OSError(f"failed to write diagnostics CSV {path}: {exc}") from exc


def read_diagnostics_csv(path: str) -> dict:
    """Parse a diagnostics CSV back into column arrays keyed by header name."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty diagnostics CSV: {path}")
    names = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    if any(len(r) != len(names) for r in rows):
        raise ValueError(f"malformed diagnostics CSV row in {path}")
    cols = {name: np.array([float(r[i]) for r in rows])
            for i, name in enumerate(names)}
    cols["step"] = cols["step"].astype(np.int64)
    return cols


def write_snapshot(particles: ParticleEnsemble, fields: FieldState, step: int,
                   t: float, path: str, config=None) -> None:
    """Binary particle+field state, plus `<path>.json` sidecar with the SimConfig."""
    n, dv = particles.n, particles.dv
    M = fields.E1.shape[0]
    try:
        with open(path, "wb") as fh:
            fh.write(SNAPSHOT_MAGIC)
            fh.write(struct.pack("<IQII", SNAPSHOT_VERSION, n, dv, M))
            for arr in (particles.x, particles.v, particles.w,
                        fields.E1, fields.E2, fields.B3):
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        sidecar = {"step": step, "t": t,
                   "config": config.to_dict() if config is not None else None}
        with open(path + ".json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed to write snapshot {path}: {exc}") from exc


def read_snapshot(path: str):
    """Returns (particles, fields, meta) with meta from the JSON sidecar (if present)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"bad snapshot magic in {path}: {magic!r}")
        version, n, dv, M = struct.unpack("<IQII", fh.read(20))
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version: {version}")

        def block(count):
            buf = fh.read(count * 8)
            if len(buf) != count * 8:
                raise ValueError(f"truncated snapshot: {path}")
            return np.frombuffer(buf, dtype="<f8").astype(np.float64)

        x = block(n)
        v = block(n * dv).reshape(n, dv)
        w = block(n)
        E1, E2, B3 = block(M), block(M), block(M)
    particles = ParticleEnsemble(x=x, v=v, w=w)
    fields = FieldState(E1=E1, E2=E2, B3=B3, rho=np.zeros(M),
                        J=np.zeros((dv, M)), rho_ion=0.0)
    meta = None
    try:
        with open(path + ".json", "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except FileNotFoundError:
        pass
    return particles, fields, meta
