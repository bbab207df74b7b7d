"""Domain state: particle ensemble, grid fields, per-step diagnostics, seeded RNG."""

import math
from dataclasses import dataclass, field

import numpy as np


def seeded_rng(seed: int) -> np.random.Generator:
    """Deterministic PCG64 stream. Identical seeds give bit-identical draws."""
    return np.random.default_rng(seed)


def wrap_position(x, L):
    """x mod L, result in [0, L). Works on scalars and arrays.

    np.mod can round a value just below 0 up to exactly L; such values are
    folded back to 0 so the half-open interval invariant holds.
    """
    if L <= 0:
        raise ValueError("domain length must be positive")
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite position")
    out = np.mod(x, L)
    out = np.where(out >= L, 0.0, out)
    return float(out) if out.ndim == 0 else out


@dataclass
class ParticleEnsemble:
    """n weighted particles: positions in [0, L), velocities in R^dv, equal weights L/n."""

    x: np.ndarray  # (n,)
    v: np.ndarray  # (n, dv)
    w: np.ndarray  # (n,)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dv(self) -> int:
        return self.v.shape[1]

    def validate(self, L: float) -> None:
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.v))
                and np.all(np.isfinite(self.w))):
            raise ValueError("non-finite particle state")
        if self.x.min(initial=0.0) < 0.0 or self.x.max(initial=0.0) >= L:
            raise ValueError("particle positions outside [0, L)")
        if abs(self.w.sum() - L) > 1e-12 * L:
            raise ValueError("total particle weight drifted from L")


@dataclass
class FieldState:
    """Grid fields at cell centers plus the deposited moments.

    E = (E1, E2, 0), B = (0, 0, B3). In VPL mode E2 and B3 stay identically zero.
    """

    E1: np.ndarray          # (M,)
    E2: np.ndarray          # (M,)
    B3: np.ndarray          # (M,)
    rho: np.ndarray         # (M,)
    J: np.ndarray           # (dv, M)
    rho_ion: float

    @classmethod
    def zeros(cls, M: int, dv: int, rho_ion: float = 0.0) -> "FieldState":
        return cls(E1=np.zeros(M), E2=np.zeros(M), B3=np.zeros(M),
                   rho=np.zeros(M), J=np.zeros((dv, M)), rho_ion=rho_ion)

    def validate(self) -> None:
        for name in ("E1", "E2", "B3", "rho", "J"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite field state: {name}")


@dataclass
class DiagnosticsRecord:
    step: int
    t: float
    E_K: float
    E_E: float
    E_B: float
    E_total: float
    H_dot: float
    P: np.ndarray        # (dv,) total momentum sum_p w_p v_p
    E_l2: float

    def row(self) -> list:
        return ([self.step, self.t, self.E_K, self.E_E, self.E_B, self.E_total,
                 self.H_dot] + list(self.P) + [self.E_l2])


def csv_header(dv: int) -> str:
    comps = ",".join(f"P{i + 1}" for i in range(dv))
    return f"step,t,E_K,E_E,E_B,E_total,H_dot,{comps},E_l2"
