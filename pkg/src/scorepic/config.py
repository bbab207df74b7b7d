"""Simulation configuration: presets, flat key=value config files, run manifest."""

import dataclasses
import json
import math
import os
from dataclasses import dataclass

MODES = ("VML", "VPL")
ESTIMATORS = ("blob", "sbtm", "none")
PRESETS = ("landau_damping", "two_stream", "weibel", "custom")
DIVERGENCE_MODES = ("hutchinson", "exact")
RADEMACHER_MODES = ("shared", "per_particle")


@dataclass
class SimConfig:
    """All physical and numerical parameters of a run.

    gamma is the collision exponent and is pinned to -dv (Coulomb interaction);
    leave it unset and it is filled in automatically.
    """

    preset: str = "custom"
    mode: str = "VPL"
    L: float = 2.0 * math.pi
    M: int = 64
    dt: float = 0.05
    t_final: float = 1.0
    nu: float = 0.0
    dv: int = 3
    n: int = 1000
    K: int = 100
    seed: int = 0
    estimator: str = "none"
    gamma: float | None = None
    # preset parameters (flattened from the preset definition)
    alpha: float = 0.0
    k: float = 1.0
    c: float = 0.0
    beta: float = 1.0
    alpha_B: float = 0.0
    # score estimation knobs
    hidden: int = 256
    lr: float = 2e-4
    pretrain_lr: float = 1e-3
    weight_decay: float = 1e-4
    pretrain_budget: int = 10000
    pretrain_batch: int = 4096
    divergence: str = "hutchinson"
    rademacher: str = "shared"
    bandwidth: str = "silverman"     # "silverman" or a positive float literal
    # output
    snapshot_every: int = 0          # 0 -> about 10 snapshots per run
    label: str = ""

    def __post_init__(self):
        if self.gamma is None:
            self.gamma = -float(self.dv)

    @property
    def eta(self) -> float:
        return self.L / self.M

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def fixed_bandwidth(self) -> float | None:
        """None for Silverman's rule, otherwise the fixed bandwidth value."""
        if isinstance(self.bandwidth, str):
            if self.bandwidth == "silverman":
                return None
            return float(self.bandwidth)
        return float(self.bandwidth)

    def validate(self) -> None:
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset: {self.preset!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")
        if self.L <= 0 or self.M < 1 or self.eta <= 0:
            raise ValueError("need L > 0 and M >= 1")
        if self.dt <= 0 or self.t_final <= 0:
            raise ValueError("need dt > 0 and t_final > 0")
        if self.n < 2:
            raise ValueError("need n >= 2")
        if self.dv not in (2, 3):
            raise ValueError("dv must be 2 or 3")
        if self.nu < 0:
            raise ValueError("collision frequency nu must be >= 0")
        if self.K < 0:
            raise ValueError("ISM step count K must be >= 0")
        if self.gamma != -float(self.dv):
            raise ValueError(f"gamma must equal -dv = {-self.dv}")
        if self.nu > 0 and self.estimator == "none":
            raise ValueError("collisions require an estimator")
        if self.preset == "weibel" and self.mode != "VML":
            raise ValueError("weibel requires VML")
        if self.preset in ("landau_damping", "two_stream") and self.mode != "VPL":
            raise ValueError(f"{self.preset} requires VPL")
        if not abs(self.alpha) < 1:
            raise ValueError("need |alpha| < 1 for a positive spatial density")
        if self.beta <= 0:
            raise ValueError("need beta > 0")
        # periodicity: k must fit the domain with an integer mode number
        m = self.k * self.L / (2.0 * math.pi)
        if self.k <= 0 or abs(m - round(m)) > 1e-9 * max(1.0, m) or round(m) < 1:
            raise ValueError("wavenumber k must equal 2*pi*m/L for integer m >= 1")
        if self.hidden < 1:
            raise ValueError("hidden width must be >= 1")
        if self.divergence not in DIVERGENCE_MODES:
            raise ValueError(f"divergence must be one of {DIVERGENCE_MODES}")
        if self.rademacher not in RADEMACHER_MODES:
            raise ValueError(f"rademacher must be one of {RADEMACHER_MODES}")
        fixed = self.fixed_bandwidth()
        if fixed is not None and not fixed > 0:
            raise ValueError("fixed bandwidth must be positive")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")

    def run_label(self) -> str:
        return self.label or f"{self.preset}-{self.estimator}-n{self.n}"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def preset_defaults(preset: str) -> dict:
    """Benchmark parameter sets; everything is overridable."""
    if preset == "landau_damping":
        return dict(preset=preset, mode="VPL", alpha=0.1, k=0.5, L=4.0 * math.pi,
                    M=100, dt=0.02, nu=0.4, t_final=15.0, K=100, dv=3, n=500_000,
                    estimator="sbtm", hidden=256, c=0.0, beta=1.0, alpha_B=0.0)
    if preset == "two_stream":
        return dict(preset=preset, mode="VPL", alpha=0.005, k=0.2, L=10.0 * math.pi,
                    M=100, dt=0.05, nu=0.32, t_final=50.0, K=100, dv=3, n=500_000,
                    estimator="sbtm", hidden=256, c=2.4, beta=1.0, alpha_B=0.0)
    if preset == "weibel":
        # nu swept in the source experiments; default to the strongest-collision case
        return dict(preset=preset, mode="VML", alpha=0.0, k=0.2, L=10.0 * math.pi,
                    M=100, dt=0.1, nu=8e-4, t_final=125.0, K=100, dv=3, n=500_000,
                    estimator="sbtm", hidden=512, c=0.3, beta=0.01, alpha_B=1e-3)
    if preset == "custom":
        return dict(preset=preset)
    raise ValueError(f"unknown preset: {preset!r}")


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SimConfig)}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    ftype = _FIELD_TYPES[key]
    if key == "gamma":
        return None if raw.lower() == "none" else float(raw)
    if key == "bandwidth":
        return raw
    if ftype is int or ftype == "int":
        return int(raw)
    if ftype is float or ftype == "float":
        return float(raw)
    return raw


def parse_config_text(text: str) -> dict:
    """Parse the flat `key = value` format; '#' starts a comment; unknown keys are fatal."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key: {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> SimConfig:
    """Layer preset defaults <- config file <- explicit overrides, then validate."""
    file_values = dict(file_values or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    preset = overrides.get("preset", file_values.get("preset", "custom"))
    values = preset_defaults(preset)
    values.update(file_values)
    values.update(overrides)
    cfg = SimConfig(**values)
    cfg.validate()
    return cfg


def write_manifest(config: SimConfig, out_dir: str, warnings: list[str] | None = None) -> str:
    """Run manifest: full config, code version, seed. Written at run start."""
    from . import __version__

    path = os.path.join(out_dir, "manifest.json")
    payload = {
        "label": config.run_label(),
        "code_version": __version__,
        "seed": config.seed,
        "config": config.to_dict(),
        "warnings": list(warnings or []),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
