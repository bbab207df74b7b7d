"""scorepic: deterministic collisional PIC in 1D-x / 2-3D-v with interchangeable
kernel (blob) and neural (SBTM) velocity-score estimators."""

__version__ = "0.1.0"

from .config import SimConfig, build_config, preset_defaults
from .state import DiagnosticsRecord, FieldState, ParticleEnsemble, seeded_rng, wrap_position

__all__ = [
    "__version__",
    "SimConfig",
    "build_config",
    "preset_defaults",
    "DiagnosticsRecord",
    "FieldState",
    "ParticleEnsemble",
    "seeded_rng",
    "wrap_position",
]
