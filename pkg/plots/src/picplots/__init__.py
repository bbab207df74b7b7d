"""picplots: figure rendering for scorepic run outputs."""

__version__ = "0.1.0"

from .figures import SNAPSHOT_KINDS, plot_diagnostics, plot_snapshot

__all__ = ["__version__", "SNAPSHOT_KINDS", "plot_diagnostics", "plot_snapshot"]
