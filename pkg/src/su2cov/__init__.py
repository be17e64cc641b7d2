"""SU(2)-covariant quantum channels: construction, entanglement and capacity diagnostics."""

__version__ = "0.1.0"
