"""Simulation and exact checking of trap-based accreditation for hybrid
analogue-digital quantum simulators."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    ChannelError,
    ConfigError,
    DimensionError,
    HqsError,
    NotTwoColourable,
)
from .kernels import BACKEND  # noqa: E402
from .protocol import compute_n_traps, run_protocol, validate_bound  # noqa: E402

__all__ = [
    "BACKEND",
    "CapacityError",
    "ChannelError",
    "ConfigError",
    "DimensionError",
    "HqsError",
    "NotTwoColourable",
    "compute_n_traps",
    "run_protocol",
    "validate_bound",
]
