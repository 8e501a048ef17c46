"""Pseudo-random unitaries from a driven chaotic Harper system on the torus,
plus the statistical battery that certifies them against the Haar baseline."""

__version__ = "0.1.0"

from .harper import (  # noqa: F401
    Basis,
    DriftRates,
    DriftSchedule,
    HarperParams,
    drift_propagator,
    floquet_propagator,
)
from .linalg import ContractViolationError  # noqa: F401
