"""Age of Information for a power-cycled compute/transmit pipeline with packet deadlines."""

from .model import (
    ComputeTimeModel,
    CouplingModel,
    FeasibleBound,
    GammaCompute,
    GammaFamily,
    ParameterError,
    SystemParams,
    average_power,
    max_feasible_mean_compute,
    mgf,
    transmission_rate,
    validate,
)
from .analysis import AoIReport, DomainError, evaluate, average_aoi, average_peak_aoi
from .simulate import SimConfig, SimEstimate, compare_variants

__version__ = "0.1.0"
