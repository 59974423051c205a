"""Gain, squeezing and resonator-design search for resonantly phase-matched JTWPAs."""

__version__ = "0.1.0"

from .circuit import DeviceParams, NormalizedCell, ResonatorParams, derive_device, normalize, solve_constraints
from .dispersion import DispersionContext
from .mixer import LossModel, ModeCoefficients, PumpConfig, coefficients, device_squeezing, gain_db
from .optimize import Objective, SearchSpace, optimize, pareto_scan
from .sweep import FrequencyGrid, Metric, SpectrumResult, SweepGrid2D, spectrum, sweep_1d, sweep_2d

__all__ = [
    "DeviceParams",
    "DispersionContext",
    "FrequencyGrid",
    "LossModel",
    "Metric",
    "ModeCoefficients",
    "NormalizedCell",
    "Objective",
    "PumpConfig",
    "ResonatorParams",
    "SearchSpace",
    "SpectrumResult",
    "SweepGrid2D",
    "coefficients",
    "derive_device",
    "device_squeezing",
    "gain_db",
    "normalize",
    "optimize",
    "pareto_scan",
    "solve_constraints",
    "spectrum",
    "sweep_1d",
    "sweep_2d",
]
