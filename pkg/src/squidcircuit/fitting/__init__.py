"""Least-squares extraction of circuit, flux, thermal and Kerr parameters."""

from .background import BackgroundModel, BackgroundResult, correct_trace
from .dressed import DressedFit, fit_dressed_mode
from .kerr_fit import KappaEProfile, KerrFit, fit_kerr
from .lsq import ConditioningWarning, LsqResult, solve
from .resonance import ResonanceFit, fit_resonance, notch
from .thermal_fit import ThermalFit, fit_thermal
from .tuning import FluxFit, fit_tuning_curve

__all__ = [
    "BackgroundModel", "BackgroundResult", "correct_trace", "DressedFit", "fit_dressed_mode",
    "KappaEProfile", "KerrFit", "fit_kerr", "ConditioningWarning", "LsqResult", "solve",
    "ResonanceFit", "fit_resonance", "notch", "ThermalFit", "fit_thermal", "FluxFit",
    "fit_tuning_curve",
]
