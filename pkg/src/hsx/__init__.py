"""Exact conservative solutions of the Hunter-Saxton equation with measure-valued data."""
from .initial_data import DataError, EquationForm, InitialData, VelocityProfile, build
from .measure import HybridMeasure
from .solution import SolutionSlice, evaluate_u, slice

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "EquationForm",
    "HybridMeasure",
    "InitialData",
    "SolutionSlice",
    "VelocityProfile",
    "build",
    "evaluate_u",
    "slice",
]
