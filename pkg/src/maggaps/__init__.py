"""Semiclassical spectral gaps of periodic magnetic Schroedinger operators.

H(mu) = mu H_A + V / mu on R^n (n = 1, 2) with Z^n-periodic V >= 0 and a
constant magnetic field, discretised on flux-commensurate supercells.
"""

from .errors import (ConfigurationError, CutoffExceeded, DomainError, GeometryError, MagGapsError,
                     MorseTypeViolation, MuTooLarge, NumericalError, RangeError, ResolutionError)
from .experiment import Experiment
from .grid import SupercellGrid
from .group_cocycle import GaugeData, GaugeFunction, LatticeGroup, TwistedElement, multiplier
from .model_operator import ModelSpectrum, OscillatorWell, build_wells, enumerate_spectrum
from .potential import MorsePotential, find_zeros, verify_morse_type
from .trigpoly import TrigPolynomial

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "CutoffExceeded", "DomainError", "Experiment", "GaugeData", "GaugeFunction",
    "GeometryError", "LatticeGroup", "MagGapsError", "ModelSpectrum", "MorsePotential",
    "MorseTypeViolation", "MuTooLarge", "NumericalError", "OscillatorWell", "RangeError",
    "ResolutionError", "SupercellGrid", "TrigPolynomial", "TwistedElement", "build_wells",
    "enumerate_spectrum", "find_zeros", "multiplier", "verify_morse_type",
]
