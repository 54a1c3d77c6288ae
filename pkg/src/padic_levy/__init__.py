"""Infinitely divisible laws over Q_p and F_p((theta)): exact arithmetic, characteristic functions, samplers."""

from .errors import PadicLevyError
from .field import FieldKind, FieldSpec, PElement, PVector, TurnAngle
from .measure import Atom, BallRegion, Piece, RadialWeight, StepMeasure, charfn_of_measure, convolve
from .charfn import LevyTriplet, KDrift, RealDrift, KDiffusion, RealDiffusion, g, psi
from .process import RngStream, SamplePath, sample_compound_poisson

__all__ = [
    "PadicLevyError", "FieldKind", "FieldSpec", "PElement", "PVector", "TurnAngle",
    "Atom", "BallRegion", "Piece", "RadialWeight", "StepMeasure", "charfn_of_measure", "convolve",
    "LevyTriplet", "KDrift", "RealDrift", "KDiffusion", "RealDiffusion", "g", "psi",
    "RngStream", "SamplePath", "sample_compound_poisson",
]
