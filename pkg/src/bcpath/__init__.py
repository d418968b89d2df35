"""Shortest bounded-curvature paths and length-monotone path reduction."""

from .cspath import CsComponent, CsPath, SampledPath
from .dubins import DubinsSolution, solve_dubins
from .geometry import Config

__all__ = ["Config", "CsComponent", "CsPath", "SampledPath", "DubinsSolution", "solve_dubins"]
__version__ = "0.1.0"
