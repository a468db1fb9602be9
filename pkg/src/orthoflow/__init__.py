"""Analytic actions of SO°(p,q) on spheres and twisted products, built from circle flows."""

from . import action_engine, circleflow, ledger, numkit, orbit_lab, sopq
from .errors import OrthoflowError

__all__ = ["action_engine", "circleflow", "ledger", "numkit", "orbit_lab", "sopq", "OrthoflowError"]
__version__ = "0.1.0"
