"""Spectral functional calculus and point-level tower maps for spaces of isometries.

Modules:

* :mod:`isotower.facial`  - eigenvalue spaces, facial maps, NDR data, degrees
* :mod:`isotower.opcalc`  - eigenvalue and singular-value calculus on matrices
* :mod:`isotower.tower`   - tower points, Thom points and the maps between them
* :mod:`isotower.kresidue` - exact representation-ring residues and the splitting obstruction
* :mod:`isotower.cli`     - the ``isotower`` command
"""
from .facial import BASEPOINT, INFINITY, EigenTuple, FacialMap, is_infinity

__version__ = "0.1.0"

__all__ = ["BASEPOINT", "INFINITY", "EigenTuple", "FacialMap", "is_infinity", "__version__"]
