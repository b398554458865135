"""Trapped photons in subcritical Kerr spacetimes.

Geometry and charts live in ``kerr``, the radial and polar potentials in
``potentials``, the spherical photon orbits in ``spherical``.  ``classifier``
and ``integrator`` decide photon fates two independent ways;
``phasespace`` and ``topology`` check the structure of the trapped set.
"""

from .classifier import Fate, OrbitClass, classify
from .errors import (
    ChartDomainError,
    ChartMismatchError,
    DomainError,
    IntegrationError,
    KerrError,
    NotInPhotonRegion,
    UndefinedFamilyError,
    VerificationError,
    ZeroEnergyError,
)
from .integrator import PhaseState, Termination, integrate, state_from_constants
from .kerr import (
    AxisPoint,
    BLPoint,
    ConservedQuotients,
    Covec4,
    KerrParams,
    MotionConstants,
    Vec4,
)

__version__ = "0.1.0"

__all__ = [
    "AxisPoint", "BLPoint", "ChartDomainError", "ChartMismatchError", "ConservedQuotients",
    "Covec4", "DomainError", "Fate", "IntegrationError", "KerrError", "KerrParams",
    "MotionConstants", "NotInPhotonRegion", "OrbitClass", "PhaseState", "Termination",
    "UndefinedFamilyError", "Vec4", "VerificationError", "ZeroEnergyError", "classify",
    "integrate", "state_from_constants",
]
