"""Exception types raised across the package."""


class KerrError(ValueError):
    """Base class for invalid inputs to Kerr computations."""


class ChartDomainError(KerrError):
    """A point lies outside the domain of the requested coordinate chart."""


class ChartMismatchError(KerrError):
    """Components tagged with one chart were combined with a point of another."""


class ZeroEnergyError(KerrError):
    """Conserved quotients requested for a photon with E = 0."""


class DomainError(KerrError):
    """Input outside the domain of an operation (e.g. inside the horizon)."""


class UndefinedFamilyError(KerrError):
    """The spherical-orbit family functions are undefined for a = 0."""


class NotInPhotonRegion(KerrError):
    """Requested trapped data does not exist at this point."""


class IntegrationError(RuntimeError):
    """The geodesic integrator failed; ``last_state`` holds the last good state."""

    def __init__(self, message, last_state=None, affine=None):
        super().__init__(message)
        self.last_state = last_state
        self.affine = affine


class VerificationError(AssertionError):
    """A numerical verification did not hold."""
