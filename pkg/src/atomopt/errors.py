"""Exception hierarchy shared by the numerical kernels and the physics layers."""


class AtomOptError(Exception):
    """Base class for every error raised by this package."""


class NonStable(AtomOptError):
    """The drift matrix has an eigenvalue with non-negative real part."""


class SingularSystem(AtomOptError):
    """A dense linear system is numerically singular."""


class SingularBlock(SingularSystem):
    """The conditioning block of a Schur complement cannot be inverted."""


class NonConvergence(AtomOptError):
    """The QR eigenvalue iteration did not converge."""


class NotPositiveDefinite(AtomOptError):
    """A covariance matrix failed the Cholesky positive-definiteness test."""


class ComplexEigenvalue(AtomOptError):
    """The two-mode symplectic discriminant is negative beyond round-off."""


class DegenerateDrive(AtomOptError):
    """The stationary mean-field denominator vanishes."""


class DegenerateFormula(AtomOptError):
    """A denominator of the closed-form covariance entries vanishes."""


class ConfigError(AtomOptError):
    """A run configuration is malformed or incomplete."""


class EmptyInput(AtomOptError):
    """An aggregate was requested over an empty collection."""
