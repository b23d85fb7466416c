"""Exception and warning types shared across the package."""


class BathforgeError(Exception):
    """Base class for all library errors."""


class DomainError(BathforgeError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole of the function."""


class NonConvergenceError(BathforgeError, RuntimeError):
    """An iterative routine exhausted its budget before reaching tolerance.

    The best available estimate (a ``QuadratureResult`` for integrals, a
    float for root finders) is attached as ``best`` so callers can decide
    whether it is still usable.
    """

    def __init__(self, message, best=None, evaluations=None):
        super().__init__(message)
        self.best = best
        self.evaluations = evaluations


class PoleOnBoundaryError(DomainError):
    """The requested principal-value pole is not interior to the domain."""


class NoSignChangeError(BathforgeError, ValueError):
    """A bracketing root finder was given endpoints of equal sign."""


class NotFoundError(BathforgeError, RuntimeError):
    """A scanned feature (e.g. a kernel sign change) does not exist in range."""


class ValidityError(DomainError):
    """An asymptotic or limiting formula was requested outside its regime."""


class InstabilityError(BathforgeError, ArithmeticError):
    """Bath renormalization would make the resonator statically unstable."""


class DerivativeUnstableError(NonConvergenceError):
    """Richardson levels of a numerical derivative failed to agree."""


class SingularTransductionError(BathforgeError, RuntimeError):
    """Every spectroscopy point fell below the transduction threshold."""


class ZeroDriveError(DomainError):
    """Reconstruction requires a non-zero calibrated drive amplitude."""


class ConfigError(BathforgeError, ValueError):
    """A run configuration failed to parse or validate.

    ``field`` carries the dotted path of the offending entry when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NarrowbandWarning(UserWarning):
    """A near-resonance approximation was evaluated far from the resonance."""


class StrongDampingWarning(UserWarning):
    """gamma/Omega_R exceeds the weak-damping regime; formulas lose accuracy."""


class BackactionWarning(UserWarning):
    """Probe coupling is not weak (g/kappa >= 0.01); backaction was neglected."""
