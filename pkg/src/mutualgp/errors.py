"""Exception hierarchy shared by every module."""


class PhaseError(ValueError):
    """Base class for all domain errors raised by mutualgp."""


class ZeroMagnitude(PhaseError):
    """The complex number whose argument was requested is (numerically) zero."""


class DegenerateSpectrum(PhaseError):
    """A qubit density matrix has (numerically) equal eigenvalues."""


class DegenerateSubsystem(DegenerateSpectrum):
    """Subsystem phase requested for a degenerate reduced state.

    The mixed-state phase of a degenerate subsystem needs the path-ordered
    formalism, which is not implemented.
    """


class NonCyclicLoop(PhaseError):
    pass


class TooLarge(PhaseError):
    pass


class OutOfRange(PhaseError):
    pass


class NoConvergence(PhaseError):
    pass


class PreconditionViolated(PhaseError):
    pass


class GridTooCoarse(PhaseError):
    """Full- and half-resolution quadratures disagree beyond tolerance."""


class IndexOutOfRange(PhaseError, IndexError):
    pass
