"""Exception classes raised by the toolkit.

Every error derives from :class:`FermiCondError`, which is a ``ValueError``
so that callers treating bad numerical input generically keep working.
"""


class FermiCondError(ValueError):
    """Base class for all input and numerical-validity errors."""


class DimensionMismatch(FermiCondError):
    pass


class NotHermitian(FermiCondError):
    pass


class SpectrumOutOfRange(FermiCondError):
    """A symbol candidate has an eigenvalue outside ``[0, 1]``."""

    def __init__(self, eigenvalue: float, message: str | None = None):
        self.eigenvalue = float(eigenvalue)
        super().__init__(message or f"eigenvalue {self.eigenvalue:.6g} outside [0, 1]")


class ReconstructionFailed(FermiCondError):
    pass


class SingularC(FermiCondError):
    """``C`` or ``1 - C`` is singular; trim the block first."""


class SingularSpectrum(FermiCondError):
    pass


class SingularResolvent(FermiCondError):
    pass


class TargetOutOfRange(FermiCondError):
    pass


class TargetNotReachable(FermiCondError):
    pass


class NotGaugeInvariant(FermiCondError):
    pass


class NotPositive(FermiCondError):
    pass


class NotNormalized(FermiCondError):
    pass


class NotNormalizable(FermiCondError):
    pass


class SNotPositive(FermiCondError):
    pass


class SExceedsComplement(FermiCondError):
    pass


class RankDeficient(FermiCondError):
    pass


class TooManyModes(FermiCondError):
    pass


class NoPrincipalLog(FermiCondError):
    pass


class Defective(FermiCondError):
    pass


class UnknownSuite(FermiCondError):
    pass
