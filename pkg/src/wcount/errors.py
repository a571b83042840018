"""Exception taxonomy shared by the library and the CLI exit-code mapping."""


class WcountError(Exception):
    """Base class for all library errors."""


class ParseError(WcountError):
    """Malformed or semantically invalid input (file format, indices, caps)."""


class EnumerationLimitError(WcountError):
    """An exact enumeration would exceed the configured candidate limit."""

    def __init__(self, candidates, limit):
        super().__init__(
            f"enumeration would visit ~{candidates} candidates, limit is {limit}"
        )
        self.candidates = candidates
        self.limit = limit


class GammaBoundError(WcountError):
    """Weights lie outside the certified zero-free region (gamma <= 1)."""


class AllWeightsZeroError(WcountError):
    """Every weight is zero: w(X) = 1 exactly, nothing to interpolate."""


class InfeasibleWitnessError(WcountError):
    """A supplied witness point does not satisfy its system."""


class IncompatibleInputsError(WcountError):
    """Two submatrices cannot be glued by the connected sum."""
