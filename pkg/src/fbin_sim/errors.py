"""Exception hierarchy shared by all fbin_sim modules."""


class FbinError(Exception):
    """Base class for every error raised by fbin_sim."""


class NormalizationError(FbinError, ValueError):
    """A state or bra has zero (or otherwise invalid) norm."""


class DimensionError(FbinError, ValueError):
    """Array shapes disagree with the register layout."""


class RegisterError(FbinError, ValueError):
    """Unknown, duplicated or mismatched register, bin or level."""


class WeightError(FbinError, ValueError):
    """Mixture weights are not a probability distribution."""


class HeraldFailure(FbinError):
    """A conditioning projection has (numerically) zero probability."""


class ParameterError(FbinError, ValueError):
    """A physical parameter lies outside its allowed range."""


class SingularityError(FbinError, ZeroDivisionError):
    """The cavity reflection formula is evaluated at its pole."""


class GridError(FbinError, ValueError):
    """A measurement grid is too coarse for the requested transforms."""


class ParseError(FbinError, ValueError):
    """Malformed configuration or state file."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
