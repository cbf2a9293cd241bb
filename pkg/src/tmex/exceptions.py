"""Exception hierarchy shared across the package."""


class TmexError(Exception):
    """Base class for all package errors."""


class CycleError(TmexError):
    """The graph has no topological order."""


class ArityError(TmexError):
    """A measurement function does not match its block's parents or dimension."""


class DimError(TmexError, ValueError):
    """An array has the wrong width for the operation."""


class ShapeError(TmexError, ValueError):
    """Two arrays that must agree in shape do not."""


class SingularError(TmexError):
    """A linear system is numerically singular."""


class DegenerateError(TmexError):
    """An input has (numerically) zero variance where variation is required."""


class SmallSampleError(TmexError):
    """Too few rows for the requested procedure."""


class OverlapError(TmexError):
    """Propensity scores fall outside the allowed overlap band."""


class WeakInstrumentError(TmexError):
    """The instrument is not (detectably) related to the treatment."""


class ConfigError(TmexError):
    """A configuration file or value is invalid."""


class DataError(TmexError):
    """A data file is malformed or inconsistent with its model."""


class IntegrityError(DataError):
    """A report's stored aggregates disagree with its per-repeat records."""


class CellTestError(TmexError):
    """A conditional-independence test failed for one cell of the T-MEX grid.

    The original exception is chained as ``__cause__``.
    """

    def __init__(self, latent, block, cause):
        self.latent = latent
        self.block = block
        super().__init__(f"test for cell (z{latent + 1}, A{block + 1}) failed: {cause}")
