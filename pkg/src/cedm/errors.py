"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError and usage problems exit 2,
data-shaped problems exit 3, numeric failures exit 4.
"""


class CedmError(Exception):
    """Base class for all package-specific errors."""


# -- configuration / usage ---------------------------------------------------

class ConfigError(CedmError):
    pass


class UnknownBenchmarkError(ConfigError):
    pass


# -- graph construction ------------------------------------------------------

class GraphError(CedmError):
    pass


class CycleError(GraphError):
    """A directed cycle was found; ``cycle`` holds one offending node sequence."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("directed cycle: " + " -> ".join(str(v) for v in self.cycle))


class SelfLoopError(GraphError):
    pass


class MissingEdgeError(GraphError):
    pass


# -- data shape / content ----------------------------------------------------

class DataError(CedmError):
    pass


class DataShapeError(DataError):
    pass


class DimensionError(DataError):
    pass


class WidthMismatchError(DataError):
    pass


class MissingColumnError(DataError):
    pass


class ShapeError(DataError):
    pass


class RangeError(DataError):
    pass


class ModelMismatchError(DataError):
    pass


class NotLinearGaussianError(DataError):
    pass


class ArchiveError(DataError):
    """Model archive unreadable, wrong version, or hash mismatch."""


# -- numeric failures --------------------------------------------------------

class NumericError(CedmError):
    pass


class PerfectDependenceError(NumericError):
    """Response is a sample-exact function of the conditioning set (denominator 0)."""


class TooFewSamplesError(NumericError):
    pass


class DegenerateDenominatorError(NumericError):
    pass


class DegenerateError(NumericError):
    pass


class NumericalDivergenceError(NumericError):
    pass
