"""Exception hierarchy shared by all modules."""


class OptoDistillError(Exception):
    """Base class for every error raised by the package."""


class NotHermitian(OptoDistillError, ValueError):
    pass


class TruncationError(OptoDistillError, ValueError):
    """The Fock cutoff leaves more squeezing weight in the tail than allowed."""


class QuadratureNotConverged(OptoDistillError, RuntimeError):
    pass


class DegenerateOutcome(OptoDistillError, ValueError):
    """Measurement outcome whose unnormalized conditional trace underflows."""


class ZeroBaseline(OptoDistillError, ValueError):
    """The initial negativity vanishes, so the distillation ratio is undefined."""


class GridTooCoarse(OptoDistillError, RuntimeError):
    pass


class SeriesNotConverged(OptoDistillError, ValueError):
    pass


class ConfigError(OptoDistillError, ValueError):
    pass


class ComputeError(OptoDistillError, RuntimeError):
    """Failure inside an experiment, tagged with the grid cell that produced it."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class SpecError(OptoDistillError, ValueError):
    """Plot specification references a column the table does not have."""
