"""Exception hierarchy shared by all egnas modules."""


class EgnasError(Exception):
    """Base class for errors raised by egnas."""

    exit_code = 1


class ConfigError(EgnasError, ValueError):
    """Invalid or missing run configuration."""

    exit_code = 2


class DataError(EgnasError, ValueError):
    """Malformed dataset file or invalid generator parameters."""

    exit_code = 3


class GenotypeError(EgnasError, ValueError):
    """A genotype violates its structural invariants."""

    exit_code = 3


class NumericError(EgnasError, ArithmeticError):
    """Non-finite values encountered during a computation."""

    exit_code = 4


class ShapeError(EgnasError, ValueError):
    """Tensor operands have incompatible shapes."""


class IndexOutOfRangeError(EgnasError, IndexError):
    """A row or segment index falls outside its valid range."""
