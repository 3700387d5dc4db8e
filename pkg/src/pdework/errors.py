"""Exception hierarchy shared by the solvers."""


class PdeworkError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(PdeworkError, ValueError):
    """Shapes, indices or lengths that do not fit together."""


class SingularSystemError(PdeworkError, ArithmeticError):
    """A direct solver hit a pivot below its threshold."""


class ContractError(PdeworkError, ValueError):
    """An input violates a documented precondition (e.g. asymmetry for CG)."""


class NumericalError(PdeworkError, ArithmeticError):
    """Breakdown or non-finite values during an iterative computation."""


class GeometryError(PdeworkError, ValueError):
    """Degenerate mesh entity."""


class ConfigurationError(PdeworkError, ValueError):
    """Problem, sample or training configuration is unusable."""
