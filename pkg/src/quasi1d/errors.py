"""Exception hierarchy shared by all modules."""


class Quasi1DError(Exception):
    """Base class for every error raised by the package."""

    #: short operation name used by the CLI when reporting failures
    operation = "compute"


class ModelValidityError(Quasi1DError, ValueError):
    """A reservoir model is used outside the regime where it holds."""

    operation = "greens"


class PositionError(Quasi1DError, ValueError):
    """An emitter or probe position lies outside the model's domain."""

    operation = "greens"


class FrequencyRangeError(Quasi1DError, ValueError):
    """A frequency lies outside a tabulated coupling's sampled range."""

    operation = "greens"


class WronskianError(Quasi1DError, ArithmeticError):
    """The homogeneous solutions are (numerically) linearly dependent."""

    operation = "helmholtz_green"


class QuasiDefectiveError(Quasi1DError, ArithmeticError):
    """The coupling matrix is too close to an exceptional point.

    Attributes
    ----------
    index : int
        Position (in the sorted mode list) of the eigenvector whose
        transpose norm collapsed.
    value : float
        The offending ``|v^T v|`` of the unit-norm eigenvector.
    """

    operation = "decompose"

    def __init__(self, index, value):
        super().__init__(
            f"eigenvector {index} has |v^T v| = {value:.3e}; matrix is "
            "quasi-defective (near an exceptional point)"
        )
        self.index = index
        self.value = value


class PoleError(Quasi1DError, ArithmeticError):
    """A linear response is evaluated exactly on an undamped pole."""

    operation = "spectrum"


class ConfigError(Quasi1DError, ValueError):
    """A scenario document failed to parse or validate.

    Attributes
    ----------
    path : str
        Dotted path of the offending field ("" for document-level errors).
    """

    operation = "load_config"

    def __init__(self, message, path=""):
        where = f" at '{path}'" if path else ""
        super().__init__(f"{message}{where}")
        self.path = path


class ScenarioError(Quasi1DError):
    """A computation inside a scenario run failed.

    Wraps the original error (available as ``__cause__``) and names the
    analysis and chain realization it came from.
    """

    def __init__(self, message, operation="run_scenario"):
        super().__init__(message)
        self.operation = operation
