"""Exception taxonomy shared across the pipeline.

Three families map onto the CLI's distinct exit codes: usage problems
(bad invocation, missing upstream artifacts), data problems (malformed or
inconsistent inputs), and numeric problems (solver or connectivity
failures on otherwise well-formed data).
"""


class MedManifoldError(Exception):
    """Base class for all library errors."""


class DataError(MedManifoldError):
    """Invalid or inconsistent input data."""


class StructuralError(DataError):
    """Hierarchy edges do not form a rooted tree (cycle, conflicting parents)."""


class UnknownConceptError(DataError):
    """A concept id is not a node of the hierarchy / vocabulary."""


class FormatError(DataError):
    """A token or file does not match its declared format."""


class ArgumentError(DataError):
    """A parameter is out of its documented range."""


class DegenerateInputError(DataError):
    """Input is formally valid but the requested quantity is undefined on it
    (zero row under cosine, all-singleton clustering, 0/0 ratio)."""


class NumericError(MedManifoldError):
    """A numeric procedure failed to meet its contract."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class ConnectivityError(NumericError):
    """Operation requires a connected graph but the input is not connected."""
