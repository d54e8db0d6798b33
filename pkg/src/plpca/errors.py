"""Exception types shared across the package.

Each maps to one failure category the command line reports, so library
callers can catch precisely and the CLI can emit a stable error token.
"""


class CSVParseError(ValueError):
    """Malformed tabular input: ragged rows, non-numeric or non-finite cells."""


class LabelError(ValueError):
    """Labels missing, unreadable, or inconsistent with the data matrix."""


class ConfigurationError(ValueError):
    """A parameter combination the pipeline refuses to run with."""


class InclusionError(ValueError):
    """A simplicial complex pair that is not nested."""


class NumericalError(RuntimeError):
    """Numerical failure inside an iterative routine (eigensolver, descent)."""
