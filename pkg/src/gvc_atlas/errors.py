"""Exception hierarchy shared by every gvc_atlas module."""


class GVCError(Exception):
    """Base class for all errors raised by gvc_atlas."""


class StructuralError(GVCError, ValueError):
    """A table whose shapes do not fit together; unusable as-is."""


class TableValidationError(GVCError):
    """Raised when strict validation finds violations."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NonViableError(GVCError):
    """Hawkins-Simon failure: some column of A sums to one or more."""

    def __init__(self, message, nodes=()):
        super().__init__(message)
        self.nodes = tuple(nodes)


class ConditioningError(GVCError):
    """The Leontief solve left a residual above tolerance."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class DivergenceError(GVCError):
    """The power series does not converge (spectral cap >= 1)."""


class UnknownCountryError(GVCError, LookupError):
    """Country code not present in the table."""


class ConfigError(GVCError, ValueError):
    """Invalid thresholds, cutoffs or config file contents."""


class PanelError(GVCError, ValueError):
    """Invalid indicator panel, e.g. duplicate (country, year) rows."""


class SchemaError(GVCError):
    """A data file does not conform to its schema.

    ``path``, ``line`` and ``column`` locate the offending cell when known
    (line and column are 1-based).
    """

    def __init__(self, message, path=None, line=None, column=None):
        where = ""
        if path is not None:
            where = str(path)
            if line is not None:
                where += f":{line}"
                if column is not None:
                    where += f":{column}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line
        self.column = column


class UnknownNodeError(SchemaError):
    """A data file references a node or country absent from nodes.csv."""


class DatasetExistsError(GVCError, FileExistsError):
    """Refusing to overwrite an existing dataset without ``force``."""
