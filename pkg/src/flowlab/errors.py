"""Exception hierarchy for Flowlab.

Argument problems derive from ValueError so callers can keep catching the
builtin. CertificateViolation is reserved for an exact quantity exceeding a
bound that a theorem guarantees; it always indicates a bug.
"""

from typing import Optional


class FlowlabError(Exception):
    """Base class for all Flowlab errors."""


class DomainError(FlowlabError, ValueError):
    """An argument lies outside the domain of an operation."""


class ExtractionError(FlowlabError, ValueError):
    """A sub-measure extractor violated its dominance or width contract."""


class InputError(FlowlabError, ValueError):
    """An input file could not be read or parsed."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.path = path
        self.line = line
        self.column = column
        location = ""
        if path is not None:
            location = path
            if line is not None:
                location += f":{line}"
                if column is not None:
                    location += f":{column}"
            location += ": "
        super().__init__(f"{location}{message}")


class CapacityError(FlowlabError):
    """A configured size limit would be exceeded."""


class InternalError(FlowlabError):
    """An internal consistency check failed."""


class CertificateViolation(InternalError):
    """An exactly computed quantity exceeds its analytic bound."""


class NoContraction(FlowlabError):
    """Block contraction could not reach its threshold within the budget."""


class NoTranslation(FlowlabError):
    """No admissible translation was found within the search budget."""


class SelectionError(FlowlabError):
    """Følner data cannot satisfy the level constraints."""
