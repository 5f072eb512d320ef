"""Exception hierarchy shared across the toolkit.

``UsageError`` maps to exit code 1 in the CLI, ``DataError`` to exit code 2.
"""


class WfcError(Exception):
    """Base class for all toolkit errors."""


class UsageError(WfcError):
    """Bad invocation: unknown flags, invalid parameter combinations."""


class DataError(WfcError):
    """Input data violates a contract (malformed files, missing ids, ...)."""


class ParseError(DataError):
    """The input is not syntactically valid YAML."""


class NotAWorkflow(DataError):
    """Valid YAML, but not a workflow (no usable top-level ``jobs`` mapping)."""


class EmptyCorpus(DataError):
    """An operation that needs at least one input document got none."""


class ImpossibleSplit(DataError):
    """A project split cannot meet the requested ratio tolerance."""


class IdMismatch(DataError):
    """Prediction ids and instance ids do not line up."""

    def __init__(self, missing, extra):
        self.missing = sorted(missing)
        self.extra = sorted(extra)
        super().__init__(
            f"id mismatch: {len(self.missing)} missing, {len(self.extra)} extra"
        )


class ModelMissing(DataError):
    """A model file was expected but is absent or unreadable."""


class MissingRoot(DataError):
    """The corpus root directory does not exist."""
