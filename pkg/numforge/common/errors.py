"""Defines the error hierarchy raised by the toolkit.

Every error belongs to one family, and the family decides the exit code the
command line reports.
"""


class ForgeError(Exception):
    """
    Base class of every error raised on purpose by the toolkit. ``stage`` names
    the pipeline stage that failed when a multi-stage command ran it.
    """

    exit_code: int = 1
    stage: str | None = None


class ConfigError(ForgeError, ValueError):
    """A configuration value, file or rule set is invalid."""

    exit_code: int = 2


class InputError(ForgeError, ValueError):
    """An input is missing, malformed or does not satisfy a precondition."""

    exit_code: int = 3


class NumericalFailure(ForgeError, ArithmeticError):
    """A numerical routine did not converge."""

    exit_code: int = 4

    def __init__(self, layer: str, reason: str):
        super().__init__(f'layer {layer!r}: {reason}')
        self.layer: str = layer


class DocumentEmptied(InputError):
    """Preprocessing left a document without any paragraph."""

    def __init__(self, doc_id: str):
        super().__init__(f'document {doc_id!r} is empty after preprocessing')
        self.doc_id: str = doc_id


class StaleSpan(InputError):
    """A numeric variable span no longer addresses its surface form."""


class InvalidCounts(InputError):
    """Instance counts violate 0 <= n_irr <= n_ins or
    0 <= n_selected <= n_ins."""


class InsufficientRange(InputError):
    """A distractor interval cannot supply enough distinct values."""


class ShapeError(InputError):
    """Matrix shapes of a layer are inconsistent."""


class LayerMismatch(InputError):
    """Two adapter deltas do not cover the same layers."""


class TensorFormatError(InputError):
    """A tensor container file is malformed."""


class InsufficientExemplars(InputError):
    """Fewer few-shot exemplars than requested."""


class MissingPrediction(InputError):
    """A question has no prediction."""

    def __init__(self, qid: str):
        super().__init__(f'no prediction for question {qid!r}')
        self.qid: str = qid
