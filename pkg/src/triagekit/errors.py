"""Exception hierarchy shared by all triagekit modules.

Every error carries a stable machine-readable ``code`` so the CLI can emit
``triagekit: E_XXX: message`` lines and scripts can grep for them.
"""


class TriageError(Exception):
    """Base class for all triagekit errors."""

    code = "E_GENERIC"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return self.message


class SchemaError(TriageError):
    """CSV header or record violates the expected schema."""

    code = "E_SCHEMA"


class EmptyCohortError(TriageError):
    """Cleaning removed every record or every feature."""

    code = "E_EMPTY"


class EncodingError(TriageError):
    """A categorical value outside the known vocabulary."""

    code = "E_ENCODE"


class MissingValueError(TriageError):
    """An operation that requires complete data saw a missing value."""

    code = "E_MISSING"


class SamplingError(TriageError):
    """An undersampling target exceeds what a stratum can supply."""

    code = "E_SAMPLE"


class SplitError(TriageError):
    """A stratum is too small to appear on both sides of a split."""

    code = "E_SPLIT"


class TrainingError(TriageError):
    """Training preconditions violated (e.g. single-class labels)."""

    code = "E_TRAIN"


class ShapeError(TriageError):
    """Input arity does not match the model or data."""

    code = "E_SHAPE"


class ModelFormatError(TriageError):
    """A model file is malformed, truncated, or of an unknown version."""

    code = "E_MODEL_FORMAT"


class MetricError(TriageError):
    """A metric or curve cannot be computed from the given labels/scores."""

    code = "E_METRIC"


class ClusterError(TriageError):
    """Clustering or transform preconditions violated."""

    code = "E_CLUSTER"


class ConfigError(TriageError):
    """Bad CLI/service configuration."""

    code = "E_CONFIG"
