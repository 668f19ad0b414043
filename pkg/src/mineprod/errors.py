"""Exception hierarchy shared across the package.

Every error raised on a bad input or an unusable model state derives from
MineprodError so callers (CLI, HTTP service) can map failures to exit codes
and response payloads without enumerating modules.
"""


class MineprodError(Exception):
    """Base class for all package-specific errors."""


class DataError(MineprodError):
    """Bad input data: shape, content, or encoding."""


class LengthError(DataError):
    """A series or sample is too short for the requested operation."""


class AnchorError(DataError):
    """inverse_difference received the wrong number of anchor values."""


class DegenerateError(DataError):
    """Zero-variance input where positive spread is required."""


class LagError(DataError):
    """Requested lag count is out of range for the sample size."""


class SchemaError(DataError):
    """CSV header or row layout does not match the expected schema."""


class EncodingError(DataError):
    """Input bytes are not valid UTF-8."""


class DuplicateYearError(DataError):
    """Annual table contains the same year twice."""


class NoDonorError(DataError):
    """No donor rows available to impute a missing month."""


class KError(DataError):
    """Neighbor count k is not a positive integer."""


class EmptySelectionError(DataError):
    """A record filter matched nothing."""


class EmptyError(DataError):
    """An aggregation was asked to run over zero records."""


class MixedUnitError(DataError):
    """Records with incompatible units where a single unit is required."""


class TooShortError(LengthError):
    """Series shorter than the minimum for automatic model selection."""


class ModelError(MineprodError):
    """Model fitting or forecasting failure."""


class ConvergenceError(ModelError):
    """Optimizer exhausted its evaluation budget before converging."""


class ParamError(ModelError):
    """Model parameters outside their admissible region."""


class HorizonError(ModelError):
    """Forecast horizon must be a positive integer."""


class NoModelError(ModelError):
    """Automatic order selection found no fittable candidate."""


class SingularError(ModelError):
    """Innovation variance collapsed; filter cannot continue."""


class SizeError(DataError):
    """Sample size outside the supported range for a test."""


class ReplicateError(DataError):
    """Bootstrap replicate count below the supported minimum."""


class ShortResidualError(DataError):
    """Too few residuals to resample from."""


class UnknownDepartmentError(DataError):
    """Department name not present in the dataset."""


class SelectionError(DataError):
    """Requested series cannot be built from the records."""


class GeoError(DataError):
    """Boundary file missing, malformed, or incomplete."""


class BindError(MineprodError):
    """The HTTP service could not bind its port."""
