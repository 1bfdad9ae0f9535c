"""Exception hierarchy for shiplabel-qi.

Every error raised by the library derives from SlqiError so callers (and the
CLI) can catch the whole family at once. Families that describe bad input
values also derive from ValueError.
"""


class SlqiError(Exception):
    """Base class for all shiplabel-qi errors."""


class ConfigError(SlqiError, ValueError):
    """Invalid or unknown configuration value."""


# Raster / codec

class RasterError(SlqiError, ValueError):
    """Problem with a raster or its encoding."""


class MalformedHeader(RasterError):
    """PNM header has a bad magic number or bad dimensions."""


class TruncatedBody(RasterError):
    """PNM body is shorter than its header declares."""


class UnsupportedMaxval(RasterError):
    """PNM maxval other than 255."""


class OutOfBounds(RasterError):
    """A box does not fit inside the raster it is applied to."""


class NotGrayscale(RasterError):
    """Operation requires a single-channel raster."""


# Synthesis

class SynthError(SlqiError, ValueError):
    """Problem while generating synthetic labels."""


class EmptyText(SynthError):
    """Barcode text is empty."""


class UnsupportedChar(SynthError):
    """Character outside the Code 128 subset B range."""


class ConfigTooSmall(SynthError):
    """Label layout does not fit the requested image size."""


class UnknownClass(SynthError):
    """Value is not one of the five quality classes."""


class IoFailure(SlqiError, OSError):
    """Dataset files could not be written or read."""


# Detection

class DetectionError(SlqiError, ValueError):
    """Problem with ROI detection or its evaluation."""


class MissingAnnotation(DetectionError):
    """Oracle detection requested without an annotation."""


class MultipleGroundTruth(DetectionError):
    """More than one ground-truth box of a kind on one image."""


# Models

class ModelError(SlqiError, ValueError):
    """Problem with network shapes, training data or weights."""


class ShapeMismatch(ModelError):
    """Input array shape does not match the network."""


class LabelOutOfRange(ModelError):
    """Class label outside [0, K)."""


class EmptyDataset(ModelError):
    """Training requested on an empty split."""


class DimMismatch(ModelError):
    """Feature vector length does not match the fusion config."""


class WrongPatchCount(ModelError):
    """Number of FAST-patch feature vectors differs from n_p."""


class WeightFormatError(ModelError):
    """Weight file is not a valid SLQI container."""


class NonFiniteError(ModelError):
    """A training step produced NaN or infinity."""


# Voting

class VotingError(SlqiError, ValueError):
    """Problem with an ensemble vote."""


class EmptyInput(VotingError):
    """No predictions to vote over."""


class AllZeroWeights(VotingError):
    """Every voting weight is zero."""


# Evaluation

class EvaluationError(SlqiError, ValueError):
    """Problem with cross-validation or metric computation."""


class InsufficientData(EvaluationError):
    """Not enough images for the requested fold plan."""


class LengthMismatch(EvaluationError):
    """Predictions and labels differ in length."""


class TooFewRuns(EvaluationError):
    """Summaries need at least two runs."""
