"""Exception hierarchy shared across the toolkit."""


class ChitinError(Exception):
    """Base class for all toolkit errors."""


# --- audio_io ---

class MalformedHeader(ChitinError):
    """File is not a RIFF/WAVE container."""


class UnsupportedEncoding(ChitinError):
    """WAV encoding outside 16/24-bit PCM or 32-bit float."""


class TruncatedPayload(ChitinError):
    """Data chunk shorter than the header promises."""


class IoFailure(ChitinError):
    """Underlying file write failed."""


# --- dataset / manifest ---

class SchemaViolation(ChitinError):
    """Serialized artifact does not match its declared schema."""


class DanglingInstanceReference(ChitinError):
    """Manifest references an instance file that does not exist."""


class EmptyClass(ChitinError):
    """A class holds zero instances when at least one is required."""


# --- features ---

class ClipTooShort(ChitinError):
    """Audio too short for the requested analysis."""


class WidthMismatch(ChitinError):
    """Feature width differs from what a fitted component expects."""


# --- augment ---

class DegenerateOutput(ChitinError):
    """Transform would produce fewer than one sample."""


# --- models ---

class ShapeMismatch(ChitinError):
    """Input array shapes are inconsistent."""


class EmptyNode(ChitinError):
    """Impurity requested for a node with zero samples."""


class NonConvergence(ChitinError):
    """Optimizer hit its iteration cap (warning-grade; model still usable)."""


class VersionMismatch(ChitinError):
    """Serialized artifact has an unknown schema version."""


class UntrainedModel(ChitinError):
    """Operation requires a fitted model."""


# --- evaluation ---

class DegenerateSplit(ChitinError):
    """A split would leave train or test empty."""


class TooFewClips(ChitinError):
    """Leave-one-clip-out needs at least two clips."""


class LengthMismatch(ChitinError):
    """Prediction and truth vectors differ in length."""


class DegenerateData(ChitinError):
    """Input carries no variance to embed."""
