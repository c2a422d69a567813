"""chitin: insect bioacoustic classification toolkit.

Segment clips into 1 s instances, extract MFCC statistics, train five
from-scratch classifier families, and compare them under leave-one-
clip-out cross-validation. See the CLI (`chitin --help`) for the
pipeline entry points.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .audio_io import CANONICAL_RATE, AudioClip, read_wav, resample, to_mono, write_wav
from .dataset import DatasetManifest, InstanceRecord, SynthSpec, segment_clip
from .features import FeatureMatrix, MfccConfig, mfcc, summarize

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "CANONICAL_RATE", "AudioClip", "read_wav",
    "resample", "to_mono", "write_wav", "DatasetManifest",
    "InstanceRecord", "SynthSpec", "segment_clip", "FeatureMatrix",
    "MfccConfig", "mfcc", "summarize", "__version__",
]
