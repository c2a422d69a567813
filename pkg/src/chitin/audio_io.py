"""WAV reading/writing and conversion to a canonical mono float clip.

Readable encodings: PCM 16-bit, PCM 24-bit, IEEE float 32-bit; 1-2
channels. Writing always emits 16-bit PCM mono with the canonical
44-byte header. Resampling is linear interpolation.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import IoFailure, MalformedHeader, TruncatedPayload, UnsupportedEncoding

CANONICAL_RATE = 44100


@dataclass(frozen=True, eq=False)
class AudioClip:
    """Mono audio: float samples in [-1, 1] at a known sample rate."""

    samples: np.ndarray
    sample_rate: int
    source_path: str | None = None

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        samples = np.asarray(self.samples, dtype=np.float64)
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_seconds(self):
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class RawWav:
    """Decoded WAV payload before mono conversion.

    frames has shape (n_frames, channels), already scaled to [-1, 1].
    """

    frames: np.ndarray
    frame_rate: int
    channels: int
    bit_depth: int
    source_path: str | None = field(default=None)


def read_wav(path):
    """Decode a RIFF/WAVE file into scaled float frames.

    Integer PCM is scaled by 2^(bits-1); float payloads pass through.
    """
    with open(path, "rb") as f:
        data = f.read()

    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedHeader(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack("<I", data[pos + 4:pos + 8])
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise MalformedHeader(f"{path}: fmt chunk too short")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise TruncatedPayload(
                    f"{path}: data chunk promises {chunk_size} bytes, "
                    f"found {len(body)}"
                )
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)

    if fmt is None or payload is None:
        raise MalformedHeader(f"{path}: missing fmt or data chunk")

    audio_format, channels, frame_rate, _, _, bits = fmt
    if channels < 1:
        raise MalformedHeader(f"{path}: zero channels")

    if audio_format == 1 and bits == 16:
        raw = np.frombuffer(payload[:len(payload) - len(payload) % 2],
                            dtype="<i2").astype(np.float64)
        samples = raw / 2.0 ** 15
        bytes_per = 2
    elif audio_format == 1 and bits == 24:
        usable = len(payload) - len(payload) % 3
        b = np.frombuffer(payload[:usable], dtype=np.uint8).reshape(-1, 3)
        raw = (
            b[:, 0].astype(np.int32)
            | (b[:, 1].astype(np.int32) << 8)
            | (b[:, 2].astype(np.int32) << 16)
        )
        raw = np.where(raw >= 2 ** 23, raw - 2 ** 24, raw).astype(np.float64)
        samples = raw / 2.0 ** 23
        bytes_per = 3
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(payload[:len(payload) - len(payload) % 4],
                                dtype="<f4").astype(np.float64)
        bytes_per = 4
    else:
        raise UnsupportedEncoding(
            f"{path}: format code {audio_format} at {bits} bits not supported"
        )

    if len(payload) % (bytes_per * channels) != 0:
        raise TruncatedPayload(
            f"{path}: payload not divisible by frame size"
        )

    frames = samples.reshape(-1, channels)
    return RawWav(frames=frames, frame_rate=frame_rate, channels=channels,
                  bit_depth=bits, source_path=str(path))


def to_mono(raw):
    """Average channels into a mono AudioClip; mono passes through."""
    if raw.channels == 1:
        samples = raw.frames[:, 0]
    else:
        samples = raw.frames.mean(axis=1)
    return AudioClip(samples=samples, sample_rate=raw.frame_rate,
                     source_path=raw.source_path)


def resample(clip, target_rate):
    """Linear-interpolation resample to target_rate.

    Output length is round(len * target/source). Identity when the
    rates already match.
    """
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == clip.sample_rate:
        return clip
    n_in = len(clip.samples)
    n_out = int(round(n_in * target_rate / clip.sample_rate))
    if n_in == 0 or n_out == 0:
        return AudioClip(samples=np.zeros(0), sample_rate=target_rate,
                         source_path=clip.source_path)
    positions = np.arange(n_out) * (clip.sample_rate / target_rate)
    positions = np.minimum(positions, n_in - 1)
    samples = np.interp(positions, np.arange(n_in), clip.samples)
    return AudioClip(samples=samples, sample_rate=target_rate,
                     source_path=clip.source_path)


def load_clip(path, target_rate=CANONICAL_RATE):
    """read_wav -> to_mono -> resample, the standard ingestion chain."""
    clip = to_mono(read_wav(path))
    return resample(clip, target_rate)


def write_wav(clip, path):
    """Write 16-bit PCM mono. Samples outside [-1, 1] are clipped.

    Quantization maps v -> clamp(round(v * 2^15), -2^15, 2^15 - 1), so a
    read-back differs from the original by at most 2^-15 per sample.
    """
    quantized = np.clip(np.round(clip.samples * 2.0 ** 15), -32768, 32767)
    payload = quantized.astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, 1, 1, clip.sample_rate, clip.sample_rate * 2, 2, 16,
        b"data", len(payload),
    )
    try:
        with open(path, "wb") as f:
            f.write(header)
            f.write(payload)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
