"""MFCC extraction and feature-matrix assembly.

Pipeline, pinned so independent oracles can agree: centered framing with
reflect padding (n_fft//2 each side), periodic Hann window, magnitude-
squared spectrum, 128 Slaney-scale area-normalized triangular mel
filters, 10*log10(max(power, 1e-10)), orthonormal DCT-II along the mel
axis, truncate to n_mfcc.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ClipTooShort, WidthMismatch

POWER_FLOOR = 1e-10
STD_EPS = 1e-8


@dataclass(frozen=True)
class MfccConfig:
    n_mfcc: int = 40
    n_fft: int = 2048
    hop: int = 512
    n_mels: int = 128
    fmin: float = 0.0
    fmax: float | None = None  # None = sample_rate / 2
    stats: tuple = ("mean",)

    def __post_init__(self):
        if not 0 < self.n_mfcc <= self.n_mels:
            raise ValueError("need 0 < n_mfcc <= n_mels")
        if self.hop > self.n_fft or self.hop <= 0:
            raise ValueError("need 0 < hop <= n_fft")
        if set(self.stats) - {"mean", "std"} or "mean" not in self.stats:
            raise ValueError("stats must be (mean,) or (mean, std)")

    @property
    def width(self):
        return self.n_mfcc * len(self.stats)

    def effective_fmax(self, sample_rate):
        fmax = sample_rate / 2 if self.fmax is None else self.fmax
        if not 0 <= self.fmin < fmax <= sample_rate / 2:
            raise ValueError("need 0 <= fmin < fmax <= sample_rate/2")
        return fmax


def hz_to_mel(f):
    """Slaney mel scale: linear below 1 kHz, log above."""
    f = np.asarray(f, dtype=np.float64)
    min_log_hz = 1000.0
    lin = f / (200.0 / 3)
    log_step = np.log(6.4) / 27.0
    with np.errstate(divide="ignore", invalid="ignore"):
        logm = 15.0 + np.log(np.maximum(f, min_log_hz) / min_log_hz) / log_step
    return np.where(f < min_log_hz, lin, logm)[()]


def mel_to_hz(m):
    m = np.asarray(m, dtype=np.float64)
    lin = m * (200.0 / 3)
    log_step = np.log(6.4) / 27.0
    logf = 1000.0 * np.exp(log_step * (m - 15.0))
    return np.where(m < 15.0, lin, logf)[()]


def mel_filterbank(sample_rate, n_fft, n_mels, fmin, fmax):
    """Triangular Slaney filters, area-normalized: shape (n_mels, 1+n_fft//2)."""
    fft_freqs = np.arange(1 + n_fft // 2) * sample_rate / n_fft
    mel_pts = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax),
                                    n_mels + 2))
    lower = mel_pts[:-2][:, None]
    center = mel_pts[1:-1][:, None]
    upper = mel_pts[2:][:, None]
    up = (fft_freqs[None, :] - lower) / (center - lower)
    down = (upper - fft_freqs[None, :]) / (upper - center)
    weights = np.maximum(0.0, np.minimum(up, down))
    weights *= 2.0 / (upper - lower)
    return weights


def dct_ortho_matrix(n):
    """Orthonormal DCT-II matrix, rows are basis functions."""
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    mat = np.sqrt(2.0 / n) * np.cos(np.pi * k * (2 * m + 1) / (2 * n))
    mat[0, :] = np.sqrt(1.0 / n)
    return mat


def hann_window(n):
    # Periodic Hann, matching standard STFT tooling.
    return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)


def frame_signal(samples, n_fft, hop):
    """Centered frames: reflect-pad n_fft//2 each side, then slide by hop.

    n_frames = 1 + floor(len/hop).
    """
    if len(samples) < 1:
        raise ClipTooShort("cannot frame an empty signal")
    pad = n_fft // 2
    padded = np.pad(samples, pad, mode="reflect")
    n_frames = 1 + len(samples) // hop
    idx = np.arange(n_fft)[None, :] + hop * np.arange(n_frames)[:, None]
    return padded[idx]


@dataclass(frozen=True)
class MfccFrames:
    matrix: np.ndarray  # (n_mfcc, n_frames)
    instance_id: str = ""


def log_mel_spectrogram(clip, cfg):
    """(n_mels, n_frames) dB-domain mel spectrogram; internal stage of mfcc."""
    fmax = cfg.effective_fmax(clip.sample_rate)
    frames = frame_signal(clip.samples, cfg.n_fft, cfg.hop)
    windowed = frames * hann_window(cfg.n_fft)[None, :]
    power = np.abs(np.fft.rfft(windowed, axis=1)) ** 2
    fbank = mel_filterbank(clip.sample_rate, cfg.n_fft, cfg.n_mels,
                           cfg.fmin, fmax)
    mel_power = power @ fbank.T
    return 10.0 * np.log10(np.maximum(mel_power, POWER_FLOOR)).T


def mfcc(clip, cfg=MfccConfig(), instance_id=""):
    log_mel = log_mel_spectrogram(clip, cfg)
    dct = dct_ortho_matrix(cfg.n_mels)
    # Full-height product then slice: n_mfcc is a pure truncation, so the
    # first rows are bit-identical across n_mfcc choices.
    coeffs = (dct @ log_mel)[:cfg.n_mfcc]
    return MfccFrames(matrix=coeffs, instance_id=instance_id)


def summarize(frames, stats=("mean",)):
    """Per-coefficient mean (and population std) across frames, means first."""
    m = frames.matrix
    parts = [m.mean(axis=1)]
    if "std" in stats:
        parts.append(m.std(axis=1))
    return np.concatenate(parts)


@dataclass(frozen=True)
class FeatureMatrix:
    X: np.ndarray                 # (n_instances, width)
    labels: tuple                 # class name per row
    groups: tuple                 # clip_id per row
    instance_ids: tuple
    augmented: tuple              # bool per row
    n_mfcc: int
    stats: tuple = ("mean",)

    def __post_init__(self):
        n = self.X.shape[0]
        if not (len(self.labels) == len(self.groups)
                == len(self.instance_ids) == len(self.augmented) == n):
            raise WidthMismatch("metadata length must match row count")

    @property
    def width(self):
        return self.X.shape[1]

    def column_names(self):
        names = [f"mfcc_mean_{i}" for i in range(self.n_mfcc)]
        if "std" in self.stats:
            names += [f"mfcc_std_{i}" for i in range(self.n_mfcc)]
        return names

    def select_rows(self, mask):
        mask = np.asarray(mask)
        idx = np.nonzero(mask)[0]
        return FeatureMatrix(
            X=self.X[idx],
            labels=tuple(self.labels[i] for i in idx),
            groups=tuple(self.groups[i] for i in idx),
            instance_ids=tuple(self.instance_ids[i] for i in idx),
            augmented=tuple(self.augmented[i] for i in idx),
            n_mfcc=self.n_mfcc,
            stats=self.stats,
        )

    def truncate_coeffs(self, n_mfcc):
        """Keep the first n_mfcc coefficients per stat block (exact prefix)."""
        if n_mfcc > self.n_mfcc:
            raise WidthMismatch(f"only {self.n_mfcc} coefficients available")
        cols = list(range(n_mfcc))
        if "std" in self.stats:
            cols += [self.n_mfcc + i for i in range(n_mfcc)]
        return FeatureMatrix(
            X=self.X[:, cols], labels=self.labels, groups=self.groups,
            instance_ids=self.instance_ids, augmented=self.augmented,
            n_mfcc=n_mfcc, stats=self.stats,
        )


def build_feature_matrix(instances, cfg=MfccConfig()):
    """Feature rows in input order; labels/groups copied from the records.

    Extraction is pure per instance, so rows are computed in parallel
    (capped by CHITIN_THREADS) without affecting the result.
    """
    from ._util import ordered_map

    def one(rec):
        try:
            return summarize(mfcc(rec.audio, cfg, rec.instance_id), cfg.stats)
        except ClipTooShort as e:
            raise ClipTooShort(f"{rec.instance_id}: {e}") from e

    rows = ordered_map(one, instances)
    X = np.vstack(rows) if rows else np.zeros((0, cfg.width))
    return FeatureMatrix(
        X=X,
        labels=tuple(r.class_label for r in instances),
        groups=tuple(r.clip_id for r in instances),
        instance_ids=tuple(r.instance_id for r in instances),
        augmented=tuple(r.augmented for r in instances),
        n_mfcc=cfg.n_mfcc,
        stats=cfg.stats,
    )


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.mean.shape[0]:
            raise WidthMismatch(
                f"fitted for {self.mean.shape[0]} columns, got {X.shape[-1]}"
            )
        z = (X - self.mean) / np.maximum(self.std, STD_EPS)
        # Degenerate (constant) training columns map to exact zeros.
        z[..., self.std <= STD_EPS] = 0.0
        return z


def apply_standardizer(standardizer, X):
    return standardizer.transform(X)


def fit_standardizer(X):
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < 1:
        raise ValueError("need at least one row to fit")
    return Standardizer(mean=X.mean(axis=0), std=X.std(axis=0))


def save_feature_csv(features, path):
    names = features.column_names()
    lines = ["instance_id,clip_id,label," + ",".join(names)]
    for i in range(features.X.shape[0]):
        vals = ",".join(repr(float(v)) for v in features.X[i])
        lines.append(f"{features.instance_ids[i]},{features.groups[i]},"
                     f"{features.labels[i]},{vals}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_feature_csv(path):
    with open(path) as f:
        header = f.readline().strip().split(",")
        names = header[3:]
        n_mfcc = sum(1 for n in names if n.startswith("mfcc_mean_"))
        stats = ("mean", "std") if any(n.startswith("mfcc_std_") for n in names) \
            else ("mean",)
        ids, groups, labels, rows, aug = [], [], [], [], []
        for line in f:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            ids.append(parts[0])
            groups.append(int(parts[1]))
            labels.append(parts[2])
            rows.append([float(v) for v in parts[3:]])
            aug.append(False)
    X = np.array(rows) if rows else np.zeros((0, len(names)))
    return FeatureMatrix(X=X, labels=tuple(labels), groups=tuple(groups),
                         instance_ids=tuple(ids), augmented=tuple(aug),
                         n_mfcc=n_mfcc, stats=stats)
