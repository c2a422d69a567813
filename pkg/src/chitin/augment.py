"""Audio augmentation by playback-speed change and frame-rate
reinterpretation.

Both transforms reduce to resampling the sample sequence (tempo and
pitch move together); they are kept as two named operations because the
dataset records which protocol produced each augmented instance.
"""

import os
from dataclasses import dataclass, replace

import numpy as np

from . import audio_io
from .audio_io import AudioClip
from .dataset import InstanceEntry
from .errors import DegenerateOutput


@dataclass(frozen=True)
class AugmentSpec:
    speed_factors: tuple = (0.9, 1.1)
    pitch_factors: tuple = (0.9, 1.1)
    seed: int = 42  # reserved for future stochastic transforms

    def __post_init__(self):
        if any(f <= 0 for f in self.speed_factors + self.pitch_factors):
            raise ValueError("factors must be positive")


def _resample_by_factor(clip, factor):
    n_in = len(clip.samples)
    n_out = int(round(n_in / factor))
    if n_out < 1:
        raise DegenerateOutput(f"factor {factor} leaves no samples")
    if factor == 1.0:
        return clip
    positions = np.minimum(np.arange(n_out) * factor, n_in - 1)
    samples = np.interp(positions, np.arange(n_in), clip.samples)
    return AudioClip(samples=samples, sample_rate=clip.sample_rate,
                     source_path=clip.source_path)


def speed_change(clip, factor):
    """Playback-speed change: duration scales by 1/factor, every frequency
    by factor; nominal sample rate unchanged."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    return _resample_by_factor(clip, factor)


def pitch_shift(clip, factor):
    """Frame-rate reinterpretation: play the samples at factor*sr, then
    resample back to the original nominal rate. Net effect equals
    speed_change; logged distinctly."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    reinterpreted = AudioClip(samples=clip.samples,
                              sample_rate=clip.sample_rate * factor,
                              source_path=clip.source_path)
    out = audio_io.resample(reinterpreted, clip.sample_rate)
    if len(out.samples) < 1:
        raise DegenerateOutput(f"factor {factor} leaves no samples")
    return AudioClip(samples=out.samples, sample_rate=clip.sample_rate,
                     source_path=clip.source_path)


def _refit_to_window(clip, window_samples):
    """Truncate to the instance window; None if the output fell short."""
    if len(clip.samples) < window_samples:
        return None
    return AudioClip(samples=clip.samples[:window_samples],
                     sample_rate=clip.sample_rate,
                     source_path=clip.source_path)


def augment_dataset(manifest, root, spec=AugmentSpec()):
    """Emit transformed copies of every original instance.

    Augmented copies are re-fitted to exactly one window (truncate, or
    discard when shorter), flagged augmented=true, and inherit their
    source clip_id so grouped cross-validation stays leak-free.
    Originals are untouched.
    """
    transforms = [("speed", f, speed_change) for f in spec.speed_factors] + \
                 [("pitch", f, pitch_shift) for f in spec.pitch_factors]
    new_classes = []
    for cls in manifest.classes:
        new_clips = []
        for clip in cls.clips:
            extra = []
            for inst in clip.instances:
                if inst.augmented:
                    continue
                clip_audio = audio_io.load_clip(os.path.join(root, inst.path))
                window = len(clip_audio.samples)
                for tag, factor, fn in transforms:
                    out = _refit_to_window(fn(clip_audio, factor), window)
                    if out is None:
                        continue
                    aug_id = f"{inst.instance_id}__{tag}{factor}"
                    rel = os.path.join(os.path.dirname(inst.path),
                                       f"{aug_id}.wav")
                    audio_io.write_wav(out, os.path.join(root, rel))
                    extra.append(InstanceEntry(
                        instance_id=aug_id, path=rel, augmented=True,
                        transform=f"{tag}:{factor}",
                    ))
            new_clips.append(replace(clip,
                                     instances=clip.instances + tuple(extra)))
        new_classes.append(replace(cls, clips=tuple(new_clips)))
    return replace(manifest, classes=tuple(new_classes))
