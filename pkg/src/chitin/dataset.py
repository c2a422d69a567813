"""Dataset organization: manifests, fixed-window segmentation, instance
sampling, and the deterministic synthetic fixture corpus.

Manifest layout on disk (JSON):
  {schema_version, window_seconds,
   classes: [{name, clips: [{clip_id, path, duration_s,
                             instances: [{instance_id, path, augmented,
                                          transform}]}]}]}
Instance audio lives in per-class, per-clip directories next to the
manifest.
"""

import json
import os
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import audio_io
from .audio_io import AudioClip
from .errors import DanglingInstanceReference, EmptyClass, SchemaViolation

MANIFEST_SCHEMA_VERSION = 1
DEFAULT_WINDOW_SECONDS = 1.0


@dataclass(frozen=True)
class InstanceEntry:
    instance_id: str
    path: str
    augmented: bool = False
    transform: str = ""


@dataclass(frozen=True)
class ClipEntry:
    clip_id: int
    path: str
    duration_s: float
    instances: tuple = ()


@dataclass(frozen=True)
class ClassEntry:
    name: str
    clips: tuple = ()


@dataclass(frozen=True)
class DatasetManifest:
    classes: tuple
    window_seconds: float = DEFAULT_WINDOW_SECONDS
    schema_version: int = MANIFEST_SCHEMA_VERSION

    def class_names(self):
        return [c.name for c in self.classes]

    def instances_for(self, class_name):
        """(clip_id, InstanceEntry) pairs for one class, in manifest order."""
        for cls in self.classes:
            if cls.name == class_name:
                return [(clip.clip_id, inst)
                        for clip in cls.clips for inst in clip.instances]
        raise KeyError(class_name)

    def validate(self):
        names = self.class_names()
        if len(set(names)) != len(names):
            raise SchemaViolation("duplicate class names")
        seen_ids = set()
        for cls in self.classes:
            clip_ids = [c.clip_id for c in cls.clips]
            if clip_ids != list(range(1, len(clip_ids) + 1)):
                raise SchemaViolation(
                    f"class {cls.name}: clip_ids must be contiguous from 1, "
                    f"got {clip_ids}"
                )
            for clip in cls.clips:
                for inst in clip.instances:
                    if inst.instance_id in seen_ids:
                        raise SchemaViolation(
                            f"instance {inst.instance_id} has multiple owners"
                        )
                    seen_ids.add(inst.instance_id)
        return self


@dataclass(frozen=True)
class InstanceRecord:
    """One fixed-length labeled segment with clip provenance."""

    instance_id: str
    class_label: str
    clip_id: int
    audio: AudioClip
    augmented: bool = False
    transform: str = ""


def segment_clip(clip, class_label, clip_id, window_seconds=DEFAULT_WINDOW_SECONDS,
                 id_prefix=None):
    """Cut consecutive non-overlapping windows from t=0.

    Yields floor(duration / window) instances; the trailing remainder is
    dropped. A clip shorter than one window yields an empty list.
    """
    if window_seconds <= 0:
        raise ValueError("window_seconds must be positive")
    window = int(round(window_seconds * clip.sample_rate))
    count = len(clip.samples) // window
    prefix = id_prefix or f"{class_label}_clip{clip_id}"
    out = []
    for i in range(count):
        chunk = clip.samples[i * window:(i + 1) * window]
        out.append(InstanceRecord(
            instance_id=f"{prefix}_inst{i + 1}",
            class_label=class_label,
            clip_id=clip_id,
            audio=AudioClip(samples=chunk, sample_rate=clip.sample_rate,
                            source_path=clip.source_path),
        ))
    return out


def sample_instances(manifest, per_class=30, seed=42):
    """Uniform per-class sample of instances without replacement.

    Deterministic for a fixed seed. Classes holding fewer than
    per_class instances contribute everything, with a warning.
    """
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    new_classes = []
    for cls in manifest.classes:
        pool = [(clip.clip_id, inst) for clip in cls.clips
                for inst in clip.instances]
        if not pool:
            raise EmptyClass(f"class {cls.name} has no instances")
        rng = np.random.default_rng([seed, _stable_hash(cls.name)])
        if len(pool) <= per_class:
            if len(pool) < per_class:
                warnings.warn(
                    f"class {cls.name}: only {len(pool)} instances "
                    f"available, requested {per_class}"
                )
            chosen = set(range(len(pool)))
        else:
            chosen = set(rng.choice(len(pool), size=per_class, replace=False))
        keep = {pool[i][1].instance_id for i in chosen}
        new_clips = []
        for clip in cls.clips:
            insts = tuple(i for i in clip.instances if i.instance_id in keep)
            new_clips.append(replace(clip, instances=insts))
        new_classes.append(replace(cls, clips=tuple(new_clips)))
    return replace(manifest, classes=tuple(new_classes))


def _stable_hash(text):
    # Process-independent (unlike hash()) so sampling seeds reproduce.
    h = 2166136261
    for byte in text.encode():
        h = ((h ^ byte) * 16777619) % 2 ** 32
    return h


def save_manifest(manifest, path):
    manifest.validate()
    doc = {
        "schema_version": manifest.schema_version,
        "window_seconds": manifest.window_seconds,
        "classes": [
            {
                "name": cls.name,
                "clips": [
                    {
                        "clip_id": clip.clip_id,
                        "path": clip.path,
                        "duration_s": clip.duration_s,
                        "instances": [
                            {
                                "instance_id": inst.instance_id,
                                "path": inst.path,
                                "augmented": inst.augmented,
                                "transform": inst.transform,
                            }
                            for inst in clip.instances
                        ],
                    }
                    for clip in cls.clips
                ],
            }
            for cls in manifest.classes
        ],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        json.dump(doc, f, indent=2)
    os.replace(tmp, path)


def load_manifest(path, check_files=True):
    with open(path) as f:
        doc = json.load(f)
    try:
        if doc["schema_version"] != MANIFEST_SCHEMA_VERSION:
            raise SchemaViolation(
                f"unknown manifest schema_version {doc['schema_version']}"
            )
        base = os.path.dirname(os.path.abspath(path))
        classes = tuple(
            ClassEntry(
                name=c["name"],
                clips=tuple(
                    ClipEntry(
                        clip_id=k["clip_id"],
                        path=k["path"],
                        duration_s=k["duration_s"],
                        instances=tuple(
                            InstanceEntry(
                                instance_id=i["instance_id"],
                                path=i["path"],
                                augmented=i["augmented"],
                                transform=i.get("transform", ""),
                            )
                            for i in k["instances"]
                        ),
                    )
                    for k in c["clips"]
                ),
            )
            for c in doc["classes"]
        )
        manifest = DatasetManifest(
            classes=classes,
            window_seconds=doc["window_seconds"],
        ).validate()
    except (KeyError, TypeError) as e:
        raise SchemaViolation(f"{path}: malformed manifest ({e})") from e
    if check_files:
        for cls in manifest.classes:
            for clip in cls.clips:
                for inst in clip.instances:
                    full = os.path.join(base, inst.path)
                    if not os.path.exists(full):
                        raise DanglingInstanceReference(
                            f"{inst.instance_id}: missing file {inst.path}"
                        )
    return manifest


def load_instances(manifest, root, classes=None):
    """Materialize InstanceRecords (with audio) from a manifest on disk."""
    records = []
    for cls in manifest.classes:
        if classes is not None and cls.name not in classes:
            continue
        for clip in cls.clips:
            for inst in clip.instances:
                clip_audio = audio_io.load_clip(os.path.join(root, inst.path))
                records.append(InstanceRecord(
                    instance_id=inst.instance_id,
                    class_label=cls.name,
                    clip_id=clip.clip_id,
                    audio=clip_audio,
                    augmented=inst.augmented,
                    transform=inst.transform,
                ))
    return records


# --- synthetic fixture corpus ---

SYNTH_ARCHETYPES = ("tonal_chirp", "broadband_buzz", "impulsive_click", "low_pulse")

SYNTH_CLASS_NAMES = {
    "tonal_chirp": "chirper",
    "broadband_buzz": "buzzer",
    "impulsive_click": "clicker",
    "low_pulse": "thumper",
}


@dataclass(frozen=True)
class SynthSpec:
    clips_per_class: int = 5
    clip_duration: float = 5.0
    sample_rate: int = audio_io.CANONICAL_RATE
    seed: int = 42
    window_seconds: float = DEFAULT_WINDOW_SECONDS

    def __post_init__(self):
        if self.clips_per_class < 1:
            raise ValueError("clips_per_class must be >= 1")
        if self.clip_duration < self.window_seconds:
            raise ValueError("clip_duration must cover one window")


def _synth_clip(archetype, rng, n, sr):
    """One synthetic clip; per-clip parameters are drawn from rng so clips
    differ while classes stay spectrally separable."""
    t = np.arange(n) / sr
    noise_floor = rng.uniform(0.004, 0.010)
    signal = np.zeros(n)

    if archetype == "tonal_chirp":
        # Narrowband chirp bursts inside 4-5 kHz.
        center = rng.uniform(4300.0, 4700.0)
        sweep = rng.uniform(100.0, 200.0)
        burst_hz = rng.uniform(6.0, 10.0)
        phase = 2 * np.pi * (center * t + 0.5 * sweep * t ** 2 / t[-1])
        envelope = 0.5 * (1 + np.sign(np.sin(2 * np.pi * burst_hz * t))) \
            * rng.uniform(0.45, 0.55)
        signal = envelope * np.sin(phase)
    elif archetype == "broadband_buzz":
        # White noise band-limited to 3-8 kHz via FFT masking.
        lo = rng.uniform(2800.0, 3200.0)
        hi = rng.uniform(7600.0, 8400.0)
        white = rng.standard_normal(n)
        spec = np.fft.rfft(white)
        freqs = np.fft.rfftfreq(n, 1 / sr)
        spec[(freqs < lo) | (freqs > hi)] = 0.0
        band = np.fft.irfft(spec, n)
        signal = 0.5 * band / max(np.max(np.abs(band)), 1e-12)
    elif archetype == "impulsive_click":
        # Sparse decaying wideband clicks.
        rate = rng.uniform(18.0, 26.0)
        decay = rng.uniform(600.0, 900.0)
        ring = rng.uniform(9000.0, 11000.0)
        period = int(sr / rate)
        for start in range(0, n, period):
            length = min(int(sr * 0.01), n - start)
            tt = np.arange(length) / sr
            signal[start:start + length] += (
                0.6 * np.exp(-decay * tt) * np.cos(2 * np.pi * ring * tt)
            )
    elif archetype == "low_pulse":
        # Slow amplitude-pulsed low tone near 1 kHz.
        center = rng.uniform(900.0, 1100.0)
        pulse_hz = rng.uniform(2.0, 4.0)
        envelope = 0.5 * (0.6 + 0.4 * np.sin(2 * np.pi * pulse_hz * t))
        signal = envelope * np.sin(2 * np.pi * center * t)
    else:
        raise ValueError(f"unknown archetype {archetype}")

    signal = signal + noise_floor * rng.standard_normal(n)
    peak = np.max(np.abs(signal))
    if peak > 0.99:
        signal = signal * (0.99 / peak)
    return signal


def synth_generate(spec, out_dir):
    """Write a synthetic corpus (clip WAVs + manifest) under out_dir.

    Deterministic: audio is a pure function of (spec.seed, class, clip).
    Returns the manifest (clips only; run segmentation to get instances).
    """
    os.makedirs(out_dir, exist_ok=True)
    classes = []
    for class_idx, archetype in enumerate(SYNTH_ARCHETYPES):
        name = SYNTH_CLASS_NAMES[archetype]
        clip_entries = []
        for clip_id in range(1, spec.clips_per_class + 1):
            rng = np.random.default_rng([spec.seed, class_idx, clip_id])
            n = int(round(spec.clip_duration * spec.sample_rate))
            samples = _synth_clip(archetype, rng, n, spec.sample_rate)
            rel = os.path.join(name, f"clip{clip_id}.wav")
            full = os.path.join(out_dir, rel)
            os.makedirs(os.path.dirname(full), exist_ok=True)
            audio_io.write_wav(
                AudioClip(samples=samples, sample_rate=spec.sample_rate), full)
            clip_entries.append(ClipEntry(
                clip_id=clip_id, path=rel,
                duration_s=n / spec.sample_rate,
            ))
        classes.append(ClassEntry(name=name, clips=tuple(clip_entries)))
    manifest = DatasetManifest(classes=tuple(classes),
                               window_seconds=spec.window_seconds)
    save_manifest(manifest, os.path.join(out_dir, "manifest.json"))
    return manifest


def segment_manifest(manifest, root, window_seconds=None):
    """Segment every clip in a manifest, writing instance WAVs next to the
    clips and returning an updated manifest."""
    window = window_seconds or manifest.window_seconds
    new_classes = []
    for cls in manifest.classes:
        new_clips = []
        for clip in cls.clips:
            clip_audio = audio_io.load_clip(os.path.join(root, clip.path))
            records = segment_clip(clip_audio, cls.name, clip.clip_id, window)
            inst_dir = os.path.join(cls.name, f"clip{clip.clip_id}")
            os.makedirs(os.path.join(root, inst_dir), exist_ok=True)
            entries = []
            for rec in records:
                rel = os.path.join(inst_dir, f"{rec.instance_id}.wav")
                audio_io.write_wav(rec.audio, os.path.join(root, rel))
                entries.append(InstanceEntry(instance_id=rec.instance_id,
                                             path=rel))
            new_clips.append(replace(clip, instances=tuple(entries)))
        new_classes.append(replace(cls, clips=tuple(new_clips)))
    out = replace(manifest, classes=tuple(new_classes),
                  window_seconds=window)
    save_manifest(out, os.path.join(root, "manifest.json"))
    return out
