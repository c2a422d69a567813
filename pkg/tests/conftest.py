import os
import subprocess
import sys

import numpy as np
import pytest

from chitin import dataset
from chitin.audio_io import AudioClip


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sine_clip(freq, duration=1.0, sample_rate=44100, amplitude=0.5):
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    return AudioClip(samples=amplitude * np.sin(2 * np.pi * freq * t),
                     sample_rate=sample_rate)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Tiny segmented synthetic corpus (3 clips x 3 s) for fast tests."""
    root = tmp_path_factory.mktemp("small_corpus")
    spec = dataset.SynthSpec(clips_per_class=3, clip_duration=3.0, seed=7)
    manifest = dataset.synth_generate(spec, str(root))
    manifest = dataset.segment_manifest(manifest, str(root))
    return str(root), manifest


@pytest.fixture(scope="session")
def full_corpus(tmp_path_factory):
    """The acceptance-scale fixture: 4 classes x 5 clips x 5 s, seed 42."""
    root = tmp_path_factory.mktemp("full_corpus")
    spec = dataset.SynthSpec(clips_per_class=5, clip_duration=5.0, seed=42)
    manifest = dataset.synth_generate(spec, str(root))
    manifest = dataset.segment_manifest(manifest, str(root))
    return str(root), manifest


def run_cli(args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "chitin.cli", *args],
        capture_output=True, text=True, cwd=cwd,
        env={**os.environ, "PYTHONPATH": os.pathsep.join(sys.path)},
    )
