import os

import numpy as np
import pytest

from chitin import dataset
from chitin.audio_io import AudioClip
from chitin.dataset import (ClassEntry, ClipEntry, DatasetManifest,
                            InstanceEntry, SynthSpec, load_manifest,
                            sample_instances, save_manifest, segment_clip,
                            synth_generate)
from chitin.errors import (DanglingInstanceReference, EmptyClass,
                           SchemaViolation)

from oracles import band_energy_ratio


def make_clip(duration, sr=44100, rng=None):
    n = int(round(duration * sr))
    samples = rng.uniform(-0.5, 0.5, n) if rng else np.zeros(n)
    return AudioClip(samples=samples, sample_rate=sr)


class TestSegmentation:
    def test_floor_count_and_length(self, rng):
        clip = make_clip(5.3, rng=rng)
        records = segment_clip(clip, "cricket", 1)
        assert len(records) == 5
        assert all(len(r.audio.samples) == 44100 for r in records)

    def test_five_second_clip_gives_five(self):
        records = segment_clip(make_clip(5.0), "cricket", 2)
        assert len(records) == 5

    def test_short_clip_empty(self):
        assert segment_clip(make_clip(0.5), "cricket", 1) == []

    def test_partition_reproduces_prefix(self, rng):
        clip = make_clip(3.7, rng=rng)
        records = segment_clip(clip, "x", 1)
        joined = np.concatenate([r.audio.samples for r in records])
        np.testing.assert_array_equal(joined, clip.samples[:3 * 44100])

    def test_provenance(self, rng):
        records = segment_clip(make_clip(2.0, rng=rng), "termite", 4)
        assert {r.class_label for r in records} == {"termite"}
        assert {r.clip_id for r in records} == {4}
        assert len({r.instance_id for r in records}) == len(records)


def manifest_with_counts(counts_by_class):
    """counts_by_class: {name: [instances per clip]}."""
    classes = []
    for name, counts in counts_by_class.items():
        clips = []
        for clip_id, count in enumerate(counts, start=1):
            instances = tuple(
                InstanceEntry(instance_id=f"{name}_c{clip_id}_i{i}",
                              path=f"{name}/c{clip_id}_i{i}.wav")
                for i in range(count)
            )
            clips.append(ClipEntry(clip_id=clip_id,
                                   path=f"{name}/clip{clip_id}.wav",
                                   duration_s=float(count),
                                   instances=instances))
        classes.append(ClassEntry(name=name, clips=tuple(clips)))
    return DatasetManifest(classes=tuple(classes))


class TestSampling:
    def test_exact_sample_deterministic(self):
        manifest = manifest_with_counts({"a": [45], "b": [40]})
        s1 = sample_instances(manifest, per_class=30, seed=3)
        s2 = sample_instances(manifest, per_class=30, seed=3)
        for cls1, cls2 in zip(s1.classes, s2.classes):
            ids1 = [i.instance_id for c in cls1.clips for i in c.instances]
            ids2 = [i.instance_id for c in cls2.clips for i in c.instances]
            assert ids1 == ids2
            assert len(ids1) == 30

    def test_subset_of_input(self):
        manifest = manifest_with_counts({"a": [20, 25]})
        out = sample_instances(manifest, per_class=30, seed=1)
        all_ids = {i.instance_id for c in manifest.classes[0].clips
                   for i in c.instances}
        picked = [i.instance_id for c in out.classes[0].clips
                  for i in c.instances]
        assert set(picked) <= all_ids
        assert len(picked) == 30

    def test_underpopulated_class_warns(self):
        manifest = manifest_with_counts({"a": [12]})
        with pytest.warns(UserWarning):
            out = sample_instances(manifest, per_class=30, seed=1)
        assert sum(len(c.instances) for c in out.classes[0].clips) == 12

    def test_empty_class_raises(self):
        manifest = manifest_with_counts({"a": [0]})
        with pytest.raises(EmptyClass):
            sample_instances(manifest, per_class=5, seed=1)

    def test_different_seeds_differ(self):
        manifest = manifest_with_counts({"a": [100]})
        picks = []
        for seed in (1, 2):
            out = sample_instances(manifest, per_class=10, seed=seed)
            picks.append(tuple(i.instance_id
                               for c in out.classes[0].clips
                               for i in c.instances))
        assert picks[0] != picks[1]


class TestManifestIo:
    # Per-clip instance counts from the real corpora's bookkeeping.
    TABLE = {"Barkbeetle": [21, 16, 21, 18, 21],
             "Cicada": [8, 3, 9, 9, 7],
             "Cricket": [4, 5, 7, 7, 7],
             "Termite": [6, 5, 15, 6, 5]}

    def test_round_trip(self, tmp_path):
        manifest = manifest_with_counts(self.TABLE)
        path = tmp_path / "manifest.json"
        save_manifest(manifest, path)
        back = load_manifest(path, check_files=False)
        assert back == manifest

    def test_per_clip_counts_preserved(self, tmp_path):
        manifest = manifest_with_counts(self.TABLE)
        path = tmp_path / "manifest.json"
        save_manifest(manifest, path)
        back = load_manifest(path, check_files=False)
        for cls in back.classes:
            counts = [len(c.instances) for c in cls.clips]
            assert counts == self.TABLE[cls.name]

    def test_dangling_reference(self, tmp_path):
        manifest = manifest_with_counts({"a": [2]})
        path = tmp_path / "manifest.json"
        save_manifest(manifest, path)
        with pytest.raises(DanglingInstanceReference):
            load_manifest(path, check_files=True)

    def test_non_contiguous_clip_ids_rejected(self):
        cls = ClassEntry(name="a", clips=(
            ClipEntry(clip_id=2, path="a/2.wav", duration_s=1.0),
        ))
        with pytest.raises(SchemaViolation):
            DatasetManifest(classes=(cls,)).validate()

    def test_duplicate_class_names_rejected(self):
        cls = ClassEntry(name="a", clips=())
        with pytest.raises(SchemaViolation):
            DatasetManifest(classes=(cls, cls)).validate()


class TestSynth:
    def test_structure(self, tmp_path):
        spec = SynthSpec(clips_per_class=5, clip_duration=5.0, seed=7)
        manifest = synth_generate(spec, str(tmp_path))
        assert len(manifest.classes) == 4
        assert sum(len(c.clips) for c in manifest.classes) == 20
        segmented = dataset.segment_manifest(manifest, str(tmp_path))
        total = sum(len(c.instances) for cls in segmented.classes
                    for c in cls.clips)
        assert total == 100

    def test_deterministic_bytes(self, tmp_path):
        spec = SynthSpec(clips_per_class=2, clip_duration=2.0, seed=11)
        synth_generate(spec, str(tmp_path / "a"))
        synth_generate(spec, str(tmp_path / "b"))
        for cls in dataset.SYNTH_CLASS_NAMES.values():
            for clip in (1, 2):
                pa = tmp_path / "a" / cls / f"clip{clip}.wav"
                pb = tmp_path / "b" / cls / f"clip{clip}.wav"
                assert pa.read_bytes() == pb.read_bytes()

    def test_chirper_band_energy(self, tmp_path):
        spec = SynthSpec(clips_per_class=3, clip_duration=3.0, seed=5)
        synth_generate(spec, str(tmp_path))
        from chitin import audio_io
        for clip_id in (1, 2, 3):
            clip = audio_io.load_clip(
                os.path.join(str(tmp_path), "chirper", f"clip{clip_id}.wav"))
            ratio = band_energy_ratio(clip.samples, clip.sample_rate,
                                      4000, 5000)
            assert ratio > 0.5
