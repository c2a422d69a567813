import json
import os

import numpy as np
import pytest

from chitin.features import load_feature_csv

from conftest import run_cli


@pytest.fixture(scope="module")
def pipeline_dir(tmp_path_factory):
    """synth -> segment -> extract, shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cli_pipeline")
    data = str(root / "data")
    r = run_cli(["synth", "--out", data, "--clips", "2",
                 "--duration", "3.0", "--seed", "11"])
    assert r.returncode == 0, r.stderr
    r = run_cli(["segment", "--data", data])
    assert r.returncode == 0, r.stderr
    feats = str(root / "features.csv")
    r = run_cli(["extract", "--data", data, "--out", feats,
                 "--n-mfcc", "13"])
    assert r.returncode == 0, r.stderr
    return root, data, feats


def test_synth_segment_extract(pipeline_dir):
    root, data, feats = pipeline_dir
    manifest = json.loads(
        open(os.path.join(data, "manifest.json")).read())
    assert len(manifest["classes"]) == 4
    matrix = load_feature_csv(feats)
    # 4 classes x 2 clips x 3 windows per clip
    assert matrix.X.shape == (24, 13)
    assert matrix.n_mfcc == 13
    assert os.path.exists(feats + ".meta.json")


def test_train_evaluate_round_trip(pipeline_dir, tmp_path):
    root, data, feats = pipeline_dir
    model = str(tmp_path / "model.json")
    r = run_cli(["train", "--features", feats, "--model", "knn",
                 "--out", model])
    assert r.returncode == 0, r.stderr
    assert "accuracy" in r.stdout
    assert os.path.exists(model)
    assert os.path.exists(str(tmp_path / "model_report.txt"))
    out = str(tmp_path / "eval.json")
    r = run_cli(["evaluate", "--features", feats, "--model-file", model,
                 "--out", out])
    assert r.returncode == 0, r.stderr
    report = json.loads(open(out).read())["report"]
    assert 0.0 <= report["accuracy"] <= 1.0


def test_importance_and_embed(pipeline_dir, tmp_path):
    root, data, feats = pipeline_dir
    model = str(tmp_path / "rf.json")
    r = run_cli(["train", "--features", feats, "--model", "random_forest",
                 "--out", model])
    assert r.returncode == 0, r.stderr
    imp = str(tmp_path / "importance.csv")
    r = run_cli(["importance", "--model-file", model, "--out", imp])
    assert r.returncode == 0, r.stderr
    rows = open(imp).read().splitlines()
    assert rows[0] == "rank,feature_index,feature_name,importance"
    data_rows = [x for x in rows[1:] if not x.startswith("cumulative")]
    assert sum(float(x.split(",")[3]) for x in data_rows) == pytest.approx(1.0)

    emb = str(tmp_path / "embedding.csv")
    r = run_cli(["embed", "--features", feats, "--out", emb])
    assert r.returncode == 0, r.stderr
    lines = open(emb).read().splitlines()
    assert lines[0] == "instance_id,clip_id,label,x,y"
    assert len(lines) == 25
    # coordinates parse back to finite floats
    xs = [float(line.split(",")[3]) for line in lines[1:]]
    assert np.isfinite(xs).all()


def test_importance_rejects_non_forest(pipeline_dir, tmp_path):
    root, data, feats = pipeline_dir
    model = str(tmp_path / "knn.json")
    r = run_cli(["train", "--features", feats, "--model", "knn",
                 "--out", model])
    assert r.returncode == 0
    r = run_cli(["importance", "--model-file", model,
                 "--out", str(tmp_path / "x.csv")])
    assert r.returncode == 1
    assert "random_forest" in r.stderr


def test_cv_outputs_and_determinism(pipeline_dir, tmp_path):
    root, data, feats = pipeline_dir
    out1 = str(tmp_path / "cv1")
    out2 = str(tmp_path / "cv2")
    args = ["cv", "--data", data, "--models", "knn,decision_tree",
            "--mfcc", "13"]
    r = run_cli(args + ["--out", out1])
    assert r.returncode == 0, r.stderr
    assert "knn: average accuracy" in r.stdout
    for name in ("comparison_mfcc13.csv", "reports_mfcc13.txt",
                 "boxplot_data.csv", "bar_data.csv", "run_config.json"):
        assert os.path.exists(os.path.join(out1, name)), name
    cfg = json.loads(open(os.path.join(out1, "run_config.json")).read())
    assert [c["test_clip"] for c in cfg["conditions"]] == [2, 1]

    r = run_cli(args + ["--out", out2])
    assert r.returncode == 0, r.stderr
    for name in ("comparison_mfcc13.csv", "boxplot_data.csv",
                 "bar_data.csv"):
        with open(os.path.join(out1, name), "rb") as f1, \
                open(os.path.join(out2, name), "rb") as f2:
            assert f1.read() == f2.read(), name


def test_cv_mfcc_sweep_with_svg(pipeline_dir, tmp_path):
    root, data, feats = pipeline_dir
    out = str(tmp_path / "sweep")
    r = run_cli(["cv", "--data", data, "--models", "knn",
                 "--mfcc-sweep", "10,20", "--svg", "--out", out])
    assert r.returncode == 0, r.stderr
    for name in ("comparison_mfcc10.csv", "comparison_mfcc20.csv",
                 "boxplot_mfcc10.svg", "boxplot_mfcc20.svg",
                 "bar_averages.svg"):
        assert os.path.exists(os.path.join(out, name)), name
    svg = open(os.path.join(out, "boxplot_mfcc10.svg")).read()
    assert svg.startswith("<svg")


def test_unknown_flag_exit_2():
    r = run_cli(["cv", "--no-such-flag"])
    assert r.returncode == 2


def test_missing_manifest_exit_1(tmp_path):
    r = run_cli(["cv", "--data", str(tmp_path / "nope"),
                 "--out", str(tmp_path / "out")])
    assert r.returncode == 1
    assert "error:" in r.stderr


def test_unknown_model_family_exit_1(pipeline_dir, tmp_path):
    root, data, feats = pipeline_dir
    r = run_cli(["cv", "--data", data, "--models", "perceptron",
                 "--out", str(tmp_path / "out")])
    assert r.returncode == 1
    assert "unknown model families" in r.stderr
