import json

import pytest

from pipeline import make_dataset, run_pipeline
from vaxcomm.cli import main
from vaxcomm.measures import read_measures_csv


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    config = make_dataset(root)
    out = root / "out1"
    run_pipeline(config, out, ["--measure", "low_cred_pct"])
    return root, config, out


def test_outputs_written(dataset):
    _, _, out = dataset
    for name in ("partition.csv", "refinement.jsonl", "scores.csv", "models.json", "measures.csv", "report.json",
                 "manifest.detect.json", "manifest.score.json", "manifest.characterize.json",
                 "viz/low_cred_pct.json", "viz/low_cred_pct.dot"):
        assert (out / name).exists(), name


def test_manifest_contents(dataset):
    _, _, out = dataset
    m = json.loads((out / "manifest.score.json").read_text())
    assert m["stage"] == "score" and m["seed"] == 3
    assert set(m["outputs"]) == {"scores", "models"}
    acc = m["counters"]["cv"]["accuracy"]
    assert len(acc["svm"]) == len(acc["rf"]) == 7
    assert m["counters"]["filter"]["too_short"] >= 1


def test_short_pages_not_scored(dataset):
    _, _, out = dataset
    assert "rejected.example.org" not in (out / "scores.csv").read_text()


def test_rerun_identical(dataset, tmp_path):
    _, config, out = dataset
    run_pipeline(config, tmp_path / "again", ["--measure", "low_cred_pct"])
    for name in ("partition.csv", "scores.csv", "measures.csv", "viz/low_cred_pct.json", "viz/low_cred_pct.dot",
                 "manifest.detect.json", "manifest.score.json", "manifest.characterize.json"):
        a, b = (out / name).read_bytes(), (tmp_path / "again" / name).read_bytes()
        if name.startswith("manifest"):
            a, b = json.loads(a)["outputs"], json.loads(b)["outputs"]
        assert a == b, name


def test_measures_rows_per_community(dataset):
    _, _, out = dataset
    n_comm = len({line.split(",")[1] for line in (out / "partition.csv").read_text().splitlines()[1:]})
    assert len(read_measures_csv(out / "measures.csv")) == n_comm


def test_unknown_measure_exit_2(dataset, capsys):
    _, config, out = dataset
    assert main(["characterize", "--config", str(config), "--out", str(out), "--measure", "nope"]) == 2
    assert "valid names" in capsys.readouterr().err


def test_missing_upstream_names_stage(dataset, tmp_path, capsys):
    _, config, _ = dataset
    assert main(["characterize", "--config", str(config), "--out", str(tmp_path / "empty")]) == 2
    assert "'detect'" in capsys.readouterr().err


def test_empty_followers_exit_2(tmp_path, capsys):
    (tmp_path / "followers.csv").write_text("from_user,to_user\n")
    (tmp_path / "c.toml").write_text('[inputs]\nfollowers = "followers.csv"\n')
    assert main(["detect", "--config", str(tmp_path / "c.toml"), "--out", str(tmp_path / "o")]) == 2
    assert "no edges" in capsys.readouterr().err


def test_missing_input_exit_2(tmp_path):
    (tmp_path / "c.toml").write_text('[inputs]\nfollowers = "nope.csv"\n')
    assert main(["detect", "--config", str(tmp_path / "c.toml")]) == 2


def test_too_few_labels_exit_2(dataset, tmp_path):
    root, config, _ = dataset
    data = config.parent
    lines = (data / "labels.csv").read_text().splitlines()
    (tmp_path / "labels.csv").write_text("\n".join(lines[:6]) + "\n")
    (tmp_path / "c.toml").write_text(
        f'[inputs]\npages = "{data / "pages.jsonl"}"\nlabels = "{tmp_path / "labels.csv"}"\n')
    assert main(["score", "--config", str(tmp_path / "c.toml"), "--out", str(tmp_path / "o")]) == 2


def test_invalid_synth_spec_exit_2(tmp_path):
    (tmp_path / "bad.toml").write_text("[graph]\np_in = 0.1\np_out = 0.5\n")
    assert main(["synth", "--spec", str(tmp_path / "bad.toml"), "--out", str(tmp_path / "d")]) == 2


def test_synth_seed_changes_edges(tmp_path):
    assert main(["synth", "--seed", "1", "--out", str(tmp_path / "a")]) == 0
    assert main(["synth", "--seed", "2", "--out", str(tmp_path / "b")]) == 0
    a, b = (tmp_path / "a" / "followers.csv").read_text(), (tmp_path / "b" / "followers.csv").read_text()
    assert a != b and a.splitlines()[0] == b.splitlines()[0]


def test_categorize_stage(dataset, tmp_path):
    _, config, _ = dataset
    assert main(["categorize", "--config", str(config), "--out", str(tmp_path)]) == 0
    m = json.loads((tmp_path / "manifest.categorize.json").read_text())
    assert "categories" in m["outputs"]
