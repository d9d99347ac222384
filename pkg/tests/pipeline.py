"""Helpers for running the command-line pipeline end to end in tests."""

from __future__ import annotations

from pathlib import Path

from vaxcomm.cli import main

SMALL_SPEC = """\
seed = {seed}
[graph]
n = {n}
k = {k}
[corpus]
n_labeled = {n_labeled}
tweets_per_user = 3
"""

FAST_CLASSIFIER = """
[classifier.svm]
epochs = 300
[classifier.rf]
n_trees = {n_trees}
"""


def make_dataset(root: Path, seed=3, n=120, k=3, n_labeled=60, n_trees=10, fast=True) -> Path:
    data = root / "data"
    spec = root / "spec.toml"
    spec.write_text(SMALL_SPEC.format(seed=seed, n=n, k=k, n_labeled=n_labeled))
    assert main(["synth", "--spec", str(spec), "--out", str(data)]) == 0
    config = data / "config.toml"
    if fast:
        config.write_text(config.read_text() + FAST_CLASSIFIER.format(n_trees=n_trees))
    return config


def run_pipeline(config: Path, out: Path, extra: list[str] = ()) -> None:
    for stage in ("detect", "score", "characterize"):
        argv = [stage, "--config", str(config), "--out", str(out)]
        if stage == "characterize":
            argv += list(extra)
        assert main(argv) == 0, stage
