"""Run configuration (a single TOML document).

Example::

    seed = 7
    out_dir = "out"

    [inputs]
    followers = "followers.csv"
    tweets = "tweets.jsonl"
    pages = "pages.jsonl"
    labels = "labels.csv"
    resolver = "resolver_fixtures.jsonl"   # optional
    domains = "domains.toml"               # optional, packaged default otherwise

    [refine]
    max_size = 10000
    min_size = 100
    max_rounds = 20
    restarts = 10                          # independent Louvain runs, best kept

    [classifier]
    folds = 10
    [classifier.svm]
    reg = 0.001
    epochs = 1000
    learning_rate = 10.0
    [classifier.rf]
    n_trees = 100
    min_leaf = 1
    # max_depth omitted = unbounded

    [characterize]
    measures = ["low_cred_pct", "high_cred_pct"]
    edge_floor = 0.0

Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .community.refine import RefinementConfig
from .credibility.crossval import ClassifierConfig
from .credibility.forest import RFConfig
from .credibility.svm import SVMConfig

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

INPUT_KEYS = ("followers", "tweets", "pages", "labels", "resolver", "domains")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    inputs: dict[str, Path | None] = field(default_factory=dict)
    refine: RefinementConfig = field(default_factory=RefinementConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    out_dir: Path = Path("out")
    seed: int = 0
    measures: tuple[str, ...] = ()
    edge_floor: float = 0.0

    def input(self, key: str, required: bool = True) -> Path | None:
        """Path for ``key``; raises :class:`ConfigError` if required and absent or missing on disk."""
        path = self.inputs.get(key)
        if path is None:
            if required:
                raise ConfigError(f"config has no [inputs] {key} path")
            return None
        if not path.exists():
            if required:
                raise ConfigError(f"input {key} not found: {path}")
            return None
        return path

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(
            self,
            seed=seed,
            refine=replace(self.refine, seed=seed),
            classifier=replace(self.classifier, seed=seed, rf=replace(self.classifier.rf, seed=seed)),
        )

    def to_dict(self) -> dict:
        return {
            "inputs": {k: (str(v) if v is not None else None) for k, v in sorted(self.inputs.items())},
            "refine": asdict(self.refine),
            "classifier": asdict(self.classifier),
            "seed": self.seed,
            "measures": list(self.measures),
            "edge_floor": self.edge_floor,
        }

    def digest(self) -> str:
        """Hash of every setting that affects results (input contents are digested separately)."""
        doc = self.to_dict()
        doc["inputs"] = sorted(k for k, v in doc["inputs"].items() if v)
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def _section(doc: dict, key: str) -> dict:
    val = doc.get(key, {})
    if not isinstance(val, dict):
        raise ConfigError(f"[{key}] must be a table")
    return val


def from_dict(doc: dict, base_dir: Path = Path(".")) -> RunConfig:
    seed = int(doc.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    raw_inputs = _section(doc, "inputs")
    unknown = set(raw_inputs) - set(INPUT_KEYS)
    if unknown:
        raise ConfigError(f"unknown [inputs] keys: {sorted(unknown)}")
    inputs = {k: (base_dir / v if v else None) for k, v in raw_inputs.items()}

    try:
        refine = RefinementConfig(seed=seed, **_section(doc, "refine"))
        cls_doc = dict(_section(doc, "classifier"))
        svm = SVMConfig(**cls_doc.pop("svm", {}))
        rf = RFConfig(seed=seed, **cls_doc.pop("rf", {}))
        classifier = ClassifierConfig(svm=svm, rf=rf, seed=seed, **cls_doc)
    except TypeError as exc:
        raise ConfigError(f"bad config key: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    char = _section(doc, "characterize")
    return RunConfig(
        inputs=inputs,
        refine=refine,
        classifier=classifier,
        out_dir=base_dir / doc.get("out_dir", "out"),
        seed=seed,
        measures=tuple(char.get("measures", ())),
        edge_floor=float(char.get("edge_floor", 0.0)),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(doc, path.parent)
