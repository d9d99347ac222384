import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vaxcomm.graph import FollowerGraph  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def graph_from(edges, nodes=None) -> FollowerGraph:
    return FollowerGraph.from_weighted_edges(edges, nodes)


@pytest.fixture
def two_triangles() -> FollowerGraph:
    return graph_from([
        ("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0),
        ("d", "e", 1.0), ("e", "f", 1.0), ("d", "f", 1.0),
    ])


def separable_corpus(n: int, seed: int = 0):
    """Keyword-planted texts with independent random labels per criterion."""
    import numpy as np

    from vaxcomm.synth import SynthCorpusSpec, page_text

    spec = SynthCorpusSpec()
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=(n, 7))
    texts = [page_text(row, spec, rng) for row in labels]
    return texts, labels
