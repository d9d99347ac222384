"""Community-level node-link documents (JSON + Graphviz DOT) for one measure.

Node colour runs linearly from red (lowest percentile) to green (highest);
communities where the measure is missing are white. Node size is
proportional to the number of users.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Sequence

from .fileio import atomic_write_text
from .measures import MEASURES, CommunityProfile

MISSING_COLOR = "#ffffff"
MAX_WIDTH = 2.0


class UnknownMeasureError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown measure {name!r}; valid names: {', '.join(MEASURES)}")


def gradient_color(percentile: float | None) -> str:
    if percentile is None:
        return MISSING_COLOR
    p = min(1.0, max(0.0, float(percentile)))
    red = int(round(255 * (1.0 - p)))
    green = int(round(255 * p))
    return f"#{red:02x}{green:02x}00"


def viz_document(profiles: Sequence[CommunityProfile], comm_weights: Mapping[int, Mapping[int, float]],
                 measure: str, edge_floor: float = 0.0) -> dict:
    if measure not in MEASURES:
        raise UnknownMeasureError(measure)
    largest = max((p.user_count for p in profiles), default=1) or 1
    nodes = []
    for p in profiles:
        pctile = p.percentiles.get(measure)
        nodes.append({
            "id": p.community_id,
            "user_count": p.user_count,
            "size": MAX_WIDTH * p.user_count / largest,
            "value": getattr(p.measures, measure),
            "percentile": pctile,
            "deviation": None if pctile is None else pctile - 0.5,
            "color": gradient_color(pctile),
        })
    present = {p.community_id for p in profiles}
    links = []
    for a in sorted(comm_weights):
        for b in sorted(comm_weights[a]):
            w = comm_weights[a][b]
            if a < b and a in present and b in present and w > edge_floor:
                links.append({"source": a, "target": b, "weight": w})
    return {"measure": measure, "directed": False, "edge_floor": edge_floor, "nodes": nodes, "links": links}


def to_dot(doc: dict) -> str:
    lines = [
        f'graph "{doc["measure"]}" {{',
        "  node [shape=circle, style=filled, fixedsize=true, fontsize=8];",
    ]
    for n in doc["nodes"]:
        lines.append(
            f'  c{n["id"]} [label="{n["id"]}", width={n["size"]:.6f}, fillcolor="{n["color"]}"];'
        )
    for e in doc["links"]:
        lines.append(f'  c{e["source"]} -- c{e["target"]} [weight={e["weight"]!r}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_viz(profiles: Sequence[CommunityProfile], comm_weights: Mapping[int, Mapping[int, float]],
             measure: str, out_dir, edge_floor: float = 0.0) -> tuple[Path, Path]:
    doc = viz_document(profiles, comm_weights, measure, edge_floor)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path, dot_path = out / f"{measure}.json", out / f"{measure}.dot"
    atomic_write_text(json_path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    atomic_write_text(dot_path, to_dot(doc))
    return json_path, dot_path
