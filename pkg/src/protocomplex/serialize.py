"""JSON and DOT encodings of csets, valued csets, tasks and projections."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .cset import AgentSet, Cset, CsetError, CsetMorphism, popcount
from .decisions import VCset
from .tasks import Task, make_task

_PALETTE = ("red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan")


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def cset_to_json(x: Cset, labels: Mapping[int, Any] | None = None) -> dict:
    levels: dict[str, list] = {}
    for color, ids in x.levels().items():
        levels[x.agents.key(color)] = [
            {
                "id": s,
                "payload": x.payloads[s],
                "faces": {x.agents.key(u): f for u, f in x.faces(s).items() if u != color},
            }
            for s in ids
        ]
    doc = {"agents": list(x.agents.names), "levels": levels}
    if labels:
        doc["labels"] = {str(v): sorted(ls) for v, ls in sorted(labels.items()) if ls}
    return doc


def cset_from_json(doc: Mapping) -> tuple[Cset, dict[int, set[str]]]:
    """Inverse of :func:`cset_to_json`; returns the cset and its vertex labels."""
    try:
        agents = AgentSet(doc["agents"])
        entries = {}
        for key, items in doc["levels"].items():
            color = agents.mask(key)
            for item in items:
                s = int(item["id"])
                if s in entries:
                    raise CsetError(f"duplicate simplex id {s}")
                faces = {agents.mask(k): int(f) for k, f in item.get("faces", {}).items()}
                faces[color] = s
                entries[s] = (color, str(item.get("payload", "")), faces)
    except (KeyError, TypeError, AttributeError) as exc:
        raise CsetError(f"malformed cset document: {exc!r}") from exc
    if sorted(entries) != list(range(len(entries))):
        raise CsetError("simplex ids must be 0..n-1")
    rows = [entries[s] for s in range(len(entries))]
    x = Cset(agents, [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows])
    labels = {int(v): set(ls) for v, ls in (doc.get("labels") or {}).items()}
    return x, labels


def _value_text(v) -> Any:
    if v is None:
        return None
    if isinstance(v, Fraction):
        return str(v)
    return v


def vcset_to_json(x: VCset) -> dict:
    doc = cset_to_json(x.cset)
    doc["values"] = {
        str(s): {a: _value_text(v) for a, v in sorted(vals.items())}
        for s, vals in enumerate(x.values)
        if vals
    }
    return doc


def vcset_from_json(doc: Mapping) -> VCset:
    x, _ = cset_from_json(doc)
    raw = doc.get("values") or {}
    values = []
    for s in range(len(x)):
        vals = raw.get(str(s), {})
        values.append({a: (None if v is None else Fraction(v)) for a, v in vals.items()})
    return VCset(x, values)


def task_to_json(task: Task) -> dict:
    return {
        "name": task.name,
        "inputs": cset_to_json(task.inputs),
        "outputs": cset_to_json(task.outputs),
        "spec": [list(p) for p in task.pairs()],
    }


def task_from_json(doc: Mapping) -> Task:
    inputs, _ = cset_from_json(doc["inputs"])
    outputs, _ = cset_from_json(doc["outputs"])
    pairs = [(int(i), int(o)) for i, o in doc["spec"]]
    return make_task(inputs, outputs, pairs, name=str(doc.get("name", "")))


def morphism_table(f: CsetMorphism) -> list[int]:
    return list(f.mapping)


def projection_table(next_proj: list[CsetMorphism]) -> list[list[int]]:
    """Rows ``[round, simplex, image]``: ``p_{round-1}`` sends ``simplex`` to ``image``."""
    return [
        [n + 1, s, t]
        for n, p in enumerate(next_proj)
        for s, t in enumerate(p.mapping)
    ]


def to_dot(x: Cset, name: str = "cset") -> str:
    """Graphviz text: vertices colored by agent, edges, and one node per higher simplex."""
    agents = x.agents
    lines = [f'graph "{name}" {{', "  node [style=filled, fontcolor=white];"]
    for s, c in enumerate(x.colors):
        if popcount(c) == 1:
            i = c.bit_length() - 1
            color = _PALETTE[i % len(_PALETTE)]
            label = x.payloads[s].replace('"', "'")
            lines.append(f'  v{s} [label="{label}", fillcolor={color}, agent="{agents.names[i]}"];')
    for s, c in enumerate(x.colors):
        k = popcount(c)
        if k == 2:
            a, b = sorted(x.vertices(s).values())
            lines.append(f"  v{a} -- v{b};")
    for s, c in enumerate(x.colors):
        k = popcount(c)
        if k >= 3:
            shape = "triangle" if k == 3 else "box"
            lines.append(f'  s{s} [shape={shape}, label="", fillcolor=gray, width=0.2];')
            for v in sorted(x.vertices(s).values()):
                lines.append(f"  s{s} -- v{v} [style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"
