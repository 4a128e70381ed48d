"""Built-in input complexes and the ``--input`` shorthand syntax.

* ``simplex:a,b,c`` is the standard simplex on the listed agents;
* ``glued2:a,b,c@b,c`` is two copies of that simplex glued along the
  listed face (the second copy's private simplices get a ``'`` suffix);
* ``binary:a,b`` is all 0/1 input assignments, labelled ``in0``/``in1``
  and valued;
* anything else is read as a JSON file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .cset import AgentSet, Cset, CsetError, colimit, standard_simplex, sub_cset
from .decisions import VCset
from .tasks import input_labels, value_complex


@dataclass
class InputSpec:
    cset: Cset
    labels: dict[int, set[str]]
    values: VCset | None = None


def glued_simplices(agents: AgentSet, shared) -> Cset:
    """Two full simplices on ``agents`` identified along their ``shared`` face."""
    x, y = standard_simplex(agents, agents.full), standard_simplex(agents, agents.full)
    top = x.level(agents.full)[0]
    common, inc_x = sub_cset(x, [x.face(top, agents.mask(shared))])
    _, inc_y = sub_cset(y, [y.face(top, agents.mask(shared))])
    inc_y = type(inc_y)(common, y, inc_y.mapping)

    def payload(members):
        # shared classes always contain a member of the first copy, listed first
        i, s = members[0]
        return (x, y)[i].payloads[s] + ("'" if i == 1 else "")

    out, _ = colimit([x, y, common], [(2, 0, inc_x), (2, 1, inc_y)], payload=payload)
    return out


def _names(text: str) -> list[str]:
    names = [a.strip() for a in text.split(",") if a.strip()]
    if not names:
        raise CsetError(f"no agents in {text!r}")
    return names


def parse_values(text: str) -> dict[str, Fraction]:
    """``a=0,b=1/2`` into exact rationals."""
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        agent, _, value = part.partition("=")
        if not _:
            raise CsetError(f"expected agent=value, got {part!r}")
        out[agent.strip()] = Fraction(value.strip())
    return out


def with_agent_values(x: Cset, values: dict[str, Fraction]) -> VCset:
    """Every vertex of agent ``a`` takes ``values[a]``."""
    missing = set(x.agents.names) - set(values)
    if missing:
        raise CsetError(f"no value given for agents {sorted(missing)}")
    vertex_values = {}
    for s in x.worlds():
        members = x.agents.members(x.colors[s])
        if len(members) == 1:
            vertex_values[s] = values[members[0]]
    return VCset.from_vertex_values(x, vertex_values)


def load_input(spec: str) -> InputSpec:
    kind, sep, rest = spec.partition(":")
    if sep and kind == "simplex":
        agents = AgentSet(_names(rest))
        return InputSpec(standard_simplex(agents, agents.full), {})
    if sep and kind == "glued2":
        full, at, shared = rest.partition("@")
        if not at:
            raise CsetError("glued2 needs the shared face after '@'")
        agents = AgentSet(_names(full))
        return InputSpec(glued_simplices(agents, _names(shared)), {})
    if sep and kind == "binary":
        agents = AgentSet(_names(rest))
        x = value_complex(agents, (0, 1))
        vertex_values = {v: Fraction(x.payloads[v].split("=")[1]) for v in input_labels(x)}
        return InputSpec(x, input_labels(x), VCset.from_vertex_values(x, vertex_values))
    path = Path(spec)
    if not path.exists():
        raise CsetError(f"unknown input {spec!r}: not a builtin shorthand or a readable file")
    from .serialize import cset_from_json, vcset_from_json

    doc = json.loads(path.read_text())
    x, labels = cset_from_json(doc)
    values = vcset_from_json(doc) if "values" in doc else None
    if values is not None:
        values = VCset(x, values.values)
    return InputSpec(x, labels, values)
