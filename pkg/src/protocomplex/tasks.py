"""Tasks ``(I, O, T)`` and exhaustive solvability search.

A solution of a task over a protocol complex ``P -> I`` is a chromatic
morphism ``delta: P -> T`` whose composite with ``T -> I`` is the protocol's
projection.  General csets are not determined by their vertices, so the
search assigns an image to every simplex and keeps the face constraints
arc consistent.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .cset import AgentSet, Cset, CsetError, CsetMorphism, bits, popcount, submasks
from .protocol import ProtocolComplex

log = logging.getLogger(__name__)


@dataclass
class Task:
    inputs: Cset
    outputs: Cset
    spec: Cset
    proj_I: CsetMorphism
    proj_O: CsetMorphism
    name: str = ""

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.proj_I.mapping, self.proj_O.mapping))


def make_task(
    inputs: Cset,
    outputs: Cset,
    pairs: Iterable[tuple[int, int]],
    close: bool = False,
    name: str = "",
) -> Task:
    """Task whose specification is the set of allowed ``(input, output)`` pairs.

    Pairs must have equal colors.  The set must be closed under faces unless
    ``close`` is set, in which case the face closure is taken.
    """
    if inputs.agents != outputs.agents:
        raise CsetError("inputs and outputs use different agent sets")
    wanted = set()
    for i, o in pairs:
        if inputs.colors[i] != outputs.colors[o]:
            raise CsetError(f"pair ({i}, {o}) mixes colors")
        wanted.add((i, o))
    allowed = set(wanted)
    for i, o in sorted(wanted):
        for u in submasks(inputs.colors[i]):
            face = (inputs.face(i, u), outputs.face(o, u))
            if face not in allowed:
                if not close:
                    raise CsetError(
                        f"specification is not closed under faces: ({i}, {o}) lacks its "
                        f"{inputs.agents.fmt(u)}-face {face}"
                    )
                allowed.add(face)
    order = sorted(allowed, key=lambda p: (popcount(inputs.colors[p[0]]), inputs.colors[p[0]], p))
    index = {p: k for k, p in enumerate(order)}
    colors = [inputs.colors[i] for i, _ in order]
    payloads = [f"({inputs.payloads[i]}|{outputs.payloads[o]})" for i, o in order]
    faces = [
        {u: index[inputs.face(i, u), outputs.face(o, u)] for u in submasks(inputs.colors[i])}
        for i, o in order
    ]
    spec = Cset(inputs.agents, colors, payloads, faces)
    return Task(
        inputs,
        outputs,
        spec,
        CsetMorphism(spec, inputs, tuple(i for i, _ in order)),
        CsetMorphism(spec, outputs, tuple(o for _, o in order)),
        name,
    )


def value_complex(agents: AgentSet, values: Sequence, constant: bool = False) -> Cset:
    """All maps ``U -> values`` over every ``U``, faces by restriction.

    With ``constant``, only constant maps (plus the single empty map).
    """
    values = list(values)
    keys = []
    for u in submasks(agents.full):
        idx = list(bits(u))
        if constant and idx:
            choices = [tuple((i, v) for i in idx) for v in values]
        else:
            choices = [tuple(zip(idx, vs)) for vs in itertools.product(values, repeat=len(idx))]
        keys.extend(choices)
    index = {k: n for n, k in enumerate(keys)}
    colors, payloads, faces = [], [], []
    for k in keys:
        color = sum(1 << i for i, _ in k)
        colors.append(color)
        payloads.append(",".join(f"{agents.names[i]}={v}" for i, v in k))
        faces.append(
            {u: index[tuple((i, v) for i, v in k if u >> i & 1)] for u in submasks(color)}
        )
    return Cset(agents, colors, payloads, faces)


def input_labels(x: Cset, prefix: str = "in") -> dict[int, set[str]]:
    """Label every vertex ``a=v`` of a value complex with the atom ``<prefix><v>``."""
    out = {}
    for s in x.worlds():
        if popcount(x.colors[s]) == 1:
            _, v = x.payloads[s].split("=", 1)
            out[s] = {f"{prefix}{v}"}
    return out


def trivial_task(inputs: Cset) -> Task:
    """``O = I`` and ``T`` the diagonal."""
    return make_task(inputs, inputs, ((s, s) for s in range(len(inputs))), name="identity")


def binary_consensus(n: int | Sequence[str]) -> Task:
    """Binary consensus: agree on a bit that is somebody's input.

    Outputs are the constant decisions; the allowed pairs are those whose
    decided bit occurs among the inputs, closed under faces.
    """
    names = [chr(ord("a") + k) for k in range(n)] if isinstance(n, int) else list(n)
    if not names:
        raise CsetError("consensus needs at least one agent")
    agents = AgentSet(names)
    inputs = value_complex(agents, (0, 1))
    outputs = value_complex(agents, (0, 1), constant=True)
    pairs = []
    for i in range(len(inputs)):
        got = {p.split("=")[1] for p in inputs.payloads[i].split(",") if p}
        for o in outputs.level(inputs.colors[i]):
            decided = {p.split("=")[1] for p in outputs.payloads[o].split(",") if p}
            if decided <= got:
                pairs.append((i, o))
    return make_task(inputs, outputs, pairs, close=True, name=f"binary_consensus({len(names)})")


@dataclass
class SearchResult:
    morphism: CsetMorphism | None
    nodes: int
    # Variables in search order; the certificate for "no solution" is the
    # exhausted search over exactly these domains.
    domain_sizes: tuple[int, ...]

    @property
    def solvable(self) -> bool:
        return self.morphism is not None


def _as_projection(p: ProtocolComplex | CsetMorphism) -> CsetMorphism:
    return p.projection if isinstance(p, ProtocolComplex) else p


def search(p: ProtocolComplex | CsetMorphism, task: Task, node_limit: int | None = None) -> SearchResult:
    """Backtracking search for ``delta`` with arc-consistency propagation.

    ``p`` is a protocol complex or any morphism ``P -> I``.  Variables are
    taken level by level, then by identifier; values in identifier order.
    """
    proj = _as_projection(p)
    src, spec = proj.source, task.spec
    if src.agents != spec.agents:
        raise CsetError("protocol complex and task use different agent sets")
    if proj.target is not task.inputs and (
        len(proj.target) != len(task.inputs) or proj.target.colors != task.inputs.colors
    ):
        raise CsetError("protocol complex does not project onto the task's inputs")

    by_input: dict[int, list[int]] = {}
    for t, i in enumerate(task.proj_I.mapping):
        by_input.setdefault(i, []).append(t)
    domains = [set(by_input.get(proj(s), ())) for s in range(len(src))]
    order = sorted(range(len(src)), key=lambda s: (popcount(src.colors[s]), s))
    sizes = tuple(len(domains[s]) for s in order)

    # arcs (simplex, face, color of face)
    arcs_of: list[list[tuple[int, int, int]]] = [[] for _ in range(len(src))]
    for s in range(len(src)):
        for u, f in src.faces(s).items():
            if f != s:
                arc = (s, f, u)
                arcs_of[s].append(arc)
                arcs_of[f].append(arc)

    def propagate(doms: list[set[int]], start: Iterable[int]) -> bool:
        queue = deque(a for v in start for a in arcs_of[v])
        while queue:
            s, f, u = queue.popleft()
            ds, df = doms[s], doms[f]
            keep_s = {t for t in ds if spec.face(t, u) in df}
            keep_f = {spec.face(t, u) for t in keep_s}
            changed = []
            if keep_s != ds:
                doms[s] = keep_s
                changed.append(s)
            if keep_f != df:
                doms[f] = keep_f
                changed.append(f)
            for v in changed:
                if not doms[v]:
                    return False
                queue.extend(arcs_of[v])
        return True

    nodes = 0

    def solve(doms: list[set[int]]) -> list[set[int]] | None:
        nonlocal nodes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise CsetError(f"search exceeded {node_limit} nodes")
        var = next((s for s in order if len(doms[s]) > 1), None)
        if var is None:
            return doms
        for value in sorted(doms[var]):
            trial = list(doms)
            trial[var] = {value}
            if propagate(trial, [var]):
                found = solve(trial)
                if found is not None:
                    return found
        return None

    if any(not d for d in domains) or not propagate(domains, range(len(src))):
        result = None
    else:
        result = solve(domains)
    log.debug("solvability search: %d nodes", nodes)
    if result is None:
        return SearchResult(None, nodes, sizes)
    delta = CsetMorphism(src, spec, tuple(next(iter(d)) for d in result))
    return SearchResult(delta, nodes, sizes)


def solvable(p: ProtocolComplex | CsetMorphism, task: Task) -> CsetMorphism | None:
    return search(p, task).morphism


def verify_solution(p: ProtocolComplex | CsetMorphism, task: Task, delta: CsetMorphism) -> list[str]:
    """Independent simplex-by-simplex check of a claimed solution."""
    proj = _as_projection(p)
    if delta.source is not proj.source or delta.target is not task.spec:
        return ["solution has the wrong domain or codomain"]
    out = delta.violations()
    for s, t in enumerate(delta.mapping):
        if task.proj_I(t) != proj(s):
            out.append(f"simplex {s}: triangle with the input projection does not commute")
    return out
