"""Communication graphs, oblivious message adversaries and dynamic network models."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Callable, Iterable, Mapping

from .cset import AgentSet, CsetError, submasks


@dataclass(frozen=True, order=True)
class CommGraph:
    """Directed graph on a set of participating agents.

    Agent ``a`` is active iff the self-loop ``(a, a)`` is present; the view of
    an active agent is its in-neighbourhood.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    @classmethod
    def make(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str]]) -> "CommGraph":
        vs = tuple(sorted(set(vertices)))
        es = tuple(sorted(set((a, b) for a, b in edges)))
        for a, b in es:
            if a not in vs or b not in vs:
                raise CsetError(f"edge {a}->{b} leaves the vertex set {vs}")
        return cls(vs, es)

    @property
    def active(self) -> frozenset[str]:
        return frozenset(a for a, b in self.edges if a == b)

    def view(self, agent: str) -> frozenset[str]:
        if (agent, agent) not in self.edges:
            raise CsetError(f"view of crashed or absent agent {agent!r} is undefined")
        return frozenset(a for a, b in self.edges if b == agent)

    def restrict(self, agents: Iterable[str]) -> "CommGraph":
        """Induced subgraph on ``agents``."""
        keep = set(agents) & set(self.vertices)
        return CommGraph.make(keep, [(a, b) for a, b in self.edges if a in keep and b in keep])

    def rename(self, perm: Mapping[str, str]) -> "CommGraph":
        return CommGraph.make((perm[v] for v in self.vertices), ((perm[a], perm[b]) for a, b in self.edges))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}


def ordered_partitions(items: tuple[str, ...]) -> list[tuple[frozenset[str], ...]]:
    """All sequences of disjoint nonempty blocks covering ``items``."""
    if not items:
        return [()]
    out = []
    n = len(items)
    for k in range(1, n + 1):
        for first in combinations(items, k):
            rest = tuple(i for i in items if i not in first)
            for tail in ordered_partitions(rest):
                out.append((frozenset(first),) + tail)
    return out


def immediate_snapshot(agents: Iterable[str]) -> frozenset[CommGraph]:
    """One graph per ordered partition: ``a -> b`` iff ``a``'s block comes no later."""
    u = tuple(sorted(agents))
    if not u:
        return frozenset()
    graphs = set()
    for part in ordered_partitions(u):
        rank = {a: i for i, block in enumerate(part) for a in block}
        graphs.add(CommGraph.make(u, [(a, b) for a in u for b in u if rank[a] <= rank[b]]))
    return frozenset(graphs)


def reliable_broadcast(agents: Iterable[str]) -> frozenset[CommGraph]:
    u = tuple(agents)
    return frozenset({CommGraph.make(u, [(a, b) for a in u for b in u])})


def synchronous_broadcast(agents: Iterable[str], detectable: bool) -> frozenset[CommGraph]:
    """Synchronous broadcast with at most one crash in the round.

    A crashed agent has no self-loop, still receives from everybody, and its
    own messages reach an arbitrary subset of the others (send order is
    arbitrary, so every subset is a prefix of some order).  With
    ``detectable`` the crash must be noticed: when other agents exist, at
    least one of them misses the crashed agent's message.
    """
    u = tuple(sorted(agents))
    full = [(a, b) for a in u for b in u]
    graphs = {CommGraph.make(u, full)}
    for c in u:
        others = [a for a in u if a != c]
        base = [(a, b) for a, b in full if a != c]
        for k in range(len(others) + 1):
            for reached in combinations(others, k):
                if detectable and others and len(reached) == len(others):
                    continue
                graphs.add(CommGraph.make(u, base + [(c, b) for b in reached]))
    return frozenset(graphs)


def is_permutation_closed(graphs: Iterable[CommGraph], agents: Iterable[str]) -> bool:
    gs = set(graphs)
    names = tuple(sorted(agents))
    for perm in permutations(names):
        p = dict(zip(names, perm))
        if any(g.rename(p) not in gs for g in gs):
            return False
    return True


class DynamicNetworkModel:
    """A family of oblivious message adversaries, one per participating subset."""

    def __init__(self, agents: AgentSet, graphs: Mapping[int, Iterable[CommGraph]]):
        self.agents = agents
        self._graphs: dict[int, frozenset[CommGraph]] = {}
        for u in submasks(agents.full):
            gs = frozenset(graphs.get(u, ()))
            names = agents.members(u)
            for g in gs:
                if g.vertices != tuple(sorted(names)):
                    raise CsetError(f"graph on {g.vertices} listed under {agents.fmt(u)}")
            self._graphs[u] = gs

    def __call__(self, u: Iterable[str] | str | int) -> frozenset[CommGraph]:
        return self._graphs[self.agents.mask(u)]

    def items(self):
        return self._graphs.items()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DynamicNetworkModel)
            and self.agents == other.agents
            and self._graphs == other._graphs
        )

    @classmethod
    def from_generator(
        cls, agents: AgentSet, generator: Callable[[tuple[str, ...]], Iterable[CommGraph]]
    ) -> "DynamicNetworkModel":
        return cls(agents, {u: generator(agents.members(u)) for u in submasks(agents.full)})


def uniform_closure(agents: AgentSet, graphs: Iterable[CommGraph]) -> DynamicNetworkModel:
    """``M(U) = {G restricted to U | G in M(A)}``."""
    graphs = list(graphs)
    for g in graphs:
        if set(g.vertices) != set(agents.names):
            raise CsetError("uniform closure needs graphs on the full agent set")
    return DynamicNetworkModel(
        agents,
        {u: {g.restrict(agents.members(u)) for g in graphs} for u in submasks(agents.full)},
    )


def k_resilient(model: DynamicNetworkModel, k: int) -> DynamicNetworkModel:
    """Allow at most ``k`` crashes over the whole execution.

    ``M'(U)`` is empty once more than ``k`` agents are missing, and keeps only
    crash-free graphs when exactly ``k`` are missing.
    """
    if k < 0:
        raise CsetError("resilience must be nonnegative")
    agents = model.agents
    out = {}
    for u, gs in model.items():
        missing = len(agents) - len(agents.members(u))
        if missing > k:
            out[u] = frozenset()
        elif missing == k:
            out[u] = frozenset(g for g in gs if g.active == frozenset(g.vertices))
        else:
            out[u] = gs
    return DynamicNetworkModel(agents, out)


def immediate_snapshot_model(agents: AgentSet) -> DynamicNetworkModel:
    return DynamicNetworkModel.from_generator(agents, immediate_snapshot)


def reliable_broadcast_model(agents: AgentSet) -> DynamicNetworkModel:
    return DynamicNetworkModel.from_generator(agents, reliable_broadcast)


def synchronous_broadcast_model(
    agents: AgentSet, detectable: bool = False, resilience: int | None = 1
) -> DynamicNetworkModel:
    """Per-subset synchronous broadcast, by default at most one crash overall."""
    model = DynamicNetworkModel.from_generator(
        agents, lambda u: synchronous_broadcast(u, detectable)
    )
    return model if resilience is None else k_resilient(model, resilience)


BUILTIN_MODELS = {
    "immediate_snapshot": immediate_snapshot_model,
    "reliable_broadcast": reliable_broadcast_model,
    "sync_broadcast": lambda agents: synchronous_broadcast_model(agents, detectable=False),
    "sync_broadcast_detectable": lambda agents: synchronous_broadcast_model(agents, detectable=True),
}


def model_from_json(doc: Mapping, agents: AgentSet) -> DynamicNetworkModel:
    """Build a model from an adversary document.

    ``{"kind": ..., "params": {...}, "graphs": [...]}``; explicit graphs are
    ``{"vertices": [...], "edges": [[a, b], ...]}`` objects (or bare edge
    lists over the full agent set) and are closed uniformly over subsets.
    ``params.resilience`` applies :func:`k_resilient`.
    """
    kind = doc.get("kind")
    params = dict(doc.get("params") or {})
    resilience = params.get("resilience")
    if kind == "immediate_snapshot":
        model = immediate_snapshot_model(agents)
    elif kind == "reliable_broadcast":
        model = reliable_broadcast_model(agents)
    elif kind == "sync_broadcast":
        model = synchronous_broadcast_model(
            agents, bool(params.get("detectable", False)), resilience=None
        )
        if "resilience" not in params:
            resilience = 1
    elif kind == "explicit":
        graphs = []
        for g in doc.get("graphs", []):
            if isinstance(g, Mapping):
                graphs.append(CommGraph.make(g["vertices"], [tuple(e) for e in g["edges"]]))
            else:
                graphs.append(CommGraph.make(agents.names, [tuple(e) for e in g]))
        model = uniform_closure(agents, graphs)
    elif kind == "explicit_family":
        family = doc.get("family") or {}
        model = DynamicNetworkModel(
            agents,
            {
                agents.mask(key): [
                    CommGraph.make(g["vertices"], [tuple(e) for e in g["edges"]]) for g in gs
                ]
                for key, gs in family.items()
            },
        )
    else:
        raise CsetError(f"unknown adversary kind {kind!r}")
    if resilience is not None:
        model = k_resilient(model, int(resilience))
    return model


def model_to_json(model: DynamicNetworkModel) -> dict:
    """Explicit per-subset listing of a model."""
    agents = model.agents
    return {
        "kind": "explicit_family",
        "agents": list(agents.names),
        "family": {
            agents.key(u): [g.to_json() for g in sorted(gs)]
            for u, gs in sorted(model.items(), key=lambda kv: kv[0])
        },
    }
