"""One-round protocol complexes and their extension to arbitrary csets.

``ProtocolFunctor.one_round(U)`` is the full-information complex of a single
global state with participants ``U``; ``extend(X)`` glues one copy of
``one_round(U)`` per ``U``-simplex of ``X`` along the face maps of ``X`` and
returns the glued complex with its projection back onto ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Iterable

from .adversary import DynamicNetworkModel
from .cset import (
    AgentSet,
    Cset,
    CsetError,
    CsetMorphism,
    UnionFind,
    bits,
    find_isomorphism,
    identity,
    popcount,
    submasks,
)

# A view assignment: ((agent index, view mask), ...) sorted by agent index.
Assignment = tuple[tuple[int, int], ...]


def format_assignment(agents: AgentSet, assignment: Assignment) -> str:
    parts = [f"({agents.names[i]},{agents.fmt(v)})" for i, v in assignment]
    if len(parts) == 1:
        return parts[0]
    return "{" + ",".join(parts) + "}"


@dataclass
class OneRound:
    """``F(U)`` together with the view assignment of every simplex."""

    cset: Cset
    assignments: tuple[Assignment, ...]
    index: dict[Assignment, int]


def build_from_assignments(agents: AgentSet, assignments: Iterable[Assignment]) -> OneRound:
    """Cset whose simplices are view assignments, faces by restriction.

    The set of assignments must be closed under restriction.
    """
    uniq = set(assignments)
    order = sorted(uniq, key=lambda a: (len(a), sum(1 << i for i, _ in a), a))
    index = {a: k for k, a in enumerate(order)}
    colors, payloads, faces = [], [], []
    for a in order:
        color = sum(1 << i for i, _ in a)
        fs = {}
        for u in submasks(color):
            sub = tuple((i, v) for i, v in a if u >> i & 1)
            if sub not in index:
                raise CsetError("assignment set is not closed under restriction")
            fs[u] = index[sub]
        colors.append(color)
        payloads.append(format_assignment(agents, a))
        faces.append(fs)
    return OneRound(Cset(agents, colors, payloads, faces), tuple(order), index)


@dataclass
class ProtocolComplex:
    """Result of extending a protocol functor over an input cset.

    ``copies[x][s]`` is the glued simplex coming from simplex ``s`` of the
    copy of ``F(color(x))`` placed over input simplex ``x``;
    ``representative[c]`` is one such pair ``(x, s)`` for every output
    simplex ``c``.
    """

    complex: Cset
    projection: CsetMorphism
    input: Cset
    copies: tuple[tuple[int, ...], ...]
    representative: tuple[tuple[int, int], ...]
    functors: tuple["ProtocolFunctor", ...] = field(repr=False, default=())

    def assignment(self, c: int) -> Assignment:
        x, s = self.representative[c]
        f = self.functors[x]
        return f.one_round_data(self.input.colors[x]).assignments[s]

    def origin(self, c: int) -> int:
        """Input simplex carrying the representative copy of ``c``."""
        return self.representative[c][0]


class ProtocolFunctor:
    """Full-information one-round protocol complex of a dynamic network model."""

    def __init__(self, model: DynamicNetworkModel, name: str = ""):
        self.model = model
        self.agents = model.agents
        self.name = name
        self._rounds: dict[int, OneRound] = {}
        self._extended: dict[int, tuple[Cset, ProtocolComplex]] = {}

    def __repr__(self) -> str:
        return f"<ProtocolFunctor {self.name or 'custom'} over {list(self.agents.names)}>"

    def one_round_data(self, u: int) -> OneRound:
        if u not in self._rounds:
            # the empty assignment is always present, so F(empty) is the
            # standard empty simplex and F_! keeps distinct empty faces apart
            assignments = {()}
            for sub in submasks(u):
                for g in self.model(sub):
                    act = self.agents.mask(g.active)
                    views = {self.agents.index(a): self.agents.mask(g.view(a)) for a in g.active}
                    for v in submasks(act):
                        assignments.add(tuple((i, views[i]) for i in bits(v)))
            self._rounds[u] = build_from_assignments(self.agents, assignments)
        return self._rounds[u]

    def one_round(self, u: Iterable[str] | str | int) -> Cset:
        """``F(U)``: view assignments of every graph of ``M(U')``, ``U' <= U``."""
        return self.one_round_data(self.agents.mask(u)).cset

    def one_round_inclusion(self, u, t) -> CsetMorphism:
        """``F(U) -> F(T)`` for ``U <= T``: each assignment maps to itself."""
        um, tm = self.agents.mask(u), self.agents.mask(t)
        if um & ~tm:
            raise CsetError(f"{self.agents.fmt(um)} is not a subset of {self.agents.fmt(tm)}")
        src, dst = self.one_round_data(um), self.one_round_data(tm)
        return CsetMorphism(src.cset, dst.cset, tuple(dst.index[a] for a in src.assignments))

    def extend(self, x: Cset) -> ProtocolComplex:
        """Glue copies of ``F`` over the simplices of ``x`` (memoised per object)."""
        hit = self._extended.get(id(x))
        if hit is not None and hit[0] is x:
            return hit[1]
        result = glue(x, lambda s: self)
        self._extended[id(x)] = (x, result)
        return result

    def apply_to_morphism(self, f: CsetMorphism) -> CsetMorphism:
        """Functorial action on a morphism ``f: X -> Y``."""
        return lift_morphism(self.extend(f.source), self.extend(f.target), f)


def lift_morphism(px: ProtocolComplex, py: ProtocolComplex, f: CsetMorphism) -> CsetMorphism:
    """``F_!(f)``: send the copy of ``a`` over ``x`` to the copy of ``a`` over ``f(x)``.

    Copies are matched by view assignment, so the two extensions may use
    different (nested) functors per simplex.
    """
    if f.source is not px.input or f.target is not py.input:
        raise CsetError("morphism does not connect the inputs of the given extensions")
    mapping = []
    for c, (x, _) in enumerate(px.representative):
        fx = f(x)
        data = py.functors[fx].one_round_data(py.input.colors[fx])
        k = data.index.get(px.assignment(c))
        if k is None:
            raise CsetError(f"simplex {c} has no counterpart over {fx}")
        mapping.append(py.copies[fx][k])
    return CsetMorphism(px.complex, py.complex, tuple(mapping))


def glue(x: Cset, functor_for: Callable[[int], ProtocolFunctor]) -> ProtocolComplex:
    """Colimit over the simplices of ``x`` of the one-round complexes.

    Copies over a simplex and over each of its codimension-one faces are
    identified along the inclusion of one-round complexes (payload
    equality), which generates every identification of the colimit.
    Output simplices are numbered by color size, color, payload.
    """
    agents = x.agents
    data = []
    offsets = []
    total = 0
    functors = tuple(functor_for(s) for s in range(len(x)))
    for s, color in enumerate(x.colors):
        d = functors[s].one_round_data(color)
        data.append(d)
        offsets.append(total)
        total += len(d.cset)
    uf = UnionFind(total)
    for s, color in enumerate(x.colors):
        dst = data[s]
        for i in bits(color):
            f = x.face(s, color & ~(1 << i))
            src = data[f]
            for k, a in enumerate(src.assignments):
                t = dst.index.get(a)
                if t is None:
                    raise CsetError("one-round complexes are not nested along a face inclusion")
                uf.union(offsets[f] + k, offsets[s] + t)

    members: dict[int, list[tuple[int, int]]] = {}
    for s in range(len(x)):
        for k in range(len(data[s].cset)):
            members.setdefault(uf.find(offsets[s] + k), []).append((s, k))

    def rep_key(m: tuple[int, int]):
        s, _ = m
        return (popcount(x.colors[s]), x.payloads[s], s)

    classes = []
    for root, ms in members.items():
        rep = min(ms, key=rep_key)
        s, k = rep
        d = data[s]
        color = d.cset.colors[k]
        payload = f"[{x.payloads[s]}]{d.cset.payloads[k]}"
        classes.append(((popcount(color), color, payload, rep_key(rep)), root, rep))
    classes.sort(key=lambda c: c[0])
    cls = {root: n for n, (_, root, _) in enumerate(classes)}

    copies = tuple(
        tuple(cls[uf.find(offsets[s] + k)] for k in range(len(data[s].cset)))
        for s in range(len(x))
    )
    colors, payloads, faces, proj, reps = [], [], [], [], []
    for (_, color, payload, _), _, (s, k) in classes:
        c = data[s].cset
        colors.append(color)
        payloads.append(payload)
        faces.append({u: copies[s][f] for u, f in c.faces(k).items()})
        proj.append(x.face(s, color))
        reps.append((s, k))
    out = Cset(agents, colors, payloads, faces)
    return ProtocolComplex(
        complex=out,
        projection=CsetMorphism(out, x, tuple(proj)),
        input=x,
        copies=copies,
        representative=tuple(reps),
        functors=functors,
    )


def immediate_snapshot_oracle(agents: AgentSet, u) -> OneRound:
    """Immediate-snapshot complex built directly from the view conditions.

    A ``B``-simplex (``B <= U``) is a family of views ``V_b <= U`` with
    ``b in V_b``, views pairwise comparable, and ``b in V_c`` implying
    ``V_b <= V_c``.
    """
    um = agents.mask(u)
    views_for = {i: [v for v in submasks(um) if v >> i & 1] for i in bits(um)}
    assignments = []
    for b in submasks(um):
        idx = list(bits(b))
        for choice in iproduct(*(views_for[i] for i in idx)):
            ok = True
            for p, vp in zip(idx, choice):
                for q, vq in zip(idx, choice):
                    if vp & vq != vp and vp & vq != vq:
                        ok = False
                    if vq >> p & 1 and vp & ~vq:
                        ok = False
            if ok:
                assignments.append(tuple(zip(idx, choice)))
    return build_from_assignments(agents, assignments)


def is_oracle_equivalent_IS(functor: ProtocolFunctor, u) -> CsetMorphism:
    """Payload-preserving isomorphism from the view-condition complex to ``F(U)``."""
    oracle = immediate_snapshot_oracle(functor.agents, u).cset
    target = functor.one_round(u)
    iso = find_isomorphism(oracle, target, preserve_payload=True)
    if iso is None:
        raise CsetError(
            f"one-round complex on {functor.agents.fmt(functor.agents.mask(u))} "
            "differs from the immediate snapshot view conditions"
        )
    return iso


def extend_identity_check(functor: ProtocolFunctor, x: Cset) -> bool:
    """``F_!(id_X)`` is the identity of ``F_!(X)``."""
    g = functor.apply_to_morphism(identity(x))
    return g.mapping == tuple(range(len(g.source)))
