"""Finite chromatic augmented semi-simplicial sets (csets).

A cset over an ordered agent set assigns to every subset ``U`` of agents a
finite set of ``U``-colored simplices, together with face maps
``X(V) -> X(U)`` for ``U <= V``.  Subsets are encoded as bitmasks over the
agent order; simplex identifiers are dense integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence


class CsetError(ValueError):
    """Raised for malformed csets, morphisms or diagrams."""


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> list[int]:
    """All submasks of ``mask`` ordered by size, then numerically."""
    subs = []
    sub = mask
    while True:
        subs.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    subs.sort(key=lambda m: (popcount(m), m))
    return subs


def bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class AgentSet:
    """A totally ordered finite set of agent names."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise CsetError(f"duplicate agent names in {names!r}")
        for n in names:
            if not n or not isinstance(n, str) or "," in n:
                raise CsetError(f"invalid agent name {n!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AgentSet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"AgentSet({list(self.names)!r})"

    @property
    def full(self) -> int:
        return (1 << len(self.names)) - 1

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise CsetError(f"unknown agent {name!r}") from None

    def mask(self, agents: Iterable[str] | str | int) -> int:
        """Bitmask of a collection of agent names (or a ``"a,b"`` key)."""
        if isinstance(agents, int):
            if agents & ~self.full:
                raise CsetError(f"mask {agents} outside agent set")
            return agents
        if isinstance(agents, str):
            agents = [a for a in agents.split(",") if a]
        m = 0
        for a in agents:
            m |= 1 << self.index(a)
        return m

    def members(self, mask: int) -> tuple[str, ...]:
        return tuple(self.names[i] for i in bits(mask))

    def key(self, mask: int) -> str:
        """Canonical text key of a subset: names joined by commas."""
        return ",".join(self.members(mask))

    def subsets(self, mask: int | None = None) -> list[int]:
        return submasks(self.full if mask is None else mask)

    def fmt(self, mask: int) -> str:
        return "{" + ",".join(self.members(mask)) + "}"


class Cset:
    """An immutable finite cset.

    ``colors[s]`` is the color mask of simplex ``s``; ``faces[s]`` maps every
    submask ``U`` of that color to the identifier of the ``U``-face of ``s``.
    The constructor checks only the shape of the data; functoriality is
    checked by :func:`validate`.
    """

    __slots__ = ("agents", "colors", "payloads", "_faces", "_levels", "_cofaces")

    def __init__(
        self,
        agents: AgentSet,
        colors: Sequence[int],
        payloads: Sequence[str],
        faces: Sequence[Mapping[int, int]],
    ):
        if not (len(colors) == len(payloads) == len(faces)):
            raise CsetError("colors, payloads and faces must have equal length")
        self.agents = agents
        self.colors = tuple(colors)
        self.payloads = tuple(payloads)
        self._faces = tuple(dict(f) for f in faces)
        n = len(self.colors)
        levels: dict[int, list[int]] = {}
        for s, (c, fs) in enumerate(zip(self.colors, self._faces)):
            if c & ~agents.full:
                raise CsetError(f"simplex {s} has color outside the agent set")
            if set(fs) != set(submasks(c)):
                raise CsetError(f"simplex {s} must have exactly one face per subset of its color")
            for u, t in fs.items():
                if not 0 <= t < n or self.colors[t] != u:
                    raise CsetError(f"face {agents.fmt(u)} of simplex {s} has the wrong color")
            levels.setdefault(c, []).append(s)
        self._levels = {c: tuple(v) for c, v in levels.items()}
        self._cofaces: list[list[int]] | None = None

    def __len__(self) -> int:
        return len(self.colors)

    def __repr__(self) -> str:
        return f"<Cset agents={list(self.agents.names)} simplices={len(self)}>"

    def face(self, s: int, u: int) -> int:
        try:
            return self._faces[s][u]
        except KeyError:
            raise CsetError(
                f"{self.agents.fmt(u)} is not a subset of the color of simplex {s}"
            ) from None

    def faces(self, s: int) -> Mapping[int, int]:
        return self._faces[s]

    def level(self, u: int) -> tuple[int, ...]:
        return self._levels.get(u, ())

    def levels(self) -> dict[int, tuple[int, ...]]:
        """Nonempty levels ordered by size of the color set."""
        return {c: self._levels[c] for c in sorted(self._levels, key=lambda m: (popcount(m), m))}

    def dim(self, s: int) -> int:
        return popcount(self.colors[s]) - 1

    def vertex(self, s: int, agent: str | int) -> int | None:
        """The ``agent``-colored vertex of ``s``, or ``None``."""
        i = agent if isinstance(agent, int) else self.agents.index(agent)
        bit = 1 << i
        if not self.colors[s] & bit:
            return None
        return self._faces[s][bit]

    def vertices(self, s: int) -> dict[str, int]:
        return {self.agents.names[i]: self._faces[s][1 << i] for i in bits(self.colors[s])}

    def worlds(self) -> list[int]:
        """All non-augmentation simplices."""
        return [s for s, c in enumerate(self.colors) if c]

    def cofaces(self, s: int) -> list[int]:
        """Simplices having ``s`` as a face (``s`` itself included)."""
        if self._cofaces is None:
            co: list[list[int]] = [[] for _ in self.colors]
            for t, fs in enumerate(self._faces):
                for f in fs.values():
                    co[f].append(t)
            self._cofaces = co
        return self._cofaces[s]

    def counts(self) -> dict[str, int]:
        return {self.agents.key(c): len(ids) for c, ids in self.levels().items()}


@dataclass(frozen=True)
class CsetMorphism:
    """A color-preserving map of simplices ``source -> target``."""

    source: Cset
    target: Cset
    mapping: tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != len(self.source):
            raise CsetError("morphism must be defined on every source simplex")
        if self.source.agents != self.target.agents:
            raise CsetError("morphism between csets over different agent sets")

    def __call__(self, s: int) -> int:
        return self.mapping[s]

    def __repr__(self) -> str:
        return f"<CsetMorphism {len(self.source)} -> {len(self.target)}>"

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping)

    def is_surjective(self) -> bool:
        return len(set(self.mapping)) == len(self.target)

    def then(self, other: "CsetMorphism") -> "CsetMorphism":
        """Composite ``other . self``."""
        if other.source is not self.target:
            raise CsetError("composing morphisms with mismatched endpoints")
        return CsetMorphism(self.source, other.target, tuple(other.mapping[t] for t in self.mapping))

    def violations(self) -> list[str]:
        """Color and naturality failures, one line per offending simplex."""
        src, tgt = self.source, self.target
        out = []
        for s, t in enumerate(self.mapping):
            if not 0 <= t < len(tgt):
                out.append(f"simplex {s} maps outside the target")
                continue
            if src.colors[s] != tgt.colors[t]:
                out.append(f"simplex {s} changes color")
                continue
            bad = [u for u, f in src.faces(s).items() if self.mapping[f] != tgt.face(t, u)]
            if bad:
                out.append(
                    f"simplex {s}: naturality fails on faces "
                    + ", ".join(src.agents.fmt(u) for u in bad)
                )
        return out


def identity(x: Cset) -> CsetMorphism:
    return CsetMorphism(x, x, tuple(range(len(x))))


def validate(x: Cset) -> list[str]:
    """Report every broken identity or composite face equation.

    One entry is produced per pair (simplex, subset) whose face disagrees with
    some composite of intermediate faces; an empty list means ``x`` is a
    valid cset.
    """
    out = []
    fmt = x.agents.fmt
    for s, c in enumerate(x.colors):
        fs = x.faces(s)
        if fs[c] != s:
            out.append(f"simplex {s}: face {fmt(c)} is not the identity")
        for u in submasks(c):
            chains = [
                v for v in submasks(c)
                if v & u == u and v not in (u, c) and x.face(fs[v], u) != fs[u]
            ]
            if chains:
                out.append(
                    f"simplex {s}: face {fmt(u)} = {fs[u]} disagrees with composites through "
                    + ", ".join(fmt(v) for v in chains)
                )
    return out


class CsetBuilder:
    """Incremental construction of a cset, with optional payload dedupe."""

    def __init__(self, agents: AgentSet):
        self.agents = agents
        self.colors: list[int] = []
        self.payloads: list[str] = []
        self.faces: list[dict[int, int]] = []
        self._by_payload: dict[tuple[int, str], int] = {}

    def add(self, color: int, payload: str, faces: Mapping[int, int]) -> int:
        """Add a simplex; ``faces`` may omit the identity entry."""
        s = len(self.colors)
        fs = dict(faces)
        fs[color] = s
        self.colors.append(color)
        self.payloads.append(payload)
        self.faces.append(fs)
        self._by_payload.setdefault((color, payload), s)
        return s

    def find(self, color: int, payload: str) -> int | None:
        return self._by_payload.get((color, payload))

    def build(self) -> Cset:
        return Cset(self.agents, self.colors, self.payloads, self.faces)


def standard_simplex(agents: AgentSet, u: Iterable[str] | str | int) -> Cset:
    """The representable cset: exactly one ``T``-simplex for each ``T <= U``."""
    mask = agents.mask(u)
    order = submasks(mask)
    ids = {t: i for i, t in enumerate(order)}
    return Cset(
        agents,
        order,
        [agents.fmt(t) for t in order],
        [{w: ids[w] for w in submasks(t)} for t in order],
    )


def sub_cset(x: Cset, generators: Iterable[int]) -> tuple[Cset, CsetMorphism]:
    """The sub-cset generated (closed under faces) by ``generators``.

    Returns the sub-cset and its inclusion into ``x``.
    """
    keep = set()
    for g in generators:
        keep.update(x.faces(g).values())
    order = sorted(keep, key=lambda s: (popcount(x.colors[s]), x.colors[s], s))
    new = {s: i for i, s in enumerate(order)}
    sub = Cset(
        x.agents,
        [x.colors[s] for s in order],
        [x.payloads[s] for s in order],
        [{u: new[f] for u, f in x.faces(s).items()} for s in order],
    )
    return sub, CsetMorphism(sub, x, tuple(order))


def remove_simplices(x: Cset, drop: Iterable[int]) -> tuple[Cset, CsetMorphism]:
    """Delete simplices together with everything having them as a face."""
    gone = set()
    for d in drop:
        gone.update(x.cofaces(d))
    return sub_cset(x, [s for s in range(len(x)) if s not in gone])


def facets(x: Cset) -> list[int]:
    """Non-augmentation simplices that are not a proper face of another."""
    covered = set()
    for s, fs in enumerate(x._faces):
        for f in fs.values():
            if f != s:
                covered.add(f)
    return [s for s in range(len(x)) if x.colors[s] and s not in covered]


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.unions = 0

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        self.unions += 1
        return True


def colimit(
    csets: Sequence[Cset],
    morphisms: Iterable[tuple[int, int, CsetMorphism]],
    payload: Callable[[list[tuple[int, int]]], str] | None = None,
) -> tuple[Cset, list[CsetMorphism]]:
    """Colimit of a finite diagram of csets.

    ``morphisms`` holds triples ``(i, j, f)`` with ``f: csets[i] -> csets[j]``.
    The result is the disjoint union of all simplices quotiented by
    ``x ~ f(x)``, with face maps induced on classes, together with the
    injection of every diagram object.  Classes are numbered by color size,
    color, then payload, then smallest member.  ``payload`` receives the
    sorted member list ``[(i, s), ...]`` of a class; by default the payload of
    the first member is used.
    """
    if not csets:
        raise CsetError("colimit of an empty diagram needs an agent set")
    agents = csets[0].agents
    offsets = []
    total = 0
    for c in csets:
        if c.agents != agents:
            raise CsetError("diagram mixes agent sets")
        offsets.append(total)
        total += len(c)
    uf = UnionFind(total)
    for i, j, f in morphisms:
        if f.source is not csets[i] or f.target is not csets[j]:
            raise CsetError(f"diagram morphism {i}->{j} has the wrong endpoints")
        oi, oj = offsets[i], offsets[j]
        for s, t in enumerate(f.mapping):
            if csets[i].colors[s] != csets[j].colors[t]:
                raise CsetError(f"diagram morphism {i}->{j} is not color preserving")
            uf.union(oi + s, oj + t)

    members: dict[int, list[tuple[int, int]]] = {}
    for i, c in enumerate(csets):
        for s in range(len(c)):
            members.setdefault(uf.find(offsets[i] + s), []).append((i, s))

    def pl(ms: list[tuple[int, int]]) -> str:
        if payload is not None:
            return payload(ms)
        i, s = ms[0]
        return csets[i].payloads[s]

    classes = []
    for root, ms in members.items():
        i, s = ms[0]
        color = csets[i].colors[s]
        classes.append((popcount(color), color, pl(ms), ms[0], root, ms))
    classes.sort(key=lambda t: t[:4])
    cls_of_root = {t[4]: k for k, t in enumerate(classes)}

    def cls(i: int, s: int) -> int:
        return cls_of_root[uf.find(offsets[i] + s)]

    colors, payloads, faces = [], [], []
    for _, color, p, _, _, ms in classes:
        fs = None
        for i, s in ms:
            got = {u: cls(i, f) for u, f in csets[i].faces(s).items()}
            if fs is None:
                fs = got
            elif got != fs:
                raise CsetError("induced face maps are ill-defined: the diagram is not functorial")
        colors.append(color)
        payloads.append(p)
        faces.append(fs)
    result = Cset(agents, colors, payloads, faces)
    injections = [
        CsetMorphism(c, result, tuple(cls(i, s) for s in range(len(c))))
        for i, c in enumerate(csets)
    ]
    return result, injections


def coproduct(csets: Sequence[Cset]) -> tuple[Cset, list[CsetMorphism]]:
    return colimit(csets, [])


def product(x: Cset, y: Cset) -> tuple[Cset, CsetMorphism, CsetMorphism]:
    """Levelwise product with componentwise faces, plus both projections."""
    if x.agents != y.agents:
        raise CsetError("product of csets over different agent sets")
    index: dict[tuple[int, int], int] = {}
    pairs = []
    for color, xs in x.levels().items():
        for s in xs:
            for t in y.level(color):
                index[s, t] = len(pairs)
                pairs.append((s, t))
    colors = [x.colors[s] for s, _ in pairs]
    payloads = [f"({x.payloads[s]}|{y.payloads[t]})" for s, t in pairs]
    faces = [
        {u: index[x.face(s, u), y.face(t, u)] for u in x.faces(s)}
        for s, t in pairs
    ]
    prod = Cset(x.agents, colors, payloads, faces)
    return (
        prod,
        CsetMorphism(prod, x, tuple(s for s, _ in pairs)),
        CsetMorphism(prod, y, tuple(t for _, t in pairs)),
    )


def _signature(x: Cset, s: int) -> tuple:
    co = x.cofaces(s)
    return (x.colors[s], len(co), tuple(sorted(len(x.cofaces(f)) for f in x.faces(s).values())))


def find_isomorphism(
    x: Cset, y: Cset, preserve_payload: bool = False
) -> CsetMorphism | None:
    """Search for an isomorphism ``x -> y``.

    Facets are the only branching variables: assigning a simplex forces all
    of its faces.  Candidates are pruned by a local coface signature (and by
    payload equality when ``preserve_payload`` is set).
    """
    if x.agents != y.agents or x.counts() != y.counts() or len(x) != len(y):
        return None
    key = (lambda c, s: (_signature(c, s), c.payloads[s])) if preserve_payload else _signature
    for c in x.levels():
        if sorted(key(x, s) for s in x.level(c)) != sorted(key(y, s) for s in y.level(c)):
            return None
    # Every simplex is a face of some maximal simplex (augmentation included).
    tops_x = [s for s in range(len(x)) if len(x.cofaces(s)) == 1]
    tops_x.sort(key=lambda s: (-popcount(x.colors[s]), s))
    cand = {s: [t for t in y.level(x.colors[s]) if key(y, t) == key(x, s)] for s in tops_x}
    fwd: dict[int, int] = {}
    back: dict[int, int] = {}

    def assign(s: int, t: int, trail: list[int]) -> bool:
        for u, f in x.faces(s).items():
            g = y.face(t, u)
            if f in fwd:
                if fwd[f] != g:
                    return False
            elif g in back:
                return False
            else:
                fwd[f] = g
                back[g] = f
                trail.append(f)
        return True

    def undo(trail: list[int]):
        for f in trail:
            del back[fwd.pop(f)]

    def search(k: int) -> bool:
        if k == len(tops_x):
            return len(fwd) == len(x)
        s = tops_x[k]
        if s in fwd:
            return search(k + 1)
        for t in cand[s]:
            if t in back:
                continue
            trail: list[int] = []
            if assign(s, t, trail) and search(k + 1):
                return True
            undo(trail)
        return False

    if not search(0):
        return None
    return CsetMorphism(x, y, tuple(fwd[s] for s in range(len(x))))


class SimplicialModel:
    """A cset with atomic propositions attached to its vertices.

    ``labels`` maps vertex identifiers to sets of atom names local to the
    vertex's agent; the label of a higher simplex is the set of
    ``(agent, atom)`` pairs of its vertices.
    """

    __slots__ = ("cset", "labels", "atoms")

    def __init__(
        self,
        cset: Cset,
        labels: Mapping[int, Iterable[str]],
        atoms: Mapping[str, Iterable[str]] | None = None,
    ):
        self.cset = cset
        self.labels = {v: frozenset(ls) for v, ls in labels.items()}
        for v in self.labels:
            if popcount(cset.colors[v]) != 1:
                raise CsetError(f"labels may only be attached to vertices (simplex {v})")
        if atoms is None:
            universe: dict[str, set[str]] = {a: set() for a in cset.agents}
            for v, ls in self.labels.items():
                universe[cset.agents.members(cset.colors[v])[0]].update(ls)
            atoms = universe
        self.atoms = {a: frozenset(v) for a, v in atoms.items()}

    def locality_violations(self) -> list[str]:
        out = []
        for v, ls in self.labels.items():
            agent = self.cset.agents.members(self.cset.colors[v])[0]
            extra = ls - self.atoms.get(agent, frozenset())
            if extra:
                out.append(f"vertex {v} of {agent} carries foreign atoms {sorted(extra)}")
        return out

    def label(self, s: int) -> frozenset[tuple[str, str]]:
        """Extended label: union of the vertex labels, tagged by agent."""
        return frozenset(
            (a, p)
            for a, v in self.cset.vertices(s).items()
            for p in self.labels.get(v, ())
        )


def label_violations(f: CsetMorphism, src: SimplicialModel, tgt: SimplicialModel) -> list[str]:
    """Vertices whose image carries an atom the vertex itself lacks."""
    out = []
    for v in src.cset.worlds():
        if popcount(src.cset.colors[v]) != 1:
            continue
        extra = tgt.labels.get(f(v), frozenset()) - src.labels.get(v, frozenset())
        if extra:
            out.append(f"vertex {v}: image adds {sorted(extra)}")
    return out
