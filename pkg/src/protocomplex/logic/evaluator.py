"""Bounded three-valued model checking over a truncated free algebra.

Worlds of round ``n`` are the non-empty simplices of ``X_n``.  Epistemic
operators look within a round; ``X``, ``[]`` and ``<>`` follow the next-state
maps.  Beyond the horizon nothing is known, so ``X`` at the last round is
``UNKNOWN`` and the infinite tail of ``[]``/``<>`` contributes ``UNKNOWN``
unless every branch has already died out.
"""

from __future__ import annotations

import enum
from typing import Iterable, Mapping

from ..cset import CsetError, UnionFind, bits, facets
from ..decisions import VALUE_PREDICATES
from ..iterate import FreeAlgebraTrunc
from . import ast as A


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __invert__(self) -> "Verdict":
        if self is Verdict.TRUE:
            return Verdict.FALSE
        if self is Verdict.FALSE:
            return Verdict.TRUE
        return self

    @staticmethod
    def of(b: bool) -> "Verdict":
        return Verdict.TRUE if b else Verdict.FALSE

    @property
    def decided(self) -> bool:
        return self is not Verdict.UNKNOWN


T, F, U = Verdict.TRUE, Verdict.FALSE, Verdict.UNKNOWN


def all_of(vs: Iterable[Verdict]) -> Verdict:
    out = T
    for v in vs:
        if v is F:
            return F
        if v is U:
            out = U
    return out


def any_of(vs: Iterable[Verdict]) -> Verdict:
    out = F
    for v in vs:
        if v is T:
            return T
        if v is U:
            out = U
    return out


class EvalError(CsetError):
    pass


class Checker:
    """Evaluates formulas at ``(round, world)`` pairs of ``t``; results are memoised."""

    def __init__(
        self, t: FreeAlgebraTrunc, atoms: Iterable[str] | None = None, worlds: str = "all"
    ):
        if worlds not in ("all", "facets"):
            raise EvalError(f"world mode must be 'all' or 'facets', not {worlds!r}")
        self.t = t
        self.mode = worlds
        self._world_sets: dict[int, list[int]] = {}
        self._world_flags: dict[int, list[bool]] = {}
        self.agents = t.rounds[0].agents
        if atoms is None:
            names: set[str] = set()
            for labels in t.labels or ():
                for ls in labels.values():
                    names.update(ls)
            atoms = names
        self.atoms = frozenset(atoms)
        self._memo: dict[tuple, Verdict] = {}
        self._links: dict[tuple[int, int], dict[int, list[int]]] = {}
        self._comps: dict[tuple[int, int], tuple[UnionFind, dict[int, list[int]]]] = {}

    # -- structure -----------------------------------------------------

    def worlds(self, n: int) -> list[int]:
        """Non-empty simplices of round ``n``, or only its facets in facet mode."""
        if n not in self._world_sets:
            x = self.t.rounds[n]
            self._world_sets[n] = facets(x) if self.mode == "facets" else x.worlds()
        return self._world_sets[n]

    def is_world(self, n: int, w: int) -> bool:
        if n not in self._world_flags:
            flags = [False] * len(self.t.rounds[n])
            for y in self.worlds(n):
                flags[y] = True
            self._world_flags[n] = flags
        return self._world_flags[n][w]

    def check_world(self, n: int, w: int):
        if not 0 <= n <= self.t.horizon:
            raise EvalError(f"round {n} outside 0..{self.t.horizon}")
        x = self.t.rounds[n]
        if not 0 <= w < len(x) or not self.is_world(n, w):
            raise EvalError(f"{w} is not a world of round {n}")

    def check_formula(self, phi: A.Formula):
        unknown_agents = A.agents_of(phi) - set(self.agents.names)
        if unknown_agents:
            raise EvalError(f"unknown agents {sorted(unknown_agents)}")
        for f in A.walk(phi):
            if isinstance(f, A.Atom) and f.name not in self.atoms:
                raise EvalError(f"unknown atom {f.name!r}")
            if isinstance(f, A.ValuePred):
                if self.t.values is None:
                    raise EvalError(f"value predicate #{f.name} needs a valued model")
                if f.name not in VALUE_PREDICATES:
                    raise EvalError(f"unknown value predicate #{f.name}")

    def linked(self, n: int, w: int, group: int) -> list[int]:
        """Worlds sharing the ``group``-face of ``w`` (empty if ``w`` has none)."""
        x = self.t.rounds[n]
        if x.colors[w] & group != group:
            return []
        key = (n, group)
        if key not in self._links:
            table: dict[int, list[int]] = {}
            for y in self.worlds(n):
                if x.colors[y] & group == group:
                    table.setdefault(x.face(y, group), []).append(y)
            self._links[key] = table
        return self._links[key][x.face(w, group)]

    def reachable(self, n: int, w: int, group: int) -> list[int]:
        """Worlds reachable from ``w`` by chains sharing a vertex colored in ``group``."""
        key = (n, group)
        if key not in self._comps:
            x = self.t.rounds[n]
            uf = UnionFind(len(x))
            for y in self.worlds(n):
                for i in bits(x.colors[y] & group):
                    uf.union(y, x.face(y, 1 << i))
            classes: dict[int, list[int]] = {}
            for y in self.worlds(n):
                classes.setdefault(uf.find(y), []).append(y)
            self._comps[key] = (uf, classes)
        uf, classes = self._comps[key]
        return classes[uf.find(w)]

    def reach(self, n: int, w: int, depth: int) -> list[int]:
        """Round-``n+depth`` worlds mapped onto ``w`` by the next-state maps."""
        frontier = [w]
        for k in range(depth):
            frontier = [y for v in frontier for y in self.t.successors(n + k, v)]
        return frontier

    # -- evaluation ----------------------------------------------------

    def eval(self, phi: A.Formula, n: int, w: int) -> Verdict:
        self.check_world(n, w)
        self.check_formula(phi)
        return self._eval(phi, n, w)

    def _eval(self, phi: A.Formula, n: int, w: int) -> Verdict:
        key = (phi, n, w)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._compute(phi, n, w)
            self._memo[key] = hit
        return hit

    def _group(self, agents) -> int:
        return self.agents.mask(list(agents))

    def _compute(self, phi: A.Formula, n: int, w: int) -> Verdict:
        ev = self._eval
        t = type(phi)
        if t is A.Const:
            return Verdict.of(phi.value)
        if t is A.Atom:
            return Verdict.of(self._atom(phi, n, w))
        if t is A.ValuePred:
            return Verdict.of(self._value_pred(phi, n, w))
        if t is A.Not:
            return ~ev(phi.sub, n, w)
        if t is A.And:
            return all_of(ev(s, n, w) for s in (phi.left, phi.right))
        if t is A.Or:
            return any_of(ev(s, n, w) for s in (phi.left, phi.right))
        if t is A.Implies:
            return any_of((~ev(phi.left, n, w), ev(phi.right, n, w)))
        if t is A.Iff:
            a, b = ev(phi.left, n, w), ev(phi.right, n, w)
            if not (a.decided and b.decided):
                return U
            return Verdict.of(a is b)
        if t in (A.K, A.Khat):
            ys = self.linked(n, w, self.agents.mask([phi.agent]))
            vs = (ev(phi.sub, n, y) for y in ys)
            return all_of(vs) if t is A.K else any_of(vs)
        if t in (A.D, A.Dhat):
            ys = self.linked(n, w, self._group(phi.agents))
            vs = (ev(phi.sub, n, y) for y in ys)
            return all_of(vs) if t is A.D else any_of(vs)
        if t is A.C:
            return all_of(ev(phi.sub, n, y) for y in self.reachable(n, w, self._group(phi.agents)))
        if t is A.Next:
            if n >= self.t.horizon:
                return U
            return all_of(ev(phi.sub, n + 1, y) for y in self.t.successors(n, w))
        if t in (A.Box, A.Diamond):
            return self._temporal(phi, n, w)
        raise TypeError(f"not a formula: {phi!r}")

    def depth_verdicts(self, phi: A.Formula, n: int, w: int) -> tuple[list[Verdict], Verdict]:
        """Verdicts of ``X^i phi`` for ``i = 0..h-n`` and of the unexplored tail."""
        out = []
        frontier = [w]
        for i in range(self.t.horizon - n + 1):
            if not frontier:
                return out, T
            out.append(all_of(self._eval(phi, n + i, y) for y in frontier))
            if n + i < self.t.horizon:
                frontier = [z for y in frontier for z in self.t.successors(n + i, y)]
        return out, (U if frontier else T)

    def _temporal(self, phi, n, w) -> Verdict:
        depths, tail = self.depth_verdicts(phi.sub, n, w)
        if type(phi) is A.Box:
            return all_of(depths + [tail])
        return any_of(depths + [tail])

    def _atom(self, phi: A.Atom, n: int, w: int) -> bool:
        x = self.t.rounds[n]
        labels = self.t.labels[n] if self.t.labels else {}
        if phi.agent is None:
            return any(phi.name in labels.get(v, ()) for v in x.vertices(w).values())
        v = x.vertex(w, phi.agent)
        return v is not None and phi.name in labels.get(v, ())

    def _value_pred(self, phi: A.ValuePred, n: int, w: int) -> bool:
        vals = self.t.values[n].values[w]
        if any(a not in vals or vals[a] is None for a in phi.agents):
            return False
        pred = VALUE_PREDICATES[phi.name](phi.param)
        return bool(pred(tuple(vals[a] for a in phi.agents)))

    # -- explanations --------------------------------------------------

    def trace(self, phi: A.Formula, n: int, w: int, limit: int = 32) -> list[dict]:
        """Chain of worlds justifying the verdict of ``phi`` at ``(n, w)``.

        Each step names the world and the subformula evaluated there; modal
        steps follow the first witness (for a true existential, a false
        universal) or, for an undecided universal, the first undecided world.
        """
        self.check_world(n, w)
        self.check_formula(phi)
        steps: list[dict] = []
        while len(steps) < limit:
            v = self._eval(phi, n, w)
            steps.append({"round": n, "world": w, "formula": A.to_text(phi), "verdict": v.value})
            nxt = self._trace_step(phi, n, w, v)
            if nxt is None:
                break
            phi, n, w = nxt
        return steps

    def _trace_step(self, phi, n, w, v):
        t = type(phi)
        ev = self._eval
        if t is A.Not:
            return phi.sub, n, w
        if t in (A.And, A.Or):
            for s in (phi.left, phi.right):
                if ev(s, n, w) is v:
                    return s, n, w
            return None
        if t is A.Implies:
            return (phi.right, n, w) if v is not T or ev(phi.right, n, w) is T else (phi.left, n, w)
        if t is A.Iff:
            return None
        universal = t in (A.K, A.D, A.C, A.Next, A.Box)
        want = F if (universal and v is F) else T if (not universal and v is T) else U
        if t in (A.K, A.Khat, A.D, A.Dhat, A.C):
            if t in (A.K, A.Khat):
                ys = self.linked(n, w, self.agents.mask([phi.agent]))
            elif t is A.C:
                ys = self.reachable(n, w, self._group(phi.agents))
            else:
                ys = self.linked(n, w, self._group(phi.agents))
            for y in ys:
                if ev(phi.sub, n, y) is want:
                    return phi.sub, n, y
            return None
        if t is A.Next and n < self.t.horizon:
            for y in self.t.successors(n, w):
                if ev(phi.sub, n + 1, y) is want:
                    return phi.sub, n + 1, y
            return None
        if t in (A.Box, A.Diamond):
            for i in range(self.t.horizon - n + 1):
                for y in self.reach(n, w, i):
                    if ev(phi.sub, n + i, y) is want:
                        return phi.sub, n + i, y
            return None
        return None


def evaluate(t: FreeAlgebraTrunc, phi: A.Formula | str, n: int, w: int) -> Verdict:
    if isinstance(phi, str):
        from .parser import parse

        phi = parse(phi)
    return Checker(t).eval(phi, n, w)


def model_atoms(labels: Mapping[int, Iterable[str]]) -> set[str]:
    return {p for ls in labels.values() for p in ls}
