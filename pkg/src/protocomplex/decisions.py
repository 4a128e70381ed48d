"""Csets decorated with decision values, and concrete protocols.

Values are exact rationals (:class:`fractions.Fraction`); ``None`` stands for
an undefined value.  A concrete protocol pairs a protocol functor with one
decision map per agent; after each round, agent ``a`` takes the value
``f_a(view, E)`` where ``view`` is the set of agents it heard from and ``E``
the value profile of the input simplex the round started from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from .cset import Cset, CsetError, bits
from .protocol import ProtocolComplex, ProtocolFunctor, glue

Value = Any
DecisionMap = Callable[[frozenset, Mapping[str, Value]], Value]


class DecisionError(CsetError):
    """A decision map is undefined on an encountered profile."""


class VCset:
    """A cset whose ``U``-simplices carry a value map ``U -> values``."""

    __slots__ = ("cset", "values")

    def __init__(self, cset: Cset, values: Sequence[Mapping[str, Value]]):
        if len(values) != len(cset):
            raise CsetError("one value map per simplex is required")
        self.cset = cset
        self.values = tuple(dict(v) for v in values)
        for s, v in enumerate(self.values):
            if set(v) != set(cset.agents.members(cset.colors[s])):
                raise CsetError(f"value map of simplex {s} must cover exactly its colors")

    @classmethod
    def from_vertex_values(cls, cset: Cset, vertex_values: Mapping[int, Value]) -> "VCset":
        """Decorate each simplex with the values of its vertices."""
        return cls(
            cset,
            [
                {a: vertex_values.get(v) for a, v in cset.vertices(s).items()}
                for s in range(len(cset))
            ],
        )

    def violations(self) -> list[str]:
        """Faces whose value map is not the restriction of the cofacing one."""
        out = []
        c = self.cset
        for s, vals in enumerate(self.values):
            for u, f in c.faces(s).items():
                want = {a: vals[a] for a in c.agents.members(u)}
                if self.values[f] != want:
                    out.append(f"simplex {s}: face {c.agents.fmt(u)} has values {self.values[f]}")
        return out


def forget_values(x: VCset) -> Cset:
    return x.cset


@dataclass
class ConcreteProtocol:
    """A protocol functor with local decision maps.

    ``decision_maps`` maps agent names to ``f_a(view, E)``; a ``"*"`` entry
    serves every agent without its own map.  ``select`` optionally picks the
    functor from an input simplex's value profile (used by round-indexed
    dynamic networks); it must return agent-preserving functors.
    """

    functor: ProtocolFunctor
    decision_maps: Mapping[str, Callable[..., Value]]
    select: Callable[[Mapping[str, Value]], ProtocolFunctor] | None = None
    name: str = field(default="")

    def functor_for(self, profile: Mapping[str, Value]) -> ProtocolFunctor:
        if self.select is None or not profile:
            return self.functor
        return self.select(profile)

    def decide(self, agent: str, view: frozenset, profile: Mapping[str, Value]) -> Value:
        f = self.decision_maps.get(agent, self.decision_maps.get("*"))
        if f is None:
            raise DecisionError(f"no decision map for agent {agent!r}")
        try:
            out = f(agent, view, profile)
        except (TypeError, KeyError, ArithmeticError) as exc:
            raise DecisionError(
                f"decision map of {agent!r} undefined on view {sorted(view)} "
                f"with values {dict(profile)}: {exc}"
            ) from exc
        if out is None:
            raise DecisionError(f"decision map of {agent!r} returned no value")
        return out


def concrete_extend(cp: ConcreteProtocol, x: VCset) -> tuple[VCset, ProtocolComplex]:
    """One round of a concrete protocol: glued complex plus decided values."""
    pc = glue(x.cset, lambda s: cp.functor_for(x.values[s]))
    out = pc.complex
    agents = out.agents
    vertex_value = {}
    for v in out.worlds():
        if out.dim(v) != 0:
            continue
        xs, _ = pc.representative[v]
        ((i, view),) = pc.assignment(v)
        heard = frozenset(agents.members(view))
        profile = {b: x.values[xs][b] for b in heard}
        vertex_value[v] = cp.decide(agents.names[i], heard, profile)
    return VCset.from_vertex_values(out, vertex_value), pc


def averaging_map(alpha: Fraction) -> Callable[..., Value]:
    def f(agent: str, view: frozenset, profile: Mapping[str, Value]) -> Value:
        own = profile[agent]
        return own + alpha * sum((profile[b] - own for b in sorted(view)), Fraction(0))

    return f


def averaging_protocol(functor: ProtocolFunctor, alpha) -> ConcreteProtocol:
    """``f_a(V, X) = X(a) + alpha * sum_{b in V} (X(b) - X(a))`` over ``functor``."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise CsetError(f"averaging weight must lie strictly between 0 and 1, got {alpha}")
    return ConcreteProtocol(functor, {"*": averaging_map(alpha)}, name=f"averaging({alpha})")


def constant_protocol(functor: ProtocolFunctor, value: Value) -> ConcreteProtocol:
    return ConcreteProtocol(functor, {"*": lambda a, view, profile: value}, name=f"constant({value})")


def round_counter_protocol(schedule: Sequence[ProtocolFunctor]) -> ConcreteProtocol:
    """Values count rounds; round ``i`` communicates with ``schedule[i mod len]``.

    Inputs must carry the common round number of their simplex.
    """
    if not schedule:
        raise CsetError("round schedule must not be empty")

    def select(profile: Mapping[str, Value]) -> ProtocolFunctor:
        rounds = set(profile.values())
        if len(rounds) != 1:
            raise DecisionError(f"simplex mixes round numbers {sorted(rounds)}")
        (r,) = rounds
        return schedule[int(r) % len(schedule)]

    return ConcreteProtocol(
        schedule[0],
        {"*": lambda a, view, profile: profile[a] + 1},
        select=select,
        name="round-counter",
    )


def eval_value_pred(
    x: VCset, world: int, predicate: Callable[[tuple], bool], agents: Sequence[str]
) -> bool:
    """Apply ``predicate`` to the values of ``agents`` at ``world``."""
    vals = x.values[world]
    missing = [a for a in agents if a not in vals]
    if missing:
        raise CsetError(f"predicate refers to agents {missing} absent from world {world}")
    return bool(predicate(tuple(vals[a] for a in agents)))


def _spread(vals: tuple) -> Value:
    return max(vals) - min(vals) if vals else 0


def _spread_le(param: str | None) -> Callable[[tuple], bool]:
    bound = Fraction(param or "0")
    return lambda vals: _spread(vals) <= bound


VALUE_PREDICATES: dict[str, Callable[[str | None], Callable[[tuple], bool]]] = {
    "agree": lambda p: lambda vals: len(set(vals)) <= 1,
    "distinct": lambda p: lambda vals: len(set(vals)) == len(vals),
    "true": lambda p: lambda vals: True,
    "false": lambda p: lambda vals: False,
    "spread_le": _spread_le,
    "eq": lambda p: lambda vals: all(v == Fraction(p) for v in vals),
}


def value_predicate(name: str, param: str | None = None) -> Callable[[tuple], bool]:
    try:
        return VALUE_PREDICATES[name](param)
    except KeyError:
        raise CsetError(f"unknown value predicate {name!r}") from None


def spread(x: VCset, s: int) -> Value:
    return _spread(tuple(x.values[s].values()))


def participating(x: VCset, s: int) -> tuple[str, ...]:
    return tuple(x.cset.agents.names[i] for i in bits(x.cset.colors[s]))
