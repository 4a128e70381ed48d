"""Formula syntax tree for the temporal-epistemic logic."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Atom:
    """``name@agent``; with ``agent=None`` the atom holds if any vertex carries it."""

    name: str
    agent: str | None = None


@dataclass(frozen=True)
class ValuePred:
    name: str
    agents: tuple[str, ...]
    param: str | None = None


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class K:
    agent: str
    sub: "Formula"


@dataclass(frozen=True)
class Khat:
    agent: str
    sub: "Formula"


@dataclass(frozen=True)
class C:
    agents: tuple[str, ...]
    sub: "Formula"


@dataclass(frozen=True)
class D:
    agents: tuple[str, ...]
    sub: "Formula"


@dataclass(frozen=True)
class Dhat:
    agents: tuple[str, ...]
    sub: "Formula"


@dataclass(frozen=True)
class Next:
    sub: "Formula"


@dataclass(frozen=True)
class Box:
    sub: "Formula"


@dataclass(frozen=True)
class Diamond:
    sub: "Formula"


Formula = Union[
    Const, Atom, ValuePred, Not, And, Or, Implies, Iff,
    K, Khat, C, D, Dhat, Next, Box, Diamond,
]

TRUE = Const(True)
FALSE = Const(False)

BINARY = (And, Or, Implies, Iff)
EPISTEMIC = (K, Khat, C, D, Dhat)
TEMPORAL = (Next, Box, Diamond)


def agset(agents) -> tuple[str, ...]:
    if isinstance(agents, str):
        agents = [a for a in agents.split(",") if a] if "," in agents else list(agents)
    return tuple(sorted(set(agents)))


def dead(agent: str) -> Formula:
    return K(agent, FALSE)


def alive(agent: str) -> Formula:
    return Khat(agent, TRUE)


def dead_set(agents) -> Formula:
    """Conjunction of ``dead(a)``; ``true`` for the empty set."""
    out: Formula | None = None
    for a in agset(agents):
        out = dead(a) if out is None else And(out, dead(a))
    return TRUE if out is None else out


def alive_set(agents) -> Formula:
    return Dhat(agset(agents), TRUE)


def conj(parts) -> Formula:
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts) -> Formula:
    out = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, BINARY):
        return (phi.left, phi.right)
    if isinstance(phi, (Const, Atom, ValuePred)):
        return ()
    return (phi.sub,)


def walk(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(reversed(children(f)))


def agents_of(phi: Formula) -> set[str]:
    out: set[str] = set()
    for f in walk(phi):
        if isinstance(f, Atom) and f.agent is not None:
            out.add(f.agent)
        elif isinstance(f, ValuePred):
            out.update(f.agents)
        elif isinstance(f, (K, Khat)):
            out.add(f.agent)
        elif isinstance(f, (C, D, Dhat)):
            out.update(f.agents)
    return out


def is_positive(phi: Formula) -> bool:
    """Negation only on atoms; connectives among and/or and K, C, D."""
    if isinstance(phi, (Const, Atom)):
        return True
    if isinstance(phi, Not):
        return isinstance(phi.sub, Atom)
    if isinstance(phi, (And, Or)):
        return is_positive(phi.left) and is_positive(phi.right)
    if isinstance(phi, (K, C, D)):
        return is_positive(phi.sub)
    return False


def is_mixed(phi: Formula) -> bool:
    """A temporal operator occurs under an epistemic one."""
    for f in walk(phi):
        if isinstance(f, EPISTEMIC) and any(isinstance(g, TEMPORAL) for g in walk(f.sub)):
            return True
    return False


def _set(agents: tuple[str, ...]) -> str:
    return ",".join(agents)


def to_text(phi: Formula) -> str:
    """Concrete syntax accepted by :func:`parse` (round-trips exactly)."""
    return _fmt(phi, 0)


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "|", And: "&"}


def _fmt(phi: Formula, ctx: int) -> str:
    t = type(phi)
    if t in _PREC:
        p = _PREC[t]
        if t is Implies:  # right associative
            s = f"{_fmt(phi.left, p + 1)} -> {_fmt(phi.right, p)}"
        else:  # left associative
            s = f"{_fmt(phi.left, p)} {_OPS[t]} {_fmt(phi.right, p + 1)}"
        return f"({s})" if p < ctx else s
    if t is Const:
        return "true" if phi.value else "false"
    if t is Atom:
        return phi.name if phi.agent is None else f"{phi.name}@{phi.agent}"
    if t is ValuePred:
        param = f"[{phi.param}]" if phi.param is not None else ""
        return f"#{phi.name}{param}({_set(phi.agents)})"
    sub = _fmt(phi.sub, 5)
    if t is Not:
        return f"!{sub}"
    if t is K:
        return f"K[{phi.agent}] {sub}"
    if t is Khat:
        return f"Khat[{phi.agent}] {sub}"
    if t is C:
        return f"C[{_set(phi.agents)}] {sub}"
    if t is D:
        return f"D[{_set(phi.agents)}] {sub}"
    if t is Dhat:
        return f"Dhat[{_set(phi.agents)}] {sub}"
    if t is Next:
        return f"X {sub}"
    if t is Box:
        return f"[] {sub}"
    if t is Diamond:
        return f"<> {sub}"
    raise TypeError(f"not a formula: {phi!r}")
