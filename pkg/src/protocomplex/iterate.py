"""Horizon-truncated free algebra: rounds ``X_0 = I, X_1, ..., X_h``.

Round ``n+1`` is the extension of round ``n``.  The next-state maps
``p_n: X_{n+1} -> X_n`` are obtained functorially from the base algebra
``q = p_0`` (``p_n = F^n(q)``); the per-round canonical projection is kept
alongside as a diagnostic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from .cset import Cset, CsetError, CsetMorphism, SimplicialModel, identity
from .decisions import ConcreteProtocol, VCset, concrete_extend
from .protocol import ProtocolComplex, ProtocolFunctor, lift_morphism

log = logging.getLogger(__name__)

FUNCTORIAL = "functorial"
CANONICAL = "canonical"


class BudgetExceeded(RuntimeError):
    def __init__(self, round_: int, sizes: list[int], budget: int):
        self.round = round_
        self.sizes = sizes
        self.budget = budget
        super().__init__(
            f"round {round_} has {sizes[-1]} simplices, over the budget of {budget} "
            f"(sizes so far: {sizes})"
        )


class HorizonExhausted(CsetError):
    """Successors were requested at the last materialised round."""


@dataclass
class FreeAlgebraTrunc:
    functor: ProtocolFunctor | None
    rounds: list[Cset]
    next_proj: list[CsetMorphism]
    horizon: int
    provenance: list[str]
    complexes: list[ProtocolComplex] = field(repr=False)
    labels: list[dict[int, frozenset[str]]] | None = None
    values: list[VCset] | None = None
    _fibers: dict[int, list[list[int]]] = field(default_factory=dict, repr=False)

    def model(self, n: int) -> SimplicialModel:
        return SimplicialModel(self.rounds[n], self.labels[n] if self.labels else {})

    def successors(self, n: int, world: int) -> list[int]:
        """``{y in X_{n+1} | p_n(y) = world}``."""
        if n >= self.horizon:
            raise HorizonExhausted(f"round {n} is the horizon; no successors materialised")
        if n not in self._fibers:
            fib: list[list[int]] = [[] for _ in range(len(self.rounds[n]))]
            for y, x in enumerate(self.next_proj[n].mapping):
                fib[x].append(y)
            self._fibers[n] = fib
        return self._fibers[n][world]

    def composite(self, n: int) -> CsetMorphism:
        """``g_n = p_0 . p_1 . ... . p_{n-1}: X_n -> X_0``."""
        g = identity(self.rounds[n])
        for k in range(n - 1, -1, -1):
            g = g.then(self.next_proj[k])
        return g

    def canonical_projection(self, n: int) -> CsetMorphism:
        return self.complexes[n].projection

    def projection_agreement(self, n: int) -> float:
        """Fraction of round-``n+1`` simplices on which ``p_n`` equals the canonical projection."""
        a = self.next_proj[n].mapping
        b = self.complexes[n].projection.mapping
        return sum(x == y for x, y in zip(a, b)) / len(a) if a else 1.0

    def sizes(self) -> list[int]:
        return [len(x) for x in self.rounds]


def _propagate_labels(p: CsetMorphism, labels: Mapping[int, frozenset]) -> dict[int, frozenset]:
    """Vertices inherit the labels of their image under ``p``."""
    out = {}
    x = p.source
    for v in x.worlds():
        if x.dim(v) == 0 and labels.get(p(v)):
            out[v] = labels[p(v)]
    return out


def build(
    functor: ProtocolFunctor | None,
    initial: Cset | SimplicialModel | VCset,
    horizon: int,
    budget: int | None = None,
    protocol: ConcreteProtocol | None = None,
    projection: str = FUNCTORIAL,
    labels: Mapping[int, frozenset[str]] | None = None,
) -> FreeAlgebraTrunc:
    """Materialise rounds ``0..horizon``.

    ``initial`` may carry labels (``SimplicialModel``) or values (``VCset``,
    which requires ``protocol``).  ``budget`` bounds the number of simplices
    of every round.
    """
    if horizon < 0:
        raise CsetError("horizon must be nonnegative")
    if projection not in (FUNCTORIAL, CANONICAL):
        raise CsetError(f"unknown projection mode {projection!r}")
    values = None
    if isinstance(initial, SimplicialModel):
        x0 = initial.cset
        labels = initial.labels
    elif isinstance(initial, VCset):
        if protocol is None:
            raise CsetError("a valued input needs a concrete protocol")
        x0 = initial.cset
        values = [initial]
    else:
        x0 = initial
    if protocol is not None and values is None:
        raise CsetError("a concrete protocol needs a valued input")
    if functor is None:
        if protocol is None:
            raise CsetError("either a functor or a concrete protocol is required")
        functor = protocol.functor

    # round-dependent functors have no single F to lift q with
    if protocol is not None and protocol.select is not None:
        projection = CANONICAL
    rounds = [x0]
    label_rounds = [dict(labels)] if labels is not None else None
    complexes: list[ProtocolComplex] = []
    next_proj: list[CsetMorphism] = []
    provenance: list[str] = []
    if budget is not None and len(x0) > budget:
        raise BudgetExceeded(0, [len(x0)], budget)
    for n in range(horizon):
        if values is not None:
            vx, pc = concrete_extend(protocol, values[n])
            values.append(vx)
        else:
            pc = functor.extend(rounds[n])
        complexes.append(pc)
        rounds.append(pc.complex)
        log.debug("round %d: %d simplices", n + 1, len(pc.complex))
        if budget is not None and len(pc.complex) > budget:
            raise BudgetExceeded(n + 1, [len(x) for x in rounds], budget)
        if n == 0 or projection == CANONICAL:
            next_proj.append(pc.projection)
            provenance.append("q" if n == 0 else "canonical")
        else:
            next_proj.append(lift_morphism(pc, complexes[n - 1], next_proj[n - 1]))
            provenance.append(f"F^{n}(q)")
        if label_rounds is not None:
            label_rounds.append(_propagate_labels(next_proj[n], label_rounds[n]))
    return FreeAlgebraTrunc(
        functor=functor,
        rounds=rounds,
        next_proj=next_proj,
        horizon=horizon,
        provenance=provenance,
        complexes=complexes,
        labels=label_rounds,
        values=values,
    )
