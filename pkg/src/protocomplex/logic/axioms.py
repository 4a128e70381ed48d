"""Random formulas and the axiom-soundness harness."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from ..iterate import FreeAlgebraTrunc
from . import ast as A
from .evaluator import Checker, Verdict

AXIOMS = (
    "K", "4", "B", "Mono", "Union", "NE", "P", "Max", "GFP",
    "KG", "KGBox", "KGDiamond", "AX", "XX", "AI", "E",
)

# Axioms that only make sense with a successor round.
_NEEDS_NEXT = {"KG", "KGBox", "KGDiamond"}


def random_group(rng: random.Random, agents: Sequence[str]) -> tuple[str, ...]:
    k = rng.randint(1, len(agents))
    return A.agset(rng.sample(list(agents), k))


def random_atom(rng: random.Random, agents: Sequence[str], atoms: Sequence[str]) -> A.Atom:
    name = rng.choice(list(atoms))
    if rng.random() < 0.15:
        return A.Atom(name)
    return A.Atom(name, rng.choice(list(agents)))


def random_formula(
    rng: random.Random,
    agents: Sequence[str],
    atoms: Sequence[str],
    depth: int = 3,
    positive: bool = False,
    temporal: bool = False,
) -> A.Formula:
    """A random formula of nesting depth at most ``depth``.

    ``positive`` restricts to the positive fragment; ``temporal`` allows
    ``X``, ``[]`` and ``<>``.
    """
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.05:
            return A.Const(rng.random() < 0.5)
        at = random_atom(rng, agents, atoms)
        if positive and r < 0.3:
            return A.Not(at)
        return at
    ops = ["and", "or", "K", "C", "D"]
    if not positive:
        ops += ["not", "imp", "Khat", "Dhat"]
        if temporal:
            ops += ["X", "box", "dia"]
    op = rng.choice(ops)

    def sub() -> A.Formula:
        return random_formula(rng, agents, atoms, depth - 1, positive, temporal)

    if op == "and":
        return A.And(sub(), sub())
    if op == "or":
        return A.Or(sub(), sub())
    if op == "imp":
        return A.Implies(sub(), sub())
    if op == "not":
        return A.Not(sub())
    if op in ("K", "Khat"):
        return (A.K if op == "K" else A.Khat)(rng.choice(list(agents)), sub())
    if op in ("C", "D", "Dhat"):
        return {"C": A.C, "D": A.D, "Dhat": A.Dhat}[op](random_group(rng, agents), sub())
    return {"X": A.Next, "box": A.Box, "dia": A.Diamond}[op](sub())


def instantiate(
    name: str, rng: random.Random, agents: Sequence[str], atoms: Sequence[str], depth: int = 2
) -> A.Formula:
    """One random instance of the named axiom schema."""

    def phi(temporal: bool = True) -> A.Formula:
        return random_formula(rng, agents, atoms, depth, temporal=temporal)

    group = random_group(rng, agents)
    if name == "K":
        p, q = phi(), phi()
        return A.Implies(A.D(group, A.Implies(p, q)), A.Implies(A.D(group, p), A.D(group, q)))
    if name == "4":
        p = phi()
        return A.Implies(A.D(group, p), A.D(group, A.D(group, p)))
    if name == "B":
        p = phi()
        return A.Implies(p, A.D(group, A.Not(A.D(group, A.Not(p)))))
    if name == "Mono":
        bigger = A.agset(set(group) | set(random_group(rng, agents)))
        p = phi()
        return A.Implies(A.D(group, p), A.D(bigger, p))
    if name == "Union":
        other = random_group(rng, agents)
        union = A.agset(set(group) | set(other))
        return A.Implies(A.And(A.alive_set(group), A.alive_set(other)), A.alive_set(union))
    if name == "NE":
        return A.disj(A.alive(a) for a in agents)
    rest = tuple(a for a in agents if a not in group)
    if name == "P":
        p = phi()
        pre = A.conj([A.alive_set(group), A.dead_set(rest), p])
        return A.Implies(pre, A.D(group, A.Implies(A.dead_set(rest), p)))
    if name == "Max":
        return A.Implies(A.alive_set(group), A.Not(A.D(group, A.Not(A.dead_set(rest)))))
    if name == "GFP":
        p = phi()
        step = A.Implies(p, A.conj(A.K(b, p) for b in group))
        return A.Implies(A.C(group, step), A.Implies(p, A.C(group, p)))
    if name in ("KG", "KGBox", "KGDiamond"):
        p = random_formula(rng, agents, atoms, depth + 1, positive=True)
        wrap = {"KG": A.Next, "KGBox": A.Box, "KGDiamond": A.Diamond}[name]
        return A.Implies(p, wrap(p))
    if name == "AX":
        p = phi()
        return A.Implies(A.Box(p), A.Next(A.Box(p)))
    if name == "XX":
        p = phi()
        return A.Implies(A.Box(p), p)
    if name == "AI":
        p, q = phi(), phi()
        return A.Implies(A.Box(A.Implies(p, q)), A.Implies(A.Box(p), A.Box(q)))
    if name == "E":
        p = phi()
        return A.Iff(A.Diamond(p), A.Not(A.Box(A.Not(p))))
    raise ValueError(f"unknown axiom {name!r}")


@dataclass
class AxiomTally:
    true: int = 0
    false: int = 0
    unknown: int = 0
    undecided_skipped: int = 0
    mixed: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def instances(self) -> int:
        return self.true + self.false + self.unknown + self.undecided_skipped

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "true": self.true,
            "false": self.false,
            "unknown": self.unknown,
            "undecided_skipped": self.undecided_skipped,
            "mixed": self.mixed,
            "counterexamples": self.counterexamples,
        }


def _sample_world(rng: random.Random, chk: Checker, max_round: int) -> tuple[int, int]:
    n = rng.randint(0, max_round)
    return n, rng.choice(chk.worlds(n))


def axiom_suite(
    t: FreeAlgebraTrunc,
    samples: int,
    seed: int = 0,
    axioms: Sequence[str] = AXIOMS,
    depth: int = 2,
    checker: Checker | None = None,
) -> dict[str, AxiomTally]:
    """Evaluate ``samples`` random instances of every axiom at random worlds.

    A ``FALSE`` verdict is a soundness violation and is recorded with the
    formula and world.  ``E`` instances count only when both sides are
    decided; the others are tallied as skipped.
    """
    chk = checker or Checker(t)
    agents = list(chk.agents.names)
    atoms = sorted(chk.atoms) or ["p"]
    if not chk.atoms:
        chk.atoms = frozenset(atoms)
    rng = random.Random(seed)
    report = {}
    for name in axioms:
        tally = AxiomTally()
        for _ in range(samples):
            phi = instantiate(name, rng, agents, atoms, depth)
            top = t.horizon - 1 if name in _NEEDS_NEXT else t.horizon
            if top < 0:
                tally.undecided_skipped += 1
                continue
            n, w = _sample_world(rng, chk, top)
            if A.is_mixed(phi):
                tally.mixed += 1
            if name == "E":
                lhs = chk.eval(phi.left, n, w)
                rhs = chk.eval(phi.right, n, w)
                if not (lhs.decided and rhs.decided):
                    tally.undecided_skipped += 1
                    continue
            v = chk.eval(phi, n, w)
            if v is Verdict.TRUE:
                tally.true += 1
            elif v is Verdict.UNKNOWN:
                tally.unknown += 1
            else:
                tally.false += 1
                tally.counterexamples.append({"formula": A.to_text(phi), "round": n, "world": w})
        report[name] = tally
    return report


def knowledge_gain_check(
    t: FreeAlgebraTrunc, samples: int, seed: int = 0, depth: int = 3, checker: Checker | None = None
) -> tuple[int, int, list[dict]]:
    """Positive ``phi`` true at a world must stay true at every successor.

    Returns ``(instances, premises_true, violations)``.
    """
    if t.horizon < 1:
        raise ValueError("knowledge gain needs a horizon of at least one round")
    chk = checker or Checker(t)
    agents = list(chk.agents.names)
    atoms = sorted(chk.atoms)
    rng = random.Random(seed)
    held = 0
    bad = []
    for _ in range(samples):
        phi = random_formula(rng, agents, atoms, depth, positive=True)
        n, w = _sample_world(rng, chk, t.horizon - 1)
        if chk.eval(phi, n, w) is not Verdict.TRUE:
            continue
        held += 1
        nxt = chk.eval(A.Next(phi), n, w)
        if nxt is not Verdict.TRUE:
            bad.append({"formula": A.to_text(phi), "round": n, "world": w, "next": nxt.value})
    return samples, held, bad
