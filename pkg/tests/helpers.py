"""Random inputs, oracles and CLI runs shared by the unit tests and the acceptance suite."""

import os
import random
import subprocess
import sys
from fractions import Fraction

from protocomplex.adversary import (
    immediate_snapshot_model,
    reliable_broadcast_model,
    synchronous_broadcast_model,
)
from protocomplex.cset import AgentSet, Cset, CsetMorphism, colimit, standard_simplex, sub_cset
from protocomplex.decisions import averaging_protocol, concrete_extend
from protocomplex.inputs import with_agent_values
from protocomplex.protocol import ProtocolFunctor

MODEL_BUILDERS = {
    "immediate_snapshot": immediate_snapshot_model,
    "reliable_broadcast": reliable_broadcast_model,
    "sync_broadcast": lambda a: synchronous_broadcast_model(a),
    "sync_broadcast_detectable": lambda a: synchronous_broadcast_model(a, detectable=True),
}

_FUNCTORS: dict = {}


def functor(name: str, agents: AgentSet) -> ProtocolFunctor:
    key = (name, agents.names)
    if key not in _FUNCTORS:
        _FUNCTORS[key] = ProtocolFunctor(MODEL_BUILDERS[name](agents), name)
    return _FUNCTORS[key]


def random_subcomplex(rng: random.Random, agents: AgentSet) -> Cset:
    full = standard_simplex(agents, agents.full)
    worlds = full.worlds()
    gens = rng.sample(worlds, rng.randint(1, min(3, len(worlds))))
    return sub_cset(full, gens)[0]


def random_input(rng: random.Random, agents: AgentSet) -> Cset:
    """1-3 random subcomplexes of the full simplex, possibly glued at one simplex."""
    pieces = [random_subcomplex(rng, agents) for _ in range(rng.randint(1, 3))]
    arrows = []
    if len(pieces) >= 2 and rng.random() < 0.5:
        p, q = pieces[0], pieces[1]
        common_colors = {p.colors[s] for s in p.worlds()} & {q.colors[s] for s in q.worlds()}
        if common_colors:
            color = rng.choice(sorted(common_colors))
            common, inc_p = sub_cset(p, p.level(color))
            _, inc_q = sub_cset(q, q.level(color))
            pieces.append(common)
            k = len(pieces) - 1
            arrows = [(k, 0, inc_p), (k, 1, CsetMorphism(common, q, inc_q.mapping))]
    out, _ = colimit(pieces, arrows)
    return out


def brute_force_solvable(proj, task) -> bool:
    """Try every vertex map into the spec; accept if each simplex has a matching image.

    Only valid when simplices of the spec are determined by their vertices
    and input simplex, which holds for tasks over value complexes.
    """
    from itertools import product as iproduct

    src, spec = proj.source, task.spec
    verts = [s for s in src.worlds() if src.dim(s) == 0]
    options = [
        [t for t in spec.level(src.colors[v]) if task.proj_I(t) == proj(v)] for v in verts
    ]
    by_key = {}
    for t in spec.worlds():
        key = (task.proj_I(t), frozenset(spec.vertices(t).values()))
        by_key[key] = t
    simplices = [s for s in src.worlds() if src.dim(s) > 0]
    for choice in iproduct(*options):
        image = dict(zip(verts, choice))
        if all(
            (proj(s), frozenset(image[v] for v in src.vertices(s).values())) in by_key
            for s in simplices
        ):
            return True
    return False


def check_hull(rng, samples):
    """Random averaging rounds; every output lies between its heard inputs."""
    bad = 0
    for _ in range(samples):
        n = rng.randint(2, 3)
        agents = AgentSet("abc"[:n])
        alpha = Fraction(rng.randint(1, 6), 6 * (n - 1))
        if alpha >= 1:
            alpha = Fraction(1, 2)
        model = rng.choice(["immediate_snapshot", "sync_broadcast", "reliable_broadcast"])
        x = random_input(rng, agents)
        vals = {a: Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for a in agents.names}
        vx = with_agent_values(x, vals)
        out, pc = concrete_extend(averaging_protocol(functor(model, agents), alpha), vx)
        for v in out.cset.worlds():
            if out.cset.dim(v) != 0:
                continue
            src = pc.representative[v][0]
            ((_, view),) = pc.assignment(v)
            heard = [vx.values[src][b] for b in agents.members(view)]
            (val,) = out.values[v].values()
            if not min(heard) <= val <= max(heard):
                bad += 1
    return bad


# one representative invocation per subcommand, shared with the acceptance suite
CLI_RUNS = {
    "build": ["build", "--input", "glued2:a,b,c@b,c", "--adversary", "sync_broadcast"],
    "build-dot": ["build", "--input", "simplex:a,b,c", "--format", "dot"],
    "iterate": ["iterate", "--input", "simplex:a,b", "--rounds", "2"],
    "check": ["check", "--input", "binary:a,b", "--formula", "K[a] in0@a | K[a] in1@a", "--horizon", "1", "--round", "1"],
    "check-axioms": ["check", "--input", "binary:a,b", "--axioms", "5", "--horizon", "2", "--seed", "3"],
    "solve": ["solve", "--task", "binary_consensus:2", "--rounds", "1"],
    "solve-trivial": ["solve", "--task", "trivial:simplex:a,b", "--rounds", "1", "--emit-task"],
    "betti": ["betti", "--input", "simplex:a,b,c", "--rounds", "1"],
    "stats": ["stats", "--input", "simplex:a,b,c", "--rounds", "2", "--adversary", "sync_broadcast"],
    "averaging": ["iterate", "--input", "simplex:a,b", "--protocol", "averaging", "--values", "a=0,b=1", "--rounds", "1"],
}


def run_process(argv, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    proc = subprocess.run(
        [sys.executable, "-m", "protocomplex.cli", *argv], capture_output=True, env=env, check=False
    )
    return proc.returncode, proc.stdout
