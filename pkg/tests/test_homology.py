import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import functor, random_input
from protocomplex.cset import AgentSet, coproduct, facets, remove_simplices, sub_cset
from protocomplex.homology import (
    betti,
    boundary_squared_zero,
    chain_complex,
    euler_characteristic,
    rank_gf2,
)
from protocomplex.inputs import load_input
from protocomplex.iterate import build


def dense_rank(rows, width):
    """Gaussian elimination over GF(2) on explicit 0/1 lists."""
    m = [[(r >> j) & 1 for j in range(width)] for r in rows]
    rank, col = 0, 0
    while rank < len(m) and col < width:
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                m[i] = [a ^ b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


@given(st.lists(st.integers(0, 2**12 - 1), max_size=12))
def test_rank_matches_dense_elimination(rows):
    assert rank_gf2(rows) == dense_rank(rows, 12)


def test_simplex_and_boundary(tri):
    assert betti(tri) == (1, 0, 0)
    bd, _ = remove_simplices(tri, facets(tri))
    assert betti(bd) == (1, 1)
    assert euler_characteristic(bd) == 0 and euler_characteristic(tri) == 1


def test_disjoint_union_adds(tri):
    bd, _ = remove_simplices(tri, facets(tri))
    two, _ = coproduct([tri, bd])
    assert betti(two) == (2, 1, 0)


def test_glued_triangles_contractible():
    assert betti(load_input("glued2:a,b,c@b,c").cset) == (1, 0, 0)


def test_chain_complex_shape(tri):
    cc = chain_complex(tri)
    assert [len(b) for b in cc.basis] == [3, 3, 1]
    assert cc.top == 2


@pytest.mark.parametrize("name", ["immediate_snapshot", "sync_broadcast", "reliable_broadcast"])
def test_boundary_squared_zero_on_protocol_complexes(name, tri):
    f = functor(name, tri.agents)
    t = build(f, tri, 2 if name == "immediate_snapshot" else 1)
    assert all(boundary_squared_zero(x) for x in t.rounds)


def test_is_preserves_homology_of_every_subcomplex(IS3, tri):
    gens = tri.worlds()
    seen = set()
    for k in range(1, len(gens) + 1):
        rng = random.Random(k)
        for _ in range(30):
            sub, _ = sub_cset(tri, rng.sample(gens, min(k, len(gens))))
            key = tuple(sorted(sub.payloads))
            if key in seen:
                continue
            seen.add(key)
            assert betti(IS3.extend(sub).complex) == betti(sub)
    assert len(seen) > 10


def test_is_preserves_homology_two_rounds(IS3, tri):
    bd, _ = remove_simplices(tri, facets(tri))
    t = build(IS3, bd, 2)
    assert [betti(x) for x in t.rounds] == [(1, 1)] * 3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_is_preserves_homology_on_random_inputs(seed):
    agents = AgentSet("abc")
    x = random_input(random.Random(seed), agents)
    y = functor("immediate_snapshot", agents).extend(x).complex
    assert betti(y) == betti(x)
    assert boundary_squared_zero(y)
