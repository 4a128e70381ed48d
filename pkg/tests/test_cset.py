import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from protocomplex.cset import (
    AgentSet,
    Cset,
    CsetBuilder,
    CsetError,
    CsetMorphism,
    SimplicialModel,
    colimit,
    coproduct,
    facets,
    find_isomorphism,
    identity,
    label_violations,
    popcount,
    product,
    remove_simplices,
    standard_simplex,
    sub_cset,
    submasks,
    validate,
)


def permuted(x: Cset, seed: int) -> tuple[Cset, list[int]]:
    """Same cset with shuffled identifiers; returns it and old -> new."""
    order = list(range(len(x)))
    random.Random(seed).shuffle(order)
    new = {old: k for k, old in enumerate(order)}
    y = Cset(
        x.agents,
        [x.colors[s] for s in order],
        [x.payloads[s] for s in order],
        [{u: new[f] for u, f in x.faces(s).items()} for s in order],
    )
    return y, [new[s] for s in range(len(x))]


@given(st.integers(min_value=0, max_value=255))
def test_submasks_match_combinations(mask):
    members = [i for i in range(8) if mask >> i & 1]
    expected = {sum(1 << i for i in c) for k in range(len(members) + 1) for c in itertools.combinations(members, k)}
    got = submasks(mask)
    assert set(got) == expected and len(got) == len(expected)
    assert [popcount(m) for m in got] == sorted(popcount(m) for m in got)


def test_agent_set_masks(abc):
    assert abc.mask("a,c") == 0b101
    assert abc.mask(["c", "a"]) == 0b101
    assert abc.key(0b110) == "b,c"
    assert abc.key(0) == ""
    assert abc.fmt(0b011) == "{a,b}"
    with pytest.raises(CsetError):
        abc.mask("d")
    with pytest.raises(CsetError):
        AgentSet(["a", "a"])


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_standard_simplex_is_valid(n):
    agents = AgentSet("abcd"[: max(n, 1)])
    x = standard_simplex(agents, agents.full if n else 0)
    assert len(x) == 2 ** n
    assert validate(x) == []
    assert all(len(x.level(u)) == 1 for u in submasks(agents.full if n else 0))


def test_validate_reports_one_violation_for_corrupted_face(abc):
    b = CsetBuilder(abc)
    e = b.add(0, "", {})
    va = b.add(1, "a", {0: e})
    vb = b.add(2, "b", {0: e})
    e2 = b.add(0, "other", {})
    edge = b.add(3, "ab", {0: e, 1: va, 2: vb})
    assert validate(b.build()) == []
    b.faces[edge][0] = e2  # the edge's empty face disagrees with its vertices'
    assert len(validate(b.build())) == 1


def test_constructor_rejects_face_of_wrong_color(ab):
    with pytest.raises(CsetError):
        Cset(ab, [0, 1], ["", "a"], [{0: 0}, {0: 1, 1: 1}])


def test_facets_and_boundary(tri):
    assert [tri.payloads[s] for s in facets(tri)] == ["{a,b,c}"]
    bd, inc = remove_simplices(tri, facets(tri))
    assert len(bd) == 7
    assert len(facets(bd)) == 3
    assert inc.violations() == [] and inc.is_injective()


def test_sub_cset_is_face_closed(tri, abc):
    top = facets(tri)[0]
    sub, inc = sub_cset(tri, [tri.face(top, abc.mask("a,b"))])
    assert sorted(sub.counts().items()) == [("", 1), ("a", 1), ("a,b", 1), ("b", 1)]
    assert validate(sub) == [] and inc.violations() == []


def naive_colimit_classes(csets, arrows):
    """Equivalence classes of (object, simplex) by graph search."""
    nodes = [(i, s) for i, c in enumerate(csets) for s in range(len(c))]
    adj = {n: set() for n in nodes}
    for i, j, f in arrows:
        for s, t in enumerate(f.mapping):
            adj[(i, s)].add((j, t))
            adj[(j, t)].add((i, s))
    seen, classes = set(), []
    for n in nodes:
        if n in seen:
            continue
        comp, stack = set(), [n]
        while stack:
            m = stack.pop()
            if m in comp:
                continue
            comp.add(m)
            stack.extend(adj[m] - comp)
        seen |= comp
        classes.append(frozenset(comp))
    return classes


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=7), st.integers(min_value=1, max_value=7))
def test_colimit_matches_naive_quotient(shared_a, shared_b):
    agents = AgentSet("abc")
    x = standard_simplex(agents, agents.full)
    y = standard_simplex(agents, agents.full)
    top = facets(x)[0]
    shared = shared_a & shared_b or shared_a
    common, inc_x = sub_cset(x, [x.face(top, shared)])
    inc_y = CsetMorphism(common, y, sub_cset(y, [y.face(facets(y)[0], shared)])[1].mapping)
    arrows = [(2, 0, inc_x), (2, 1, inc_y)]
    out, inj = colimit([x, y, common], arrows)
    classes = naive_colimit_classes([x, y, common], arrows)
    assert len(out) == len(classes)
    for cls in classes:
        assert len({inj[i](s) for i, s in cls}) == 1
    assert validate(out) == []
    assert all(f.violations() == [] for f in inj)


def test_colimit_along_isomorphism_and_bad_diagram(ab):
    x = standard_simplex(ab, "a,b")
    y = standard_simplex(ab, "a,b")
    out, _ = colimit([x, y], [(0, 1, CsetMorphism(x, y, tuple(range(len(x)))))])
    assert len(out) == len(x)
    # color-changing arrows are rejected before any quotient is formed
    with pytest.raises(CsetError):
        colimit([x, y], [(0, 1, CsetMorphism(x, y, (0, 1, 1, 3)))])


def test_coproduct_counts_add(tri, abc):
    out, inj = coproduct([tri, tri])
    assert len(out) == 2 * len(tri)
    assert len(facets(out)) == 2


def test_product_levelwise(tri, abc):
    bd, _ = remove_simplices(tri, facets(tri))
    p, p1, p2 = product(bd, tri)
    for u in submasks(abc.full):
        assert len(p.level(u)) == len(bd.level(u)) * len(tri.level(u))
    assert validate(p) == [] and p1.violations() == [] and p2.violations() == []


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_isomorphism_recovers_permutation(seed):
    agents = AgentSet("abc")
    x = standard_simplex(agents, agents.full)
    bd, _ = remove_simplices(x, facets(x))
    y, perm = permuted(bd, seed)
    iso = find_isomorphism(bd, y, preserve_payload=True)
    assert iso is not None and list(iso.mapping) == perm


def test_isomorphism_detects_difference(tri):
    bd, _ = remove_simplices(tri, facets(tri))
    assert find_isomorphism(tri, bd) is None


def test_morphism_composition_and_violations(tri):
    i = identity(tri)
    assert i.then(i).mapping == i.mapping
    assert i.violations() == []
    broken = CsetMorphism(tri, tri, tuple(reversed(range(len(tri)))))
    assert broken.violations()


def test_simplicial_model_labels(tri):
    top = facets(tri)[0]
    m = SimplicialModel(tri, {tri.vertex(top, "a"): {"p"}, tri.vertex(top, "b"): {"q"}})
    assert m.label(top) == frozenset({("a", "p"), ("b", "q")})
    assert m.locality_violations() == []
    with pytest.raises(CsetError):
        SimplicialModel(tri, {top: {"p"}})
    poorer = SimplicialModel(tri, {})
    assert label_violations(identity(tri), poorer, m)
    assert label_violations(identity(tri), m, poorer) == []
