import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from helpers import check_hull, functor
from protocomplex.cset import CsetError, facets
from protocomplex.decisions import (
    ConcreteProtocol,
    DecisionError,
    VCset,
    averaging_map,
    averaging_protocol,
    concrete_extend,
    constant_protocol,
    eval_value_pred,
    forget_values,
    participating,
    round_counter_protocol,
    spread,
    value_predicate,
)
from protocomplex.inputs import with_agent_values
from protocomplex.iterate import build

HALF = Fr(1, 2)


def two_agent_round(IS2, edge, alpha=HALF, values=(0, 1)):
    x = with_agent_values(edge, {"a": Fr(values[0]), "b": Fr(values[1])})
    return x, concrete_extend(averaging_protocol(IS2, alpha), x)


def facet_profiles(vx):
    c = vx.cset
    return {(vx.values[s]["a"], vx.values[s]["b"]): s for s in facets(c)}


def test_averaging_profiles(IS2, edge):
    _, (vx, pc) = two_agent_round(IS2, edge)
    assert set(facet_profiles(vx)) == {(Fr(0), HALF), (HALF, Fr(1)), (HALF, HALF)}
    assert all(type(v) is Fr for vals in vx.values for v in vals.values())
    assert vx.violations() == []


def test_averaging_map_cases():
    f = averaging_map(HALF)
    assert f("a", frozenset("a"), {"a": Fr(3)}) == 3
    assert f("a", frozenset("ab"), {"a": Fr(0), "b": Fr(1)}) == HALF


def test_equal_inputs_stay_put(IS3, tri):
    x = with_agent_values(tri, {a: Fr(2, 3) for a in "abc"})
    vx, _ = concrete_extend(averaging_protocol(IS3, Fr(1, 3)), x)
    assert {v for vals in vx.values for v in vals.values()} == {Fr(2, 3)}


def test_constant_protocol(IS3, tri):
    x = with_agent_values(tri, {"a": Fr(0), "b": Fr(1), "c": Fr(5)})
    vx, _ = concrete_extend(constant_protocol(IS3, Fr(7)), x)
    assert {v for vals in vx.values for v in vals.values()} == {Fr(7)}


def test_forgetting_commutes_with_extension(IS3, SYNC3, tri):
    x = with_agent_values(tri, {"a": Fr(0), "b": Fr(1), "c": Fr(1, 2)})
    for f in (IS3, SYNC3):
        vx, pc = concrete_extend(averaging_protocol(f, Fr(1, 3)), x)
        plain = f.extend(forget_values(x)).complex
        assert forget_values(vx).payloads == plain.payloads
        assert forget_values(vx).colors == plain.colors
        assert len(facets(forget_values(vx))) == len(facets(plain))


def test_undefined_values_round_trip(tri):
    x = VCset.from_vertex_values(tri, {})
    assert all(v is None for vals in x.values for v in vals.values())
    assert x.violations() == []
    with pytest.raises(CsetError):
        VCset(tri, [{}] * len(tri))


def test_spread_predicates(IS2, edge):
    _, (vx, _) = two_agent_round(IS2, edge)
    prof = facet_profiles(vx)
    sync = prof[(HALF, HALF)]
    one_sided = [prof[(Fr(0), HALF)], prof[(HALF, Fr(1))]]
    agree = value_predicate("agree")
    assert eval_value_pred(vx, sync, agree, "ab")
    assert not any(eval_value_pred(vx, s, agree, "ab") for s in one_sided)
    # one-sided facets have spread exactly 1/2, so the strict split is below it
    quarter = value_predicate("spread_le", "1/4")
    assert eval_value_pred(vx, sync, quarter, "ab")
    assert not any(eval_value_pred(vx, s, quarter, "ab") for s in one_sided)
    assert all(eval_value_pred(vx, s, value_predicate("spread_le", "1/2"), "ab") for s in prof.values())
    assert all(eval_value_pred(vx, s, value_predicate("true"), "ab") for s in prof.values())
    assert spread(vx, sync) == 0 and participating(vx, sync) == ("a", "b")


def test_value_predicate_errors(IS2, edge):
    x, (vx, _) = two_agent_round(IS2, edge)
    va = next(s for s in range(len(vx.cset)) if vx.cset.colors[s] == 1)
    with pytest.raises(CsetError):
        eval_value_pred(vx, va, value_predicate("agree"), "ab")
    with pytest.raises(CsetError):
        value_predicate("nope")


def test_spread_shrinks_when_both_hear(IS2, edge):
    x = with_agent_values(edge, {"a": Fr(0), "b": Fr(1)})
    t = build(None, x, 2, protocol=averaging_protocol(IS2, Fr(1, 3)))
    for n in (1, 2):
        vx = t.values[n]
        prev = t.values[n - 1]
        for s in facets(vx.cset):
            pc = t.complexes[n - 1]
            src = pc.representative[s][0]
            views = dict(pc.assignment(s))
            if all(v == vx.cset.colors[s] for v in views.values()) and spread(prev, src) > 0:
                assert spread(vx, s) < spread(prev, src)


def test_averaging_weight_checked(IS2):
    with pytest.raises(CsetError):
        averaging_protocol(IS2, 1)
    with pytest.raises(CsetError):
        averaging_protocol(IS2, 0)


def test_missing_decision_map(IS2, edge):
    x = with_agent_values(edge, {"a": Fr(0), "b": Fr(1)})
    cp = ConcreteProtocol(IS2, {"a": lambda a, v, p: p[a]})
    with pytest.raises(DecisionError):
        concrete_extend(cp, x)
    bad = ConcreteProtocol(IS2, {"*": lambda a, v, p: p["z"]})
    with pytest.raises(DecisionError):
        concrete_extend(bad, x)


def test_round_counter(abc, tri):
    sched = [functor("reliable_broadcast", abc), functor("immediate_snapshot", abc)]
    cp = round_counter_protocol(sched)
    x = with_agent_values(tri, {a: Fr(0) for a in "abc"})
    t = build(None, x, 2, protocol=cp)
    # reliable broadcast first (7 facets), then immediate snapshot over each: 13 + 3*3 + 3
    assert [len(facets(c)) for c in t.rounds] == [1, 7, 25]
    assert {v for vals in t.values[2].values for v in vals.values()} == {Fr(2)}
    with pytest.raises(CsetError):
        round_counter_protocol([])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_convex_hull(seed):
    assert check_hull(random.Random(seed), 5) == 0
