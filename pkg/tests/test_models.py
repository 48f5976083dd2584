from fractions import Fraction as F

import pytest

from conftest import dist, random_nfts
from models import (BisimVector, Distribution, FuzzyEdge, Nfts, UnfoldedState,
                    UnknownNameError, depth_sets, is_acyclic_from, max_path_len,
                    pred_neighborhood, succ_neighborhood, sup_over, transitions)


def test_transitions_of_branching_root(branching):
    assert set(transitions(branching, "u", "t1")) == {
        dist(u1=0.2, u2=0.7), dist(u2=0.9, u3=1)}


def test_steady_state_has_no_transitions(branching):
    assert transitions(branching, "u1", "t1") == ()
    assert branching.is_steady("u1")


def test_back_edge_of_cyclic(cyclic):
    assert transitions(cyclic, "u4", "t3") == (dist(u2=0.4),)


def test_transitions_unknown_names(cyclic):
    with pytest.raises(UnknownNameError):
        transitions(cyclic, "nope", "t1")
    with pytest.raises(KeyError):
        transitions(cyclic, "u", "t9")


def test_neighbourhoods(cyclic, branching):
    assert succ_neighborhood(cyclic, {"u"}) == {"u1", "u2"}
    assert succ_neighborhood(cyclic, set()) == set()
    assert succ_neighborhood(cyclic, {"u4"}) == {"u2"}
    assert pred_neighborhood(cyclic, {"u2"}) == {"u", "u4"}
    assert pred_neighborhood(cyclic, set()) == set()
    assert pred_neighborhood(branching, {"v4"}) == {"v1"}


def test_sup_over():
    p1 = dist(u1=0.2, u2=0.7)
    assert sup_over(p1, {"u1", "u2"}) == F("0.7")
    assert sup_over(p1, set()) == 0
    assert sup_over(p1, {"u3"}) == 0


def test_depth_sets(cyclic, branching):
    assert depth_sets(cyclic, "u", 3) == [{"u"}, {"u1", "u2"}, {"u3", "u4"}, {"u2"}]
    assert depth_sets(branching, "v", 2) == [{"v"}, {"v1", "v2", "v3"}, {"v4"}]
    assert depth_sets(cyclic, "u3", 2) == [{"u3"}, set(), set()]


def test_max_path_len(branching, cyclic):
    assert max_path_len(branching, "u") == 1
    assert max_path_len(branching, "v") == 2
    assert max_path_len(branching, "u3") == 0
    assert max_path_len(cyclic, "u") is None
    assert max_path_len(cyclic, "v") == 3
    assert not is_acyclic_from(cyclic, "u2")
    assert is_acyclic_from(cyclic, "v")


def test_self_loop_is_unbounded():
    m = Nfts(["s"], ["a"], {("s", "a"): [dist(s=0.5)]})
    assert max_path_len(m, "s") is None


def test_edges(cyclic):
    edges = set(cyclic.edges())
    assert len(edges) == 10
    assert FuzzyEdge("u4", "t3", F("0.4"), "u2") in edges


@pytest.mark.parametrize("seed", range(30))
def test_neighbourhood_duality_and_supports(seed):
    m = random_nfts(seed)
    for u in m.states:
        for v in m.states:
            assert (v in m.succ_neighborhood({u})) == (u in m.pred_neighborhood({v}))
        for _, p in m.moves(u):
            assert p.support <= m.succ_neighborhood({u})


def test_distribution_drops_zero_and_rejects_range():
    p = Distribution.from_mapping({"a": F(0), "b": F(1, 2)})
    assert p.support == {"b"}
    assert p("a") == 0
    with pytest.raises(ValueError):
        Distribution((("a", F(3, 2)),))
    with pytest.raises(ValueError):
        Distribution((("a", F(0)),))
    with pytest.raises(ValueError):
        Distribution((("a", F(1, 2)), ("a", F(1, 4))))


def test_distribution_equality_ignores_entry_order():
    assert Distribution((("b", F(1)), ("a", F(1, 2)))) == dist(a=0.5, b=1)


def test_nfts_rejects_undeclared_names():
    with pytest.raises(UnknownNameError):
        Nfts(["s"], ["a"], {("s", "a"): [dist(t=1)]})
    with pytest.raises(UnknownNameError):
        Nfts(["s"], ["a"], {("s", "b"): [dist(s=1)]})
    with pytest.raises(ValueError):
        Nfts([], [], {})


def test_duplicate_distributions_collapse():
    m = Nfts(["s"], ["a"], {("s", "a"): [dist(s=0.5), dist(s=0.5)]})
    assert len(m.transitions("s", "a")) == 1


def test_bisim_vector_slots():
    b = BisimVector.of({("u", "v")}, {("u1", "v1")}, set())
    assert b.k == 2
    assert b.slot(1) == {("u", "v")}
    assert b.with_slot(2, set()).slot(2) == frozenset()
    assert b.size() == 2
    assert b.with_slot(1, set()).is_within(b)
    with pytest.raises(IndexError):
        b.slot(4)


def test_unfolded_state_names():
    s = UnfoldedState("u2", 3)
    assert s.name == "u2@3"
    assert UnfoldedState.parse("u2@3") == s
    assert UnfoldedState.parse("a@0@1") == UnfoldedState("a@0", 1)
    with pytest.raises(ValueError):
        UnfoldedState.parse("u2")
