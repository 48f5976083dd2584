import random
from fractions import Fraction as F

import pytest

from conftest import ALGEBRAS, LUK, dist, random_case
from fixedpoint import alpha_bisimilarity_degree, greatest_alpha_bisimulation, limited_bisimilarity
from limited import bis, candidate_degrees
from models import Nfts, UnfoldedState
from subsystem import induced, merge, unfold, unfolding_sidecar


def test_unfolding_of_cyclic_root(cyclic):
    unf = unfold(cyclic, "u", 3)
    expected = Nfts(["u@0", "u1@1", "u2@1", "u3@2", "u4@2", "u2@3"], ["t1", "t2", "t3"], {
        ("u@0", "t1"): [dist(**{"u1@1": 0.2, "u2@1": 0.7})],
        ("u1@1", "t2"): [dist(**{"u3@2": 0.3})],
        ("u2@1", "t2"): [dist(**{"u4@2": 0.4})],
        ("u4@2", "t3"): [dist(**{"u2@3": 0.4})],
    })
    assert unf.tree == expected
    assert unf.root == UnfoldedState("u", 0)
    assert unf.tree.is_steady("u2@3")
    assert unf.base_of("u2@3") == "u2"
    assert unf.depth_of("u4@2") == 2
    assert unf.states_at(1) == ["u1@1", "u2@1"]
    assert unf.tree.max_path_len("u@0") == 3


def test_unfolding_sidecar_order(cyclic):
    sidecar = unfolding_sidecar(unfold(cyclic, "u", 3))
    assert sidecar["root"] == "u@0"
    assert list(sidecar["states"]) == ["u@0", "u1@1", "u2@1", "u3@2", "u4@2", "u2@3"]
    assert sidecar["states"]["u2@3"] == {"base": "u2", "depth": 3}


def test_zero_depth_unfolding_is_a_single_steady_state(cyclic):
    unf = unfold(cyclic, "u", 0)
    assert unf.tree.states == ("u@0",)
    assert unf.tree.is_steady("u@0")


def _unfolded_pair(m, u, v, k):
    return merge(unfold(m, u, k).tree, unfold(m, v, k).tree), f"{u}@0", f"{v}@0"


@pytest.mark.parametrize("alg", ALGEBRAS)
@pytest.mark.parametrize("seed", range(200))
def test_unfolding_preserves_limited_bisimilarity(seed, alg):
    m, u, v, k = random_case(seed)
    tree, ru, rv = _unfolded_pair(m, u, v, k)
    assert bis(tree, ru, rv, k, alg) == bis(m, u, v, k, alg)
    left, right = unfold(m, u, k).tree, unfold(m, v, k).tree
    for alpha in sorted(candidate_degrees(m, alg)):
        assert ((ru, rv) in greatest_alpha_bisimulation(left, right, alpha, alg)) == \
            ((u, v) in limited_bisimilarity(m, k, alpha, alg))


def test_merge_rejects_conflicting_cells():
    a = Nfts(["s"], ["a"], {("s", "a"): [dist(s=0.5)]})
    b = Nfts(["s"], ["a"], {("s", "a"): [dist(s=1)]})
    with pytest.raises(ValueError):
        merge(a, b)
    assert merge(a, a) == a


def test_induced_neighbourhood_of_cyclic(cyclic):
    sub = induced(cyclic, "u", 3)
    assert sub.states == ("u", "u1", "u2", "u3", "u4")
    assert sum(len(d) for d in sub.delta.values()) == 4
    low = induced(cyclic, "v", 2)
    assert low.states == ("v", "v1", "v2", "v3", "v4")
    assert low.is_steady("v4")


def test_induced_of_acyclic_root_keeps_reachable_part(branching):
    sub = induced(branching, "u", 1)
    assert sub.states == ("u", "u1", "u2", "u3")
    assert set(sub.transitions("u", "t1")) == set(branching.transitions("u", "t1"))


def test_induced_neighbourhoods_can_lose_the_root_pair(cyclic):
    # the u side keeps the u4 -> u2 back edge, the v side ends in a steady v5
    assert ("u", "v") in limited_bisimilarity(cyclic, 3, F(4, 5), LUK)
    rel = greatest_alpha_bisimulation(induced(cyclic, "u", 3), induced(cyclic, "v", 3), F(4, 5), LUK)
    assert ("u", "v") not in rel


@pytest.mark.parametrize("seed", range(60))
def test_induced_bisimilarity_implies_limited_bisimilarity(seed):
    m, u, v, k = random_case(seed)
    alg = ALGEBRAS[seed % 3]
    left, right = induced(m, u, k), induced(m, v, k)
    for alpha in sorted(candidate_degrees(m, alg)):
        if (u, v) in greatest_alpha_bisimulation(left, right, alpha, alg):
            assert (u, v) in limited_bisimilarity(m, k, alpha, alg)


def test_acyclic_degree_reaches_full_degree(branching):
    assert branching.max_path_len("u") == 1
    assert branching.max_path_len("v") == 2
    assert bis(branching, "u", "v", 2, LUK) == \
        alpha_bisimilarity_degree(branching, "u", branching, "v", LUK)


@pytest.mark.parametrize("seed", range(120))
def test_acyclic_roots_need_only_their_path_length(seed):
    m, u, v, _ = random_case(seed)
    lu, lv = m.max_path_len(u), m.max_path_len(v)
    if lu is None or lv is None:
        return
    alg = ALGEBRAS[seed % 3]
    k = max(lu, lv) + random.Random(seed).randint(0, 1)
    assert bis(m, u, v, k, alg) == alpha_bisimilarity_degree(m, u, m, v, alg)


def test_one_step_unfolding_of_branching(branching):
    unf = unfold(branching, "v", 1)
    assert unf.states_at(1) == ["v1@1", "v2@1", "v3@1"]
    assert set(unf.tree.transitions("v@0", "t1")) == {
        dist(**{"v1@1": 0.2, "v2@1": 0.7}), dist(**{"v2@1": 0.9, "v3@1": 1})}
    assert all(unf.tree.is_steady(s) for s in unf.states_at(1))
