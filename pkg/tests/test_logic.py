import random
from fractions import Fraction as F

import pytest

from algebra import biresid
from conftest import ALGEBRAS, GOEDEL, LUK, PRODUCT, QUARTERS, dist, random_nfts
from formula_parser import parse_formula
from limited import CapacityError, bis
from logic import (TOP, And, ConstImplies, Diamond, DistImpliesConst, EvaluationError,
                   ImpliesConst, Lift, TensorConst, degree_closure, distinguish,
                   enumerate_formulas, eval_dist, eval_state, logical_check, modal_depth, render)
from models import Nfts
from subsystem import merge, unfold

THREE_STEPS = Diamond("t1", Lift(Diamond("t2", Lift(Diamond("t3", Lift(TOP))))))
TWO_STEPS = Diamond("t1", Lift(Diamond("t2", Lift(TOP))))


def _roots(m, u, v, k, phi, alg):
    tree = merge(unfold(m, u, k).tree, unfold(m, v, k).tree)
    return eval_state(tree, phi, f"{u}@0", alg), eval_state(tree, phi, f"{v}@0", alg)


def test_diamond_and_lift(cyclic):
    for alg in ALGEBRAS:
        assert eval_state(cyclic, Diamond("t1", Lift(TOP)), "u", alg) == F(7, 10)
        assert eval_state(cyclic, Diamond("t2", Lift(TOP)), "u", alg) == 0
        assert eval_state(cyclic, TOP, "u3", alg) == 1


def test_constant_wrappers(cyclic):
    phi = Diamond("t1", Lift(TOP))
    assert eval_state(cyclic, ImpliesConst(phi, F(1, 2)), "u", PRODUCT) == F(5, 7)
    assert eval_state(cyclic, ConstImplies(F(1, 2), phi), "u", GOEDEL) == 1
    assert eval_state(cyclic, TensorConst(phi, F(1, 2)), "u", LUK) == F(1, 5)
    assert eval_state(cyclic, And(phi, Diamond("t2", Lift(TOP))), "u1", GOEDEL) == 0


def test_distribution_formula_on_a_given_distribution(cyclic):
    p = dist(u1=0.2, u2=0.7)
    assert eval_dist(cyclic, Lift(TOP), p, GOEDEL) == F(7, 10)
    assert eval_dist(cyclic, DistImpliesConst(Lift(TOP), F(1, 2)), p, LUK) == F(4, 5)


def test_unknown_label_is_reported(cyclic):
    with pytest.raises(EvaluationError) as info:
        eval_state(cyclic, Diamond("zz", Lift(TOP)), "u", GOEDEL)
    assert info.value.label == "zz"
    assert str(info.value) == "Unknown label 'zz' in formula"


def test_witness_values_in_unfoldings(cyclic):
    assert _roots(cyclic, "u", "v", 3, THREE_STEPS, GOEDEL) == (F(2, 5), F(3, 10))
    assert _roots(cyclic, "u", "v", 3, TWO_STEPS, GOEDEL) == (F(2, 5), F(3, 5))
    assert biresid(F(2, 5), F(3, 5), LUK) == F(4, 5)
    assert biresid(F(2, 5), F(3, 5), PRODUCT) == F(2, 3)


def test_render_and_depth():
    phi = ImpliesConst(And(TWO_STEPS, TOP), F(1, 2))
    assert render(phi) == "((<t1> lift(<t2> lift(T)) & T) -> 0.5)"
    assert modal_depth(phi) == 2
    assert modal_depth(THREE_STEPS) == 3
    assert modal_depth(TOP) == 0
    assert parse_formula(render(phi)) == phi


def test_degree_closure(cyclic):
    degrees = [F(n, 10) for n in (2, 3, 4, 6, 7)]
    assert degree_closure(cyclic, GOEDEL, 0) == degrees
    assert degree_closure(cyclic, GOEDEL, 1) == degrees + [F(1)]
    closed = degree_closure(cyclic, LUK, 1)
    assert F(9, 10) in closed and F(0) in closed


def test_enumeration_depth_zero(cyclic):
    assert list(enumerate_formulas(cyclic, 0, [])) == [TOP]


def test_enumeration_depth_one_without_constants(cyclic):
    formulas = list(enumerate_formulas(cyclic, 1, []))
    assert len(formulas) == 7
    assert Diamond("t3", Lift(TOP)) in formulas


def test_enumeration_depth_one_with_one_constant():
    m = Nfts(["s"], ["a"], {})
    formulas = list(enumerate_formulas(m, 1, [F(1, 2)]))
    assert len(formulas) == 301
    assert len(set(formulas)) == 301
    assert all(modal_depth(f) <= 1 for f in formulas)


def test_enumeration_skips_constant_only_wrappers():
    m = Nfts(["s"], ["a"], {})
    formulas = set(enumerate_formulas(m, 1, [F(0), F(1)]))
    phi = Diamond("a", Lift(TOP))
    assert ImpliesConst(phi, F(0)) in formulas
    assert ImpliesConst(phi, F(1)) not in formulas
    assert TensorConst(phi, F(1)) not in formulas
    assert ConstImplies(F(0), phi) not in formulas


def test_enumeration_rejects_negative_depth(cyclic):
    with pytest.raises(ValueError):
        list(enumerate_formulas(cyclic, -1, []))


def test_goedel_witness_below_degree(cyclic):
    phi = distinguish(cyclic, "u", "v", 3, F(2, 5), 3, GOEDEL, consts=[])
    assert phi is not None
    u_val, v_val = _roots(cyclic, "u", "v", 3, phi, GOEDEL)
    assert biresid(u_val, v_val, GOEDEL) < F(2, 5)
    assert distinguish(cyclic, "u", "v", 3, F(3, 10), 3, GOEDEL, consts=[]) is None


def test_goedel_witness_with_closure_constants(cyclic):
    assert distinguish(cyclic, "u", "v", 3, F(3, 10), 3, GOEDEL) is None
    phi = distinguish(cyclic, "u", "v", 3, F(2, 5), 3, GOEDEL)
    assert phi is not None
    assert modal_depth(phi) <= 3
    u_val, v_val = _roots(cyclic, "u", "v", 3, phi, GOEDEL)
    assert biresid(u_val, v_val, GOEDEL) < F(2, 5)


@pytest.mark.parametrize("k, alpha, alg", [(3, F(9, 10), LUK), (2, F(7, 10), PRODUCT)])
def test_witness_above_degree(cyclic, k, alpha, alg):
    assert bis(cyclic, "u", "v", k, alg) < alpha
    phi = distinguish(cyclic, "u", "v", k, alpha, 2, alg, consts=[])
    assert phi is not None
    assert modal_depth(phi) <= 2
    u_val, v_val = _roots(cyclic, "u", "v", k, phi, alg)
    assert biresid(u_val, v_val, alg) < alpha
    assert not logical_check(cyclic, "u", "v", k, alpha, 2, alg, consts=[])


@pytest.mark.parametrize("k, alpha, alg", [(3, F(4, 5), LUK), (2, F(2, 3), PRODUCT)])
def test_no_witness_at_degree(cyclic, k, alpha, alg):
    assert bis(cyclic, "u", "v", k, alg) == alpha
    assert logical_check(cyclic, "u", "v", k, alpha, 2, alg, consts=[])


def test_formula_budget(cyclic):
    with pytest.raises(CapacityError) as info:
        distinguish(cyclic, "u", "v", 3, F(1), 2, GOEDEL, consts=[], max_formulas=3)
    assert info.value.limit == 3


def _ensemble_case(seed, max_labels=2):
    m = random_nfts(seed, max_states=4, max_labels=max_labels, max_dists=1)
    rng = random.Random(seed)
    return m, rng.choice(m.states), rng.choice(m.states), 1 + seed % 2, ALGEBRAS[seed % 3]


@pytest.mark.parametrize("seed", range(30))
def test_related_states_agree_on_every_formula(seed):
    m, u, v, k, alg = _ensemble_case(seed)
    degree = bis(m, u, v, k, alg)
    assert distinguish(m, u, v, k, degree, k, alg, consts=[]) is None


@pytest.mark.parametrize("seed", range(10))
def test_related_states_agree_with_constants(seed):
    m, u, v, k, alg = _ensemble_case(seed, max_labels=1)
    degree = bis(m, u, v, k, alg)
    consts = degree_closure(m, alg, 0)[:2] + [F(1, 2)]
    assert distinguish(m, u, v, k, degree, min(k, 2), alg, consts=consts) is None


@pytest.mark.parametrize("alg", ALGEBRAS)
@pytest.mark.parametrize("c1, c2", [(a, b) for a in QUARTERS for b in QUARTERS if a <= b])
def test_constant_monotonicity(cyclic, alg, c1, c2):
    for s in cyclic.states:
        assert eval_state(cyclic, ImpliesConst(TWO_STEPS, c1), s, alg) <= \
            eval_state(cyclic, ImpliesConst(TWO_STEPS, c2), s, alg)
        assert eval_state(cyclic, ConstImplies(c1, TWO_STEPS), s, alg) >= \
            eval_state(cyclic, ConstImplies(c2, TWO_STEPS), s, alg)
