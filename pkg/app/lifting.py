"""Lifting of crisp state relations to relations between distributions.

A relation is a ``frozenset`` of ``(left, right)`` state pairs.  The left and
right states may come from two different systems; lifting only ever looks
up left states in ``p`` and right states in ``q``, so the two name spaces
never mix.
"""
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Set, Tuple

from algebra import ONE, ZERO, Algebra, Degree, resid
from models import Distribution, Pair, Relation, sup_over

_Index = Tuple[Dict[str, FrozenSet[str]], Dict[str, FrozenSet[str]]]


# ── Relation helpers ─────────────────────────────────────────────────────────

def identity(states: Iterable[str]) -> Relation:
    return frozenset((s, s) for s in states)


def inverse(rel: Iterable[Pair]) -> Relation:
    return frozenset((b, a) for a, b in rel)


def compose(r1: Iterable[Pair], r2: Iterable[Pair]) -> Relation:
    """R1 ∘ R2 = {(a, c) | (a, b) ∈ R1 and (b, c) ∈ R2}."""
    forward, _ = index(frozenset(r2))
    return frozenset((a, c) for a, b in r1 for c in forward.get(b, ()))


def product(xs: Iterable[str], ys: Iterable[str]) -> Relation:
    ys = tuple(ys)
    return frozenset((x, y) for x in xs for y in ys)


def restrict(rel: Iterable[Pair], xs: Iterable[str], ys: Iterable[str]) -> Relation:
    """R ∩ (X × Y)."""
    xs, ys = frozenset(xs), frozenset(ys)
    return frozenset((a, b) for a, b in rel if a in xs and b in ys)


def domain(rel: Iterable[Pair]) -> FrozenSet[str]:
    return frozenset(a for a, _ in rel)


def codomain(rel: Iterable[Pair]) -> FrozenSet[str]:
    return frozenset(b for _, b in rel)


@lru_cache(maxsize=4096)
def index(rel: Relation) -> _Index:
    """Forward (left -> rights) and backward (right -> lefts) adjacency of *rel*."""
    forward: Dict[str, Set[str]] = {}
    backward: Dict[str, Set[str]] = {}
    for a, b in rel:
        forward.setdefault(a, set()).add(b)
        backward.setdefault(b, set()).add(a)
    return ({a: frozenset(v) for a, v in forward.items()},
            {b: frozenset(v) for b, v in backward.items()})


# ── Lifting ──────────────────────────────────────────────────────────────────

def _terms(p: Distribution, q: Distribution, rel: Relation, alg: Algebra):
    forward, backward = index(rel)
    for x, px in p.items():
        yield resid(px, sup_over(q, forward.get(x, ())), alg)
    for y, qy in q.items():
        yield resid(qy, sup_over(p, backward.get(y, ())), alg)


def lift_degree(p: Distribution, q: Distribution, rel: Relation, alg: Algebra) -> Degree:
    """How well *rel* matches *p* against *q*.

    The meet runs over the supports only; every other conjunct is
    ``resid(0, _) = 1``.
    """
    rel = frozenset(rel)
    return min(_terms(p, q, rel, alg), default=ONE)


def lifted_member(p: Distribution, q: Distribution, rel: Relation,
                  alpha: Degree, alg: Algebra) -> bool:
    """True iff ``lift_degree(p, q, rel) >= alpha``; stops at the first failing term."""
    if alpha <= ZERO:
        return True
    rel = frozenset(rel)
    return all(t >= alpha for t in _terms(p, q, rel, alg))


def threshold_candidates(pairs: Iterable[Tuple[Distribution, Distribution]],
                         alg: Algebra) -> FrozenSet[Degree]:
    """Every value ``lift_degree(p, q, R)`` can take for the given pairs, plus 0 and 1.

    ``sup_over`` of a distribution is either 0 or one of its degrees, so each
    lifting term is ``resid(p(x), b)`` with ``b`` in the other side's degrees
    or 0.  The set returned is a superset of the exact lift values, and the
    extra entries never change a maximum taken over thresholds that hold.
    """
    out: Set[Degree] = {ZERO, ONE}
    for p, q in pairs:
        p_vals = {d for _, d in p.items()}
        q_vals = {d for _, d in q.items()}
        for a in p_vals:
            out.add(resid(a, ZERO, alg))
            out.update(resid(a, b, alg) for b in q_vals)
        for a in q_vals:
            out.add(resid(a, ZERO, alg))
            out.update(resid(a, b, alg) for b in p_vals)
    return frozenset(out)
