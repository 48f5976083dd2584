"""Greatest-fixed-point computations of (k-limited) α-bisimilarity."""
from functools import lru_cache
from typing import FrozenSet, Iterable, Iterator

from algebra import ZERO, Algebra, Degree, format_degree
from data_store import dbg
from lifting import codomain, domain, lifted_member, product, threshold_candidates
from models import Nfts, Pair, Relation


def transitions_match(left: Nfts, x: str, right: Nfts, y: str, rel: Relation,
                      alpha: Degree, alg: Algebra) -> bool:
    """Mutual transfer condition for the pair (x, y) under *rel* at *alpha*.

    Every x-step must be answered by a y-step with the same label whose
    distribution lifts through *rel*, and the other way round.
    """
    for a in set(left.enabled_labels(x)) | set(right.enabled_labels(y)):
        ps, qs = left.steps(x, a), right.steps(y, a)
        if not ps or not qs:
            return False
        for p in ps:
            if not any(lifted_member(p, q, rel, alpha, alg) for q in qs):
                return False
        for q in qs:
            if not any(lifted_member(p, q, rel, alpha, alg) for p in ps):
                return False
    return True


# ── k-limited α-bisimilarity ─────────────────────────────────────────────────

def limited_bisimilarity(m: Nfts, k: int, alpha: Degree, alg: Algebra) -> Relation:
    """≈_k^α over V × V, computed round by round from V × V."""
    if k < 0:
        raise ValueError("k must be non-negative")
    rel = product(m.states, m.states)
    for round_no in range(1, k + 1):
        # each round refines the previous one, so only surviving pairs are re-checked
        nxt = frozenset(pair for pair in rel
                        if transitions_match(m, pair[0], m, pair[1], rel, alpha, alg))
        dbg(f"limited_bisimilarity round {round_no}: {len(rel)} -> {len(nxt)} pairs")
        if nxt == rel:
            break
        rel = nxt
    return rel


def is_k_limited_bisimulation(m: Nfts, rel: Iterable[Pair], k: int,
                              alpha: Degree, alg: Algebra) -> bool:
    return frozenset(rel) <= limited_bisimilarity(m, k, alpha, alg)


# ── The F_k^α functional ─────────────────────────────────────────────────────

def apply_F(m: Nfts, rel: Iterable[Pair], k: int, alpha: Degree, alg: Algebra) -> Relation:
    """F_k^α(R).

    ``F_0(R) = R``; ``F_{i+1}(R)`` keeps the pairs of V × V whose steps match
    under ``F_i(succ(dom R) × succ(cod R))``.  Past the first level the
    argument is always a full product, so those levels are cached by
    ``(X, Y, i)``.
    """
    rel = frozenset(rel)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return rel

    @lru_cache(maxsize=None)
    def on_product(xs: FrozenSet[str], ys: FrozenSet[str], i: int) -> Relation:
        if i == 0:
            return product(xs, ys)
        inner = on_product(m.succ_neighborhood(xs), m.succ_neighborhood(ys), i - 1)
        return frozenset((x, y) for x in m.states for y in m.states
                         if transitions_match(m, x, m, y, inner, alpha, alg))

    return on_product(domain(rel), codomain(rel), k)


def is_post_fixed(m: Nfts, rel: Iterable[Pair], k: int, alpha: Degree, alg: Algebra) -> bool:
    rel = frozenset(rel)
    return rel <= apply_F(m, rel, k, alpha, alg)


# ── Unlimited α-bisimulation ─────────────────────────────────────────────────

def refinement_rounds(m1: Nfts, m2: Nfts, alpha: Degree, alg: Algebra) -> Iterator[Relation]:
    """Yield V1 × V2 and then every strictly smaller relation of the removal
    rounds; the last one yielded is stable."""
    rel = product(m1.states, m2.states)
    while True:
        yield rel
        nxt = frozenset(pair for pair in rel
                        if transitions_match(m1, pair[0], m2, pair[1], rel, alpha, alg))
        if nxt == rel:
            return
        rel = nxt


def greatest_alpha_bisimulation(m1: Nfts, m2: Nfts, alpha: Degree, alg: Algebra) -> Relation:
    """The largest α-bisimulation between *m1* (left) and *m2* (right).

    Pairs are typed by position, so the two systems may share state names.
    """
    rounds = 0
    for rel in refinement_rounds(m1, m2, alpha, alg):
        rounds += 1
    dbg(f"greatest_alpha_bisimulation stable after {rounds - 1} removal rounds, {len(rel)} pairs")
    return rel


def _same_label_pairs(m1: Nfts, m2: Nfts):
    for a in set(m1.labels) & set(m2.labels):
        left = {p for u in m1.states for p in m1.steps(u, a)}
        right = {q for v in m2.states for q in m2.steps(v, a)}
        for p in left:
            for q in right:
                yield p, q


def largest_holding(candidates: Iterable[Degree], holds) -> Degree:
    """Binary search for the largest candidate where the antitone test *holds*.

    Returns 0 when the test fails everywhere.
    """
    ordered = sorted(set(candidates))
    lo, hi = 0, len(ordered)          # ordered[:lo] hold, ordered[hi:] fail
    while lo < hi:
        mid = (lo + hi) // 2
        if holds(ordered[mid]):
            lo = mid + 1
        else:
            hi = mid
    return ordered[lo - 1] if lo else ZERO


def alpha_bisimilarity_degree(m1: Nfts, u: str, m2: Nfts, v: str, alg: Algebra) -> Degree:
    """The greatest α with ``u ∼^α v`` (u in *m1*, v in *m2*)."""
    m1.require_state(u)
    m2.require_state(v)
    candidates = threshold_candidates(_same_label_pairs(m1, m2), alg)
    dbg(f"alpha_bisimilarity_degree({u}, {v}): {len(candidates)} candidates")
    degree = largest_holding(
        candidates, lambda a: (u, v) in greatest_alpha_bisimulation(m1, m2, a, alg))
    dbg(f"alpha_bisimilarity_degree({u}, {v}) = {format_degree(degree)}")
    return degree
