"""Degree of k-limited similarity via bisimulation vectors.

A vector for the pair (u, v) has slots 1..k+1; slot i holds pairs drawn
from ``D_u[i-1] × D_v[i-1]``.  ``vec`` prunes a vector to the greatest one
valid at a threshold, ``bis`` ascends through thresholds until the root
pair drops out, and ``oracle_degree`` recomputes the same number by brute
force from the definition.
"""
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from algebra import ONE, ZERO, Algebra, Degree, format_degree, meet
from data_store import dbg
from fixedpoint import largest_holding, limited_bisimilarity, transitions_match
from lifting import lift_degree, product, threshold_candidates
from models import BisimVector, Nfts, Pair


class CapacityError(RuntimeError):
    """A brute-force computation would exceed its configured size limit."""

    def __init__(self, size: int, limit: int, what: str = "candidate set"):
        super().__init__(f"{what} has {size} entries, limit is {limit}")
        self.size = size
        self.limit = limit


# ── One-step degree ──────────────────────────────────────────────────────────

def deg1(m: Nfts, pair: Pair, rel: Iterable[Pair], alg: Algebra) -> Degree:
    """Degree to which *pair* is 1-limited similar when successors relate by *rel*."""
    x, y = pair
    rel = frozenset(rel)
    result = ONE
    for a in set(m.enabled_labels(x)) | set(m.enabled_labels(y)):
        ps, qs = m.steps(x, a), m.steps(y, a)
        if not ps or not qs:
            return ZERO
        lifted = {(p, q): lift_degree(p, q, rel, alg) for p in ps for q in qs}
        forth = min(max(lifted[(p, q)] for q in qs) for p in ps)
        back = min(max(lifted[(p, q)] for p in ps) for q in qs)
        result = min(result, forth, back)
        if result == ZERO:
            break
    return result


# ── Vectors ──────────────────────────────────────────────────────────────────

def full_vector(m: Nfts, u: str, v: str, k: int) -> BisimVector:
    """The vector whose slot i is the whole product ``D_u[i-1] × D_v[i-1]``."""
    du, dv = m.depth_sets(u, k), m.depth_sets(v, k)
    return BisimVector(tuple(product(du[i], dv[i]) for i in range(k + 1)))


def q_value(b: BisimVector, m: Nfts, alg: Algebra) -> Degree:
    """The largest α for which *b* is an α-bisimulation vector."""
    return meet(deg1(m, r, b.slot(i + 1), alg)
                for i in range(1, b.k + 1) for r in b.slot(i))


def h_vector(m: Nfts, u: str, v: str, k: int, alpha: Degree, alg: Algebra) -> BisimVector:
    """Backward recursion: slot k+1 is the full depth-k product, slot i keeps
    the pairs of ``D_u[i-1] × D_v[i-1]`` that match slot i+1 at *alpha*."""
    du, dv = m.depth_sets(u, k), m.depth_sets(v, k)
    slots = [product(du[k], dv[k])]
    for i in range(k, 0, -1):
        below = slots[0]
        slots.insert(0, frozenset(
            (x, y) for x in du[i - 1] for y in dv[i - 1]
            if transitions_match(m, x, m, y, below, alpha, alg)))
    return BisimVector(tuple(slots))


def vec(m: Nfts, u: str, v: str, k: int, alpha: Degree, b: BisimVector,
        alg: Algebra) -> BisimVector:
    """Greatest α-bisimulation vector contained in *b*.

    One sweep from slot k down to slot 1 suffices: slot j only depends on
    slot j+1, which is final by the time slot j is visited.
    """
    if b.k != k:
        raise ValueError(f"vector has {b.k + 1} slots, expected {k + 1}")
    slots = list(b.slots)
    for j in range(k, 0, -1):
        below = slots[j]
        kept = frozenset(r for r in slots[j - 1] if deg1(m, r, below, alg) >= alpha)
        if len(kept) != len(slots[j - 1]):
            dbg(f"vec({u}, {v}) slot {j}: dropped {len(slots[j - 1]) - len(kept)} pairs")
        slots[j - 1] = kept
    return BisimVector(tuple(slots))


def _prune_at_or_below(m: Nfts, b: BisimVector, alpha: Degree, alg: Algebra) -> BisimVector:
    slots = list(b.slots)
    for i in range(1, b.k + 1):
        slots[i - 1] = frozenset(r for r in b.slot(i)
                                 if deg1(m, r, b.slot(i + 1), alg) > alpha)
    return BisimVector(tuple(slots))


# ── Degree of k-limited similarity ───────────────────────────────────────────

def bis(m: Nfts, u: str, v: str, k: int, alg: Algebra) -> Degree:
    """The greatest α with ``u ≈_k^α v``.

    Starts from the α = 0 vector and climbs: each round takes ``Q`` of the
    current vector, drops every pair whose one-step degree is at most that
    value, and prunes again.  The last ``Q`` seen before the root pair is
    lost is the answer.
    """
    m.require_state(u)
    m.require_state(v)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return ONE
    root = (u, v)
    current = vec(m, u, v, k, ZERO, full_vector(m, u, v, k), alg)
    guard = k * len(m.states) ** 2 + 1
    for iteration in range(1, guard + 1):
        alpha = q_value(current, m, alg)
        dbg(f"bis({u}, {v}, k={k}) iteration {iteration}: "
            f"alpha={format_degree(alpha)}, {current.size()} pairs")
        nxt = vec(m, u, v, k, alpha, _prune_at_or_below(m, current, alpha, alg), alg)
        if root not in nxt.slot(1):
            return alpha
        current = nxt
    raise RuntimeError(f"bis({u}, {v}, k={k}) did not settle within {guard} iterations")


# ── Brute-force oracle ───────────────────────────────────────────────────────

def _same_label_pairs(m: Nfts):
    for a in m.labels:
        dists = {p for s in m.states for p in m.steps(s, a)}
        for p in dists:
            for q in dists:
                yield p, q


def candidate_degrees(m: Nfts, alg: Algebra) -> FrozenSet[Degree]:
    """Finite set of thresholds at which k-limited similarity can change."""
    return threshold_candidates(_same_label_pairs(m), alg)


def oracle_degree(m: Nfts, u: str, v: str, k: int, alg: Algebra,
                  max_candidates: int = 10000) -> Degree:
    """Degree of k-limited similarity straight from the round-by-round definition."""
    m.require_state(u)
    m.require_state(v)
    candidates = candidate_degrees(m, alg)
    if len(candidates) > max_candidates:
        raise CapacityError(len(candidates), max_candidates)
    dbg(f"oracle_degree({u}, {v}, k={k}): {len(candidates)} candidates")
    return largest_holding(
        candidates, lambda a: (u, v) in limited_bisimilarity(m, k, a, alg))


def degree_matrix(m: Nfts, k: int, alg: Algebra,
                  states: Optional[Iterable[str]] = None) -> Dict[Tuple[str, str], Degree]:
    """``bis`` for every ordered pair of *states* (all states by default)."""
    names = sorted(states) if states is not None else sorted(m.states)
    out: Dict[Tuple[str, str], Degree] = {}
    for i, x in enumerate(names):
        out[(x, x)] = ONE
        for y in names[i + 1:]:
            out[(x, y)] = out[(y, x)] = bis(m, x, y, k, alg)
    return out
