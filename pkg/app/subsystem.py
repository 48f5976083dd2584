"""Depth-bounded subsystems around a state: the tree unfolding and the induced
k-neighbourhood."""
from typing import Dict, List, Tuple

from data_store import dbg
from models import Distribution, Nfts, UnfoldedState, Unfolding


def unfold(m: Nfts, u: str, k: int) -> Unfolding:
    """Unfold *m* from *u* to depth *k*.

    Every state of ``D_u[i]`` gets a copy ``base@i``.  Copies above depth k
    repeat their base transitions with targets moved to the next depth;
    depth-k copies are steady.
    """
    layers = m.depth_sets(u, k)
    nodes: Dict[str, UnfoldedState] = {}
    delta: Dict[Tuple[str, str], List[Distribution]] = {}
    for depth, layer in enumerate(layers):
        for base in sorted(layer):
            node = UnfoldedState(base, depth)
            nodes[node.name] = node
            if depth == k:
                continue
            for a, p in m.moves(base):
                target = Distribution(tuple(
                    (UnfoldedState(s, depth + 1).name, d) for s, d in p.items()))
                delta.setdefault((node.name, a), []).append(target)
    tree = Nfts(nodes.keys(), m.labels, delta)
    dbg(f"unfold({u}, k={k}): {len(nodes)} states")
    return Unfolding(tree=tree, root=UnfoldedState(u, 0), nodes=nodes)


def unfolding_sidecar(unf: Unfolding) -> dict:
    """JSON-ready map from each unfolded state name to its base state and depth."""
    return {
        "root": unf.root.name,
        "states": {name: {"base": s.base, "depth": s.depth}
                   for name, s in sorted(unf.nodes.items(), key=lambda kv: (kv[1].depth, kv[0]))},
    }


def induced(m: Nfts, u: str, k: int) -> Nfts:
    """The sub-system on ``D_u[0] ∪ … ∪ D_u[k]``.

    Transitions are kept for states that occur at some depth below k, which
    keeps every kept support inside the state set.
    """
    layers = m.depth_sets(u, k)
    states = set().union(*layers)
    sources = set().union(*layers[:k]) if k else set()
    delta = {(s, a): m.steps(s, a) for s in sources for a in m.enabled_labels(s)}
    ordered = [s for s in m.states if s in states]
    dbg(f"induced({u}, k={k}): {len(ordered)} states, {len(sources)} sources")
    return Nfts(ordered, m.labels, delta)


def merge(a: Nfts, b: Nfts) -> Nfts:
    """Union of two systems that agree on every shared (state, label) cell.

    Two unfoldings of the same system and depth always agree: a copy
    ``base@i`` has the same steps whichever root it was reached from.
    """
    delta = a.delta
    for key, dists in b.delta.items():
        if key in delta and set(delta[key]) != set(dists):
            raise ValueError(f"Systems disagree on the steps of {key[0]} --{key[1]}-->")
        delta[key] = dists
    return Nfts(list(a.states) + list(b.states), list(a.labels) + list(b.labels), delta)
