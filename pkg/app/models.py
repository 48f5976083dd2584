"""Data models for the fuzzy transition system checker."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

import networkx as nx

from algebra import ZERO, Degree, format_degree

Pair = Tuple[str, str]
Relation = FrozenSet[Pair]

DEPTH_SEPARATOR = "@"


class UnknownNameError(KeyError):
    """A state or label that the system does not declare."""

    def __str__(self) -> str:
        return self.args[0] if self.args else "unknown name"


@dataclass(frozen=True)
class Distribution:
    """A possibility distribution: a fuzzy subset of the states.

    Only strictly positive degrees are stored, so the key set is the support.
    """
    entries: Tuple[Tuple[str, Degree], ...]
    _lookup: Dict[str, Degree] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        seen = {}
        for state, degree in self.entries:
            if state in seen:
                raise ValueError(f"State '{state}' appears twice in one distribution")
            if not (ZERO < degree <= 1):
                raise ValueError(f"Degree {degree} for '{state}' must lie in (0, 1]")
            seen[state] = Fraction(degree)
        object.__setattr__(self, "entries", tuple(sorted(seen.items())))
        object.__setattr__(self, "_lookup", seen)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Degree]) -> "Distribution":
        """Build a distribution, silently dropping zero entries."""
        return cls(tuple((s, Fraction(d)) for s, d in mapping.items() if d > 0))

    def __call__(self, state: str) -> Degree:
        return self._lookup.get(state, ZERO)

    def __contains__(self, state: str) -> bool:
        return state in self._lookup

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def support(self) -> FrozenSet[str]:
        return frozenset(self._lookup)

    def items(self) -> Tuple[Tuple[str, Degree], ...]:
        return self.entries

    def to_dict(self) -> Dict[str, str]:
        return {s: format_degree(d) for s, d in self.entries}

    def __str__(self) -> str:
        return " + ".join(f"{format_degree(d)}/{s}" for s, d in self.entries) or "∅"


@dataclass(frozen=True)
class FuzzyEdge:
    src: str
    label: str
    degree: Degree
    dst: str


class Nfts:
    """A finite nondeterministic fuzzy transition system (V, Σ, δ).

    Immutable after construction; every query is read-only.
    """

    def __init__(self, states: Iterable[str], labels: Iterable[str],
                 delta: Mapping[Tuple[str, str], Iterable[Distribution]]):
        self._states: Tuple[str, ...] = tuple(dict.fromkeys(states))
        self._labels: Tuple[str, ...] = tuple(dict.fromkeys(labels))
        if not self._states:
            raise ValueError("A transition system needs at least one state")
        state_set = set(self._states)
        label_set = set(self._labels)
        cells: Dict[Tuple[str, str], Tuple[Distribution, ...]] = {}
        for (src, label), dists in delta.items():
            if src not in state_set:
                raise UnknownNameError(f"Undeclared state '{src}'")
            if label not in label_set:
                raise UnknownNameError(f"Undeclared label '{label}'")
            unique = tuple(dict.fromkeys(dists))
            for p in unique:
                for dst in p.support:
                    if dst not in state_set:
                        raise UnknownNameError(f"Undeclared state '{dst}'")
            if unique:
                cells[(src, label)] = unique
        self._delta = cells

        succ: Dict[str, Set[str]] = {s: set() for s in self._states}
        pred: Dict[str, Set[str]] = {s: set() for s in self._states}
        enabled: Dict[str, List[str]] = {s: [] for s in self._states}
        for (src, label), dists in cells.items():
            enabled[src].append(label)
            for p in dists:
                for dst in p.support:
                    succ[src].add(dst)
                    pred[dst].add(src)
        self._succ = {s: frozenset(v) for s, v in succ.items()}
        self._pred = {s: frozenset(v) for s, v in pred.items()}
        self._enabled = {s: tuple(sorted(v)) for s, v in enabled.items()}

    # -- Basic accessors --

    @property
    def states(self) -> Tuple[str, ...]:
        return self._states

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels

    @property
    def delta(self) -> Dict[Tuple[str, str], Tuple[Distribution, ...]]:
        return dict(self._delta)

    def require_state(self, u: str) -> None:
        if u not in self._succ:
            raise UnknownNameError(f"Unknown state '{u}'")

    def require_label(self, a: str) -> None:
        if a not in self._labels:
            raise UnknownNameError(f"Unknown label '{a}'")

    def transitions(self, u: str, a: str) -> Tuple[Distribution, ...]:
        """δ(u, a), possibly empty."""
        self.require_state(u)
        self.require_label(a)
        return self._delta.get((u, a), ())

    def steps(self, u: str, a: str) -> Tuple[Distribution, ...]:
        """δ(u, a) without validation; labels foreign to this system give ()."""
        return self._delta.get((u, a), ())

    def enabled_labels(self, u: str) -> Tuple[str, ...]:
        """Labels for which *u* has at least one transition."""
        return self._enabled[u]

    def moves(self, u: str) -> Iterator[Tuple[str, Distribution]]:
        """All (label, distribution) pairs with u --label--> distribution."""
        for a in self._enabled[u]:
            for p in self._delta[(u, a)]:
                yield a, p

    def is_steady(self, u: str) -> bool:
        return not self._succ[u]

    def distributions(self) -> List[Distribution]:
        """Every distinct distribution appearing anywhere in δ."""
        return list(dict.fromkeys(p for dists in self._delta.values() for p in dists))

    def edges(self) -> Iterator[FuzzyEdge]:
        """The labeled fuzzy directed edges R_δ."""
        seen = set()
        for (src, label), dists in self._delta.items():
            for p in dists:
                for dst, degree in p.items():
                    edge = FuzzyEdge(src, label, degree, dst)
                    if edge not in seen:
                        seen.add(edge)
                        yield edge

    def degrees(self) -> FrozenSet[Degree]:
        """All transition degrees occurring in δ."""
        return frozenset(d for p in self.distributions() for _, d in p.items())

    # -- Neighbourhoods --

    def succ_neighborhood(self, xs: Iterable[str]) -> FrozenSet[str]:
        out: Set[str] = set()
        for u in xs:
            out |= self._succ[u]
        return frozenset(out)

    def pred_neighborhood(self, xs: Iterable[str]) -> FrozenSet[str]:
        out: Set[str] = set()
        for u in xs:
            out |= self._pred[u]
        return frozenset(out)

    def depth_sets(self, u: str, k: int) -> List[FrozenSet[str]]:
        """D_u[0..k]: D_u[0] = {u}, D_u[i+1] = successors of D_u[i]."""
        self.require_state(u)
        if k < 0:
            raise ValueError("k must be non-negative")
        layers = [frozenset([u])]
        for _ in range(k):
            layers.append(self.succ_neighborhood(layers[-1]))
        return layers

    def max_path_len(self, u: str) -> Optional[int]:
        """Length of the longest path from *u*; ``None`` when unbounded."""
        self.require_state(u)
        graph = nx.DiGraph()
        graph.add_node(u)
        graph.add_edges_from((s, d) for s, ds in self._succ.items() for d in ds)
        reachable = graph.subgraph(nx.descendants(graph, u) | {u})
        if not nx.is_directed_acyclic_graph(reachable):
            return None
        lengths: Dict[str, int] = {}
        for node in reversed(list(nx.topological_sort(reachable))):
            lengths[node] = max((lengths[d] + 1 for d in reachable.successors(node)), default=0)
        return lengths[u]

    # -- Comparison --

    def _canonical(self):
        return (frozenset(self._states), frozenset(self._labels),
                frozenset((key, frozenset(v)) for key, v in self._delta.items()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Nfts):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self) -> int:
        return hash(self._canonical())

    def __repr__(self) -> str:
        return (f"Nfts({len(self._states)} states, {len(self._labels)} labels, "
                f"{sum(len(v) for v in self._delta.values())} transitions)")


# ── Module-level query functions ─────────────────────────────────────────────

def transitions(m: Nfts, u: str, a: str) -> Tuple[Distribution, ...]:
    return m.transitions(u, a)


def succ_neighborhood(m: Nfts, xs: Iterable[str]) -> FrozenSet[str]:
    return m.succ_neighborhood(xs)


def pred_neighborhood(m: Nfts, xs: Iterable[str]) -> FrozenSet[str]:
    return m.pred_neighborhood(xs)


def sup_over(p: Distribution, xs: Iterable[str]) -> Degree:
    """⋁ p(v) over v in *xs*; 0 when *xs* misses the support."""
    return max((p(v) for v in xs), default=ZERO)


def depth_sets(m: Nfts, u: str, k: int) -> List[FrozenSet[str]]:
    return m.depth_sets(u, k)


def max_path_len(m: Nfts, u: str) -> Optional[int]:
    return m.max_path_len(u)


def is_acyclic_from(m: Nfts, u: str) -> bool:
    return m.max_path_len(u) is not None


# ── Bisimulation vectors ─────────────────────────────────────────────────────

@dataclass(frozen=True)
class BisimVector:
    """A (k+1)-vector of relations; slot(1) .. slot(k+1)."""
    slots: Tuple[Relation, ...]

    def __post_init__(self):
        if not self.slots:
            raise ValueError("A bisimulation vector has at least one slot")
        object.__setattr__(self, "slots", tuple(frozenset(s) for s in self.slots))

    @classmethod
    def of(cls, *slots: Iterable[Pair]) -> "BisimVector":
        return cls(tuple(frozenset(s) for s in slots))

    @property
    def k(self) -> int:
        return len(self.slots) - 1

    def slot(self, i: int) -> Relation:
        """1-based slot access."""
        if not 1 <= i <= len(self.slots):
            raise IndexError(f"slot {i} outside 1..{len(self.slots)}")
        return self.slots[i - 1]

    def with_slot(self, i: int, pairs: Iterable[Pair]) -> "BisimVector":
        slots = list(self.slots)
        slots[i - 1] = frozenset(pairs)
        return BisimVector(tuple(slots))

    def size(self) -> int:
        return sum(len(s) for s in self.slots)

    def is_within(self, other: "BisimVector") -> bool:
        """Slot-wise containment in *other*."""
        return len(self.slots) == len(other.slots) and all(
            a <= b for a, b in zip(self.slots, other.slots))

    def union(self) -> Relation:
        out: Set[Pair] = set()
        for s in self.slots:
            out |= s
        return frozenset(out)

    def to_dict(self) -> dict:
        return {"k": self.k,
                "slots": [sorted([a, b] for a, b in s) for s in self.slots]}


# ── Unfoldings ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class UnfoldedState:
    base: str
    depth: int

    @property
    def name(self) -> str:
        return f"{self.base}{DEPTH_SEPARATOR}{self.depth}"

    @classmethod
    def parse(cls, name: str) -> "UnfoldedState":
        base, _, depth = name.rpartition(DEPTH_SEPARATOR)
        if not base or not depth.isdigit():
            raise ValueError(f"'{name}' is not a depth-annotated state name")
        return cls(base, int(depth))


@dataclass
class Unfolding:
    tree: Nfts
    root: UnfoldedState
    nodes: Dict[str, UnfoldedState] = field(default_factory=dict)

    def base_of(self, name: str) -> str:
        return self.nodes[name].base

    def depth_of(self, name: str) -> int:
        return self.nodes[name].depth

    def states_at(self, depth: int) -> List[str]:
        return sorted(n for n, s in self.nodes.items() if s.depth == depth)


# ── Engine settings ──────────────────────────────────────────────────────────

@dataclass
class EngineSettings:
    debug_mode: bool = False             # log engine progress to stderr
    oracle_max_candidates: int = 10000   # capacity limit of the brute-force oracle
    closure_depth: int = 2               # rounds of resid/conj closure for formula constants
    max_formulas: int = 2_000_000        # budget of formulas built by a distinguishing search
    formula_depth: int = 2               # default modal depth for `distinguish`
