"""Two-sorted fuzzy modal logic over states and distributions.

State formulas::

    T | (f & f) | (f -> c) | (c -> f) | (f * c) | <label> d

Distribution formulas::

    (d & d) | (d -> c) | (c -> d) | lift(f)

``&`` is min, ``->`` the residuum, ``*`` the t-norm, ``<label>`` the join
over the steps with that label and ``lift`` the join of ``min(p(w), f(w))``.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from algebra import (ONE, ZERO, Algebra, Degree, biresid, conj, format_decimal,
                     format_degree, resid)
from data_store import dbg
from limited import CapacityError
from models import Distribution, Nfts, UnfoldedState, UnknownNameError
from subsystem import merge, unfold


class EvaluationError(KeyError):
    """A formula mentions a label the system does not declare."""

    def __init__(self, label: str):
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:
        return f"Unknown label '{self.label}' in formula"


# ── Formula AST ──────────────────────────────────────────────────────────────

class StateFormula:
    __slots__ = ()


class DistFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Top(StateFormula):
    pass


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class ImpliesConst(StateFormula):
    body: StateFormula
    const: Degree


@dataclass(frozen=True)
class ConstImplies(StateFormula):
    const: Degree
    body: StateFormula


@dataclass(frozen=True)
class TensorConst(StateFormula):
    body: StateFormula
    const: Degree


@dataclass(frozen=True)
class Diamond(StateFormula):
    label: str
    body: DistFormula


@dataclass(frozen=True)
class DistAnd(DistFormula):
    left: DistFormula
    right: DistFormula


@dataclass(frozen=True)
class DistImpliesConst(DistFormula):
    body: DistFormula
    const: Degree


@dataclass(frozen=True)
class DistConstImplies(DistFormula):
    const: Degree
    body: DistFormula


@dataclass(frozen=True)
class Lift(DistFormula):
    body: StateFormula


Formula = Union[StateFormula, DistFormula]

TOP = Top()


def render(f: Formula) -> str:
    """ASCII text of *f*, accepted back by ``formula_parser.parse_formula``."""
    if isinstance(f, Top):
        return "T"
    if isinstance(f, (And, DistAnd)):
        return f"({render(f.left)} & {render(f.right)})"
    if isinstance(f, (ImpliesConst, DistImpliesConst)):
        return f"({render(f.body)} -> {format_decimal(f.const)})"
    if isinstance(f, (ConstImplies, DistConstImplies)):
        return f"({format_decimal(f.const)} -> {render(f.body)})"
    if isinstance(f, TensorConst):
        return f"({render(f.body)} * {format_decimal(f.const)})"
    if isinstance(f, Diamond):
        return f"<{f.label}> {render(f.body)}"
    if isinstance(f, Lift):
        return f"lift({render(f.body)})"
    raise TypeError(f"Not a formula: {f!r}")


def modal_depth(f: Formula) -> int:
    if isinstance(f, Top):
        return 0
    if isinstance(f, Diamond):
        return 1 + modal_depth(f.body)
    if isinstance(f, (And, DistAnd)):
        return max(modal_depth(f.left), modal_depth(f.right))
    return modal_depth(f.body)


# ── Evaluation ───────────────────────────────────────────────────────────────

Vector = Tuple[Degree, ...]


class _Domain:
    """Index of a system's states and distributions for vectorised evaluation."""

    def __init__(self, m: Nfts, alg: Algebra):
        self.m = m
        self.alg = alg
        self.states: List[str] = list(m.states)
        self.pos: Dict[str, int] = {s: i for i, s in enumerate(self.states)}
        self.dists: List[Distribution] = m.distributions()
        dpos = {p: j for j, p in enumerate(self.dists)}
        self.cells: Dict[str, List[Tuple[int, ...]]] = {
            a: [tuple(dpos[p] for p in m.steps(s, a)) for s in self.states] for a in m.labels}
        self.entries: List[Tuple[Tuple[int, Degree], ...]] = [
            tuple((self.pos[w], d) for w, d in p.items()) for p in self.dists]
        self.ones: Vector = (ONE,) * len(self.states)

    # vector operations shared by evaluation and search

    def diamond(self, label: str, dist_vals: Vector) -> Vector:
        if label not in self.cells:
            raise EvaluationError(label)
        return tuple(max((dist_vals[j] for j in cell), default=ZERO)
                     for cell in self.cells[label])

    def lift(self, state_vals: Vector) -> Vector:
        return tuple(max((min(d, state_vals[i]) for i, d in entries), default=ZERO)
                     for entries in self.entries)

    def implies_const(self, vals: Vector, c: Degree) -> Vector:
        return tuple(resid(x, c, self.alg) for x in vals)

    def const_implies(self, c: Degree, vals: Vector) -> Vector:
        return tuple(resid(c, x, self.alg) for x in vals)

    def tensor_const(self, vals: Vector, c: Degree) -> Vector:
        return tuple(conj(x, c, self.alg) for x in vals)

    @staticmethod
    def both(a: Vector, b: Vector) -> Vector:
        return tuple(map(min, a, b))

    # recursive evaluation

    def state_vector(self, f: StateFormula, memo: Dict) -> Vector:
        if f in memo:
            return memo[f]
        if isinstance(f, Top):
            out = self.ones
        elif isinstance(f, And):
            out = self.both(self.state_vector(f.left, memo), self.state_vector(f.right, memo))
        elif isinstance(f, ImpliesConst):
            out = self.implies_const(self.state_vector(f.body, memo), f.const)
        elif isinstance(f, ConstImplies):
            out = self.const_implies(f.const, self.state_vector(f.body, memo))
        elif isinstance(f, TensorConst):
            out = self.tensor_const(self.state_vector(f.body, memo), f.const)
        elif isinstance(f, Diamond):
            out = self.diamond(f.label, self.dist_vector(f.body, memo))
        else:
            raise TypeError(f"Not a state formula: {f!r}")
        memo[f] = out
        return out

    def dist_vector(self, f: DistFormula, memo: Dict) -> Vector:
        if f in memo:
            return memo[f]
        if isinstance(f, Lift):
            out = self.lift(self.state_vector(f.body, memo))
        elif isinstance(f, DistAnd):
            out = self.both(self.dist_vector(f.left, memo), self.dist_vector(f.right, memo))
        elif isinstance(f, DistImpliesConst):
            out = self.implies_const(self.dist_vector(f.body, memo), f.const)
        elif isinstance(f, DistConstImplies):
            out = self.const_implies(f.const, self.dist_vector(f.body, memo))
        else:
            raise TypeError(f"Not a distribution formula: {f!r}")
        memo[f] = out
        return out

    def dist_value(self, f: DistFormula, p: Distribution, memo: Dict) -> Degree:
        """Value of *f* on an arbitrary distribution over this system's states."""
        if isinstance(f, Lift):
            vals = self.state_vector(f.body, memo)
            for w in p.support:
                if w not in self.pos:
                    raise UnknownNameError(f"Unknown state '{w}' in distribution")
            return max((min(d, vals[self.pos[w]]) for w, d in p.items()), default=ZERO)
        if isinstance(f, DistAnd):
            return min(self.dist_value(f.left, p, memo), self.dist_value(f.right, p, memo))
        if isinstance(f, DistImpliesConst):
            return resid(self.dist_value(f.body, p, memo), f.const, self.alg)
        if isinstance(f, DistConstImplies):
            return resid(f.const, self.dist_value(f.body, p, memo), self.alg)
        raise TypeError(f"Not a distribution formula: {f!r}")


def eval_state(m: Nfts, phi: StateFormula, u: str, alg: Algebra) -> Degree:
    """⟦phi⟧(u)."""
    m.require_state(u)
    dom = _Domain(m, alg)
    return dom.state_vector(phi, {})[dom.pos[u]]


def eval_dist(m: Nfts, psi: DistFormula, p: Distribution, alg: Algebra) -> Degree:
    """⟦psi⟧(p)."""
    return _Domain(m, alg).dist_value(psi, p, {})


# ── Constants ────────────────────────────────────────────────────────────────

def degree_closure(m: Nfts, alg: Algebra, depth: int = 2) -> List[Degree]:
    """Transition degrees of *m* closed under residuum and t-norm, *depth* rounds."""
    values = set(m.degrees())
    for _ in range(depth):
        current = list(values)
        values.update(resid(a, b, alg) for a in current for b in current)
        values.update(conj(a, b, alg) for a in current for b in current)
    return sorted(v for v in values if ZERO <= v <= ONE)


# ── Enumeration ──────────────────────────────────────────────────────────────
#
# Level d holds every formula of modal depth <= d in canonical form:
#   atoms      T and <a> psi for psi at distribution level d-1
#   wrapped    atoms plus one constant wrapper around a non-T atom
#   states     wrapped plus (f & g) for distinct non-T wrapped f before g
#   lifts      lift(f) for f in states plus one constant wrapper
#   dists      lifts plus (d & e) for distinct lifts d before e
# Wrappers whose value is fixed by the constant alone are skipped:
# (f -> 1), (1 -> f), (0 -> f), (f * 1), (f * 0).

Item = Tuple[Formula, Optional[Vector]]
Select = Callable[[Iterable[Item], int, str], List[Item]]


def _keep_all(items: Iterable[Item], level: int, sort: str) -> List[Item]:
    return list(items)


class _Levels:
    """Builds the enumeration levels, optionally carrying value vectors.

    *select* filters each freshly built batch (dedup, budget); *dom* is
    ``None`` for purely syntactic enumeration.
    """

    def __init__(self, labels: Sequence[str], consts: Iterable[Degree],
                 dom: Optional[_Domain] = None, select: Select = _keep_all):
        self.labels = sorted(labels)
        self.consts = sorted(set(consts))
        self.dom = dom
        self.select = select

    def _v(self, op, *args):
        return None if self.dom is None else op(*args)

    def states(self, level: int, dists_below: List[Item]) -> List[Item]:
        dom = self.dom

        def atoms():
            yield TOP, (dom.ones if dom else None)
            for a in self.labels:
                for psi, pv in dists_below:
                    yield Diamond(a, psi), self._v(lambda: dom.diamond(a, pv))

        def wrappers(base: List[Item]):
            for phi, vals in base:
                if phi == TOP:
                    continue
                for c in self.consts:
                    if c != ONE:
                        yield ImpliesConst(phi, c), self._v(lambda: dom.implies_const(vals, c))
                    if ZERO < c < ONE:
                        yield ConstImplies(c, phi), self._v(lambda: dom.const_implies(c, vals))
                        yield TensorConst(phi, c), self._v(lambda: dom.tensor_const(vals, c))

        def conjunctions(base: List[Item]):
            plain = [item for item in base if item[0] != TOP]
            for i, (f, fv) in enumerate(plain):
                for g, gv in plain[i + 1:]:
                    yield And(f, g), self._v(lambda: dom.both(fv, gv))

        out = self.select(atoms(), level, "state")
        out += self.select(wrappers(out), level, "state")
        out += self.select(conjunctions(out), level, "state")
        return out

    def dists(self, level: int, states: List[Item]) -> List[Item]:
        dom = self.dom

        def lifts():
            for phi, vals in states:
                lifted = Lift(phi)
                lv = self._v(lambda: dom.lift(vals))
                yield lifted, lv
                for c in self.consts:
                    if c != ONE:
                        yield DistImpliesConst(lifted, c), self._v(lambda: dom.implies_const(lv, c))
                    if ZERO < c < ONE:
                        yield DistConstImplies(c, lifted), self._v(lambda: dom.const_implies(c, lv))

        def conjunctions(base: List[Item]):
            for i, (f, fv) in enumerate(base):
                for g, gv in base[i + 1:]:
                    yield DistAnd(f, g), self._v(lambda: dom.both(fv, gv))

        out = self.select(lifts(), level, "dist")
        out += self.select(conjunctions(out), level, "dist")
        return out

    def run(self, depth: int) -> Iterator[Tuple[int, List[Item]]]:
        """Yield ``(level, state items)`` for levels 0..depth."""
        dists: List[Item] = []
        for level in range(depth + 1):
            states = self.states(level, dists)
            yield level, states
            if level < depth:
                dists = self.dists(level, states)


def enumerate_formulas(m: Nfts, depth: int, consts: Iterable[Degree]) -> Iterator[StateFormula]:
    """Every canonical state formula of modal depth <= *depth* over *m*'s labels."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    last: List[Item] = []
    for _, states in _Levels(m.labels, consts).run(depth):
        last = states
    for phi, _ in last:
        yield phi


# ── Distinguishing formulas ──────────────────────────────────────────────────

class _Dedup:
    """Keeps the first formula per value signature; counts every formula seen.

    A state formula at level d is only ever evaluated on states at most
    ``depth - d`` steps below a root, so its signature is its values there.
    A distribution formula at level d sits under at least one more diamond.
    """

    def __init__(self, dom: _Domain, depth: int, max_formulas: int):
        self.max_formulas = max_formulas
        self.built = 0
        self.seen: Dict[Tuple[str, int], set] = {}
        state_depth = [UnfoldedState.parse(s).depth for s in dom.states]
        dist_depth = [min((state_depth[i] for i, _ in entries), default=0) - 1
                      for entries in dom.entries]
        self.state_keys = {d: [i for i, sd in enumerate(state_depth) if sd <= depth - d]
                           for d in range(depth + 1)}
        self.dist_keys = {d: [j for j, dd in enumerate(dist_depth) if dd <= depth - d - 1]
                          for d in range(depth + 1)}

    def __call__(self, items: Iterable[Item], level: int, sort: str) -> List[Item]:
        keys = self.state_keys[level] if sort == "state" else self.dist_keys[level]
        seen = self.seen.setdefault((sort, level), set())
        out = []
        for f, vals in items:
            self.built += 1
            if self.built > self.max_formulas:
                raise CapacityError(self.built, self.max_formulas, "formula search")
            sig = tuple(vals[i] for i in keys)
            if sig not in seen:
                seen.add(sig)
                out.append((f, vals))
        return out


def distinguish(m: Nfts, u: str, v: str, k: int, alpha: Degree, depth: int, alg: Algebra,
                consts: Optional[Iterable[Degree]] = None, max_formulas: int = 2_000_000,
                closure_depth: int = 2) -> Optional[StateFormula]:
    """First formula separating *u* from *v* by less than *alpha*, or ``None``.

    Both states are evaluated in their depth-*k* unfoldings.  Constants
    default to the degree closure of *m*.
    """
    m.require_state(u)
    m.require_state(v)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if consts is None:
        consts = degree_closure(m, alg, closure_depth)
    consts = sorted(set(consts))
    tree = merge(unfold(m, u, k).tree, unfold(m, v, k).tree)
    dom = _Domain(tree, alg)
    ru, rv = dom.pos[UnfoldedState(u, 0).name], dom.pos[UnfoldedState(v, 0).name]
    dedup = _Dedup(dom, depth, max_formulas)
    dbg(f"distinguish({u}, {v}, k={k}, alpha={format_degree(alpha)}, depth={depth}): "
        f"{len(dom.states)} tree states, {len(consts)} constants")

    for level, states in _Levels(m.labels, consts, dom, dedup).run(depth):
        dbg(f"distinguish level {level}: {len(states)} distinct state formulas, "
            f"{dedup.built} built")
        for phi, vals in states:
            if biresid(vals[ru], vals[rv], alg) < alpha:
                dbg(f"distinguish found {render(phi)}")
                return phi
    return None


def logical_check(m: Nfts, u: str, v: str, k: int, alpha: Degree, depth: int,
                  alg: Algebra, **kwargs) -> bool:
    """True iff no formula up to *depth* separates u and v below *alpha*."""
    return distinguish(m, u, v, k, alpha, depth, alg, **kwargs) is None
