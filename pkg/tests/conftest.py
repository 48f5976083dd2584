import random
from fractions import Fraction
from pathlib import Path

import pytest

import data_store
from algebra import Algebra
from models import Distribution, Nfts

SAMPLES = Path(__file__).resolve().parent.parent / "sample_models"

QUARTERS = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]
ALGEBRAS = list(Algebra)
GOEDEL, PRODUCT, LUK = Algebra.GOEDEL, Algebra.PRODUCT, Algebra.LUKASIEWICZ


def random_nfts(seed: int, max_states: int = 6, max_labels: int = 2,
                max_dists: int = 2, max_support: int = 3) -> Nfts:
    """Seeded random system: degrees from QUARTERS, small supports."""
    rng = random.Random(seed)
    n = rng.randint(2, max_states)
    states = [f"s{i}" for i in range(n)]
    labels = [f"a{i}" for i in range(rng.randint(1, max_labels))]
    delta = {}
    for s in states:
        for a in labels:
            for _ in range(rng.randint(0, max_dists)):
                support = rng.sample(states, rng.randint(1, min(max_support, n)))
                p = Distribution.from_mapping({t: rng.choice(QUARTERS) for t in support})
                delta.setdefault((s, a), []).append(p)
    return Nfts(states, labels, delta)


def random_case(seed: int):
    """(system, u, v, k) for one ensemble seed; k cycles through 0..3."""
    m = random_nfts(seed)
    rng = random.Random(seed * 7919 + 1)
    u, v = rng.choice(m.states), rng.choice(m.states)
    return m, u, v, seed % 4


def random_relation(m: Nfts, seed: int, density: float = 0.3):
    rng = random.Random(seed)
    return frozenset((x, y) for x in m.states for y in m.states if rng.random() < density)


@pytest.fixture(autouse=True)
def _quiet_debug():
    data_store.set_debug(False)
    yield
    data_store.set_debug(False)


@pytest.fixture
def branching() -> Nfts:
    return data_store.load_model(str(SAMPLES / "branching.nfts"))


@pytest.fixture
def cyclic() -> Nfts:
    return data_store.load_model(str(SAMPLES / "cyclic.nfts"))


def dist(**entries) -> Distribution:
    """dist(u1=0.2, u2=0.7) with decimal literals parsed exactly."""
    return Distribution.from_mapping({k: Fraction(str(v)) for k, v in entries.items()})
