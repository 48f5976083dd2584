"""Exact truth-value arithmetic for the three residuated-lattice algebras.

Degrees are :class:`fractions.Fraction` values in ``[0, 1]``.  Every
operation here is closed over the rationals, so no rounding ever happens and
all comparisons are exact.
"""
import re
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

Degree = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

# decimal (0.25), rational (1/4) or bare integer (0, 1)
_DEGREE_RE = re.compile(r"^(\d+(\.\d+)?|\d+/\d+)$")


class DegreeError(ValueError):
    """A degree literal is malformed or lies outside [0, 1]."""


class Algebra(Enum):
    GOEDEL = "godel"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"

    @classmethod
    def from_name(cls, name: str) -> "Algebra":
        """Look an algebra up by its CLI name (case-insensitive)."""
        key = name.strip().lower()
        aliases = {"goedel": "godel", "gödel": "godel", "luk": "lukasiewicz",
                   "łukasiewicz": "lukasiewicz"}
        key = aliases.get(key, key)
        for alg in cls:
            if alg.value == key:
                return alg
        raise ValueError(f"Unknown t-norm '{name}' "
                         f"(expected one of: {', '.join(a.value for a in cls)})")


def parse_degree(text: str) -> Degree:
    """Parse a degree literal (``0.25``, ``1/4``, ``0`` or ``1``)."""
    s = str(text).strip()
    if not _DEGREE_RE.match(s):
        raise DegreeError(f"Malformed degree literal '{text}'")
    try:
        value = Fraction(s)
    except ZeroDivisionError:
        raise DegreeError(f"Malformed degree literal '{text}'") from None
    if value < 0 or value > 1:
        raise DegreeError(f"Degree {text} is outside [0, 1]")
    return value


def format_degree(d: Degree) -> str:
    """Render *d* as its exact rational text (``3/10``, ``1``, ``0``)."""
    return str(Fraction(d))


def format_decimal(d: Degree) -> str:
    """Render *d* as an exact decimal when one exists, else as ``a/b``.

    Used by the model file writer so that ``0.7`` stays ``0.7``.
    """
    d = Fraction(d)
    if d.denominator == 1:
        return str(d.numerator)
    den = d.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return str(d)
    places = max(twos, fives)
    scaled = d.numerator * 10 ** places // d.denominator
    digits = str(scaled).rjust(places + 1, "0")
    return (digits[:-places] + "." + digits[-places:]).rstrip("0").rstrip(".")


# ── t-norm and residuum ──────────────────────────────────────────────────────

@lru_cache(maxsize=65536)
def conj(a: Degree, b: Degree, alg: Algebra) -> Degree:
    """The t-norm a ⊗ b."""
    if alg is Algebra.GOEDEL:
        return min(a, b)
    if alg is Algebra.PRODUCT:
        return a * b
    return max(a + b - 1, ZERO)


@lru_cache(maxsize=65536)
def resid(a: Degree, b: Degree, alg: Algebra) -> Degree:
    """The residuum a → b, i.e. the largest s with conj(s, a) <= b."""
    if a <= b:
        return ONE
    if alg is Algebra.GOEDEL:
        return b
    if alg is Algebra.PRODUCT:
        return b / a
    return min(1 - a + b, ONE)


def biresid(a: Degree, b: Degree, alg: Algebra) -> Degree:
    """The biresiduum a ↔ b."""
    return min(resid(a, b, alg), resid(b, a, alg))


def meet(values: Iterable[Degree]) -> Degree:
    """Infimum; the empty meet is 1."""
    return min(values, default=ONE)


def join(values: Iterable[Degree]) -> Degree:
    """Supremum; the empty join is 0."""
    return max(values, default=ZERO)
