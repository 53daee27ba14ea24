"""Exact integer and rational primitives.

Periodic integer classes, residue sets with the gap-around-zero operator,
integer roots and Farey enumeration. Everything here is exact integer
arithmetic (Python ints are unbounded, so intermediate overflow is not a
concern).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable

Rational = Fraction


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class GuardError(RuntimeError):
    """A resource guard refused to run a computation."""


def reduce_fraction(p: int, q: int) -> Fraction:
    if q == 0:
        raise DomainError("denominator must be non-zero")
    if q < 0:
        raise DomainError(f"denominator must be positive, got {q}")
    return Fraction(p, q)


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` (or a bare integer). Decimal floats are rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise DomainError(f"expected an exact rational p/q, got {text!r}")
    if "/" in text:
        p, q = text.split("/", 1)
        try:
            return reduce_fraction(int(p), int(q))
        except ValueError as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"cannot parse rational {text!r}") from None
    try:
        return Fraction(int(text))
    except ValueError:
        raise DomainError(f"cannot parse rational {text!r}") from None


@dataclass(frozen=True)
class PeriodicClass:
    """The set {offset + modulus*n | n in Z}."""

    offset: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError("modulus must be positive")
        object.__setattr__(self, "offset", self.offset % self.modulus)

    def __contains__(self, value: int) -> bool:
        return (value - self.offset) % self.modulus == 0


def absorb_period(offset: int, stride: int, modulus: int) -> PeriodicClass:
    """{offset + stride*n mod modulus} collapses to a single class mod gcd(stride, modulus)."""
    if modulus < 1:
        raise DomainError("modulus must be positive")
    g = gcd(stride, modulus)
    return PeriodicClass(offset, g)


@dataclass(frozen=True)
class ResidueSet:
    modulus: int
    values: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError("modulus must be positive")
        vals = tuple(sorted({v % self.modulus for v in self.values}))
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_iterable(cls, values: Iterable[int], modulus: int) -> "ResidueSet":
        return cls(modulus, tuple(values))

    def scaled(self, t: int) -> "ResidueSet":
        """Element-wise multiplication by t, which also scales the modulus."""
        if t < 1:
            raise DomainError("scale factor must be a positive integer")
        return ResidueSet(self.modulus * t, tuple(v * t for v in self.values))

    def __len__(self) -> int:
        return len(self.values)


def residue_gap_around_zero(rs: ResidueSet, zero_is_upper_boundary: bool = True) -> int:
    """Width of the gap around 0 in the periodic extension of ``rs``.

    With ``zero_is_upper_boundary`` an element equal to 0 is read as 0+eps,
    so it closes the gap from above and the answer is
    ``modulus - (max - min)``. Without it, 0 is simply skipped over and the
    gap runs from the largest negative element to the smallest positive one.
    """
    if not rs.values:
        raise DomainError("gap of an empty residue set is undefined")
    m = rs.modulus
    lo, hi = rs.values[0], rs.values[-1]
    if zero_is_upper_boundary or lo > 0:
        return m - (hi - lo)
    # 0 is in the set and is excluded from both sides
    positives = rs.values[1:]
    upper = positives[0] if positives else m
    lower = (positives[-1] if positives else 0) - m
    return upper - lower


def integer_root(n: int, alpha: int) -> int:
    """Largest k with k**alpha <= n, in pure integer arithmetic."""
    if alpha < 2:
        raise DomainError(f"root order must be >= 2, got {alpha}")
    if n < 0:
        raise DomainError("integer_root of a negative number")
    if alpha == 2:
        return isqrt(n)
    if n < 2:
        return n
    # initial guess above the root; Newton from above decreases monotonically
    x = 1 << -(-n.bit_length() // alpha)
    while True:
        y = ((alpha - 1) * x + n // x ** (alpha - 1)) // alpha
        if y >= x:
            break
        x = y
    while x**alpha > n:
        x -= 1
    while (x + 1) ** alpha <= n:
        x += 1
    return x


def is_perfect_power(n: int, alpha: int) -> bool:
    return integer_root(n, alpha) ** alpha == n


def farey_sequence(max_q: int) -> list[Fraction]:
    """All reduced fractions in [0, 1] with denominator <= max_q, ascending."""
    if max_q < 1:
        raise DomainError("max_q must be >= 1")
    a, b, c, d = 0, 1, 1, max_q
    out = [Fraction(0, 1)]
    while c <= max_q:
        k = (max_q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        out.append(Fraction(a, b))
    return out
