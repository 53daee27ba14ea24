"""Exact limits of the scaled gap around rational points.

Every evaluator returns a :class:`ClosedFormValue` holding an exact
``Fraction``. :func:`oracle_unreduced_gap` enumerates the residue set before
any algebraic reduction and is the ground truth the reduced formulas are
tested against.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .core import DomainError, GuardError, ResidueSet, residue_gap_around_zero

# formula_path tags
PATH_SQRT = "sqrt:thomae"
PATH_SQRT_INTEGER = "sqrt:integer"
PATH_DILATED = "dilated:residue-gap"
PATH_DILATED_LINEAR = "dilated:linear"
PATH_DILATED_CASE2 = "dilated:case2"
PATH_DILATED_INTEGER = "dilated:integer"
PATH_HIGHER = "higher:gcd"
PATH_HIGHER_2ADIC = "higher:gcd+2adic"
PATH_HIGHER_INTEGER = "higher:integer"
PATH_ORACLE = "oracle:unreduced"


@dataclass(frozen=True)
class ClosedFormValue:
    value: Fraction
    d: int
    gap_factor: int
    formula_path: str

    def __post_init__(self):
        if self.value <= 0:
            raise AssertionError(f"gap limit must be positive, got {self.value}")

    def __float__(self) -> float:
        return float(self.value)


def _check_unit(x: Fraction) -> Fraction:
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError(f"query point must lie in [0, 1], got {x}")
    return x


def _sanity(v: ClosedFormValue, a: int = 1, alpha: int = 2) -> ClosedFormValue:
    assert v.value <= 2 * a * alpha, v
    return v


def gap_sqrt(x: Fraction) -> ClosedFormValue:
    """Limit of 2*sqrt(N) times the gap around x in {sqrt(n)}: 2/q for even q, 1/q for odd q."""
    x = _check_unit(x)
    q = x.denominator
    if q == 1:
        return ClosedFormValue(Fraction(2), 1, 1, PATH_SQRT_INTEGER)
    d = gcd(2, q)
    return ClosedFormValue(Fraction(d, q), d, 1, PATH_SQRT)


def _least_positive(r: int, a: int) -> int:
    r %= a
    return r if r else a


def gap_dilated_at_zero(a: int, b: int = 0) -> ClosedFormValue:
    """Gap around the integers for the radicands a*n + b.

    Right half-gap: the smallest m >= 1 with k^2 + m = a*n + b for some k.
    Left half-gap: the smallest m >= 1 with j^2 - m = a*n + b. A residue of
    0 means the radicand would be a perfect square, which is excluded, so
    the next admissible m is a.
    """
    if a < 1:
        raise DomainError("dilution a must be >= 1")
    if not 0 <= b < a:
        raise DomainError(f"offset b must satisfy 0 <= b < a, got b={b}, a={a}")
    ks = range(1, a + 1)
    right = min(_least_positive(b - k * k, a) for k in ks)
    left = min(_least_positive(k * k - b, a) for k in ks)
    total = right + left
    return _sanity(ClosedFormValue(Fraction(total), 1, total, PATH_DILATED_INTEGER), a)


def dilated_residue_set(p: int, q: int, a: int, b: int = 0) -> ResidueSet:
    """The set over C in Z_a whose gap around zero is the dilution factor."""
    d = gcd(2, q)
    stride = q * d
    top = p * p - b * q * q
    if top < 0:
        # lift into the non-negative range; a multiple of a*q*d leaves the set unchanged mod a
        period = a * stride
        top += (-top // period + 1) * period
    base = top // stride
    lin = (2 // d) * p
    quad = q // d
    return ResidueSet(a, tuple(base + lin * c + quad * c * c for c in range(a)))


def gap_dilated(x: Fraction, a: int, b: int = 0) -> ClosedFormValue:
    """Gap limit for {sqrt(a*n + b)} at a rational x."""
    x = _check_unit(x)
    if a < 1:
        raise DomainError("dilution a must be >= 1")
    if not 0 <= b < a:
        raise DomainError(f"offset b must satisfy 0 <= b < a, got b={b}, a={a}")
    p, q = x.numerator, x.denominator
    if q == 1:
        return gap_dilated_at_zero(a, b)
    d = gcd(2, q)
    if (q // d) % a == 0:
        return ClosedFormValue(Fraction(d, q), d, 1, PATH_DILATED_LINEAR)
    factor = residue_gap_around_zero(dilated_residue_set(p, q, a, b), zero_is_upper_boundary=True)
    return _sanity(ClosedFormValue(Fraction(d * factor, q), d, factor, PATH_DILATED), a)


def gap_dilated_case2(x: Fraction) -> ClosedFormValue:
    x = _check_unit(x)
    q = x.denominator
    if q == 1:
        return gap_dilated_at_zero(2)
    if q % 4 == 2:
        return ClosedFormValue(Fraction(4, q), 2, 2, PATH_DILATED_CASE2)
    if q % 4 == 0:
        return ClosedFormValue(Fraction(2, q), 2, 1, PATH_DILATED_CASE2)
    return ClosedFormValue(Fraction(1, q), 1, 1, PATH_DILATED_CASE2)


def gap_higher(x: Fraction, alpha: int, corrected: bool = True) -> ClosedFormValue:
    """Gap limit for {n^(1/alpha)} at x, scaled by alpha*N^((alpha-1)/alpha).

    The plain result is gcd(alpha, q^(alpha-1)) / q^(alpha-1). That form
    drops the binomial cross terms, which is only safe away from one 2-adic
    case: for even alpha and q = 2 mod 4 the odd residues u = p mod 2 have
    u^alpha = 1 mod 2^(2+v2(alpha)), one power of 2 more than the linear
    term predicts. ``corrected=True`` (the default) accounts for that;
    ``corrected=False`` returns the plain gcd form.
    """
    if alpha < 2:
        raise DomainError(f"radical order must be >= 2, got {alpha}")
    x = _check_unit(x)
    q = x.denominator
    if q == 1:
        return ClosedFormValue(Fraction(2), 1, 1, PATH_HIGHER_INTEGER)
    qpow = q ** (alpha - 1)
    bump = corrected and alpha % 2 == 0 and q % 4 == 2
    d = gcd(alpha * (2 if bump else 1), qpow)
    path = PATH_HIGHER_2ADIC if bump and d != gcd(alpha, qpow) else PATH_HIGHER
    return _sanity(ClosedFormValue(Fraction(d, qpow), d, 1, path), 1, alpha)


ORACLE_MAX_Q = 64
ORACLE_MAX_A = 64
ORACLE_MAX_ALPHA = 6
ORACLE_MAX_TERMS = 2_000_000


def oracle_residue_set(p: int, q: int, alpha: int, a: int = 1, b: int = 0) -> ResidueSet:
    """{(k*q + p)^alpha - b*q^alpha mod a*q^alpha | k in Z_{a*q^(alpha-1)}}."""
    mod = a * q**alpha
    shift = b * q**alpha
    return ResidueSet(mod, tuple((pow(k * q + p, alpha, mod) - shift) % mod for k in range(a * q ** (alpha - 1))))


def oracle_unreduced_gap(
    x: Fraction,
    alpha: int = 2,
    a: int = 1,
    b: int = 0,
    *,
    max_q: int = ORACLE_MAX_Q,
    max_a: int = ORACLE_MAX_A,
    max_alpha: int = ORACLE_MAX_ALPHA,
    max_terms: int = ORACLE_MAX_TERMS,
) -> Fraction:
    """Brute-force gap limit from the residue set before any reduction."""
    x = _check_unit(x)
    p, q = x.numerator, x.denominator
    if q == 1:
        raise DomainError("oracle is defined for non-integer x; use gap_dilated_at_zero")
    if alpha < 2:
        raise DomainError(f"radical order must be >= 2, got {alpha}")
    if a < 1 or not 0 <= b < a:
        raise DomainError(f"need a >= 1 and 0 <= b < a, got a={a}, b={b}")
    if q > max_q or a > max_a or alpha > max_alpha:
        raise GuardError(
            f"oracle bound exceeded (q={q} <= {max_q}, a={a} <= {max_a}, alpha={alpha} <= {max_alpha})"
        )
    terms = a * q ** (alpha - 1)
    if terms > max_terms:
        raise GuardError(f"oracle would enumerate {terms} terms (limit {max_terms})")
    rs = oracle_residue_set(p, q, alpha, a, b)
    return Fraction(residue_gap_around_zero(rs, zero_is_upper_boundary=True), q**alpha)


def closed_form(x: Fraction, alpha: int = 2, a: int = 1, b: int = 0) -> ClosedFormValue:
    """Dispatch to the evaluator matching (alpha, a, b)."""
    if alpha == 2:
        if a == 1:
            return gap_sqrt(x)
        return gap_dilated(x, a, b)
    if a == 1:
        return gap_higher(x, alpha)
    raise DomainError("no closed form for alpha > 2 with a > 1; use oracle_unreduced_gap")
