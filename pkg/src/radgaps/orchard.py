"""Euclid's orchard: rays through the integer lattice onto a screen.

The ray with parameter x is the line m(k) = c(x) + 2*k*x in the (k, m)
plane. A lattice point (k, m) casts a point shadow at the x whose ray passes
through it; the screen at k = k_max is lit everywhere else. With the
parabolic intercept c(x) = x^2 the shadows are exactly the fractional parts
of sqrt(k^2 + m), so the lit segments reproduce the gaps of {sqrt(n)}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterator, Optional, Union

import numpy as np

from .closed_form import gap_dilated, gap_sqrt
from .core import DomainError, farey_sequence


class SingularInterceptError(DomainError):
    """Every ray is rational: the shadows image the rationals instead of leaving gaps."""

    def __init__(self, message: str, rational_shadows: frozenset):
        super().__init__(message)
        self.rational_shadows = rational_shadows


@dataclass(frozen=True)
class Parabolic:
    """c(x) = x^2: rays tangent to the caustic m = -k^2."""

    def __call__(self, x):
        return x * x


@dataclass(frozen=True)
class Linear:
    """c(x) = c1 + c2*x: a pencil of rays through one focus.

    Pass ints/Fractions for exact singularity checks; floats disable them.
    """

    c1: Union[float, Fraction] = 0
    c2: Union[float, Fraction] = 0

    @property
    def exact(self) -> bool:
        return isinstance(self.c1, _RationalABC) and isinstance(self.c2, _RationalABC)

    @property
    def singular(self) -> bool:
        return self.exact and self.c1 == 0 and self.c2 == 0

    def __call__(self, x):
        return self.c1 + self.c2 * x


@dataclass(frozen=True)
class Tabulated:
    """c(x) by linear interpolation through (xs, cs); xs ascending."""

    xs: tuple
    cs: tuple

    def __post_init__(self):
        if len(self.xs) != len(self.cs) or len(self.xs) < 2:
            raise DomainError("tabulated intercept needs >= 2 matching samples")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise DomainError("tabulated xs must be strictly ascending")

    def __call__(self, x):
        return np.interp(x, self.xs, self.cs)


Intercept = Union[Parabolic, Linear, Tabulated]


@dataclass(frozen=True)
class OrchardScene:
    k_max: int
    intercept: Intercept = field(default_factory=Parabolic)
    a: int = 1
    b: int = 0
    window: tuple = (Fraction(0), Fraction(1))

    def __post_init__(self):
        if self.k_max < 1:
            raise DomainError("k_max must be >= 1")
        if self.a < 1 or not 0 <= self.b < self.a:
            raise DomainError(f"need a >= 1 and 0 <= b < a, got a={self.a}, b={self.b}")
        lo, hi = self.window
        if not 0 <= lo < hi <= 1:
            raise DomainError(f"window must be a sub-interval of [0, 1], got {self.window}")

    @property
    def equivalent_n(self) -> int:
        """Truncation N whose radicands are exactly the bands k <= k_max."""
        return (self.k_max + 1) ** 2 - 1


@dataclass(frozen=True)
class Shadows:
    """Shadow points sorted by x, as parallel arrays."""

    x: np.ndarray
    k: np.ndarray
    m: np.ndarray

    def __len__(self) -> int:
        return self.x.size

    def __iter__(self) -> Iterator[tuple[float, int, int]]:
        for x, k, m in zip(self.x, self.k, self.m):
            yield float(x), int(k), int(m)

    @property
    def radicands(self) -> np.ndarray:
        return self.k * self.k + self.m


def _solve_tabulated(intercept: Tabulated, k: int, m: np.ndarray, lo: float, hi: float) -> np.ndarray:
    # c(x) + 2kx - m is increasing on the window (checked by the caller); plain bisection
    left = np.full(m.shape, lo)
    right = np.full(m.shape, hi)
    for _ in range(64):
        mid = 0.5 * (left + right)
        above = intercept(mid) + 2 * k * mid - m > 0
        right = np.where(above, mid, right)
        left = np.where(above, left, mid)
    return 0.5 * (left + right)


def shadow_points(scene: OrchardScene) -> Shadows:
    """Every lattice point 1 <= k <= k_max, m >= 1 whose ray lands inside the window."""
    ic = scene.intercept
    if isinstance(ic, Linear) and ic.singular:
        rational = frozenset(
            Fraction(m, 2 * k)
            for k in range(1, scene.k_max + 1)
            for m in range(1, 2 * k)
            if (k * k + m) % scene.a == scene.b
        )
        raise SingularInterceptError("intercept c(x) = 0: every shadow is rational", rational)
    lo, hi = (float(w) for w in scene.window)
    xs, ks, ms = [], [], []
    for k in range(1, scene.k_max + 1):
        if isinstance(ic, Parabolic):
            m = np.arange(1, 2 * k + 1, dtype=np.int64)
            n = (k * k + m).astype(np.float64)
            # sqrt(k^2 + m) - k without cancellation
            x = m / (np.sqrt(n) + k)
        elif isinstance(ic, Linear):
            slope = 2 * k + float(ic.c2)
            if slope <= 0:
                raise DomainError(f"rays not invertible at k={k}: 2k + c2 <= 0")
            c1 = float(ic.c1)
            m_lo = max(1, int(np.floor(c1 + slope * lo)))
            m_hi = int(np.ceil(c1 + slope * hi))
            m = np.arange(m_lo, m_hi + 1, dtype=np.int64)
            x = (m - c1) / slope
        else:
            c_lo, c_hi = float(ic(lo)), float(ic(hi))
            m_lo = max(1, int(np.floor(c_lo + 2 * k * lo)))
            m_hi = int(np.ceil(c_hi + 2 * k * hi))
            m = np.arange(m_lo, m_hi + 1, dtype=np.int64)
            inside = (m > c_lo + 2 * k * lo) & (m < c_hi + 2 * k * hi)
            m = m[inside]
            x = _solve_tabulated(ic, k, m.astype(np.float64), lo, hi)
        keep = (x > lo) & (x < hi) & ((k * k + m) % scene.a == scene.b)
        xs.append(x[keep])
        ks.append(np.full(int(keep.sum()), k, dtype=np.int64))
        ms.append(m[keep])
    x = np.concatenate(xs)
    k = np.concatenate(ks)
    m = np.concatenate(ms)
    order = np.lexsort((m, k, x))
    return Shadows(x[order], k[order], m[order])


@dataclass(frozen=True)
class IlluminationSegment:
    x_lo: float
    x_hi: float
    raw_length: float
    scaled_length: float


@dataclass(frozen=True)
class Illumination:
    """Lit segments tiling the window between shadow points (parallel arrays)."""

    k_max: int
    x_lo: np.ndarray
    x_hi: np.ndarray

    @property
    def raw_length(self) -> np.ndarray:
        return self.x_hi - self.x_lo

    @property
    def x_mid(self) -> np.ndarray:
        return 0.5 * (self.x_lo + self.x_hi)

    @property
    def scaled_length(self) -> np.ndarray:
        # length swept on the screen at k = k_max
        return 2.0 * (self.k_max + self.x_mid) * self.raw_length

    def __len__(self) -> int:
        return self.x_lo.size

    def __getitem__(self, i: int) -> IlluminationSegment:
        lo, hi = float(self.x_lo[i]), float(self.x_hi[i])
        return IlluminationSegment(lo, hi, hi - lo, 2.0 * (self.k_max + 0.5 * (lo + hi)) * (hi - lo))

    def __iter__(self) -> Iterator[IlluminationSegment]:
        return (self[i] for i in range(len(self)))

    def index_containing(self, x: float) -> int:
        """Index of the segment with x_lo < x < x_hi, or -1 if x is a shadow/boundary point."""
        i = int(np.searchsorted(self.x_hi, x, side="left"))
        if i >= len(self) or not self.x_lo[i] < x < self.x_hi[i]:
            return -1
        return i


def illumination_pattern(scene: OrchardScene, shadows: Optional[Shadows] = None) -> Illumination:
    if shadows is None:
        shadows = shadow_points(scene)
    lo, hi = (float(w) for w in scene.window)
    cuts = np.unique(shadows.x)
    bounds = np.concatenate(([lo], cuts, [hi]))
    return Illumination(scene.k_max, bounds[:-1], bounds[1:])


@dataclass(frozen=True)
class Comparison:
    x: Fraction
    raw_length: float
    scaled_length: float
    closed_form: Fraction
    relative_error: float
    singular: bool = False


def _exact_shadow_at(scene: OrchardScene, x: Fraction) -> bool:
    """Whether some lattice ray hits x exactly (rational linear intercepts only)."""
    ic = scene.intercept
    p, q = x.numerator, x.denominator
    c1, c2 = Fraction(ic.c1), Fraction(ic.c2)
    for k in range(1, scene.k_max + 1):
        m = c1 + (2 * k + c2) * Fraction(p, q)
        if m.denominator == 1 and m >= 1 and (k * k + int(m)) % scene.a == scene.b:
            return True
    return False


def compare_to_closed_form(scene: OrchardScene, max_q: int) -> list[Comparison]:
    """Pair the lit segment around each Farey point with the exact gap limit."""
    ic = scene.intercept
    if isinstance(ic, Linear) and ic.singular:
        raise SingularInterceptError("intercept c(x) = 0 has no lit gaps", frozenset())
    if not isinstance(ic, Parabolic) and scene.a != 1:
        raise DomainError("dilution is only defined for the parabolic intercept")
    pattern = illumination_pattern(scene)
    lo, hi = scene.window
    rows = []
    for x in farey_sequence(max_q):
        limit = gap_sqrt(x).value if scene.a == 1 else gap_dilated(x, scene.a, scene.b).value
        if x.denominator == 1:
            # the integer gap wraps around; only meaningful for the parabolic family over the full window
            if x == 1 or not (isinstance(ic, Parabolic) and lo == 0 and hi == 1):
                continue
            raw = float(pattern.raw_length[0] + pattern.raw_length[-1])
            scaled = float(pattern.scaled_length[0] + pattern.scaled_length[-1])
        else:
            if not lo < x < hi:
                continue
            if isinstance(ic, Linear) and ic.exact and _exact_shadow_at(scene, x):
                rows.append(Comparison(x, float("nan"), float("nan"), limit, float("nan"), singular=True))
                continue
            i = pattern.index_containing(float(x))
            if i < 0:
                rows.append(Comparison(x, float("nan"), float("nan"), limit, float("nan"), singular=True))
                continue
            raw = float(pattern.raw_length[i])
            scaled = float(pattern.scaled_length[i])
        rows.append(Comparison(x, raw, scaled, limit, abs(scaled - float(limit)) / float(limit)))
    return rows
