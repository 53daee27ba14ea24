"""Finite-N gaps in the fractional parts of {(a*t + b)^(1/alpha)}.

Neighbours of a rational center are located band by band (one band per
integer part k of the root) with exact integer comparisons; only the final
width is evaluated in floating point, and then in a cancellation-free form.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath
import numpy as np

from .closed_form import closed_form
from .core import DomainError, GuardError, farey_sequence, integer_root

Number = Union[float, mpmath.mpf]

FULL_SORT_MAX_N = 10**7
HIGH_PRECISION_DPS = 30


class UnboundedGapError(DomainError):
    """No admissible radicand on one side of the center (N too small)."""


@dataclass(frozen=True)
class SequenceSpec:
    """Radicands n = a*t + b <= N; the set is {n^(1/alpha) mod 1} minus perfect powers."""

    N: int
    alpha: int = 2
    a: int = 1
    b: int = 0

    def __post_init__(self):
        if self.alpha < 2:
            raise DomainError(f"alpha must be >= 2, got {self.alpha}")
        if self.a < 1:
            raise DomainError(f"a must be >= 1, got {self.a}")
        if not 0 <= self.b < self.a:
            raise DomainError(f"b must satisfy 0 <= b < a, got b={self.b}")
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")

    def with_n(self, N: int) -> "SequenceSpec":
        return replace(self, N=N)

    def admissible(self, n: int) -> bool:
        if n < 1 or n > self.N or n % self.a != self.b:
            return False
        return integer_root(n, self.alpha) ** self.alpha != n

    def radicands(self) -> range:
        start = self.b if self.b else self.a
        return range(start, self.N + 1, self.a)

    @property
    def scale(self) -> Number:
        """alpha * N^((alpha-1)/alpha); exactly 2*sqrt(N) for square roots."""
        if self.alpha == 2:
            return 2.0 * math.sqrt(self.N)
        with mpmath.workdps(HIGH_PRECISION_DPS):
            return self.alpha * mpmath.root(mpmath.mpf(self.N), self.alpha) ** (self.alpha - 1)


@dataclass(frozen=True)
class GapMeasurement:
    center: Fraction
    lower_radicand: int
    upper_radicand: int
    width: Number
    N: int
    alpha: int = 2


@dataclass(frozen=True)
class ScaledApproximant:
    measurement: GapMeasurement
    scale: Number
    scaled_width: Number


# --- exact ordering of fractional parts -------------------------------------


def _frac_fixed(n: int, k: int, alpha: int, bits: int) -> int:
    """floor(frac(n^(1/alpha)) * 2^bits), given k = floor(n^(1/alpha))."""
    return integer_root(n << (alpha * bits), alpha) - (k << bits)


def _pick(cands: list[tuple[int, int]], alpha: int, bits: int, largest: bool) -> tuple[int, int]:
    """Candidate (n, k) with the largest/smallest fractional part, decided exactly.

    The fixed-point value brackets the true fractional part in [F, F+1)/2^bits
    and the true value is irrational, so distinct F values order strictly.
    Equal F values are refined at higher precision.
    """
    while len(cands) > 1:
        keyed = [(_frac_fixed(n, k, alpha, bits), n, k) for n, k in cands]
        best = max(f for f, _, _ in keyed) if largest else min(f for f, _, _ in keyed)
        cands = [(n, k) for f, n, k in keyed if f == best]
        bits *= 2
    return cands[0]


def _start_bits(N: int) -> int:
    return 2 * N.bit_length() + 16


def _band_scan(spec: SequenceSpec, p: int, q: int, k_lo: int, k_hi: int, integer_center: bool):
    """Best lower/upper neighbour over bands k_lo..k_hi (inclusive)."""
    alpha, a, b, N = spec.alpha, spec.a, spec.b, spec.N
    Q = q**alpha
    lows: list[tuple[int, int]] = []
    highs: list[tuple[int, int]] = []
    for k in range(k_lo, k_hi + 1):
        floor_pow = k**alpha
        ceil_pow = (k + 1) ** alpha
        if integer_center:
            # below k+1 from the left, above k from the right
            n_max = min(ceil_pow - 1, N)
            n_min = floor_pow + 1
        else:
            T = (k * q + p) ** alpha
            n_max = min((T - 1) // Q, N)
            n_min = T // Q + 1
        n = n_max - ((n_max - b) % a)
        if n > floor_pow:
            lows.append((n, k))
        n = n_min + ((b - n_min) % a)
        if n < ceil_pow and n <= N:
            highs.append((n, k))
    bits = _start_bits(N)
    low = _pick(lows, alpha, bits, largest=True) if lows else None
    high = _pick(highs, alpha, bits, largest=False) if highs else None
    return low, high


def _reduce(spec: SequenceSpec, parts, lows_side: bool):
    cands = [c for c in parts if c is not None]
    if not cands:
        return None
    return _pick(cands, spec.alpha, _start_bits(spec.N), largest=lows_side)


def _scan(spec: SequenceSpec, p: int, q: int, integer_center: bool, workers: int):
    K = integer_root(spec.N, spec.alpha)
    if K < 1:
        return None, None
    if workers <= 1 or K < 4096:
        return _band_scan(spec, p, q, 1, K, integer_center)
    step = -(-K // workers)
    chunks = [(lo, min(lo + step - 1, K)) for lo in range(1, K + 1, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(_band_scan, spec, p, q, lo, hi, integer_center) for lo, hi in chunks]
        parts = [f.result() for f in futs]
    # min/max of exactly comparable keys: order-insensitive
    low = _reduce(spec, [lo for lo, _ in parts], True)
    high = _reduce(spec, [hi for _, hi in parts], False)
    return low, high


# --- cancellation-free distances --------------------------------------------


def root_distance(n: int, num: int, den: int, alpha: int, dps: Optional[int] = None) -> Number:
    """t - n^(1/alpha) for t = num/den, without subtracting nearby roots.

    Uses t^alpha - n = (t - s) * sum_j t^(alpha-1-j) s^j with s = n^(1/alpha);
    the numerator num^alpha - n*den^alpha is an exact integer and the sum has
    only positive terms.
    """
    top = num**alpha - n * den**alpha
    if alpha == 2 and dps is None:
        s = math.sqrt(n)
        # (num/den)^2 - n = (t - s)(t + s); divide through by den^2
        return top / (den * (num + den * s))
    with mpmath.workdps(dps or HIGH_PRECISION_DPS):
        s = mpmath.root(mpmath.mpf(n), alpha)
        t = mpmath.mpf(num) / den
        total = mpmath.fsum(t ** (alpha - 1 - j) * s**j for j in range(alpha))
        return mpmath.mpf(top) / den**alpha / total


def root_difference(n2: int, n1: int, alpha: int = 2, dps: Optional[int] = None) -> Number:
    """n2^(1/alpha) - n1^(1/alpha) via the factored difference of powers."""
    if alpha == 2 and dps is None:
        return (n2 - n1) / (math.sqrt(n2) + math.sqrt(n1))
    with mpmath.workdps(dps or HIGH_PRECISION_DPS):
        s2 = mpmath.root(mpmath.mpf(n2), alpha)
        s1 = mpmath.root(mpmath.mpf(n1), alpha)
        total = mpmath.fsum(s2 ** (alpha - 1 - j) * s1**j for j in range(alpha))
        return (n2 - n1) / total


def _dps_for(alpha: int, dps: Optional[int]) -> Optional[int]:
    if dps is not None:
        return dps
    return None if alpha == 2 else HIGH_PRECISION_DPS


def _width(below: Number, above: Number, prec: Optional[int]) -> Number:
    # below > 0 > above: the difference adds magnitudes, no cancellation
    if prec is None:
        return below - above
    with mpmath.workdps(prec):
        return below - above


# --- public operations -------------------------------------------------------


def exact_gap_at(spec: SequenceSpec, x: Fraction, workers: int = 1, dps: Optional[int] = None) -> GapMeasurement:
    """Gap around a non-integer point x at truncation N, with its bracketing radicands."""
    x = Fraction(x)
    if not 0 < x < 1:
        raise DomainError(f"exact_gap_at needs 0 < x < 1, got {x}; use exact_gap_at_integer")
    p, q = x.numerator, x.denominator
    low, high = _scan(spec, p, q, False, workers)
    if low is None or high is None:
        side = "below" if low is None else "above"
        raise UnboundedGapError(f"no admissible radicand {side} x={x} at N={spec.N}")
    (n1, k1), (n2, k2) = low, high
    prec = _dps_for(spec.alpha, dps)
    width = _width(root_distance(n1, k1 * q + p, q, spec.alpha, prec), root_distance(n2, k2 * q + p, q, spec.alpha, prec), prec)
    return GapMeasurement(x, n1, n2, width, spec.N, spec.alpha)


def exact_gap_at_integer(spec: SequenceSpec, workers: int = 1, dps: Optional[int] = None) -> GapMeasurement:
    """Wrap-around gap (1 - max fractional part) + min fractional part."""
    low, high = _scan(spec, 0, 1, True, workers)
    if low is None or high is None:
        raise UnboundedGapError(f"no admissible radicand at N={spec.N}")
    (n1, k1), (n2, k2) = low, high
    prec = _dps_for(spec.alpha, dps)
    width = _width(root_distance(n1, k1 + 1, 1, spec.alpha, prec), root_distance(n2, k2, 1, spec.alpha, prec), prec)
    return GapMeasurement(Fraction(0), n1, n2, width, spec.N, spec.alpha)


def scaled_gap(spec: SequenceSpec, x: Fraction, workers: int = 1, dps: Optional[int] = None) -> ScaledApproximant:
    x = Fraction(x)
    if x.denominator == 1:
        m = exact_gap_at_integer(spec, workers, dps)
    else:
        m = exact_gap_at(spec, x, workers, dps)
    scale = spec.scale
    if isinstance(m.width, float) and isinstance(scale, float):
        return ScaledApproximant(m, scale, m.width * scale)
    with mpmath.workdps(dps or HIGH_PRECISION_DPS):
        return ScaledApproximant(m, scale, mpmath.mpf(m.width) * scale)


def _profile_point(args):
    spec, x, dps = args
    return x, scaled_gap(spec, x, 1, dps)


def gap_profile(spec: SequenceSpec, max_q: int, workers: int = 1, dps: Optional[int] = None):
    """Scaled gaps at every Farey point of order max_q (0 and 1 both give the integer gap)."""
    if max_q < 2:
        raise DomainError("max_q must be >= 2")
    points = farey_sequence(max_q)
    jobs = [(spec, x, dps) for x in points]
    if workers <= 1:
        return [_profile_point(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_profile_point, jobs))


def convergence_series(
    template: SequenceSpec, x: Fraction, schedule: Sequence[int], workers: int = 1, dps: Optional[int] = None
) -> list[ScaledApproximant]:
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("N schedule must be strictly ascending")
    return [scaled_gap(template.with_n(N), x, workers, dps) for N in schedule]


def relative_error(approx: ScaledApproximant, x: Fraction, spec: SequenceSpec) -> float:
    limit = closed_form(x, spec.alpha, spec.a, spec.b).value
    return abs(float(approx.scaled_width) - float(limit)) / float(limit)


# --- background diagnostics --------------------------------------------------


def fractional_parts(spec: SequenceSpec) -> np.ndarray:
    """All admissible fractional parts as float64, computed without cancellation."""
    n = np.arange(spec.b if spec.b else spec.a, spec.N + 1, spec.a, dtype=np.int64)
    alpha = spec.alpha
    k = np.floor(n.astype(np.float64) ** (1.0 / alpha)).astype(np.int64)
    # fix off-by-one from the float root
    k -= (k**alpha > n).astype(np.int64)
    k += ((k + 1) ** alpha <= n).astype(np.int64)
    rem = n - k**alpha
    keep = rem > 0
    n, k, rem = n[keep], k[keep], rem[keep]
    s = n.astype(np.float64) ** (1.0 / alpha)
    if alpha == 2:
        s = np.sqrt(n.astype(np.float64))
    kf = k.astype(np.float64)
    total = sum(s ** (alpha - 1 - j) * kf**j for j in range(alpha))
    return rem.astype(np.float64) / total


def full_sort_limit() -> int:
    """Largest N allowed in full-sort mode; GAPS_MAX_MEMORY_MB overrides the default."""
    mb = os.environ.get("GAPS_MAX_MEMORY_MB")
    if mb:
        # ~40 bytes per radicand across the temporaries
        return int(float(mb) * 1024 * 1024 / 40)
    return FULL_SORT_MAX_N


def golden_points(count: int, digits: int = 40) -> list[Fraction]:
    """frac(j * phi) for j = 1..count as high-precision rationals."""
    with mpmath.workdps(digits + 10):
        phi = (mpmath.sqrt(5) - 1) / 2
        scale = 10**digits
        out = []
        for j in range(1, count + 1):
            v = mpmath.frac(j * phi)
            out.append(Fraction(int(mpmath.nint(v * scale)), scale))
    return out


@dataclass(frozen=True)
class BackgroundHistogram:
    mode: str
    edges: np.ndarray
    counts: np.ndarray
    count: int
    mean_raw: float
    median_raw: float
    mean_scaled: float
    median_scaled: float
    tail_exponent: float
    exp_rate: float
    scaled: np.ndarray


TAIL_DECADE = (5.0, 50.0)


def _fits(normalized: np.ndarray, decade: tuple[float, float] = TAIL_DECADE) -> tuple[float, float]:
    """Power-law density exponent over one decade of unit-mean widths, and exponential tail rate.

    The power law is fitted to the empirical survival function S(t) ~ t^(s)
    on ``decade`` and reported as the density exponent s - 1. The default
    decade sits above the bulk and below the handful of rational-point
    spikes that make up the extreme top of the distribution.
    """
    srt = np.sort(normalized)
    surv = 1.0 - np.arange(srt.size) / srt.size
    lo, hi = decade
    sel = (srt >= lo) & (srt <= hi)
    power = float("nan")
    if sel.sum() >= 10:
        power = float(np.polyfit(np.log(srt[sel]), np.log(surv[sel]), 1)[0]) - 1.0
    sel = srt > np.median(srt)
    rate = float("nan")
    if sel.sum() >= 3:
        rate = float(-np.polyfit(srt[sel], np.log(surv[sel]), 1)[0])
    return power, rate


def background_scan(
    spec: SequenceSpec,
    sample_budget: int = 1000,
    mode: str = "auto",
    nbins: int = 40,
    max_full_n: Optional[int] = None,
) -> BackgroundHistogram:
    """Histogram of scaled gap widths away from rational points.

    ``full`` sorts every fractional part and takes consecutive differences;
    ``sample`` measures exact gaps at golden-ratio points; ``auto`` picks
    full when N is under the memory guard.
    """
    limit = max_full_n if max_full_n is not None else full_sort_limit()
    if mode == "auto":
        mode = "full" if spec.N <= limit else "sample"
    scale = float(spec.scale)
    if mode == "full":
        if spec.N > limit:
            raise GuardError(
                f"full-sort mode refused for N={spec.N} > {limit}; use mode='sample' "
                "or raise GAPS_MAX_MEMORY_MB"
            )
        f = np.sort(fractional_parts(spec))
        if f.size < 2:
            raise DomainError("need at least two fractional parts")
        raw = np.empty_like(f)
        raw[:-1] = np.diff(f)
        raw[-1] = 1.0 - f[-1] + f[0]
    elif mode == "sample":
        if sample_budget < 1:
            raise GuardError("sample_budget must be positive")
        if sample_budget > 10**6:
            raise GuardError(f"sample_budget {sample_budget} too large (limit 10^6)")
        raw = np.array([float(exact_gap_at(spec, x).width) for x in golden_points(sample_budget)])
    else:
        raise DomainError(f"unknown mode {mode!r}")
    scaled = raw * scale
    positive = scaled[scaled > 0]
    edges = np.logspace(np.log10(positive.min()), np.log10(positive.max()), nbins + 1)
    counts, _ = np.histogram(positive, bins=edges)
    power, rate = _fits(raw / raw.mean())
    return BackgroundHistogram(
        mode=mode,
        edges=edges,
        counts=counts,
        count=int(raw.size),
        mean_raw=float(raw.mean()),
        median_raw=float(np.median(raw)),
        mean_scaled=float(scaled.mean()),
        median_scaled=float(np.median(scaled)),
        tail_exponent=power,
        exp_rate=rate,
        scaled=scaled,
    )


# --- how large must N be ------------------------------------------------------

# order-of-magnitude thresholds usually quoted for alpha=3 (constants unstated)
QUOTED_THRESHOLDS_ALPHA3 = {"first signal": 2e6, "third spike (q=6)": 4e8}


def min_N_estimate(eps: float, alpha: int = 3, tol: float = 1e-15) -> float:
    """Largest root of N * exp(-alpha * eps * N^(1/alpha)) = 1.

    Above this N fewer than one background outlier is expected over level
    eps. With u = N^(1/alpha) the equation is log(u) = eps * u, which has a
    root only for eps <= 1/e; for larger eps the expected count is below one
    for every N >= 1 and 1.0 is returned.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    if eps > 1 / math.e:
        return 1.0

    def g(log_u):
        return log_u - eps * math.exp(log_u)

    # g is decreasing past u = 1/eps and goes to -inf
    lo = -math.log(eps)
    hi = lo + 1.0
    while g(hi) > 0:
        hi *= 2
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return math.exp(alpha * 0.5 * (lo + hi))


def outlier_residual(N: float, eps: float, alpha: int = 3) -> float:
    return N * math.exp(-alpha * eps * N ** (1.0 / alpha)) - 1.0
