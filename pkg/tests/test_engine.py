import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radgaps.closed_form import closed_form
from radgaps.core import DomainError, GuardError, farey_sequence
from radgaps.engine import (
    SequenceSpec,
    UnboundedGapError,
    background_scan,
    convergence_series,
    exact_gap_at,
    exact_gap_at_integer,
    fractional_parts,
    gap_profile,
    golden_points,
    min_N_estimate,
    outlier_residual,
    root_difference,
    scaled_gap,
)

F = Fraction
ORACLE_N = 5000


@lru_cache(maxsize=None)
def brute_parts(alpha, a, b, N=ORACLE_N):
    """(frac, n) for every admissible radicand, at 40 digits, sorted by frac."""
    out = []
    with mpmath.workdps(40):
        for n in range(b if b else a, N + 1, a):
            r = mpmath.root(n, alpha)
            k = int(mpmath.floor(r))
            if k**alpha == n or (k + 1) ** alpha == n:
                continue
            out.append((r - mpmath.floor(r), n))
    return tuple(sorted(out))


def brute_bracket(spec, x):
    parts = [(f, n) for f, n in brute_parts(spec.alpha, spec.a, spec.b) if n <= spec.N]
    if x == 0:
        return parts[-1][1], parts[0][1]
    with mpmath.workdps(40):
        c = mpmath.mpf(x.numerator) / x.denominator
    below = [t for t in parts if t[0] < c]
    above = [t for t in parts if t[0] > c]
    return below[-1][1], above[0][1]


def test_example_half_at_16():
    m = exact_gap_at(SequenceSpec(16), F(1, 2))
    assert (m.lower_radicand, m.upper_radicand) == (12, 13)
    assert m.width == pytest.approx(float(mpmath.sqrt(13) - mpmath.sqrt(12)), rel=1e-14)


def test_example_third_at_16():
    spec = SequenceSpec(16)
    m = exact_gap_at(spec, F(1, 3))
    assert (m.lower_radicand, m.upper_radicand) == brute_bracket(spec, F(1, 3))


def test_example_integer_at_16():
    m = exact_gap_at_integer(SequenceSpec(16))
    assert (m.lower_radicand, m.upper_radicand) == (15, 10)
    ref = (4 - mpmath.sqrt(15)) + (mpmath.sqrt(10) - 3)
    assert m.width == pytest.approx(float(ref), rel=1e-14)
    assert m.width == pytest.approx(0.2893, abs=1e-4)


def test_integer_gap_bounds_are_edge_radicands():
    # k^2 + 1 above the integer, k^2 + 2k below it
    spec = SequenceSpec(10**6)
    m = exact_gap_at_integer(spec)
    k = 999
    assert m.upper_radicand == k * k + 1
    assert m.lower_radicand == k * k + 2 * k


@pytest.mark.parametrize("N", [10, 37, 100, 257, 1000, 2024, 3601, 4999, 5000])
@pytest.mark.parametrize("alpha, a, b", [(2, 1, 0), (2, 2, 0), (2, 3, 1), (2, 5, 0), (3, 1, 0), (3, 2, 1)])
def test_matches_brute_force(N, alpha, a, b):
    spec = SequenceSpec(N, alpha, a, b)
    for x in farey_sequence(8):
        if x == 1:
            continue
        try:
            expected = brute_bracket(spec, x)
        except IndexError:
            with pytest.raises(UnboundedGapError):
                exact_gap_at_integer(spec) if x == 0 else exact_gap_at(spec, x)
            continue
        m = exact_gap_at_integer(spec) if x == 0 else exact_gap_at(spec, x)
        assert (m.lower_radicand, m.upper_radicand) == expected, (spec, x)


@settings(max_examples=60, deadline=None)
@given(st.integers(20, ORACLE_N), st.sampled_from([x for x in farey_sequence(8) if 0 < x < 1]))
def test_matches_brute_force_random_n(N, x):
    spec = SequenceSpec(N)
    m = exact_gap_at(spec, x)
    assert (m.lower_radicand, m.upper_radicand) == brute_bracket(spec, x)


def test_no_point_inside_gap():
    spec = SequenceSpec(3000, a=3)
    parts = brute_parts(2, 3, 0)
    fr = {n: f for f, n in parts if n <= spec.N}
    for x in farey_sequence(7)[1:-1]:
        m = exact_gap_at(spec, x)
        lo, hi = fr[m.lower_radicand], fr[m.upper_radicand]
        assert lo < mpmath.mpf(x.numerator) / x.denominator < hi
        assert not any(lo < f < hi for f in fr.values())
        assert m.width > 0


def test_dilution_widens():
    base = exact_gap_at(SequenceSpec(100), F(1, 2)).width
    assert exact_gap_at(SequenceSpec(100, a=2), F(1, 2)).width >= base


def test_rejects_integer_center():
    with pytest.raises(DomainError):
        exact_gap_at(SequenceSpec(100), F(0))


def test_unbounded_gap_for_tiny_n():
    with pytest.raises(UnboundedGapError):
        exact_gap_at(SequenceSpec(2), F(1, 2))


def test_scaled_examples():
    s = scaled_gap(SequenceSpec(16), F(1, 2))
    assert s.scale == 8.0
    assert s.scaled_width == pytest.approx(8 * float(mpmath.sqrt(13) - mpmath.sqrt(12)), rel=1e-13)
    assert scaled_gap(SequenceSpec(10**6), F(1, 2)).scaled_width == pytest.approx(1, rel=0.05)
    assert scaled_gap(SequenceSpec(20000), F(0)).scaled_width == pytest.approx(2, rel=0.01)


def test_scale_alpha3_high_precision():
    s = SequenceSpec(10**6, alpha=3)
    assert isinstance(s.scale, mpmath.mpf)
    assert float(s.scale) == pytest.approx(3 * 1e4, rel=1e-12)
    v = scaled_gap(s, F(1, 3))
    assert isinstance(v.measurement.width, mpmath.mpf)


def test_profile_entries():
    prof = gap_profile(SequenceSpec(100), 2)
    assert [x for x, _ in prof] == [F(0), F(1, 2), F(1)]


def test_profile_spikes_near_limits():
    spec = SequenceSpec(20000)
    for x, s in gap_profile(spec, 8):
        limit = float(closed_form(x).value)
        assert s.scaled_width == pytest.approx(limit, rel=0.1)


def test_profile_dilated_half():
    prof = dict(gap_profile(SequenceSpec(20000, a=2), 8))
    assert prof[F(1, 2)].scaled_width == pytest.approx(2, rel=0.05)


def test_convergence_integer_stays_near_two():
    series = convergence_series(SequenceSpec(1), F(0), [1000, 10000, 100000])
    for s in series:
        assert s.scaled_width == pytest.approx(2, rel=0.05)


def test_convergence_schedule_must_ascend():
    with pytest.raises(DomainError):
        convergence_series(SequenceSpec(1), F(1, 2), [1000, 100])


@pytest.mark.parametrize("x", [F(1, 2), F(1, 3), F(2, 5), F(3, 8)])
def test_one_sided_envelope(x):
    # scaled gaps sit above the limit up to the prefactor correction 10*q/sqrt(N)
    limit = float(closed_form(x).value)
    for N in (1000, 10**4, 10**5, 10**6):
        s = scaled_gap(SequenceSpec(N), x).scaled_width
        assert s >= limit - 10 * x.denominator / math.sqrt(N)
        assert abs(s - limit) <= 10 * x.denominator / math.sqrt(N)


def test_irrational_points_decay_like_inverse_sqrt():
    pts = golden_points(40)
    means = {}
    for N in (10**4, 10**6):
        spec = SequenceSpec(N)
        means[N] = np.mean([scaled_gap(spec, x).scaled_width for x in pts])
        assert means[N] < 20 / math.sqrt(N)
    assert means[10**4] / means[10**6] == pytest.approx(10, rel=0.5)


def test_root_difference_accuracy():
    rng = np.random.default_rng(20240601)
    with mpmath.workdps(50):
        for _ in range(100):
            n1 = int(rng.integers(1, 10**12))
            n2 = n1 + int(rng.integers(1, 10**4))
            ref = mpmath.sqrt(n2) - mpmath.sqrt(n1)
            got = root_difference(n2, n1)
            assert abs(got - ref) / ref <= 1e-12


def test_gap_width_accuracy():
    rng = np.random.default_rng(7)
    xs = [x for x in farey_sequence(8) if 0 < x < 1]
    for _ in range(100):
        N = int(rng.integers(10**3, 10**8))
        x = xs[int(rng.integers(len(xs)))]
        m = exact_gap_at(SequenceSpec(N), x)
        with mpmath.workdps(50):
            s1, s2 = mpmath.sqrt(m.lower_radicand), mpmath.sqrt(m.upper_radicand)
            ref = (s2 - mpmath.floor(s2)) - (s1 - mpmath.floor(s1))
            assert abs(m.width - ref) / ref <= 1e-12


def test_alpha3_width_high_precision():
    m = exact_gap_at(SequenceSpec(10**9, alpha=3), F(1, 3))
    with mpmath.workdps(60):
        s1, s2 = mpmath.cbrt(m.lower_radicand), mpmath.cbrt(m.upper_radicand)
        ref = (s2 - mpmath.floor(s2)) - (s1 - mpmath.floor(s1))
        assert abs(mpmath.mpf(m.width) - ref) / ref < mpmath.mpf(10) ** -28


def test_parallel_scan_is_bit_identical():
    spec = SequenceSpec(2 * 10**7)
    for x in (F(1, 2), F(2, 7), F(0)):
        serial = scaled_gap(spec, x, workers=1)
        parallel = scaled_gap(spec, x, workers=3)
        assert serial == parallel


def test_parallel_profile_is_bit_identical():
    spec = SequenceSpec(50000, a=3)
    assert gap_profile(spec, 6, workers=1) == gap_profile(spec, 6, workers=2)


def test_fractional_parts_match_brute():
    spec = SequenceSpec(ORACLE_N, alpha=3, a=2, b=1)
    got = np.sort(fractional_parts(spec))
    ref = np.array([float(f) for f, _ in brute_parts(3, 2, 1)])
    assert got.shape == ref.shape
    assert np.max(np.abs(got - ref)) < 1e-13


def test_background_mean_and_tail():
    N = 20000
    h = background_scan(SequenceSpec(N))
    assert h.mode == "full"
    assert h.count == N - math.isqrt(N)
    assert h.mean_raw == pytest.approx(1 / (N - math.isqrt(N)), rel=0.01)
    assert -3.6 <= h.tail_exponent <= -2.4
    assert h.exp_rate > 0


def test_background_small():
    h = background_scan(SequenceSpec(400))
    assert h.counts.sum() > 0
    assert (h.scaled > 0).all()


def test_background_guard():
    with pytest.raises(GuardError):
        background_scan(SequenceSpec(10**6), mode="full", max_full_n=10**5)


def test_background_env_guard(monkeypatch):
    monkeypatch.setenv("GAPS_MAX_MEMORY_MB", "1")
    with pytest.raises(GuardError):
        background_scan(SequenceSpec(10**6), mode="full")


def test_background_sampling_mode():
    h = background_scan(SequenceSpec(10**5), sample_budget=50, mode="sample")
    assert h.mode == "sample"
    assert h.count == 50
    assert (h.scaled > 0).all()


@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1, 0.2, 0.3, 1 / math.e])
def test_min_n_estimate_residual(eps):
    N = min_N_estimate(eps)
    assert abs(outlier_residual(N, eps)) < 1e-9
    # larger root: fewer than one outlier beyond it
    assert outlier_residual(2 * N, eps) < 0


def test_min_n_estimate_no_root_for_large_eps():
    # N*exp(-3 eps N^(1/3)) < 1 for every N >= 1 once eps > 1/e
    for eps in (1.0, 5.0, 100.0):
        assert min_N_estimate(eps) == 1.0
        assert max(outlier_residual(N, eps) for N in np.logspace(0, 12, 200)) < 0


def test_min_n_estimate_monotone():
    values = [min_N_estimate(e) for e in (0.02, 0.05, 0.1, 0.2)]
    assert values == sorted(values, reverse=True)


def test_min_n_estimate_rejects_nonpositive():
    with pytest.raises(DomainError):
        min_N_estimate(0)
