"""Inequality checkers: exact anchor cases, hypothesis gates, seeded sweeps."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylsums._phase import quad_phase_fractions
from weylsums.calibration import (BOURGAIN_RATIO_CEILING,
                                  MAJOR_ARC_RATIO_FLOOR, SHARPNESS_FRACTION)
from weylsums.checks import (RatioSummary, _iroot, bourgain_envelope,
                             bourgain_sweep, classical_weyl_ratio,
                             completion_check, jarnik_beta, jarnik_containment,
                             major_arc_lower, mv_local_check, sharpness_witness)

RNG = np.random.default_rng(141421)


def naive_abs(N, x, t):
    return abs(complex(np.exp(2j * np.pi * quad_phase_fractions(N, x, t)).sum()))


class TestBourgainEnvelope:
    def test_integer_time(self):
        r = bourgain_envelope(256, 0.3, 0.0)
        assert r.params["q"] == 1 and r.params["distance"] == 0.0
        assert r.rhs_envelope == pytest.approx(math.log(256) * 256)
        assert r.ratio <= 1.0

    def test_third_time(self):
        r = bourgain_envelope(256, 0.0, Fraction(1, 3))
        assert r.params["q"] == 3
        assert r.rhs_envelope == pytest.approx(math.log(256) * 256 / math.sqrt(3))
        assert r.lhs == pytest.approx(naive_abs(256, 0.0, 1 / 3), rel=1e-9)

    def test_sweep_bounded(self):
        s = bourgain_sweep(512, 2000, seed=99)
        assert s.max_ratio <= BOURGAIN_RATIO_CEILING
        assert s.max_ratio >= s.p99 >= s.p90 >= s.p50

    def test_alternative_grouping(self):
        r1 = bourgain_envelope(128, 0.2, 0.1234, grouping="literal")
        r2 = bourgain_envelope(128, 0.2, 0.1234, grouping="product-root")
        assert r1.lhs == r2.lhs
        assert r1.rhs_envelope != r2.rhs_envelope
        with pytest.raises(ValueError):
            bourgain_envelope(128, 0.2, 0.1234, grouping="bogus")


class TestClassicalWeylRatio:
    def test_q1_block_is_unimodular(self):
        r = classical_weyl_ratio(240, 1, 0, 0.2, 1e-9)
        assert r.ratio == pytest.approx(1.0 / math.sqrt(math.log(2)), rel=1e-6)

    def test_against_direct_summation(self):
        N, q, a = 240, 3, 1
        x, t = 0.2, 1 / 3 + 1e-7
        r = classical_weyl_ratio(N, q, a, x, t)
        # independent route: sum the q residue-block factor and the
        # progression separately at 1e-16 phase accuracy
        block = complex(np.exp(2j * np.pi * quad_phase_fractions(q, x, t)).sum())
        lq = N // q
        prog = sum(
            np.exp(2j * np.pi * float((Fraction(l * q) * Fraction(x)
                                       + Fraction(l * q) ** 2 * Fraction(t)) % 1))
            for l in range(0, lq + 1)
        )
        assert r.lhs == pytest.approx(abs(block * prog), rel=1e-8)
        assert r.rhs_envelope == pytest.approx(
            math.sqrt(q * math.log(q)) * abs(prog), rel=1e-8)

    def test_recorded_ratio_bounded(self):
        r = classical_weyl_ratio(210, 5, 2, 0.7, 2 / 5 + 1e-8)
        assert np.isfinite(r.ratio)
        assert r.ratio <= 2.0  # block modulus <= q, so ratio <= sqrt(q/log q)

    def test_rejects_far_time(self):
        with pytest.raises(ValueError):
            classical_weyl_ratio(100, 5, 2, 0.1, 0.7)


class TestMajorArcLower:
    def test_gauss_case_exact(self):
        r = major_arc_lower(300, 5, 1, 1, 0.0, 0.0)
        assert abs(r.lhs - 300 / math.sqrt(5)) <= 1e-8 * 300
        assert r.ratio == pytest.approx(1.0, abs=1e-8)

    def test_offset_case(self):
        r = major_arc_lower(301, 7, 3, 2, 1.0 / (200 * 301), 0.0)
        assert r.ratio >= 0.1

    def test_rejects_even_q(self):
        with pytest.raises(ValueError):
            major_arc_lower(300, 4, 1, 1, 0.0, 0.0)

    def test_rejects_hypothesis_violations(self):
        with pytest.raises(ValueError):
            major_arc_lower(300, 5, 5, 1, 0.0, 0.0)
        with pytest.raises(ValueError):
            major_arc_lower(300, 21, 2, 1, 0.0, 0.0)  # q > sqrt(N)
        with pytest.raises(ValueError):
            major_arc_lower(300, 5, 1, 1, 1.0 / 300, 0.0)

    def test_empirical_floor_sweep(self):
        # random admissible (N, q, a, b, offsets): the ratio floor is the
        # calibrated constant, with exact Gauss cases pinning ratio 1
        for _ in range(120):
            q = int(RNG.choice([3, 5, 7, 9, 11, 13, 17, 21, 25, 31]))
            N = int(RNG.integers(q * q, 2049))
            a = int(RNG.choice([a for a in range(1, q) if math.gcd(a, q) == 1]))
            b = int(RNG.integers(1, q))
            dx = float((RNG.random() - 0.5) / (50 * N))
            dt = float((RNG.random() - 0.5) / (50 * N * N))
            r = major_arc_lower(N, q, a, b, dx, dt)
            assert r.ratio >= MAJOR_ARC_RATIO_FLOOR, r.params


class TestMVLocal:
    def test_short_window_ratios_finite(self):
        s = mv_local_check(64, 1.0 / 64, 256, seed=7)
        assert np.isfinite(s.max_ratio) and s.max_ratio > 0

    def test_euclidean_window(self):
        s = mv_local_check(64, 64.0**-2, 256, seed=7)
        assert s.max_ratio < 10.0

    def test_bit_reproducible(self):
        a = mv_local_check(128, 1.0 / 128, 512, seed=42)
        b = mv_local_check(128, 1.0 / 128, 512, seed=42)
        assert a == b

    def test_full_window_consistent_with_profile_norm(self, cache):
        from weylsums.supremum import lp_norm
        s = mv_local_check(64, 1.0, 256, n_windows=1, seed=3)
        norm = lp_norm(cache.get(64, 0.4), 4.0)
        envelope = 64.0**0.5 * 1.0 * 64.0**0.5
        # same quantity along two routes, up to the coarse t-resolution
        assert s.max_ratio * envelope == pytest.approx(norm, rel=0.1)


class TestCompletion:
    def test_summary_reproducible(self):
        a, _ = completion_check(64, 64, 100, seed=11)
        b, _ = completion_check(64, 64, 100, seed=11)
        assert a == b

    def test_ratios_and_lattice_rule(self):
        s, records = completion_check(128, 128, 300, seed=13)
        assert np.isfinite(s.max_ratio)
        for r in records:
            assert r.params["lattice_distance"] > 0.25 / 128**2

    def test_origin_documents_convention(self):
        # at (0,0) the ratio would be N / S_M(0,0) = N; the sampler excludes
        # the lattice precisely to stay clear of this degenerate weight
        from weylsums.evaluate import completion_sum
        assert completion_sum(64, 0, 0) == pytest.approx(1.0)
        assert naive_abs(64, 0.0, 0.0) == pytest.approx(64.0)

    def test_longer_sum_dominates(self):
        half, _ = completion_check(64, 128, 200, seed=17)
        full, _ = completion_check(128, 128, 200, seed=17)
        assert half.max_ratio <= full.max_ratio * 1.5 + 1.0


class TestSharpness:
    @pytest.mark.parametrize("N", [64, 256, 1000])
    def test_floor(self, N):
        r = sharpness_witness(N)
        assert r.passes and r.lhs >= SHARPNESS_FRACTION * N

    def test_real_part_dominates(self):
        # at x = 1e-6/N, t = 1e-7/N^2 every phase is below 2pi(1e-6 + 1e-7)
        N = 1000
        v = complex(np.exp(2j * np.pi * quad_phase_fractions(
            N, 1e-6 / N, 1e-7 / N**2)).sum())
        assert v.real >= 0.99 * N


class TestJarnik:
    def test_exponent_identity_exact(self):
        for _ in range(200):
            num = int(RNG.integers(76, 100))
            alpha = Fraction(num, 100)
            beta = jarnik_beta(alpha)
            assert Fraction(2, 1) / (2 + beta) == 4 * (1 - alpha)

    def test_sandwich_big_q(self):
        r = jarnik_containment(0.8, 10007, 0.05)
        assert r.passes
        assert r.params["N_q"] == 10007**2 * math.isqrt(10007) // 100 or r.params["N_q"] > 0
        # direct integer recheck of the sandwich
        N_q = r.params["N_q"]
        assert (100 * N_q) ** 2 < 10007**5 < (100 * (N_q + 1)) ** 2

    def test_small_q_rejected_with_threshold(self):
        with pytest.raises(ValueError, match="1e\\+04"):
            jarnik_containment(0.8, 101, 0.05)

    def test_rejects_even_q_and_bad_alpha(self):
        with pytest.raises(ValueError):
            jarnik_containment(0.8, 10006, 0.05)
        with pytest.raises(ValueError):
            jarnik_containment(0.5, 10007, 0.05)

    @settings(max_examples=100, deadline=None)
    @given(n=st.integers(1, 10**12), k=st.integers(1, 8))
    def test_iroot(self, n, k):
        r = _iroot(n, k)
        assert r**k <= n < (r + 1) ** k

    @pytest.mark.heavy
    def test_large_sum_witness(self):
        # N_q ~ 1e8 evaluation; minutes of runtime
        r = jarnik_containment(0.8, 10007, 0.05, evaluate=True)
        assert r.passes, (r.lhs, r.rhs_envelope)


def test_ratio_summary_quantile_ordering():
    s = RatioSummary.from_ratios(RNG.random(500), seed=1)
    assert s.max_ratio >= s.p99 >= s.p90 >= s.p50
    with pytest.raises(ValueError):
        RatioSummary.from_ratios([])
