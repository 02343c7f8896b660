"""Evaluator oracles: the three routes must agree, and closed forms must hold."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylsums._phase import PhaseAccumulator, quad_phase_fractions
from weylsums.evaluate import (GridSpec, WeylScale, completion_sum, eval_point,
                               eval_point_batch, eval_point_naive, eval_points,
                               eval_progression, eval_t_grid, eval_x_grid,
                               rescaled_arguments)

RNG = np.random.default_rng(314159)


def naive_oracle(N, x, t):
    """Independent double-loop reference, float64 with exact mod-1 phases."""
    return complex(np.exp(2j * np.pi * quad_phase_fractions(N, x, t)).sum())


class TestEvalPoint:
    def test_all_phases_zero(self):
        assert eval_point(5, 0, 0) == 5 + 0j

    def test_alternating_even_length(self):
        assert abs(eval_point(4, 0.5, 0)) < 1e-12

    def test_square_parity_matches_linear(self):
        # n^2 and n share parity, so t = 1/2 acts like x = 1/2
        assert abs(eval_point(3, 0, 0.5) - (-1)) < 1e-12
        assert abs(eval_point(3, 0, 0.5) - eval_point(3, 0.5, 0)) < 1e-12

    def test_complete_gauss_blocks(self):
        # q = 3 odd divides N = 12: each block has modulus sqrt(3)
        w = eval_point(12, Fraction(1, 3), Fraction(1, 3))
        assert abs(abs(w) - 12 / math.sqrt(3)) < 1e-10

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            eval_point(0, 0.1, 0.1)
        with pytest.raises(ValueError):
            eval_point(4, math.inf, 0.0)
        with pytest.raises(TypeError):
            eval_point(4.5, 0.1, 0.1)

    @pytest.mark.parametrize("N", [64, 256, 1024])
    def test_recurrence_matches_naive(self, N):
        for _ in range(20):
            x, t = RNG.random(), RNG.random()
            a, b = eval_point(N, x, t), eval_point_naive(N, x, t)
            assert abs(a - b) <= 1e-9 * N

    def test_trivial_bound(self):
        for _ in range(50):
            N = int(RNG.integers(1, 300))
            v = eval_point(N, RNG.random(), RNG.random())
            assert abs(v) <= N * (1 + 1e-9)


@settings(max_examples=150, deadline=None)
@given(x=st.floats(0, 1, exclude_max=True), t=st.floats(0, 1, exclude_max=True),
       N=st.integers(1, 200))
def test_conjugation_symmetry(x, t, N):
    a = eval_point(N, 1.0 - x, 1.0 - t)
    b = eval_point(N, x, t).conjugate()
    assert abs(a - b) <= 1e-9 * N


@settings(max_examples=80, deadline=None)
@given(x=st.floats(0, 1, exclude_max=True), t=st.floats(0, 1, exclude_max=True),
       N=st.integers(1, 128))
def test_periodicity_exact(x, t, N):
    # the shift must be exact (Fraction) -- adding 1.0 to a float in [1/2, 1)
    # already rounds away the last mantissa bit before evaluation
    base = eval_point(N, x, t)
    assert eval_point(N, Fraction(x) + 1, t) == base
    assert eval_point(N, x, Fraction(t) + 1) == base


class TestGrids:
    def test_x_grid_entries(self):
        g = eval_x_grid(4, 0, 8)
        assert abs(g[0] - 4) < 1e-12
        assert abs(g[4]) < 1e-12  # w_4(1/2, 0) = 0

    def test_x_grid_matches_point(self):
        g = eval_x_grid(64, 0.37, 128)
        for j in range(128):
            assert abs(g[j] - eval_point(64, Fraction(j, 128), 0.37)) <= 1e-9 * 64

    def test_x_grid_rejects_aliasing(self):
        with pytest.raises(ValueError):
            eval_x_grid(8, 0.1, 8)

    def test_t_grid_entries(self):
        g = eval_t_grid(3, 0, 16)
        assert abs(g[8] - (-1)) < 1e-12
        assert abs(eval_t_grid(2, 0, 8)[0] - 2) < 1e-12

    def test_t_grid_matches_point(self):
        g = eval_t_grid(32, 0.21, 2048)
        for k in range(0, 2048, 111):
            assert abs(g[k] - eval_point(32, 0.21, Fraction(k, 2048))) <= 1e-9 * 32

    def test_t_grid_rejects_aliasing(self):
        with pytest.raises(ValueError):
            eval_t_grid(8, 0.1, 64)

    def test_three_route_agreement(self):
        # recurrence vs naive vs DFT on shared nodes
        N, M = 128, 256
        t = RNG.random()
        g = eval_x_grid(N, t, M)
        for j in RNG.integers(0, M, 12):
            x = Fraction(int(j), M)
            assert abs(g[j] - eval_point(N, x, t)) <= 1e-9 * N
            assert abs(g[j] - eval_point_naive(N, x, t)) <= 1e-9 * N


class TestProgression:
    def test_reduces_to_plain_sum(self):
        assert abs(eval_progression(1, 5, 0, 0) - 5) < 1e-12

    def test_rescaling_identity(self):
        for _ in range(100):
            x, t = RNG.random(), RNG.random()
            p = eval_progression(3, 4, x, t)
            y, s = rescaled_arguments(3, x, t)
            assert abs(p - eval_point(4, y, s)) <= 1e-9 * 4

    def test_frozen_value(self):
        # naive 40-digit summation oracle
        v = eval_progression(2, 8, 0.3, 0.11)
        assert abs(v - (2.171777550668017 - 1.5084942386520424j)) < 1e-12

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            eval_progression(0, 4, 0.1, 0.1)
        with pytest.raises(ValueError):
            eval_progression(2**40, 2**40, 0.1, 0.1)


class TestCompletionSum:
    @pytest.mark.parametrize("M", [1, 2, 8, 13, 64])
    def test_origin_value_is_one(self, M):
        # only the h = M shift survives, with weight (1/M) * M
        assert abs(completion_sum(M, 0, 0) - 1.0) < 1e-9

    def test_frozen_oracle_values(self):
        # O(M^2) double-loop oracle at 40 digits
        assert abs(completion_sum(8, 0.3, 0.7) - 6.280784589443897) < 1e-10
        v = completion_sum(16, Fraction(1, 32), Fraction(1, 5))
        assert abs(v - 8.298430221935956) < 1e-10

    def test_matches_double_loop(self):
        M = 12
        x, t = RNG.random(), RNG.random()
        direct = sum(abs(naive_oracle(M, x + h / M, t)) / h for h in range(1, M + 1))
        assert abs(completion_sum(M, x, t) - direct) < 1e-9 * M


def test_eval_points_matches_single():
    xs = RNG.random(20)
    ts = RNG.random(20)
    vals = eval_points(100, xs, ts)
    for i in range(20):
        assert abs(vals[i] - eval_point(100, xs[i], ts[i])) <= 1e-9 * 100


def test_eval_point_batch_derivative():
    ts = np.array([0.123456])
    d = eval_point_batch(100, 0.3, ts, order=1)
    eps = 1e-9
    fd = (eval_point_naive(100, 0.3, 0.123456 + eps)
          - eval_point_naive(100, 0.3, 0.123456 - eps)) / (2 * eps)
    assert abs(d[1, 0] - fd) / abs(fd) < 1e-6


class TestPhaseAccumulator:
    def test_tracks_exact_sum_of_deltas(self):
        # the accumulator must follow the exact mod-1 sum of the float deltas
        # it is fed, to within 4*N*u after N steps
        x, t = 3 / 7, 2 / 11
        acc = PhaseAccumulator()
        exact = Fraction(0)
        for l in range(1, 2001):
            delta = x + (2 * l - 1) * t
            acc.add(delta)
            exact = (exact + Fraction(delta)) % 1
            err = abs(acc.value - float(exact))
            assert min(err, 1 - err) < 4 * 2000 * 2.3e-16

    def test_wraps_into_unit_interval(self):
        acc = PhaseAccumulator(0.75)
        acc.add(0.5)
        assert 0.0 <= acc.value < 1.0
        assert abs(acc.value - 0.25) < 1e-15


class TestDomainTypes:
    def test_weyl_scale_validation(self):
        WeylScale(16, 0.75)
        with pytest.raises(ValueError):
            WeylScale(0, 0.75)
        with pytest.raises(ValueError):
            WeylScale(16, 0.3)
        with pytest.raises(ValueError):
            WeylScale(16, 0.75, eta=0.5)

    def test_grid_spec_nodes(self):
        g = GridSpec(0.0, 8, 0.125)
        assert np.allclose(g.nodes(), np.arange(8) / 8)
        with pytest.raises(ValueError):
            GridSpec(0.0, 10, 0.2)
