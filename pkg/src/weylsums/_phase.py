"""Reduction of quadratic phases n*x + n^2*t modulo 1 without catastrophic roundoff.

The sums computed in this package have phases n*x + n^2*t with n^2 as large
as ~10^16.  Reducing such a phase mod 1 in plain double precision loses up
to 8 significant digits, which is fatal for the 1e-9*N accuracy contracts.
Two remedies are used:

* every float is an exact binary rational, so phases of float (or Fraction)
  arguments can be reduced with exact integer arithmetic;
* for bulk array work, an error-free Dekker two-product recovers the
  rounding residue of n^2 * t, which is added back after the mod-1 step.

Both paths return phases in [0, 1) accurate to a few units in the last
place, independent of n.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker splitting constant


def as_fraction(v) -> Fraction:
    """Exact rational value of an int, float, or Fraction input."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if not math.isfinite(f):
            raise ValueError(f"non-finite value {v!r}")
        return Fraction(f)
    raise TypeError(f"expected int, float, or Fraction, got {type(v).__name__}")


def quad_phase_fractions(N: int, x, t) -> np.ndarray:
    """Phases (n*x + n^2*t) mod 1 for n = 1..N, by exact integer arithmetic.

    Cost is one big-int multiply-add per term; the only rounding is the
    final correctly-rounded int/int division, so each entry is accurate
    to one ulp.
    """
    fx = as_fraction(x) % 1
    ft = as_fraction(t) % 1
    qx, qt = fx.denominator, ft.denominator
    g = math.gcd(qx, qt)
    D = qx // g * qt
    ax = fx.numerator * (D // qx)
    at = ft.numerator * (D // qt)
    out = np.empty(N, dtype=np.float64)
    num = 0
    step = ax + at          # increment at n: ax + (2n-1)*at
    inc = 2 * at
    for n in range(N):
        num = (num + step) % D
        out[n] = num / D    # big-int true division is correctly rounded
        step += inc
    return out


def two_prod(a, b):
    """Error-free product: returns (p, e) with p = fl(a*b) and a*b = p + e.

    Dekker's algorithm; valid while no intermediate overflows, i.e. for
    |a|, |b| < 2^510.
    """
    p = a * b
    ah = a * _SPLITTER
    ah = ah - (ah - a)
    al = a - ah
    bh = b * _SPLITTER
    bh = bh - (bh - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def frac_linear(n: np.ndarray, x: float) -> np.ndarray:
    """(n*x) mod 1 for an integer-valued float array n, to a few ulp."""
    p, e = two_prod(n, x)
    f = (p - np.floor(p)) + e
    return f - np.floor(f)


def frac_quad(n: np.ndarray, x: float, t: float) -> np.ndarray:
    """(n*x + n^2*t) mod 1 for integer-valued float n with n^2 exact (< 2^53)."""
    p1, e1 = two_prod(n, x)
    p2, e2 = two_prod(n * n, t)
    f = (p1 - np.floor(p1)) + (p2 - np.floor(p2)) + (e1 + e2)
    return f - np.floor(f)


class PhaseAccumulator:
    """Running phase mod 1 kept as a double-word (hi, lo) pair.

    Supports the second-difference update used by the point evaluators:
    repeated ``add`` calls accumulate increments with a two-sum
    compensation, so the phase error after N steps stays at the few-ulp
    level rather than the N*u of a naive accumulator.
    """

    __slots__ = ("hi", "lo")

    def __init__(self, value: float = 0.0):
        self.hi = value - math.floor(value)
        self.lo = 0.0

    def add(self, delta: float) -> None:
        s = self.hi + delta
        bv = s - self.hi
        err = (self.hi - (s - bv)) + (delta - bv)
        self.lo += err
        s -= math.floor(s)
        # fold the compensation in whenever it has grown past one ulp of hi
        if abs(self.lo) > 1e-14:
            s2 = s + self.lo
            self.lo = self.lo - (s2 - s)
            s = s2 - math.floor(s2)
        self.hi = s

    @property
    def value(self) -> float:
        v = self.hi + self.lo
        return v - math.floor(v)


# Exact power sums 1^k + ... + N^k for the derivative envelopes.

def sum_n2(N: int) -> int:
    return N * (N + 1) * (2 * N + 1) // 6


def sum_n4(N: int) -> int:
    return N * (N + 1) * (2 * N + 1) * (3 * N * N + 3 * N - 1) // 30


def sum_n6(N: int) -> int:
    N2 = N * N
    return N * (N + 1) * (2 * N + 1) * (3 * N2 * N2 + 6 * N2 * N - 3 * N + 1) // 42


def sum_n8(N: int) -> int:
    N2 = N * N
    N3 = N2 * N
    poly = 5 * N3 * N3 + 15 * N2 * N3 + 5 * N2 * N2 - 15 * N3 - N2 + 9 * N - 3
    return N * (N + 1) * (2 * N + 1) * poly // 90


_POWER_SUMS = (sum_n2, sum_n4, sum_n6, sum_n8)


def t_derivative_bound(N: int, order: int) -> float:
    """Uniform bound on |d^r/dt^r of the quadratic sum|: (2*pi)^r * sum n^(2r)."""
    if not 1 <= order <= 4:
        raise ValueError("derivative bounds available for orders 1..4")
    return (2.0 * math.pi) ** order * float(_POWER_SUMS[order - 1](N))
