"""Exact rational approximation and the arithmetic support around it.

Everything here works on the circle R/Z: fractions are kept in lowest
terms with numerator in [0, q), and distances are measured to the nearest
representative mod 1 (so 0/1 also covers points just below 1).

The central operation is the best-approximation machinery: continued
fractions of the exact binary rational underlying a float, Dirichlet
approximants a/q with q <= Q and |t - a/q| < 1/(qQ), and the classifier
that tags a time t by how well its approximant fits inside the window

    q <= c log(N)^2 2^m,   |t - a/q| <= c log(N)^2 2^m / (q N^2),

where 2^m is the dyadic size of N^(2-2*alpha).  Times attaining large
sup values are forced into this window, which is what the rectangle
partition in `rectangles` keys on.  Logs are natural throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._phase import as_fraction
from .evaluate import WeylScale


@dataclass(frozen=True, order=True)
class Rational:
    """Reduced fraction a/q with 0 <= a < q, as a point of R/Z."""

    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"denominator must be >= 1, got {self.q}")
        if not 0 <= self.a < max(self.q, 1) and not (self.a == 0 and self.q == 1):
            raise ValueError(f"numerator {self.a} not in [0, {self.q})")
        if math.gcd(self.a, self.q) != 1:
            raise ValueError(f"{self.a}/{self.q} is not reduced")

    @classmethod
    def reduced(cls, a: int, q: int) -> "Rational":
        if q < 1:
            raise ValueError(f"denominator must be >= 1, got {q}")
        a %= q
        g = math.gcd(a, q)
        return cls(a // g, q // g)

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.q)

    @property
    def odd_denominator(self) -> bool:
        return self.q % 2 == 1

    def circle_distance(self, t) -> Fraction:
        d = (as_fraction(t) - Fraction(self.a, self.q)) % 1
        return min(d, 1 - d)

    def __str__(self) -> str:
        return f"{self.a}/{self.q}"


@dataclass(frozen=True)
class CFExpansion:
    """Partial quotients and convergents of a number in [0, 1).

    Quotients are those of [0; a1, a2, ...] (all positive); convergent k
    is p_k/q_k with |t - p_k/q_k| < 1/(q_k q_{k+1}) and strictly
    increasing denominators.  Expansions are truncated at the first
    denominator exceeding the requested bound; exact rationals simply
    terminate early.
    """

    partial_quotients: tuple[int, ...]
    convergents: tuple[Rational, ...]


def continued_fraction(t, q_max: int) -> CFExpansion:
    """Continued fraction of t (exact on the underlying binary rational).

    Returns all convergents with denominator <= q_max in increasing
    denominator order.
    """
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    ft = as_fraction(t)
    if not 0 <= ft < 1:
        raise ValueError(f"t must lie in [0, 1), got {t}")
    quotients: list[int] = []
    convergents: list[Rational] = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1
    frac = ft
    while frac:
        inv = 1 / frac
        a = int(inv)
        frac = inv - a
        p_new = a * p_cur + p_prev
        q_new = a * q_cur + q_prev
        if q_new > q_max:
            break
        quotients.append(a)
        convergents.append(Rational.reduced(p_new, q_new))
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_new, q_new
    return CFExpansion(tuple(quotients), tuple(convergents))


def dirichlet_approx(t, Q: int) -> tuple[Rational, float]:
    """Reduced a/q with q <= Q and |t - a/q| < 1/(qQ), plus the distance.

    The final continued-fraction convergent with denominator <= Q always
    satisfies the inequality; a semiconvergent with a larger admissible
    denominator replaces it when it is strictly closer and still meets
    its own Dirichlet bound.  Existence is a theorem, so this never
    fails.  Distances are circle distances (nearest representative
    mod 1).
    """
    if Q < 1:
        raise ValueError(f"Q must be >= 1, got {Q}")
    ft = as_fraction(t)
    if not 0 <= ft < 1:
        raise ValueError(f"t must lie in [0, 1), got {t}")
    cf = continued_fraction(t, Q)
    best = Rational(0, 1)
    if cf.convergents:
        best = cf.convergents[-1]
        # semiconvergent correction: extend the last two convergents as far
        # as Q allows and keep the result if closer and still Dirichlet-admissible
        if len(cf.convergents) >= 2:
            p2, q2 = cf.convergents[-2].a, cf.convergents[-2].q
        else:
            p2, q2 = 0, 1
        p1, q1 = best.a, best.q
        j = (Q - q2) // q1
        if j >= 1:
            cand = Rational.reduced(j * p1 + p2, j * q1 + q2)
            if cand.q <= Q:
                d_cand = cand.circle_distance(ft)
                if d_cand < best.circle_distance(ft) and d_cand * cand.q * Q < 1:
                    best = cand
    return best, float(best.circle_distance(ft))


@lru_cache(maxsize=8)
def _totient_table(limit: int) -> np.ndarray:
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    return phi


def totient(q: int) -> int:
    """Euler phi(q), from the shared sieve table."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    limit = 1 << max(10, q.bit_length())
    return int(_totient_table(limit)[q])


def totient_sum(Q: int) -> int:
    """sum_{q <= Q} phi(q), with phi(1) = 1; asymptotically (3/pi^2) Q^2."""
    if Q < 1:
        raise ValueError(f"Q must be >= 1, got {Q}")
    limit = 1 << max(10, Q.bit_length())
    return int(_totient_table(limit)[1 : Q + 1].sum())


@dataclass(frozen=True)
class DiophClass:
    """Dirichlet data of a time t at scale N with the window pass/fail.

    m is the dyadic level with 2^m the scale of N^(2-2*alpha); the
    approximant comes from dirichlet_approx at Q = N.  ``passes_lemma``
    records whether (q, distance) fit inside the c log(N)^2 2^m window,
    and ``regime`` splits small denominators (q <= N^delta) from large.
    """

    approximant: Rational
    distance: float
    m: int
    regime: str  # "small_q" | "large_q"
    passes_lemma: bool
    delta: float
    q_bound: float
    distance_bound: float


def classify_time(t, scale: WeylScale, delta: float, c: float) -> DiophClass:
    """Classify t by its Dirichlet approximant at Q = N against the window.

    The uniqueness of a passing approximant needs 2^(2m) <= N, i.e.
    alpha >= 3/4; smaller alpha down to 1/2 is accepted but the window
    may then admit no or several fractions.
    """
    if scale.alpha < 0.5:
        raise ValueError(f"alpha must be >= 1/2, got {scale.alpha}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if c <= 0.0:
        raise ValueError(f"c must be positive, got {c}")
    N = scale.N
    m = round((2.0 - 2.0 * scale.alpha) * math.log2(N)) if N > 1 else 0
    approx, dist = dirichlet_approx(t, N)
    window = c * math.log(N) ** 2 * 2.0**m if N > 1 else c
    q_bound = window
    dist_bound = window / (approx.q * N * N)
    passes = approx.q <= q_bound and dist <= dist_bound
    regime = "small_q" if approx.q <= N**delta else "large_q"
    return DiophClass(
        approximant=approx,
        distance=dist,
        m=m,
        regime=regime,
        passes_lemma=passes,
        delta=delta,
        q_bound=q_bound,
        distance_bound=dist_bound,
    )


def window_competitors(t, scale: WeylScale, c: float) -> list[Rational]:
    """All reduced fractions fitting the classify_time window at t.

    Scans every q up to the window bound and tests the nearest a/q; used
    to confirm that at most one fraction passes (which is what makes the
    rectangle partition well-defined when 2^(2m) <= N).
    """
    N = scale.N
    m = round((2.0 - 2.0 * scale.alpha) * math.log2(N)) if N > 1 else 0
    window = c * math.log(N) ** 2 * 2.0**m if N > 1 else c
    ft = as_fraction(t) % 1
    out = []
    for q in range(1, int(window) + 1):
        a = round(ft * q) % q
        g = math.gcd(a, q)
        if g != 1:
            continue
        r = Rational(a, q)
        if r.circle_distance(ft) <= window / (q * N * N):
            out.append(r)
    return out


@dataclass(frozen=True)
class ArcBox:
    """Major-arc rectangle: |x - b/q| <= x_radius, |t - a/q| <= t_radius."""

    x_center: Rational
    t_center: Rational
    x_radius: float
    t_radius: float
    q: int
    a: int
    b: int


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def major_arc_points(N: int, q_max: int, odd_only: bool,
                     prime_only: bool = False) -> list[ArcBox]:
    """Boxes around (b/q, a/q), 1 <= a,b < q <= q_max, gcd(a,q) = 1.

    Radii are 1/(100N) in x and 1/(100N^2) in t, inside which the sum is
    bounded below by a constant times N/sqrt(q) (for odd q).  q_max may
    not exceed sqrt(N).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if q_max * q_max > N:
        raise ValueError(f"q_max={q_max} exceeds sqrt(N) for N={N}")
    boxes = []
    xr, tr = 1.0 / (100 * N), 1.0 / (100 * N * N)
    for q in range(2, q_max + 1):
        if odd_only and q % 2 == 0:
            continue
        if prime_only and not _is_prime(q):
            continue
        for a in range(1, q):
            if math.gcd(a, q) != 1:
                continue
            for b in range(1, q):
                boxes.append(ArcBox(
                    x_center=Rational.reduced(b, q),
                    t_center=Rational(a, q),
                    x_radius=xr,
                    t_radius=tr,
                    q=q, a=a, b=b,
                ))
    return boxes


def jarnik_witnesses(beta: float, q_range: tuple[int, int], odd_only: bool,
                     samples_per_q: int, prime_only: bool = False,
                     ) -> list[tuple[float, Rational]]:
    """Sample points within q^-(2+beta) of reduced fractions a/q.

    Points x with |x - a/q| <= q^-(2+beta) for infinitely many a/q form
    the well-approximable set studied via such witnesses; each admissible
    q in [lo, hi] contributes ``samples_per_q`` evenly placed offsets per
    fraction.  An empty range yields an empty list.
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    lo, hi = q_range
    if lo < 3:
        raise ValueError(f"q range must start at 3 or above, got {lo}")
    if samples_per_q < 1:
        raise ValueError(f"samples_per_q must be >= 1, got {samples_per_q}")
    out = []
    for q in range(lo, hi + 1):
        if odd_only and q % 2 == 0:
            continue
        if prime_only and not _is_prime(q):
            continue
        radius = float(q) ** -(2.0 + beta)
        offsets = np.linspace(-radius, radius, samples_per_q) if samples_per_q > 1 else [0.0]
        for a in range(1, q):
            if math.gcd(a, q) != 1:
                continue
            for off in offsets:
                out.append(((a / q + float(off)) % 1.0, Rational(a, q)))
    return out
