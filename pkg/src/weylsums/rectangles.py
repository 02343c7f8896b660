"""Rectangle combinatorics for the large-value structure of the sup profile.

A collection of axis-parallel rectangles in [0,1]^2 at scale (N, alpha)
has cells of width ~ N^(alpha-2) and height ~ N^(2*alpha-4); it is
*one-dimensional* when no vertical line meets more than two of the
x-projections.  Collections built here tile the x-axis with dyadic cells,
so the overlap bound holds by construction and is re-checked by an
independent sweep line.

Rectangles are grouped by the denominator q of the Dirichlet approximant
of their witness time (the time where the sup is attained); whenever the
approximant window is narrow enough this assignment is unique, giving a
disjoint partition with an explicit bucket for rectangles whose witness
fails the window at finite N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diophantine import DiophClass, Rational, classify_time, window_competitors
from .evaluate import WeylScale
from .supremum import MaxProfile


@dataclass(frozen=True)
class Rect:
    """Axis-parallel rectangle at a large-value scale, with its witness.

    Width and height are dyadic roundings of N^(alpha-2) and
    N^(2*alpha-4) (within a factor 2 of each), and the rectangle stays
    inside [0,1]^2.  The witness is the profile node that caused the
    rectangle to be emitted.
    """

    x_interval: tuple[float, float]
    t_interval: tuple[float, float]
    scale: WeylScale
    witness_x: float = math.nan
    witness_t: float = math.nan
    witness_value: float = math.nan

    def __post_init__(self):
        (xl, xh), (tl, th) = self.x_interval, self.t_interval
        if not (0.0 <= xl < xh <= 1.0 and 0.0 <= tl < th <= 1.0):
            raise ValueError(f"rectangle {self.x_interval} x {self.t_interval} "
                             "is not inside [0,1]^2")
        for span, target, label in ((xh - xl, self.scale.rect_width, "width"),
                                    (th - tl, self.scale.rect_height, "height")):
            if not 0.5 * target <= span <= 2.0 * target * (1 + 1e-12):
                raise ValueError(
                    f"rectangle {label} {span:g} is off the scale target {target:g} "
                    f"by more than a factor 2"
                )


@dataclass(frozen=True)
class OneDimCollection:
    """Rectangles at a common scale, intended to be one-dimensional."""

    rects: tuple[Rect, ...]
    scale: WeylScale

    def __len__(self) -> int:
        return len(self.rects)


@dataclass
class QPartition:
    """Rectangles grouped by witness-approximant denominator.

    ``unassigned`` collects rectangles whose witness time fails the
    approximation window (possible at finite N with c = 1) -- reported,
    never dropped.  ``ambiguous`` lists (rect, competitors) pairs where
    more than one fraction fit the window, which the uniqueness argument
    rules out once 2^(2m) is small next to N.
    """

    classes: dict[int, list[Rect]] = field(default_factory=dict)
    unassigned: list[Rect] = field(default_factory=list)
    ambiguous: list[tuple[Rect, list[Rational]]] = field(default_factory=list)
    assignments: dict[Rect, DiophClass] = field(default_factory=dict)

    def total(self) -> int:
        return sum(len(v) for v in self.classes.values()) + len(self.unassigned)


@dataclass(frozen=True)
class LevelSetReport:
    """Interval cover of {x : sup_t |w_N(x,t)| >= c N^alpha} with its measure."""

    alpha: float
    N: int
    threshold_constant: float
    intervals: tuple[tuple[float, float], ...]
    total_measure: float


def _dyadic_floor(v: float) -> float:
    return 2.0 ** math.floor(math.log2(v))


def build_collection(profile: MaxProfile, alpha: float, threshold_constant: float = 1.0,
                     ) -> OneDimCollection:
    """Rectangles around every profile exceedance of threshold_constant * N^alpha.

    The x-axis is tiled by dyadic cells of width ~ N^(alpha-2); each cell
    holding at least one exceedance node emits one rectangle whose
    t-interval of height ~ N^(2*alpha-4) is centered on the argmax time
    of the best node in the cell (the witness).  Cells are disjoint
    except at endpoints, so the collection is one-dimensional by
    construction.
    """
    N = profile.N
    scale = WeylScale(N, alpha)
    thr = threshold_constant * N**alpha
    if profile.certificate.max_undershoot >= thr:
        raise ValueError(
            f"profile undershoot {profile.certificate.max_undershoot:g} cannot "
            f"resolve the threshold {thr:g}"
        )
    width = _dyadic_floor(scale.rect_width)
    height = min(_dyadic_floor(scale.rect_height), 1.0)
    exceed = np.nonzero(profile.sup_values >= thr)[0]
    if exceed.size == 0:
        return OneDimCollection((), scale)
    tiles: dict[int, int] = {}
    for j in exceed.tolist():
        tile = min(int(profile.x[j] / width), int(round(1.0 / width)) - 1)
        if tile not in tiles or profile.sup_values[j] > profile.sup_values[tiles[tile]]:
            tiles[tile] = j
    rects = []
    for tile in sorted(tiles):
        j = tiles[tile]
        t_w = float(profile.argmax_times[j])
        t_lo = min(max(t_w - height / 2.0, 0.0), 1.0 - height)
        rects.append(Rect(
            x_interval=(tile * width, (tile + 1) * width),
            t_interval=(t_lo, t_lo + height),
            scale=scale,
            witness_x=float(profile.x[j]),
            witness_t=t_w,
            witness_value=float(profile.sup_values[j]),
        ))
    return OneDimCollection(tuple(rects), scale)


def verify_one_dimensional(coll: OneDimCollection) -> tuple[bool, float | None]:
    """Sweep-line check that no x is covered by three x-projections.

    Returns (True, None), or (False, witness) with witness inside the
    first triply-covered region.
    """
    events = []
    for r in coll.rects:
        xl, xh = r.x_interval
        events.append((xl, 0, xh))
        events.append((xh, 1, xh))
    events.sort(key=lambda e: (e[0], e[1]))
    active: list[float] = []
    for coord, kind, hi in events:
        if kind == 0:
            active.append(hi)
            if len(active) >= 3:
                return False, 0.5 * (coord + min(active))
        else:
            active.remove(hi)
    return True, None


def partition_by_q(coll: OneDimCollection, delta: float, c: float) -> QPartition:
    """Group rectangles by the approximant denominator of their witness time.

    Requires alpha >= 3/4 so the window is narrow enough for the
    disjointness argument.  Witnesses failing the window land in
    ``unassigned``; rectangles whose window admits a second fraction are
    recorded in ``ambiguous`` (still assigned to the canonical
    approximant).
    """
    if coll.scale.alpha < 0.75:
        raise ValueError(f"partition requires alpha >= 3/4, got {coll.scale.alpha}")
    part = QPartition()
    for r in coll.rects:
        cls = classify_time(r.witness_t % 1.0, coll.scale, delta, c)
        part.assignments[r] = cls
        if not cls.passes_lemma:
            part.unassigned.append(r)
            continue
        competitors = window_competitors(r.witness_t % 1.0, coll.scale, c)
        if len(competitors) > 1:
            part.ambiguous.append((r, competitors))
        part.classes.setdefault(cls.approximant.q, []).append(r)
    return part


def count_vs_bound(coll: OneDimCollection, epsilon: float, amplitude: float = 1.0,
                   ) -> tuple[int, float, float]:
    """Rectangle count against N^(5(1-alpha)+epsilon).

    Verifies that every witness value reaches amplitude * N^alpha, then
    returns (count, bound, count/bound).  The trivial cap on any
    one-dimensional collection at this scale is ~ 2 N^(2-alpha) cells.
    """
    N, alpha = coll.scale.N, coll.scale.alpha
    floor = amplitude * N**alpha
    for r in coll.rects:
        if not r.witness_value >= floor:
            raise ValueError(
                f"witness value {r.witness_value:g} below the required {floor:g}"
            )
    count = len(coll)
    bound = N ** (5.0 * (1.0 - alpha) + epsilon)
    return count, bound, count / bound


def level_set(profile: MaxProfile, alpha: float, c: float) -> LevelSetReport:
    """Merged interval cover of the profile cells exceeding c * N^alpha.

    Adjacent exceedance cells fuse into maximal intervals; the reported
    measure overestimates the true cover by at most one cell width per
    interval.
    """
    N = profile.N
    thr = c * N**alpha
    if profile.certificate.max_undershoot > 0.25 * thr:
        raise ValueError(
            f"profile undershoot {profile.certificate.max_undershoot:g} exceeds "
            f"a quarter of the threshold {thr:g}"
        )
    mask = profile.sup_values >= thr
    idx = np.nonzero(mask)[0]
    intervals: list[tuple[float, float]] = []
    if idx.size:
        # cells tile [0,1) contiguously, so runs of consecutive indices
        # are exactly the maximal exceedance intervals
        run_start = prev = int(idx[0])
        for j in idx[1:].tolist():
            if j != prev + 1:
                intervals.append((profile.x[run_start],
                                  profile.x[prev] + profile.cell_width[prev]))
                run_start = j
            prev = j
        intervals.append((profile.x[run_start],
                          profile.x[prev] + profile.cell_width[prev]))
    total = sum(hi - lo for lo, hi in intervals)
    return LevelSetReport(
        alpha=alpha,
        N=N,
        threshold_constant=c,
        intervals=tuple(intervals),
        total_measure=float(total),
    )
