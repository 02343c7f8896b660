"""Scaling experiments: exponents measured as log-log slopes over N sweeps.

Each experiment produces per-N values whose theoretical growth is a power
of N (times log factors); ``fit_exponent`` turns them into a least-squares
slope that the acceptance suite compares against the target exponent with
a fixed +0.3 desk-scale slack.  The measured quantities:

* maximal norm     -- || sup_t |w_N| ||_{L4(dx)}, target slope 3/4;
* level sets       -- |{x : sup_t |w_N| >= c N^alpha}|, target 3 - 4*alpha;
* rectangle counts -- #(one-dimensional collection at (N, alpha)),
                      target 5(1-alpha), trivial cap 2 - alpha;
* progressions     -- L4 maximal norm over {q, 2q, ..., kq}, equal to the
                      scale-k norm (k = floor(N/q)) by exact rescaling,
                      target q^(-3/4) at fixed N;
* restricted L4 integrals over one-dimensional collections at scale (N, 1),
  target N^(1/4) (8x8 Gauss-Legendre per cell);
* box counts of the union of level sets over N (reported, never asserted:
  a dimension is not a desk-scale observable).

Certified sup profiles dominate the cost, so campaigns share one
``ProfileCache`` across experiments; identical config and seed give
byte-identical reports.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calibration import DEFAULT_TOLERANCE
from .checks import RatioSummary, completion_check, mv_local_check
from .evaluate import eval_points
from .rectangles import (OneDimCollection, build_collection, level_set,
                         verify_one_dimensional)
from .serialize import params_hash, write_csv, write_json
from .supremum import MaxProfile, lp_norm, maximal_grid


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares power-law fit value ~ C * N^slope on log-log axes."""

    points: tuple[tuple[int, float], ...]
    slope: float
    intercept: float
    r_squared: float


def fit_exponent(points) -> ScalingFit:
    """OLS in (log N, log value); exact on synthetic power laws."""
    pts = tuple((int(n), float(v)) for n, v in points)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    ns = [n for n, _ in pts]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("N values must be strictly increasing")
    if any(v <= 0.0 for _, v in pts):
        raise ValueError("values must be positive")
    lx = np.log([n for n, _ in pts])
    ly = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    ss_res = float((resid**2).sum())
    r2 = 1.0 if ss_tot <= 1e-30 else 1.0 - ss_res / ss_tot
    return ScalingFit(points=pts, slope=float(slope), intercept=float(intercept),
                      r_squared=float(min(max(r2, 0.0), 1.0)))


@dataclass(frozen=True)
class CampaignConfig:
    """Sweep parameters; ``tolerance`` is the certificate gap in units of N^(3/4)."""

    N_list: tuple[int, ...]
    alpha_list: tuple[float, ...] = (0.85, 0.9, 0.95)
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 987654321
    output_dir: str = "campaign-out"
    c_list: tuple[float, ...] = (0.5, 1.0, 2.0)
    q_list: tuple[int, ...] = (1, 2, 4, 8)

    def __post_init__(self):
        if any(n < 16 for n in self.N_list):
            raise ValueError("all N must be >= 16")
        if not 0.0 < self.tolerance <= 1.0:
            raise ValueError(f"tolerance must lie in (0, 1], got {self.tolerance}")

    @classmethod
    def from_file(cls, path, **overrides) -> "CampaignConfig":
        """JSON config, or key=value lines; overrides win."""
        import json

        text = Path(path).read_text()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError:
            raw = {}
            for line in text.splitlines():
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, val = line.partition("=")
                raw[key.strip()] = json.loads(val.strip())
        raw.update(overrides)
        for key in ("N_list", "alpha_list", "c_list", "q_list"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return cls(**raw)


class ProfileCache:
    """Shared (and optionally disk-backed) store of certified sup profiles.

    All experiments in a campaign draw the same profile for the same
    (N, tolerance), which is both the cheapness and the no-recomputation-
    drift guarantee.
    """

    def __init__(self, directory: str | None = None):
        self._mem: dict[tuple, MaxProfile] = {}
        self._dir = Path(directory) if directory else None
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)

    def get(self, N: int, tolerance: float, M: int | None = None) -> MaxProfile:
        key = (N, M or N, round(tolerance, 12))
        if key in self._mem:
            return self._mem[key]
        if self._dir:
            path = self._dir / f"profile-{N}-{key[1]}-{key[2]}.npz"
            if path.exists():
                prof = _load_profile(path)
                self._mem[key] = prof
                return prof
        prof = maximal_grid(N, M or N, tolerance)
        self._mem[key] = prof
        if self._dir:
            _save_profile(self._dir / f"profile-{N}-{key[1]}-{key[2]}.npz", prof)
        return prof


def _save_profile(path, p: MaxProfile) -> None:
    c = p.certificate
    np.savez_compressed(
        path, N=p.N, x=p.x, cell_width=p.cell_width, sup=p.sup_values,
        t_star=p.argmax_times,
        base=[p.x_nodes.origin, p.x_nodes.count, p.x_nodes.spacing],
        cert=[c.t_spacing, c.lipschitz_bound, c.max_undershoot, float(c.refined),
              c.taylor_order, c.numeric_slack, c.evaluations],
    )


def _load_profile(path) -> MaxProfile:
    from .evaluate import GridSpec
    from .supremum import ResolutionCertificate

    z = np.load(path)
    cert = z["cert"]
    return MaxProfile(
        N=int(z["N"]),
        x_nodes=GridSpec(float(z["base"][0]), int(z["base"][1]), float(z["base"][2])),
        x=z["x"],
        cell_width=z["cell_width"],
        sup_values=z["sup"],
        argmax_times=z["t_star"],
        certificate=ResolutionCertificate(
            t_spacing=float(cert[0]), lipschitz_bound=float(cert[1]),
            max_undershoot=float(cert[2]), refined=bool(cert[3]),
            taylor_order=int(cert[4]), numeric_slack=float(cert[5]),
            evaluations=int(cert[6]),
        ),
    )


def maximal_norm_scaling(config: CampaignConfig, cache: ProfileCache | None = None,
                         p: float = 4.0) -> ScalingFit:
    """L^p norm of the certified sup profile per N, fitted in log-log."""
    cache = cache or ProfileCache()
    pts = [(N, lp_norm(cache.get(N, config.tolerance), p)) for N in config.N_list]
    return fit_exponent(pts)


def levelset_scaling(config: CampaignConfig, alpha: float, c: float,
                     cache: ProfileCache | None = None) -> ScalingFit:
    """Level-set measure per N at threshold c N^alpha, fitted in log-log.

    Empty level sets are dropped with a warning; at least 3 nonempty
    measures are required for a fit.
    """
    if not 0.75 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (3/4, 1], got {alpha}")
    cache = cache or ProfileCache()
    pts = []
    for N in config.N_list:
        try:
            measure = level_set(cache.get(N, config.tolerance), alpha, c).total_measure
        except ValueError as exc:
            warnings.warn(f"level set unresolvable at N={N}, alpha={alpha}, c={c}: {exc}")
            continue
        if measure <= 0.0:
            warnings.warn(f"empty level set at N={N}, alpha={alpha}, c={c}; dropped")
            continue
        pts.append((N, measure))
    if len(pts) < 3:
        raise ValueError(f"only {len(pts)} nonempty level sets; need >= 3 for a fit")
    return fit_exponent(pts)


def rect_count_scaling(config: CampaignConfig, alpha: float,
                       cache: ProfileCache | None = None) -> ScalingFit:
    """One-dimensional collection size per N at exponent alpha."""
    if not 0.75 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (3/4, 1], got {alpha}")
    cache = cache or ProfileCache()
    pts = []
    for N in config.N_list:
        count = len(build_collection(cache.get(N, config.tolerance), alpha))
        if count == 0:
            warnings.warn(f"empty collection at N={N}, alpha={alpha}; dropped")
            continue
        pts.append((N, float(count)))
    if len(pts) < 3:
        raise ValueError(f"only {len(pts)} nonempty collections; need >= 3 for a fit")
    return fit_exponent(pts)


def progression_scaling(config: CampaignConfig, q: int,
                        cache: ProfileCache | None = None) -> ScalingFit:
    """L4 maximal norm of the progression {q, 2q, ...}, fitted against N.

    The change of variables (y, s) = (qx, q^2 t) is measure-preserving on
    the torus, so the progression norm at (N, q) equals the full norm at
    scale k = floor(N/q); scales below 16 are dropped.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    cache = cache or ProfileCache()
    pts = []
    for N in config.N_list:
        k = N // q
        if k < 16:
            warnings.warn(f"progression scale k={k} below 16 at N={N}, q={q}; dropped")
            continue
        pts.append((N, lp_norm(cache.get(k, config.tolerance), 4.0)))
    if len(pts) < 3:
        raise ValueError(f"only {len(pts)} usable scales; need >= 3 for a fit")
    return fit_exponent(pts)


def progression_q_scaling(N: int, q_list, tolerance: float,
                          cache: ProfileCache | None = None) -> ScalingFit:
    """Progression norm at fixed N, fitted against q (target slope -3/4)."""
    cache = cache or ProfileCache()
    pts = []
    for q in sorted(q_list):
        k = N // q
        if k < 16:
            continue
        pts.append((q, lp_norm(cache.get(k, tolerance), 4.0)))
    if len(pts) < 3:
        raise ValueError("need at least 3 usable q values")
    return fit_exponent(pts)


def refined_strichartz_check(N: int, collection: OneDimCollection,
                             ) -> tuple[float, float]:
    """(integral of |w_N|^4 over the union)^(1/4) against N^(1/4).

    The collection must be one-dimensional at scale (N, 1), i.e. cells of
    size ~ 1/N x 1/N^2, over which w_N has at most a few oscillations, so
    a tensor 8x8 Gauss-Legendre rule per cell is accurate.
    """
    if abs(collection.scale.alpha - 1.0) > 1e-12 or collection.scale.N != N:
        raise ValueError(
            f"collection is at scale (N={collection.scale.N}, "
            f"alpha={collection.scale.alpha}), need (N={N}, alpha=1)"
        )
    ok, witness = verify_one_dimensional(collection)
    if not ok:
        raise ValueError(f"collection is not one-dimensional (witness x={witness:g})")
    if not collection.rects:
        return 0.0, float(N) ** 0.25
    nodes, weights = np.polynomial.legendre.leggauss(8)
    total = 0.0
    for r in collection.rects:
        (xl, xh), (tl, th) = r.x_interval, r.t_interval
        xs = 0.5 * (xh - xl) * nodes + 0.5 * (xh + xl)
        ts = 0.5 * (th - tl) * nodes + 0.5 * (th + tl)
        xx, tt = np.meshgrid(xs, ts, indexing="ij")
        vals = np.abs(eval_points(N, xx.ravel(), tt.ravel())).reshape(8, 8)
        ww = np.outer(weights, weights)
        total += float((ww * vals**4).sum()) * 0.25 * (xh - xl) * (th - tl)
    return total**0.25, float(N) ** 0.25


def finite_o_alpha_profile(N_list, alpha: float, cache: ProfileCache | None = None,
                           tolerance: float = DEFAULT_TOLERANCE, c: float = 1.0,
                           ) -> list[tuple[float, int]]:
    """Box counts of the union of level sets over N, at dyadic scales.

    Emits (scale, count) rows for scales 2^-2 down to the finest level-set
    resolution N_max^(alpha-2); the counting-function slope is a heuristic
    readout only, since a Hausdorff dimension is not numerically
    accessible -- nothing here asserts one.
    """
    if not 0.75 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [3/4, 1], got {alpha}")
    cache = cache or ProfileCache()
    intervals: list[tuple[float, float]] = []
    for N in N_list:
        intervals += list(level_set(cache.get(N, tolerance), alpha, c).intervals)
    intervals.sort()
    merged: list[list[float]] = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    j_max = int(math.ceil((2.0 - alpha) * math.log2(max(N_list)))) + 1
    table = []
    for j in range(2, j_max + 1):
        scale = 2.0**-j
        count, last_bin = 0, -1
        for lo, hi in merged:
            b0 = int(lo / scale)
            b1 = int(math.ceil(hi / scale)) - 1
            b0 = max(b0, last_bin + 1)
            if b1 >= b0:
                count += b1 - b0 + 1
                last_bin = b1
        table.append((scale, count))
    return table


def run_campaign(config: CampaignConfig, cache: ProfileCache | None = None) -> dict:
    """Run the full sweep suite and write reports under config.output_dir.

    Outputs: summary.json (all fits and parameters, with a content hash),
    one CSV per table, and a long-format plot.csv (series, x, y).
    Identical config gives byte-identical outputs.
    """
    cache = cache or ProfileCache()
    out = Path(config.output_dir)
    long_rows: list[tuple[str, float, float]] = []
    summary: dict = {
        "config": {
            "N_list": list(config.N_list),
            "alpha_list": list(config.alpha_list),
            "tolerance": config.tolerance,
            "seed": config.seed,
            "c_list": list(config.c_list),
            "q_list": list(config.q_list),
        },
    }
    summary["params_hash"] = params_hash(summary["config"])

    norm_fits = {}
    for p in (2.0, 4.0, 6.0):
        fit = maximal_norm_scaling(config, cache, p)
        norm_fits[f"p{int(p)}"] = _fit_dict(fit)
        for n, v in fit.points:
            long_rows.append((f"maximal_norm_p{int(p)}", n, v))
    summary["maximal_norm"] = norm_fits
    write_csv(out / "maximal_norm.csv", ["p", "N", "value"],
              [(pk[1:], n, repr(v)) for pk, f in norm_fits.items()
               for n, v in f["points"]])

    level = {}
    for alpha in config.alpha_list:
        for c in config.c_list:
            key = f"alpha={alpha:g},c={c:g}"
            try:
                fit = levelset_scaling(config, alpha, c, cache)
            except ValueError as exc:
                level[key] = {"error": str(exc)}
                continue
            level[key] = _fit_dict(fit)
            for n, v in fit.points:
                long_rows.append((f"levelset_{key}", n, v))
    summary["level_sets"] = level
    write_csv(out / "level_sets.csv", ["alpha", "c", "N", "measure"],
              [(k.split(",")[0].split("=")[1], k.split(",")[1].split("=")[1], n, repr(v))
               for k, f in level.items() if "points" in f for n, v in f["points"]])

    counts = {}
    for alpha in config.alpha_list:
        try:
            fit = rect_count_scaling(config, alpha, cache)
        except ValueError as exc:
            counts[f"alpha={alpha:g}"] = {"error": str(exc)}
            continue
        counts[f"alpha={alpha:g}"] = _fit_dict(fit)
        for n, v in fit.points:
            long_rows.append((f"rect_count_alpha={alpha:g}", n, v))
    summary["rect_counts"] = counts

    prog = {}
    for q in config.q_list:
        try:
            fit = progression_scaling(config, q, cache)
        except ValueError as exc:
            prog[f"q={q}"] = {"error": str(exc)}
            continue
        prog[f"q={q}"] = _fit_dict(fit)
        for n, v in fit.points:
            long_rows.append((f"progression_q={q}", n, v))
    n_top = max(config.N_list)
    try:
        qfit = progression_q_scaling(n_top, config.q_list, config.tolerance, cache)
        prog["q_direction"] = _fit_dict(qfit)
    except ValueError as exc:
        prog["q_direction"] = {"error": str(exc)}
    summary["progressions"] = prog

    n_mid = sorted(config.N_list)[len(config.N_list) // 2]
    mv = mv_local_check(n_mid, 1.0 / n_mid, 4 * n_mid, seed=config.seed)
    comp, _ = completion_check(min(config.N_list), min(config.N_list),
                               samples=200, seed=config.seed)
    summary["mv_local"] = _summary_dict(mv)
    summary["completion"] = _summary_dict(comp)

    alpha_box = min(a for a in config.alpha_list if a >= 0.75)
    try:
        box = finite_o_alpha_profile(config.N_list, alpha_box, cache,
                                     tolerance=config.tolerance)
        summary["box_counts"] = {"alpha": alpha_box,
                                 "table": [[s, c] for s, c in box]}
        write_csv(out / "box_counts.csv", ["scale", "count"],
                  [(repr(s), c) for s, c in box])
    except ValueError as exc:
        summary["box_counts"] = {"alpha": alpha_box, "error": str(exc)}

    write_json(out / "summary.json", summary)
    write_csv(out / "plot.csv", ["series", "x", "y"],
              [(s, xx, repr(yy)) for s, xx, yy in long_rows])
    return summary


def _fit_dict(fit: ScalingFit) -> dict:
    return {
        "points": [[n, v] for n, v in fit.points],
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
    }


def _summary_dict(s: RatioSummary) -> dict:
    return {
        "max_ratio": s.max_ratio,
        "p50": s.p50,
        "p90": s.p90,
        "p99": s.p99,
        "sample_count": s.sample_count,
        "fitted_constant": s.fitted_constant,
        "seed": s.seed,
    }
