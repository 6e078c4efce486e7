"""Monte Carlo experiments on square-lattice boxes.

Estimates are means of i.i.d. event indicators with Wilson 95% intervals.
All entry points take an integer seed and derive fixed per-shard RNG
substreams from it (16 shards regardless of thread count), so results are
reproducible and independent of ``threads``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .dac import (
    clusters,
    color,
    crossing,
    one_arm,
    sample_bond,
    sample_dac,
    stream,
)
from .exact import ColorEvent, _min_labels
from .multigraph import LatticeBox, MultiGraph, z2_box
from .treecrit import CriticalCurve, CurvePoint

WILSON_Z = 1.96
N_SHARDS = 16
HALF = Fraction(1, 2)


def wilson_interval(count: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval: well behaved at proportions near 0 and 1."""
    if n <= 0:
        raise ValueError("n must be positive")
    phat = count / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class EstimatorResult:
    estimate: float
    ci_lo: float
    ci_hi: float
    count: int
    n_samples: int
    seed: int
    p: float
    r: float
    L: int | None
    event: str


@dataclass(frozen=True)
class RcCurvePoint:
    """Bisection bracket for the r where a crossing probability passes 1/2."""

    p: float
    r_lo: Fraction
    r_hi: Fraction
    L: int
    mode: str
    samples_per_probe: int
    seed: int
    probes: tuple[EstimatorResult, ...]

    @property
    def midpoint(self) -> float:
        return float((self.r_lo + self.r_hi) / 2)

    @property
    def width(self) -> float:
        return float(self.r_hi - self.r_lo)


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def _tally(worker, total: int, seed: int, key: tuple[int, ...], threads: int = 1) -> int:
    """Sum worker(rng, chunk) over 16 fixed shards; the shard split and
    streams depend only on (seed, key, total), never on thread count."""
    base, extra = divmod(total, N_SHARDS)
    sizes = [base + (1 if i < extra else 0) for i in range(N_SHARDS)]

    def run(i: int) -> int:
        return worker(stream(seed, *key, i), sizes[i])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return sum(pool.map(run, range(N_SHARDS)))
    return sum(run(i) for i in range(N_SHARDS))


# ---------------------------------------------------------------------------
# Event workers


_TABLE_MAX_EDGES = 14
_TABLE_MAX_VERTICES = 16


@lru_cache(maxsize=16)
def _min_label_table(graph: MultiGraph) -> np.ndarray:
    """min-cluster-label vectors for every bond configuration (small graphs)."""
    m, n = graph.edge_count, graph.vertex_count
    table = np.empty((1 << m, n), dtype=np.int16)
    for mask in range(1 << m):
        table[mask] = _min_labels(n, graph.edges, mask)
    return table


def _graph_event_worker(graph: MultiGraph, event: ColorEvent, p: float, r: float):
    support = event.support
    if graph.edge_count <= _TABLE_MAX_EDGES and graph.vertex_count <= _TABLE_MAX_VERTICES:
        m, n = graph.edge_count, graph.vertex_count
        table = _min_label_table(graph)
        k = len(support)
        truth = np.zeros(1 << k, dtype=bool)
        for state in range(1 << k):
            truth[state] = bool(
                event.predicate(tuple((state >> i) & 1 for i in range(k)))
            )
        eweights = 1 << np.arange(m, dtype=np.int64)
        sweights = 1 << np.arange(k, dtype=np.int64)
        sup = np.asarray(support, dtype=np.int64)

        def work(rng: np.random.Generator, count: int) -> int:
            if count == 0:
                return 0
            bits = rng.random((count, m)) < p
            kappa = (rng.random((count, n)) < r).astype(np.uint8)
            idx = bits @ eweights
            roots = table[idx].astype(np.int64)
            xi = np.take_along_axis(kappa, roots, axis=1)
            states = xi[:, sup].astype(np.int64) @ sweights
            return int(truth[states].sum())

        return work

    def work(rng: np.random.Generator, count: int) -> int:
        hits = 0
        for _ in range(count):
            _, xi = sample_dac(graph, p, r, rng)
            if event.predicate(tuple(int(xi[v]) for v in support)):
                hits += 1
        return hits

    return work


def _crossing_worker(box: LatticeBox, p: float, r: float):
    graph = box.to_multigraph()

    def work(rng: np.random.Generator, count: int) -> int:
        hits = 0
        for _ in range(count):
            eta = sample_bond(graph, p, rng)
            xi = color(clusters(graph, eta), r, rng)
            if crossing(box, xi):
                hits += 1
        return hits

    return work


def _one_arm_worker(box: LatticeBox, p: float, n_arm: int):
    graph = box.to_multigraph()

    def work(rng: np.random.Generator, count: int) -> int:
        hits = 0
        for _ in range(count):
            eta = sample_bond(graph, p, rng)
            if one_arm(box, eta, n_arm):
                hits += 1
        return hits

    return work


def estimate_event(
    obj,
    event,
    p,
    r,
    n_samples: int,
    seed: int,
    threads: int = 1,
    _key: tuple[int, ...] = (),
) -> EstimatorResult:
    """Estimate an event probability by simulation.

    ``obj`` is a LatticeBox with ``event`` one of "crossing" (black
    vertical crossing in the box's adjacency mode) or "one-arm:<n>"
    (open bond cluster of the center reaching L1 distance n; the color
    parameter r is irrelevant for that event and ignored), or a
    MultiGraph with a ColorEvent.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    p = float(p)
    r = float(r)
    if not 0 <= p <= 1:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if not 0 <= r <= 1:
        raise ValueError(f"r must be in [0, 1], got {r}")
    L: int | None = None
    if isinstance(obj, LatticeBox):
        L = obj.width
        if isinstance(event, ColorEvent):
            worker = _graph_event_worker(obj.to_multigraph(), event, p, r)
            name = event.name or "color-event"
        elif event in ("crossing", "vertical-crossing"):
            worker = _crossing_worker(obj, p, r)
            name = "crossing"
        elif isinstance(event, str) and event.startswith("one-arm:"):
            n_arm = int(event.split(":", 1)[1])
            worker = _one_arm_worker(obj, p, n_arm)
            name = event
        else:
            raise ValueError(f"unknown box event {event!r}")
    elif isinstance(obj, MultiGraph):
        if not isinstance(event, ColorEvent):
            raise ValueError("graph estimation needs a ColorEvent")
        worker = _graph_event_worker(obj, event, p, r)
        name = event.name or "color-event"
    else:
        raise ValueError(f"cannot estimate on {type(obj).__name__}")
    count = _tally(worker, n_samples, seed, _key, threads)
    lo, hi = wilson_interval(count, n_samples)
    return EstimatorResult(
        estimate=count / n_samples, ci_lo=lo, ci_hi=hi, count=count,
        n_samples=n_samples, seed=seed, p=p, r=r, L=L, event=name,
    )


# ---------------------------------------------------------------------------
# Critical-value bisection and duality


def rc_estimate(
    p,
    L: int,
    n_samples: int,
    mode: str = "nn",
    seed: int = 0,
    threads: int = 1,
    _key: tuple[int, ...] = (),
) -> RcCurvePoint:
    """Bisect r until the estimated crossing probability brackets 1/2;
    the bracket has width 1/64 and exact dyadic endpoints.

    mode "nn" crosses the tall box [0,L]x[0,3L] with nearest-neighbor
    color adjacency.  mode "star" estimates the matching-adjacency
    threshold by crossing the transposed box [0,3L]x[0,L]: the complement
    of the nn crossing is exactly a star crossing of the transposed box
    in the flipped colors, so the two thresholds sum to 1 up to probe
    noise.  Per-probe sample counts are forced odd so no probe estimate
    can sit exactly at 1/2.
    """
    pf = float(p)
    if not 0 <= pf < 0.5:
        raise ValueError(f"p must be in [0, 1/2), got {p}")
    if mode == "nn":
        box = z2_box(L, 3 * L, "nn")
    elif mode == "star":
        box = z2_box(3 * L, L, "star")
    else:
        raise ValueError("mode must be 'nn' or 'star'")
    probe_n = n_samples | 1
    lo, hi = Fraction(0), Fraction(1)  # exact: P=0 at r=0, P=1 at r=1
    probes: list[EstimatorResult] = []
    for step in range(6):
        mid = (lo + hi) / 2
        est = estimate_event(
            box, "crossing", pf, float(mid), probe_n, seed,
            threads=threads, _key=(*_key, step),
        )
        probes.append(est)
        if est.estimate < 0.5:
            lo = mid
        else:
            hi = mid
    return RcCurvePoint(
        p=pf, r_lo=lo, r_hi=hi, L=L, mode=mode,
        samples_per_probe=probe_n, seed=seed, probes=tuple(probes),
    )


@dataclass(frozen=True)
class DualityReport:
    p: float
    L: int
    nn: RcCurvePoint
    star: RcCurvePoint
    sum_lo: float
    sum_mid: float
    sum_hi: float
    tolerance: float


def duality_check(
    p, L: int, n_samples: int = 4000, seed: int = 0, threads: int = 1
) -> DualityReport:
    """Estimate the nn and star thresholds at the same p and report their
    sum, which the exact finite-box complementarity pins at 1."""
    nn = rc_estimate(p, L, n_samples, "nn", seed, threads, _key=(0,))
    star = rc_estimate(p, L, n_samples, "star", seed, threads, _key=(1,))
    sum_lo = float(nn.r_lo + star.r_lo)
    sum_hi = float(nn.r_hi + star.r_hi)
    return DualityReport(
        p=float(p), L=L, nn=nn, star=star,
        sum_lo=sum_lo, sum_mid=(nn.midpoint + star.midpoint),
        sum_hi=sum_hi, tolerance=nn.width + star.width,
    )


# ---------------------------------------------------------------------------
# One-arm decay rate


@dataclass(frozen=True)
class PsiFit:
    p: float
    n_values: tuple[int, ...]
    frequencies: tuple[float, ...]
    dropped: tuple[int, ...]
    psi: float | None
    se: float | None
    z: float | None
    positive: bool
    samples_per_n: int
    seed: int


def psi_fit(
    p, n_list: Iterable[int], samples: int, seed: int = 0, threads: int = 1
) -> PsiFit:
    """Weighted least-squares decay rate of the one-arm probability:
    slope of -log(frequency) against n, with a one-sided positivity test
    at 95%.  Radii with zero observed hits are dropped and reported."""
    pf = float(p)
    if not 0 <= pf < 0.5:
        raise ValueError(f"p must be in [0, 1/2), got {p}")
    n_list = list(n_list)
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing and nonempty")
    if any(n < 1 for n in n_list):
        raise ValueError("arm radii must be >= 1")
    used, freqs, dropped = [], [], []
    for i, n in enumerate(n_list):
        box = z2_box(2 * n, 2 * n)
        est = estimate_event(
            box, f"one-arm:{n}", pf, 0.0, samples, seed,
            threads=threads, _key=(i,),
        )
        if est.count == 0:
            dropped.append(n)
        else:
            used.append(n)
            freqs.append(est.estimate)
    if len(used) < 2:
        return PsiFit(pf, tuple(used), tuple(freqs), tuple(dropped),
                      None, None, None, False, samples, seed)
    x = np.asarray(used, dtype=float)
    y = -np.log(np.asarray(freqs))
    var_y = (1 - np.asarray(freqs)) / (samples * np.asarray(freqs))
    w = 1.0 / np.maximum(var_y, 1e-12)
    xbar = float(np.sum(w * x) / np.sum(w))
    ybar = float(np.sum(w * y) / np.sum(w))
    sxx = float(np.sum(w * (x - xbar) ** 2))
    slope = float(np.sum(w * (x - xbar) * (y - ybar)) / sxx)
    se = math.sqrt(1.0 / sxx)
    zval = slope / se
    return PsiFit(pf, tuple(used), tuple(freqs), tuple(dropped),
                  slope, se, zval, zval > 1.645, samples, seed)


# ---------------------------------------------------------------------------
# Continuity scan


@dataclass(frozen=True)
class ScanReport:
    curve: CriticalCurve
    diffs: tuple[float, ...]
    thresholds: tuple[float, ...]
    flags: tuple[str, ...]
    max_diff: float
    slope_allowance: float

    @property
    def flagged(self) -> bool:
        return bool(self.flags)


def continuity_scan(
    p_grid: Iterable | None = None,
    L: int = 32,
    samples: int = 4000,
    seed: int = 0,
    curve: CriticalCurve | None = None,
    slope_allowance: float = 1.5,
    threads: int = 1,
) -> ScanReport:
    """Compare adjacent threshold estimates along a p grid against their
    combined bracket widths plus a slope allowance; report any difference
    too large to blame on noise or on a Lipschitz trend.

    Pass ``curve`` to scan an externally computed curve (e.g. an exact
    one) instead of sampling; the flag rule is identical.
    """
    if curve is not None:
        points = sorted(curve.points, key=lambda pt: pt.p)
        if any(float(pt.p) >= 0.5 for pt in points):
            raise ValueError("scan grid must lie in [0, 1/2)")
    else:
        if p_grid is None:
            raise ValueError("need a p grid or a curve")
        grid = sorted(_as_fraction(p) for p in p_grid)
        if any(not (0 <= pv < HALF) for pv in grid):
            raise ValueError("scan grid must lie in [0, 1/2)")
        points = []
        for i, pv in enumerate(grid):
            pt = rc_estimate(float(pv), L, samples, "nn", seed,
                             threads=threads, _key=(i,))
            points.append(CurvePoint(pv, pt.r_lo, pt.r_hi, "MC"))
    diffs, thresholds, flags = [], [], []
    for a, b in zip(points, points[1:]):
        mid_a = float((a.r_lo + a.r_hi) / 2)
        mid_b = float((b.r_lo + b.r_hi) / 2)
        w_a = float(a.r_hi - a.r_lo)
        w_b = float(b.r_hi - b.r_lo)
        delta = float(b.p) - float(a.p)
        diff = abs(mid_b - mid_a)
        thr = w_a + w_b + slope_allowance * delta
        diffs.append(diff)
        thresholds.append(thr)
        if diff > thr:
            flags.append(
                f"jump candidate between p={a.p} and p={b.p}: "
                f"|dr|={diff:.4f} > allowance {thr:.4f}"
            )
    return ScanReport(
        curve=CriticalCurve(tuple(points)),
        diffs=tuple(diffs),
        thresholds=tuple(thresholds),
        flags=tuple(flags),
        max_diff=max(diffs, default=0.0),
        slope_allowance=slope_allowance,
    )


# ---------------------------------------------------------------------------
# Finite-size subcriticality criterion


@dataclass(frozen=True)
class CriterionReport:
    p: float
    a: float
    L: int
    gamma: float
    arm_radius: int
    arm: EstimatorResult
    crossing: EstimatorResult
    lhs: float
    arm_ok: bool
    crossing_ok: bool
    satisfied: bool


def finite_size_criterion(
    p, a, L: int, gamma: float, samples: int, seed: int = 0, threads: int = 1
) -> CriterionReport:
    """Check the finite-size condition that certifies a >= r_c(p):
    (3L+1)(L+1) times the radius-floor(L/3) one-arm probability at bond
    density a stays below gamma while the (p, a) crossing probability of
    the [0,L]x[0,3L] box reaches 1 - gamma.

    The threshold gamma is an external constant and must be supplied.
    Verdicts use point estimates; both Wilson intervals are returned so
    callers can apply stricter readings.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n_arm = L // 3
    if n_arm < 1:
        raise ValueError("L too small for the arm radius floor(L/3)")
    arm = estimate_event(
        z2_box(2 * n_arm, 2 * n_arm), f"one-arm:{n_arm}", float(a), 0.0,
        samples, seed, threads=threads, _key=(0,),
    )
    cross = estimate_event(
        z2_box(L, 3 * L, "nn"), "crossing", float(p), float(a),
        samples, seed, threads=threads, _key=(1,),
    )
    lhs = (3 * L + 1) * (L + 1) * arm.estimate
    arm_ok = lhs <= gamma
    crossing_ok = cross.estimate >= 1 - gamma
    return CriterionReport(
        p=float(p), a=float(a), L=L, gamma=gamma, arm_radius=n_arm,
        arm=arm, crossing=cross, lhs=lhs,
        arm_ok=arm_ok, crossing_ok=crossing_ok,
        satisfied=arm_ok and crossing_ok,
    )


# ---------------------------------------------------------------------------
# Crossing events as color events (exact cross-checks on tiny boxes)


def crossing_color_event(box: LatticeBox) -> ColorEvent:
    """The vertical crossing of a small box as a finite-support color
    event, backed by a full truth table (exact-engine compatible)."""
    n = box.vertex_count
    if n > 20:
        raise ValueError("truth table limited to 20 vertices")
    table = np.zeros(1 << n, dtype=bool)
    buf = np.zeros(n, dtype=np.uint8)
    for state in range(1 << n):
        for i in range(n):
            buf[i] = (state >> i) & 1
        table[state] = crossing(box, buf)

    def pred(colors: tuple[int, ...], _table=table) -> bool:
        s = 0
        for i, c in enumerate(colors):
            s |= c << i
        return bool(_table[s])

    return ColorEvent(
        tuple(range(n)), pred,
        name=f"crossing-{box.width}x{box.height}-{box.mode}",
    )


# ---------------------------------------------------------------------------
# CSV writers


def write_probe_csv(fh, results: Iterable[EstimatorResult], comments=()) -> None:
    for line in comments:
        fh.write(f"# {line}\n")
    fh.write("p,r,L,samples,estimate,ci_lo,ci_hi,seed\n")
    for e in results:
        lval = "" if e.L is None else e.L
        fh.write(
            f"{e.p!r},{e.r!r},{lval},{e.n_samples},"
            f"{e.estimate!r},{e.ci_lo!r},{e.ci_hi!r},{e.seed}\n"
        )


def write_rc_csv(fh, points: Iterable[RcCurvePoint], comments=()) -> None:
    for line in comments:
        fh.write(f"# {line}\n")
    fh.write("p,rc_lo,rc_hi,L\n")
    for pt in points:
        fh.write(f"{pt.p!r},{pt.r_lo},{pt.r_hi},{pt.L}\n")
