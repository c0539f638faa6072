"""Finite-d harness: wedge sum-sets, subset averages, density and slack reports"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .cap_body import ShapeSpec, region_contains, tau_direction_sweep
from .config import DEFAULT_SEED, EngineSettings
from .errors import GeometryError, WedgeLimitError
from .exact_geometry import (
    IntVector,
    LatticePointSet,
    Point,
    Polytope,
    as_point,
    contains,
    dilate,
    lattice_points,
    volume,
)
from .helpers.parallel import ordered_map
from .koszul_syzygy import NormalizedCloud, WeightCloud, engine_for

logger = logging.getLogger(__name__)

SLACK_LEVELS = (0.05, 0.1, 0.2)
MAX_SWAPS = 1000


@dataclass
class WedgeSumSet:
    base: Tuple[IntVector, ...]
    p: int
    sums: frozenset
    exact: bool
    sample_count: int = 0

    def __len__(self):
        return len(self.sums)

    def __contains__(self, item):
        return tuple(item) in self.sums


@dataclass
class AverageWitness:
    d: int
    subset: Tuple[IntVector, ...]
    average: Point
    target: Point
    distance: float

    def verify(self) -> bool:
        """Recompute the subset average and its distance to the target"""
        if len(set(self.subset)) != len(self.subset):
            return False
        average = _average(self.subset, self.d)
        return average == self.average and _distance(average, self.target) <= self.distance + 1e-12


@dataclass
class DensitySample:
    x: Tuple[float, ...]
    nearest: Optional[Point]
    distance: float


@dataclass
class DensityReport:
    q: int
    d_values: List[int]
    samples: List[DensitySample]
    covering_radius: float
    weight_count: int
    restrictions: List[str] = field(default_factory=list)
    weights: List[Point] = field(default_factory=list)


@dataclass
class SlackEntry:
    p: int
    q: int
    d: int
    weight: Point
    tau_over_vol: float
    slack: float


@dataclass
class UpperBoundReport:
    entries: List[SlackEntry]
    fractions: Dict[float, float]

    def __len__(self):
        return len(self.entries)


@dataclass
class WindowRegionReport:
    a: float
    slack: float
    total: int
    inside: int

    @property
    def fraction(self) -> float:
        return self.inside / self.total if self.total else 0.0


def _points(w) -> Tuple[IntVector, ...]:
    if isinstance(w, LatticePointSet):
        return w.points
    return tuple(tuple(int(c) for c in p) for p in w)


def wedge_sum_set(w, p: int, limit: int = 2000000, samples: Optional[int] = None,
                  seed: int = DEFAULT_SEED) -> WedgeSumSet:
    """Sums of p distinct points of W.

    Exact when C(|W|, p) <= limit; past the limit a sample count switches to
    seeded sampling of index subsets, otherwise WedgeLimitError.
    """
    base = _points(w)
    size = len(base)
    dim = len(base[0]) if base else 0
    if p < 0 or p > size:
        return WedgeSumSet(base, p, frozenset(), True)
    count = math.comb(size, p)
    if count <= limit:
        # sums reachable with k chosen points among the first i, k <= p
        layers = [set() for _ in range(p + 1)]
        layers[0].add((0,) * dim)
        for i, point in enumerate(base):
            for k in range(min(p, i + 1), 0, -1):
                layers[k].update(tuple(a + b for a, b in zip(s, point)) for s in layers[k - 1])
        return WedgeSumSet(base, p, frozenset(layers[p]), True)
    if samples is None:
        raise WedgeLimitError(count, limit)
    rng = np.random.default_rng(seed)
    array = np.array(base, dtype=np.int64)
    sums = set()
    for _ in range(samples):
        chosen = rng.choice(size, size=p, replace=False)
        sums.add(tuple(int(c) for c in array[chosen].sum(axis=0)))
    logger.info(f"sampled {samples} of {count} index subsets, {len(sums)} distinct sums")
    return WedgeSumSet(base, p, frozenset(sums), False, samples)


def containment_check(delta: Polytope, cloud: WeightCloud, limit: int = 2000000) -> Tuple[int, int]:
    """(weights found in wedge^p W_d + (qd)Delta, weights checked)"""
    points = lattice_points(dilate(delta, cloud.d), cloud.d)
    wedge = wedge_sum_set(points, cloud.p, limit)
    if cloud.q == 0:
        module = [(0,) * delta.dim]
    else:
        module = lattice_points(dilate(delta, cloud.q * cloud.d)).points
    found = 0
    for weight in cloud.entries:
        if any(tuple(a - b for a, b in zip(weight, u)) in wedge.sums for u in module):
            found += 1
    return found, len(cloud.entries)


# Subset averages

def _average(subset: Sequence[IntVector], d: int) -> Point:
    k = len(subset)
    return tuple(Fraction(sum(p[i] for p in subset), k * d) for i in range(len(subset[0])))


def _distance(a: Sequence, b: Sequence) -> float:
    return math.sqrt(float(sum((x - y) ** 2 for x, y in zip(a, b))))


def _in_shape(point: IntVector, d: int, shape: ShapeSpec) -> bool:
    for cube in shape.cubes:
        half = cube.side / 2
        if all(abs(float(c) - pc / d) <= half for c, pc in zip(cube.center, point)):
            return True
    return False


def _seed_subset(points: Sequence[IntVector], d: int, x: Point, size: int,
                 shape: Optional[ShapeSpec]) -> List[int]:
    """Indices of `size` points nearest d.x in the max norm, shape points first"""
    scaled = [d * c for c in x]

    def key(i):
        p = points[i]
        outside = shape is not None and not _in_shape(p, d, shape)
        return (outside,
                max(abs(pc - c) for pc, c in zip(p, scaled)),
                sum((pc - c) ** 2 for pc, c in zip(p, scaled)),
                p)

    return sorted(range(len(points)), key=key)[:size]


def _rebalance(points: Sequence[IntVector], chosen: List[int], target: Sequence[Fraction]) -> List[int]:
    """Greedy single swaps while they shrink |sum - target|"""
    chosen = list(chosen)
    inside = set(chosen)
    total = [sum(points[i][c] for i in chosen) for c in range(len(target))]

    def error(vec):
        return sum((a - t) ** 2 for a, t in zip(vec, target))

    current = error(total)
    for _ in range(MAX_SWAPS):
        if current == 0:
            break
        best = None
        for pos, i in enumerate(chosen):
            removed = [a - b for a, b in zip(total, points[i])]
            for j in range(len(points)):
                if j in inside:
                    continue
                candidate = error([a + b for a, b in zip(removed, points[j])])
                if candidate < current and (best is None or candidate < best[0]):
                    best = (candidate, pos, j)
        if best is None:
            break
        current, pos, j = best
        i = chosen[pos]
        inside.discard(i)
        inside.add(j)
        chosen[pos] = j
        total = [a - b + c for a, b, c in zip(total, points[i], points[j])]
    return chosen


def average_hit(delta: Polytope, x: Sequence, epsilon: float, p_schedule: Callable[[int], int],
                d_max: int, shape: Optional[ShapeSpec] = None) -> Optional[AverageWitness]:
    """First d <= d_max with p_d distinct points of d.Delta averaging (after /d) within epsilon of x"""
    x = as_point(x)
    if not contains(delta, x):
        logger.warning(f"average_hit target {tuple(float(c) for c in x)} lies outside the polytope")
        return None
    for d in range(1, d_max + 1):
        points = lattice_points(dilate(delta, d), d).points
        size = max(1, min(len(points), int(p_schedule(d))))
        chosen = _seed_subset(points, d, x, size, shape)
        target = [size * d * c for c in x]
        chosen = _rebalance(points, chosen, target)
        subset = tuple(sorted(points[i] for i in chosen))
        average = _average(subset, d)
        distance = _distance(average, x)
        logger.debug(f"average_hit d={d}, p_d={size}: distance {distance:.6f}")
        if distance < epsilon:
            return AverageWitness(d, subset, average, x, distance)
    logger.info(f"no witness within {epsilon} up to d={d_max}")
    return None


# Density

def _float_facets(delta: Polytope):
    normals = np.array([[float(a) for a in h.normal] for h in delta.facets])
    offsets = np.array([float(h.offset) for h in delta.facets])
    return normals, offsets


def sample_points(delta: Polytope, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Uniform points of Delta by rejection from its bounding box"""
    if delta.degenerate or volume(delta) == 0:
        raise GeometryError("cannot sample a polytope of zero volume")
    rng = np.random.default_rng(seed)
    lo, hi = delta.bounding_box()
    lo = np.array([float(c) for c in lo])
    hi = np.array([float(c) for c in hi])
    normals, offsets = _float_facets(delta)
    accepted = []
    while len(accepted) < count:
        batch = rng.uniform(lo, hi, size=(max(16, 2 * (count - len(accepted))), delta.dim))
        keep = np.all(batch @ normals.T <= offsets, axis=1)
        accepted.extend(batch[keep])
    return np.array(accepted[:count]).reshape(count, delta.dim)


def union_cloud(delta: Polytope, q: int, d_values: Iterable[int], settings: Optional[EngineSettings] = None,
                p_cap: Optional[int] = None, mode: Optional[str] = None) -> Tuple[NormalizedCloud, List[str]]:
    """Normalized weights of K_{p,q}(X; L_d) over p in [1, r_d] and the given d"""
    cloud = NormalizedCloud(q, delta.dim)
    restrictions = []
    for d in d_values:
        engine = engine_for(delta, d, settings)
        top = engine.r_d
        if p_cap is not None and p_cap < top:
            restrictions.append(f"d={d}: p <= {p_cap} of r_d = {top}")
            logger.warning(f"restricting d={d} to p <= {p_cap} (r_d = {top})")
            top = p_cap
        for p in range(1, top + 1):
            cloud.add(engine.kpq_weights(p, q, mode))
    return cloud, restrictions


def density_report(delta: Polytope, q: int, d_max: int, sample_count: int, seed: int = DEFAULT_SEED,
                   settings: Optional[EngineSettings] = None, p_cap: Optional[int] = None,
                   mode: Optional[str] = None) -> DensityReport:
    """Nearest normalized weight for seeded random points of Delta; max distance is the covering radius"""
    d_values = list(range(1, d_max + 1))
    samples = sample_points(delta, sample_count, seed)
    if sample_count == 0:
        return DensityReport(q, d_values, [], 0.0, 0)
    cloud, restrictions = union_cloud(delta, q, d_values, settings, p_cap, mode)
    weights = cloud.sorted_points()
    if not weights:
        rows = [DensitySample(tuple(float(c) for c in s), None, math.inf) for s in samples]
        return DensityReport(q, d_values, rows, math.inf, 0, restrictions)
    table = np.array([[float(c) for c in w] for w in weights])
    rows = []
    for s in samples:
        distances = np.linalg.norm(table - s, axis=1)
        k = int(np.argmin(distances))
        rows.append(DensitySample(tuple(float(c) for c in s), weights[k], float(distances[k])))
    radius = max(r.distance for r in rows)
    logger.info(f"density q={q}, d<={d_max}: {len(weights)} weights, covering radius {radius:.6f}")
    return DensityReport(q, d_values, rows, radius, len(weights), restrictions, weights)


# Upper bound

def _tau_at(args) -> float:
    delta, point, n_dirs, tol = args
    return tau_direction_sweep(delta, point, n_dirs, tol).tau_over_vol


def upper_bound_check(delta: Polytope, clouds: Sequence[WeightCloud], n_dirs: int = 180,
                      tol: float = 1e-9, levels: Sequence[float] = SLACK_LEVELS,
                      workers: int = 1) -> UpperBoundReport:
    """slack(y) = tau_y / vol - p / (r_d + 1) for every normalized weight y"""
    keyed = []
    for cloud in clouds:
        count = len(lattice_points(dilate(delta, cloud.d), cloud.d))
        for point, _ in cloud.normalized():
            keyed.append((cloud, count, point))
    if not keyed:
        return UpperBoundReport([], {})
    unique = sorted({point for _, _, point in keyed})
    taus = dict(zip(unique, ordered_map(_tau_at, [(delta, y, n_dirs, tol) for y in unique], workers)))
    entries = [SlackEntry(c.p, c.q, c.d, y, taus[y], taus[y] - c.p / count) for c, count, y in keyed]
    fractions = {level: sum(1 for e in entries if e.slack >= -level) / len(entries) for level in levels}
    logger.info(f"upper bound check over {len(entries)} weights: {fractions}")
    return UpperBoundReport(entries, fractions)


def window_region_report(delta: Polytope, cloud: NormalizedCloud, a: float, n_dirs: int = 720,
                         tol: float = 1e-9, slack: float = 0.0) -> WindowRegionReport:
    """How many window weights land in Delta(a - slack)"""
    level = max(Fraction(0), Fraction(a) - Fraction(slack))
    inside = sum(1 for y in cloud.sorted_points() if region_contains(delta, level, y, n_dirs, tol))
    return WindowRegionReport(float(a), float(slack), len(cloud), inside)
