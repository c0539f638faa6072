"""Cap levels, cap centroids, the regions Delta(a) and the cube-union volume tau_x.

A cap is the part of Delta on the low side of a hyperplane, {x : v.x <= c}.
Levels are located with float root finding, but every volume and centroid
is evaluated exactly at the rational level handed back.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import CapLevelError, ShapeError
from .exact_geometry import (
    HalfSpace,
    Point,
    Polytope,
    as_point,
    clip,
    contains,
    dot,
    moments,
    section_moments,
)
from .helpers.parallel import ordered_map
from .helpers.simplex import solve_bounded_lp

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-15
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class Direction:
    """Unit float vector with the exact rational vector used for clipping"""
    vector: Tuple[float, ...]
    exact: Point
    theta: Optional[float] = None


@dataclass
class CapCut:
    direction: Direction
    a: Fraction
    level: Fraction
    cap: Polytope
    cap_volume: Fraction
    centroid: Point

    @property
    def level_float(self) -> float:
        return float(self.level)

    @property
    def centroid_float(self) -> Tuple[float, ...]:
        return tuple(float(c) for c in self.centroid)


@dataclass(frozen=True)
class RegionSample:
    direction: Direction
    level: Optional[Fraction]
    point: Point


@dataclass(frozen=True)
class RegionBoundary:
    """Shared by the boundary cache; read-only"""
    a: Fraction
    samples: Tuple[RegionSample, ...]
    closed: bool

    def points(self) -> List[Point]:
        return [s.point for s in self.samples]


@dataclass
class TauEstimate:
    x: Point
    tau_over_vol: float
    method: str  # 'direction_sweep' or 'grid_lp'
    resolution: int
    error_bound: float
    flags: List[str] = field(default_factory=list)
    witness: Optional[Tuple[float, ...]] = None

    @property
    def ok(self) -> bool:
        return not self.flags


@dataclass(frozen=True)
class Cube:
    center: Point
    side: float
    volume: Fraction
    cell_side: Fraction


@dataclass
class ShapeSpec:
    cubes: List[Cube]
    total_volume: Fraction
    center_of_mass: Point
    grid: int
    tau_volume: Fraction

    def recomputed_center(self) -> Point:
        """Centre of mass of the cube union from its pieces"""
        if not self.cubes:
            raise ShapeError("empty shape has no centre of mass")
        total = sum((c.volume for c in self.cubes), Fraction(0))
        dim = len(self.cubes[0].center)
        return tuple(sum((c.volume * c.center[i] for c in self.cubes), Fraction(0)) / total
                     for i in range(dim))

    def inside(self, delta: Polytope) -> bool:
        """Every cube's grid cell has all corners in Delta"""
        for cube in self.cubes:
            half = cube.cell_side / 2
            for signs in itertools.product((-1, 1), repeat=len(cube.center)):
                corner = tuple(c + s * half for c, s in zip(cube.center, signs))
                if not contains(delta, corner):
                    return False
        return True


# Directions

def _exact_component(value: float) -> Fraction:
    return Fraction(0) if abs(value) < 1e-15 else Fraction(value)


def make_direction(vector: Sequence[float], theta: Optional[float] = None) -> Direction:
    v = np.asarray(vector, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0:
        raise CapLevelError("direction must be nonzero")
    unit = tuple(float(c) for c in v / norm)
    exact = tuple(_exact_component(c) for c in unit)
    if not any(exact):
        raise CapLevelError("direction must be nonzero")
    return Direction(unit, exact, theta)


def direction_set(dim: int, count: int) -> List[Direction]:
    """Evenly spaced angles in the plane, a spherical Fibonacci set in space, +-1 on the line"""
    if dim == 1:
        return [make_direction((1.0,)), make_direction((-1.0,))]
    if dim == 2:
        thetas = 2 * np.pi * np.arange(count) / count
        return [make_direction((np.cos(t), np.sin(t)), float(t)) for t in thetas]
    if dim == 3:
        golden = np.pi * (3 - np.sqrt(5))
        k = np.arange(count)
        z = 1 - (2 * k + 1) / count
        r = np.sqrt(1 - z * z)
        phi = golden * k
        return [make_direction((r[i] * np.cos(phi[i]), r[i] * np.sin(phi[i]), z[i])) for i in range(count)]
    raise CapLevelError(f"direction sets are available in dimensions 1-3, not {dim}")


def angular_spacing(dim: int, count: int) -> float:
    if dim == 1:
        return 0.0
    if dim == 2:
        return 2 * math.pi / count
    return math.sqrt(4 * math.pi / count)


# Caps

def _half(direction: Direction, level: Fraction) -> HalfSpace:
    return HalfSpace(direction.exact, level)


def _bracket(delta: Polytope, direction: Direction) -> Tuple[Fraction, Fraction]:
    return delta.support(direction.exact)


def cap_level(delta: Polytope, v, a, tol: float = 1e-9) -> CapCut:
    """Level c with vol(Delta and {v.x <= c}) = a vol(Delta), to within tol vol(Delta)"""
    a = Fraction(a)
    if not 0 < a < 1:
        raise CapLevelError(f"cap fraction must lie strictly between 0 and 1, got {a}")
    if tol <= 0:
        raise CapLevelError(f"tolerance must be positive, got {tol}")
    direction = v if isinstance(v, Direction) else make_direction(v)
    if len(direction.exact) != delta.dim:
        raise CapLevelError(f"direction has {len(direction.exact)} components, polytope is {delta.dim}-dimensional")
    total, _ = moments(delta)
    if total == 0:
        raise CapLevelError("polytope has zero volume")
    target = a * total
    lo, hi = _bracket(delta, direction)

    def excess(c: float) -> float:
        vol, _ = section_moments(delta, _half(direction, Fraction(c)))
        return float(vol - target)

    level = Fraction(brentq(excess, float(lo), float(hi), xtol=ROOT_XTOL * max(1.0, float(hi - lo))))
    vol, centre = section_moments(delta, _half(direction, level))
    if abs(vol - target) > tol * total:
        level, vol, centre = _bisect_level(delta, direction, target, tol * total, lo, hi)
    cap = clip(delta, _half(direction, level))
    return CapCut(direction, a, level, cap, vol, centre)


def _bisect_level(delta, direction, target, allowed, lo, hi):
    """Rational bisection fallback when the float root misses the volume tolerance"""
    for _ in range(MAX_BISECTIONS):
        mid = (lo + hi) / 2
        vol, centre = section_moments(delta, _half(direction, mid))
        if abs(vol - target) <= allowed:
            return mid, vol, centre
        if vol < target:
            lo = mid
        else:
            hi = mid
    logger.warning(f"cap level bisection hit {MAX_BISECTIONS} steps in direction {direction.vector}")
    raise CapLevelError(f"cap level did not converge in direction {direction.vector}")


def _lowest_face_centre(delta: Polytope, direction: Direction) -> Point:
    """Limit of cap centroids as the cap fraction goes to 0"""
    values = [dot(direction.exact, v) for v in delta.vertices]
    low = min(values)
    face = [v for v, s in zip(delta.vertices, values) if s == low]
    return tuple(sum(v[i] for v in face) / len(face) for i in range(delta.dim))


def _region_sample(args) -> RegionSample:
    delta, direction, a, tol = args
    cut = cap_level(delta, direction, a, tol)
    return RegionSample(direction, cut.level, cut.centroid)


@lru_cache(maxsize=32)
def _boundary(delta: Polytope, a: Fraction, n_dirs: int, tol: float, workers: int) -> RegionBoundary:
    directions = direction_set(delta.dim, n_dirs)
    closed = delta.dim == 2
    if a == 0:
        samples = tuple(RegionSample(d, delta.support(d.exact)[0], _lowest_face_centre(delta, d))
                        for d in directions)
        return RegionBoundary(a, samples, closed)
    if a == 1:
        _, centre = moments(delta)
        samples = tuple(RegionSample(d, None, centre) for d in directions)
        return RegionBoundary(a, samples, False)
    samples = ordered_map(_region_sample, [(delta, d, a, tol) for d in directions], workers)
    return RegionBoundary(a, tuple(samples), closed)


def region_boundary(delta: Polytope, a, n_dirs: int = 720, tol: float = 1e-9,
                    workers: int = 1) -> RegionBoundary:
    """One cap centroid x_v per sampled direction; these trace the boundary of Delta(a)"""
    a = Fraction(a)
    if not 0 <= a <= 1:
        raise CapLevelError(f"volume fraction must lie in [0, 1], got {a}")
    if n_dirs < 4 and delta.dim > 1:
        raise CapLevelError(f"need at least 4 directions, got {n_dirs}")
    logger.info(f"region boundary a={a} over {n_dirs} directions")
    return _boundary(delta, a, n_dirs, tol, workers)


def region_contains(delta: Polytope, a, x: Sequence, n_dirs: int = 720, tol: float = 1e-9,
                    workers: int = 1) -> bool:
    """Support-function membership: v.x >= v.x_v - tol for every sampled direction v"""
    x = as_point(x)
    if not contains(delta, x):
        return False
    a = Fraction(a)
    if a <= 0:
        return True
    boundary = region_boundary(delta, min(a, Fraction(1)), n_dirs, tol, workers)
    for sample in boundary.samples:
        v = sample.direction.exact
        if float(dot(v, x) - dot(v, sample.point)) < -tol:
            return False
    return True


def support_profile(delta: Polytope, v, a_values: Sequence, tol: float = 1e-9) -> List[Tuple[float, float]]:
    """(a, v.x_v(a)) for each a; nondecreasing in a"""
    direction = v if isinstance(v, Direction) else make_direction(v)
    profile = []
    for a in a_values:
        a = Fraction(a)
        if a <= 0:
            value = delta.support(direction.exact)[0]
        elif a >= 1:
            value = dot(direction.exact, moments(delta)[1])
        else:
            value = dot(direction.exact, cap_level(delta, direction, a, tol).centroid)
        profile.append((float(a), float(value)))
    return profile


# tau by direction sweep

def _direction_fraction(args) -> float:
    """a_v(x): cap fraction whose centroid has v-height v.x"""
    delta, direction, x, total, centre, tol = args
    v = direction.exact
    height = dot(v, x)
    if height >= dot(v, centre):
        return 1.0
    lo, hi = _bracket(delta, direction)
    if height <= lo:
        return 0.0

    def gap(c: float) -> float:
        level = Fraction(c)
        if level <= lo:
            return float(lo - height)
        vol, cap_centre = section_moments(delta, _half(direction, level))
        if cap_centre is None:
            return float(lo - height)
        return float(dot(v, cap_centre) - height)

    level = Fraction(brentq(gap, float(lo), float(hi), xtol=ROOT_XTOL * max(1.0, float(hi - lo))))
    vol, _ = section_moments(delta, _half(direction, level))
    return float(vol / total)


def tau_direction_sweep(delta: Polytope, x: Sequence, n_dirs: int = 720, tol: float = 1e-9,
                        workers: int = 1) -> TauEstimate:
    """tau_x / vol(Delta) as the least cap fraction over sampled directions"""
    x = as_point(x)
    if not contains(delta, x):
        logger.warning(f"tau requested outside the polytope at {tuple(float(c) for c in x)}")
        return TauEstimate(x, 0.0, 'direction_sweep', n_dirs, 0.0, ['outside'])
    total, centre = moments(delta)
    directions = direction_set(delta.dim, n_dirs)
    fractions = ordered_map(_direction_fraction,
                            [(delta, d, x, total, centre, tol) for d in directions], workers)
    best = int(np.argmin(fractions))
    spacing = angular_spacing(delta.dim, n_dirs)
    error = tol + spacing * spacing / 2
    logger.info(f"tau sweep at {tuple(float(c) for c in x)}: {fractions[best]:.6f}")
    return TauEstimate(x, min(1.0, fractions[best]), 'direction_sweep', n_dirs, error,
                       witness=directions[best].vector)


# tau by grid LP

@dataclass
class _Grid:
    side: Fraction
    centers: List[Point]
    cell_volume: Fraction
    covered: Fraction


def grid_cells(delta: Polytope, n: int) -> _Grid:
    """Cubic cells of side max-extent / n whose corners all lie in Delta"""
    if n < 1:
        raise CapLevelError(f"grid resolution must be positive, got {n}")
    lo, hi = delta.bounding_box()
    side = max(b - a for a, b in zip(lo, hi)) / n
    counts = [math.ceil((b - a) / side) for a, b in zip(lo, hi)]
    centers = []
    for index in itertools.product(*(range(c) for c in counts)):
        corner = tuple(a + side * k for a, k in zip(lo, index))
        if all(contains(delta, tuple(c + side * s for c, s in zip(corner, signs)))
               for signs in itertools.product((0, 1), repeat=delta.dim)):
            centers.append(tuple(c + side / 2 for c in corner))
    cell_volume = side ** delta.dim
    return _Grid(side, centers, cell_volume, cell_volume * len(centers))


def _balance_columns(centers: Sequence[Point], x: Point) -> List[Tuple[int, ...]]:
    """Integer-scaled offsets c_i - x; each coordinate row scaled by its own denominator"""
    dim = len(x)
    scales = []
    for r in range(dim):
        denom = 1
        for c in centers:
            denom = math.lcm(denom, (c[r] - x[r]).denominator)
        scales.append(denom)
    return [tuple(int((c[r] - x[r]) * scales[r]) for r in range(dim)) for c in centers]


def tau_grid_lp(delta: Polytope, x: Sequence, n: int = 64) -> TauEstimate:
    """Grid relaxation of tau_x: max sum lambda_i vol_i with sum lambda_i vol_i (c_i - x) = 0"""
    x = as_point(x)
    if not contains(delta, x):
        logger.warning(f"grid tau requested outside the polytope at {tuple(float(c) for c in x)}")
        return TauEstimate(x, 0.0, 'grid_lp', n, 0.0, ['outside'])
    total, _ = moments(delta)
    grid = grid_cells(delta, n)
    missing = float((total - grid.covered) / total)
    if not grid.centers:
        return TauEstimate(x, 0.0, 'grid_lp', n, 1.0, ['infeasible'])
    columns = _balance_columns(grid.centers, x)
    result = solve_bounded_lp(columns, [0] * delta.dim, [1] * len(columns), [1] * len(columns))
    flags = []
    if not result.is_optimal:
        flags.append(result.status)
    if result.objective == 0:
        flags.append('infeasible')
    tau = float(result.objective * grid.cell_volume / total)
    logger.info(f"tau grid LP at {tuple(float(c) for c in x)}, N={n}: {tau:.6f} "
                f"({len(columns)} cells, {result.iterations} steps)")
    return TauEstimate(x, min(1.0, tau), 'grid_lp', n, missing + 1.0 / n, flags)


def shape_for(delta: Polytope, x: Sequence, target_volume, n: int = 64) -> ShapeSpec:
    """Axis-aligned cube union inside Delta with the given volume and centre of mass x"""
    x = as_point(x)
    target = Fraction(target_volume)
    if target <= 0:
        raise ShapeError("empty target volume")
    if not contains(delta, x):
        raise ShapeError(f"point {tuple(float(c) for c in x)} lies outside the polytope")
    grid = grid_cells(delta, n)
    if not grid.centers:
        raise ShapeError(f"no grid cell of resolution {n} fits inside the polytope")
    columns = _balance_columns(grid.centers, x)
    ones = [1] * len(columns)
    best = solve_bounded_lp(columns, [0] * delta.dim, ones, ones)
    tau_volume = best.objective * grid.cell_volume
    if target > tau_volume:
        raise ShapeError(f"target volume {float(target):.6f} exceeds tau estimate {float(tau_volume):.6f} "
                         f"at resolution {n}")

    # closest cells first; a vertex solution has at most dim + 1 fractional cells
    distances = [sum((c - p) ** 2 for c, p in zip(centre, x)) for centre in grid.centers]
    rows = [col + (1,) for col in columns]
    result = solve_bounded_lp(rows, [0] * delta.dim + [target / grid.cell_volume],
                              [-dist for dist in distances], ones)
    if not result.is_optimal:
        raise ShapeError(f"shape program ended with status {result.status}")
    cubes = []
    for centre, weight in zip(grid.centers, result.values):
        if weight == 0:
            continue
        side = float(grid.side) * float(weight) ** (1.0 / delta.dim)
        cubes.append(Cube(centre, side, weight * grid.cell_volume, grid.side))
    spec = ShapeSpec(cubes, sum((c.volume for c in cubes), Fraction(0)), x, n, tau_volume)
    spec.center_of_mass = spec.recomputed_center()
    partial = sum(1 for w in result.values if 0 < w < 1)
    logger.info(f"shape with {len(cubes)} cubes ({partial} shrunk), volume {float(spec.total_volume):.6f}")
    return spec
