"""Exact rational convex geometry: dilation, lattice points, clipping, volume, centroid"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import (
    DegenerateCentroidError,
    DimensionMismatchError,
    GeometryError,
    UnboundedPolytopeError,
)

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]
IntVector = Tuple[int, ...]


def as_rational(value) -> Fraction:
    """Coerce int, Fraction, float (exactly) or 'p/q' / decimal strings"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise GeometryError(f"not a rational number: {value!r}")
    if isinstance(value, (int, float, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise GeometryError(f"not a rational number: {value!r}") from e
    try:
        return Fraction(value)
    except (TypeError, ValueError) as e:
        raise GeometryError(f"not a rational number: {value!r}") from e


def as_point(coords: Iterable) -> Point:
    return tuple(as_rational(c) for c in coords)


def dot(u: Sequence, w: Sequence):
    return sum(a * b for a, b in zip(u, w))


def _qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _fraction(element) -> Fraction:
    return _from_rational(QQ.to_sympy(element))


def _from_rational(r) -> Fraction:
    return Fraction(int(r.p), int(r.q))


def _matrix(rows: Sequence[Sequence], ncols: int) -> DomainMatrix:
    return DomainMatrix([[_qq(a) for a in r] for r in rows], (len(rows), ncols), QQ)


def _rank(rows: List[List[Fraction]]) -> int:
    """Rank of a small rational matrix"""
    if not rows or not rows[0]:
        return 0
    return _matrix(rows, len(rows[0])).rank()


def _det(rows: List[List[Fraction]]) -> Fraction:
    return _fraction(_matrix(rows, len(rows)).det())


def _solve(rows: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Solve a square system exactly; None when singular"""
    n = len(rows)
    a = _matrix(rows, n)
    if a.rank() < n:
        return None
    b = _matrix([[v] for v in rhs], 1)
    return [_from_rational(r) for r in a.lu_solve(b).to_Matrix()]


def _nullspace_vector(rows: List[List[Fraction]], n: int) -> Optional[List[Fraction]]:
    """A nonzero vector orthogonal to the rows, or None"""
    if not rows:
        return [Fraction(1)] if n == 1 else None
    null = _matrix(rows, n).nullspace()
    if null.shape[0] == 0:
        return None
    return [_from_rational(r) for r in null.to_Matrix().row(0)]


def affine_dimension(points: Sequence[Point]) -> int:
    """Dimension of the affine hull; -1 for the empty set"""
    if not points:
        return -1
    base = points[0]
    return _rank([[a - b for a, b in zip(p, base)] for p in points[1:]])


@dataclass(frozen=True)
class HalfSpace:
    """The set {x : normal . x <= offset}"""
    normal: Point
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'normal', as_point(self.normal))
        object.__setattr__(self, 'offset', as_rational(self.offset))
        if not any(self.normal):
            raise GeometryError("half-space normal must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.normal)

    def value(self, x: Sequence) -> Fraction:
        return dot(self.normal, x)

    def slack(self, x: Sequence) -> Fraction:
        return self.offset - dot(self.normal, x)

    def contains(self, x: Sequence) -> bool:
        return dot(self.normal, x) <= self.offset

    def is_tight(self, x: Sequence) -> bool:
        return dot(self.normal, x) == self.offset

    def complement(self) -> 'HalfSpace':
        """Closed opposite side {normal . x >= offset}"""
        return HalfSpace(tuple(-a for a in self.normal), -self.offset)

    def scaled(self, factor) -> 'HalfSpace':
        return HalfSpace(self.normal, self.offset * factor)

    def canonical(self) -> 'HalfSpace':
        """Primitive integer normal, same set"""
        lcm = 1
        for a in self.normal + (self.offset,):
            lcm = lcm * a.denominator // math.gcd(lcm, a.denominator)
        ints = [int(a * lcm) for a in self.normal]
        g = 0
        for a in ints:
            g = math.gcd(g, a)
        scale = Fraction(lcm, g)
        return HalfSpace(tuple(a * scale for a in self.normal), self.offset * scale)


@dataclass(frozen=True)
class Polytope:
    """Convex polytope carrying both descriptions.

    In dimension 2 the vertices are kept in counter-clockwise cycle order starting
    at the lexicographically smallest vertex; elsewhere they are sorted lexicographically.
    """
    dim: int
    vertices: Tuple[Point, ...]
    facets: Tuple[HalfSpace, ...]
    degenerate: bool = False
    name: str = field(default='', compare=False)

    @property
    def is_empty(self) -> bool:
        return not self.vertices and self.degenerate

    @classmethod
    def from_vertices(cls, vertices: Iterable, facets: Optional[Iterable[HalfSpace]] = None,
                      name: str = '') -> 'Polytope':
        pts = sorted(set(as_point(v) for v in vertices))
        if not pts:
            raise GeometryError("polytope needs at least one vertex")
        dim = len(pts[0])
        if any(len(p) != dim for p in pts):
            raise GeometryError("vertices have mixed dimensions")
        if facets is not None:
            facets = tuple(facets)
            for h in facets:
                if h.dim != dim:
                    raise DimensionMismatchError(dim, h.dim)
            return _normalized(dim, pts, facets, name=name)
        if affine_dimension(pts) < dim:
            raise GeometryError("facets can only be derived for full-dimensional vertex sets")
        if dim == 1:
            return _normalized(dim, [pts[0], pts[-1]],
                               (HalfSpace((-1,), -pts[0][0]), HalfSpace((1,), pts[-1][0])), name=name)
        if dim == 2:
            hull = _convex_hull_2d(pts)
            facets = []
            for a, b in zip(hull, hull[1:] + hull[:1]):
                normal = (b[1] - a[1], a[0] - b[0])
                facets.append(HalfSpace(normal, dot(normal, a)).canonical())
            return _normalized(dim, hull, tuple(facets), name=name)
        if dim == 3:
            facets = _facets_3d(pts)
            verts = [p for p in pts if sum(1 for h in facets if h.is_tight(p)) >= 3]
            return _normalized(dim, verts, tuple(facets), name=name)
        raise GeometryError(f"facet derivation is supported in dimensions 1-3, not {dim}")

    @classmethod
    def from_halfspaces(cls, dim: int, facets: Iterable[HalfSpace], name: str = '') -> 'Polytope':
        facets = tuple(facets)
        if not _is_bounded(dim, facets):
            raise UnboundedPolytopeError("half-spaces do not bound a polytope")
        verts = set()
        for combo in itertools.combinations(facets, dim):
            sol = _solve([list(h.normal) for h in combo], [h.offset for h in combo])
            if sol is not None and all(h.contains(sol) for h in facets):
                verts.add(tuple(sol))
        if not verts:
            return cls(dim, (), facets, degenerate=True, name=name)
        return _normalized(dim, sorted(verts), facets, name=name)

    def is_bounded(self) -> bool:
        if self.vertices or self.is_empty:
            return True
        return _is_bounded(self.dim, self.facets)

    def tight_facets(self, x: Sequence) -> frozenset:
        return frozenset(i for i, h in enumerate(self.facets) if h.is_tight(x))

    def validate(self) -> List[str]:
        """Consistency problems between the two descriptions; empty when valid"""
        problems = []
        for v in self.vertices:
            for h in self.facets:
                if not h.contains(v):
                    problems.append(f"vertex {_fmt(v)} violates {_fmt(h.normal)} <= {h.offset}")
        if not self.degenerate:
            for h in self.facets:
                tight = sum(1 for v in self.vertices if h.is_tight(v))
                if tight < self.dim:
                    problems.append(f"facet {_fmt(h.normal)} <= {h.offset} tight at only {tight} vertices")
        return problems

    def support(self, direction: Sequence) -> Tuple[Fraction, Fraction]:
        """(min, max) of direction . x over the vertices"""
        values = [dot(direction, v) for v in self.vertices]
        return min(values), max(values)

    def bounding_box(self) -> Tuple[Point, Point]:
        lo = tuple(min(v[i] for v in self.vertices) for i in range(self.dim))
        hi = tuple(max(v[i] for v in self.vertices) for i in range(self.dim))
        return lo, hi


@dataclass(frozen=True)
class LatticePointSet:
    points: Tuple[IntVector, ...]
    source: str
    dilation: int

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _fmt(coords) -> str:
    return '(' + ', '.join(str(c) for c in coords) + ')'


def _normalized(dim, vertices, facets, name='') -> Polytope:
    vertices = list(vertices)
    degenerate = affine_dimension(vertices) < dim
    if dim == 2 and not degenerate:
        vertices = _ccw_cycle(vertices)
    else:
        vertices = sorted(vertices)
    if degenerate:
        kept = tuple(h for h in facets if any(h.is_tight(v) for v in vertices)) if vertices else tuple(facets)
    else:
        kept = tuple(h for h in facets if sum(1 for v in vertices if h.is_tight(v)) >= dim)
    unique = []
    seen = set()
    for h in kept:
        key = h.canonical()
        if key not in seen:
            seen.add(key)
            unique.append(h)
    return Polytope(dim, tuple(vertices), tuple(unique), degenerate=degenerate, name=name)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _convex_hull_2d(points: List[Point]) -> List[Point]:
    """Monotone chain hull, counter-clockwise, collinear points dropped"""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _ccw_cycle(points: List[Point]) -> List[Point]:
    return _convex_hull_2d(points)


def _facets_3d(points: List[Point]) -> Tuple[HalfSpace, ...]:
    found = {}
    for a, b, c in itertools.combinations(points, 3):
        u = [b[i] - a[i] for i in range(3)]
        w = [c[i] - a[i] for i in range(3)]
        normal = (u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0])
        if not any(normal):
            continue
        offset = dot(normal, a)
        values = [dot(normal, p) for p in points]
        if all(val <= offset for val in values):
            h = HalfSpace(normal, offset).canonical()
        elif all(val >= offset for val in values):
            h = HalfSpace(normal, offset).complement().canonical()
        else:
            continue
        found[h] = h
    return tuple(sorted(found.values(), key=lambda h: (h.normal, h.offset)))


def _is_bounded(dim: int, facets: Sequence[HalfSpace]) -> bool:
    """True when the recession cone {y : a.y <= 0 for all facets} is {0}"""
    normals = [list(h.normal) for h in facets]
    if _rank(normals) < dim:
        return False
    for combo in itertools.combinations(normals, dim - 1):
        if _rank(list(combo)) < dim - 1:
            continue
        ray = _nullspace_vector(list(combo), dim)
        if ray is None:
            continue
        for sign in (1, -1):
            y = [sign * r for r in ray]
            if all(dot(a, y) <= 0 for a in normals):
                return False
    return True


def dilate(polytope: Polytope, d) -> Polytope:
    """d * P; vertex order (and so 2D orientation) is preserved"""
    d = as_rational(d)
    if d <= 0:
        raise GeometryError(f"dilation factor must be positive, got {d}")
    vertices = tuple(tuple(c * d for c in v) for v in polytope.vertices)
    facets = tuple(h.scaled(d) for h in polytope.facets)
    name = f"{d}*{polytope.name}" if polytope.name else ''
    return Polytope(polytope.dim, vertices, facets, degenerate=polytope.degenerate, name=name)


def lattice_points(polytope: Polytope, dilation: int = 1) -> LatticePointSet:
    """Integer points of P by bounding-box sweep filtered through the facets.

    `dilation` only labels the result; pass the already dilated polytope.
    """
    if not polytope.is_bounded():
        raise UnboundedPolytopeError(f"cannot enumerate lattice points of unbounded {polytope.name or 'polytope'}")
    if not polytope.vertices:
        return LatticePointSet((), polytope.name, dilation)
    lo, hi = polytope.bounding_box()
    ranges = [range(math.ceil(a), math.floor(b) + 1) for a, b in zip(lo, hi)]
    facets = [([int(c) for c in h.normal], h.offset) for h in
              (f.canonical() for f in polytope.facets)]
    points = []
    for candidate in itertools.product(*ranges):
        if all(sum(a * x for a, x in zip(normal, candidate)) <= offset for normal, offset in facets):
            points.append(candidate)
    logger.debug(f"lattice_points: {len(points)} points in {polytope.name or 'polytope'}")
    return LatticePointSet(tuple(points), polytope.name, dilation)


def contains(polytope: Polytope, x: Sequence) -> bool:
    if len(x) != polytope.dim:
        raise DimensionMismatchError(polytope.dim, len(x))
    if polytope.is_empty:
        return False
    return all(h.contains(x) for h in polytope.facets)


def _edge_pairs(polytope: Polytope) -> List[Tuple[int, int]]:
    verts = polytope.vertices
    if polytope.dim == 2 and not polytope.degenerate:
        k = len(verts)
        return [(i, (i + 1) % k) for i in range(k)] if k > 2 else [(0, 1)]
    tight = [polytope.tight_facets(v) for v in verts]
    normals = [list(h.normal) for h in polytope.facets]
    face_dim = affine_dimension(list(verts))
    pairs = []
    for i, j in itertools.combinations(range(len(verts)), 2):
        common = tight[i] & tight[j]
        if face_dim <= 1 or polytope.dim - _rank([normals[k] for k in common]) == 1:
            pairs.append((i, j))
    return pairs


def _edge_hit(u: Point, w: Point, su: Fraction, sw: Fraction) -> Point:
    """Point on segment uw where the affine function with values su, sw vanishes"""
    t = su / (su - sw)
    return tuple(a + t * (b - a) for a, b in zip(u, w))


def _clip_cycle(cycle: Sequence[Point], half: HalfSpace) -> List[Point]:
    """Sutherland-Hodgman against one half-plane, keeps cyclic order"""
    out = []
    k = len(cycle)
    if k == 0:
        return out
    slacks = [half.slack(p) for p in cycle]
    for i in range(k):
        s, e = cycle[i - 1], cycle[i]
        ss, se = slacks[i - 1], slacks[i]
        if se >= 0:
            if ss < 0:
                out.append(_edge_hit(s, e, ss, se))
            out.append(e)
        elif ss >= 0 and ss != 0:
            out.append(_edge_hit(s, e, ss, se))
    deduped = []
    for p in out:
        if not deduped or deduped[-1] != p:
            deduped.append(p)
    if len(deduped) > 1 and deduped[0] == deduped[-1]:
        deduped.pop()
    return deduped


def clip(polytope: Polytope, half: HalfSpace) -> Polytope:
    """P intersected with a half-space, exactly; empty or lower-dimensional results are flagged"""
    if half.dim != polytope.dim:
        raise DimensionMismatchError(polytope.dim, half.dim)
    facets = polytope.facets + (half,)
    if polytope.is_empty:
        return Polytope(polytope.dim, (), facets, degenerate=True)
    if all(half.contains(v) for v in polytope.vertices):
        return polytope
    if polytope.dim == 2 and not polytope.degenerate:
        new_vertices = _clip_cycle(polytope.vertices, half)
    else:
        verts = polytope.vertices
        slacks = [half.slack(v) for v in verts]
        new = {v for v, s in zip(verts, slacks) if s >= 0}
        for i, j in _edge_pairs(polytope):
            if (slacks[i] < 0 < slacks[j]) or (slacks[j] < 0 < slacks[i]):
                new.add(_edge_hit(verts[i], verts[j], slacks[i], slacks[j]))
        new_vertices = sorted(new)
    if not new_vertices:
        return Polytope(polytope.dim, (), facets, degenerate=True)
    return _normalized(polytope.dim, new_vertices, facets)


# Volume and centroid

def _polygon_moments(cycle: Sequence[Point]) -> Tuple[Fraction, Optional[Point]]:
    k = len(cycle)
    if k < 3:
        return Fraction(0), None
    twice_area = Fraction(0)
    cx = Fraction(0)
    cy = Fraction(0)
    for i in range(k):
        x0, y0 = cycle[i]
        x1, y1 = cycle[(i + 1) % k]
        cr = x0 * y1 - x1 * y0
        twice_area += cr
        cx += (x0 + x1) * cr
        cy += (y0 + y1) * cr
    if twice_area == 0:
        return Fraction(0), None
    area = twice_area / 2
    return abs(area), (cx / (3 * twice_area), cy / (3 * twice_area))


def _faces_below(polytope: Polytope, face: frozenset, k: int) -> List[frozenset]:
    verts = polytope.vertices
    tight_sets = [frozenset(i for i in face if h.is_tight(verts[i])) for h in polytope.facets]
    found = []
    for s in tight_sets:
        if s != face and s and s not in found and affine_dimension([verts[i] for i in sorted(s)]) == k - 1:
            found.append(s)
    return found


def _fan(polytope: Polytope, face: frozenset, k: int) -> List[Tuple[int, ...]]:
    """Simplices of the pulling triangulation of a k-face, apex = smallest vertex index"""
    if k == 0:
        return [tuple(face)]
    if k == 1:
        return [tuple(sorted(face))]
    apex = min(face)
    simplices = []
    for sub in _faces_below(polytope, face, k):
        if apex in sub:
            continue
        for s in _fan(polytope, sub, k - 1):
            simplices.append((apex,) + s)
    return simplices


def simplicial_decomposition(polytope: Polytope) -> List[Tuple[Fraction, Point]]:
    """(volume, centroid) of each simplex of the vertex fan"""
    if polytope.degenerate or not polytope.vertices:
        return []
    n = polytope.dim
    verts = polytope.vertices
    pieces = []
    for simplex in _fan(polytope, frozenset(range(len(verts))), n):
        base = verts[simplex[0]]
        rows = [[a - b for a, b in zip(verts[i], base)] for i in simplex[1:]]
        vol = abs(_det(rows)) / math.factorial(n)
        if vol == 0:
            continue
        centre = tuple(sum(verts[i][c] for i in simplex) / (n + 1) for c in range(n))
        pieces.append((vol, centre))
    return pieces


def moments(polytope: Polytope) -> Tuple[Fraction, Optional[Point]]:
    """(volume, centroid); centroid is None when the volume is zero"""
    if polytope.degenerate or not polytope.vertices:
        return Fraction(0), None
    if polytope.dim == 1:
        lo, hi = polytope.vertices[0][0], polytope.vertices[-1][0]
        return hi - lo, ((lo + hi) / 2,)
    if polytope.dim == 2:
        return _polygon_moments(polytope.vertices)
    pieces = simplicial_decomposition(polytope)
    total = sum((v for v, _ in pieces), Fraction(0))
    if total == 0:
        return total, None
    centre = tuple(sum(v * c[i] for v, c in pieces) / total for i in range(polytope.dim))
    return total, centre


def volume(polytope: Polytope) -> Fraction:
    return moments(polytope)[0]


def centroid(polytope: Polytope) -> Point:
    vol, centre = moments(polytope)
    if vol == 0 or centre is None:
        raise DegenerateCentroidError()
    return centre


def section_moments(polytope: Polytope, half: HalfSpace) -> Tuple[Fraction, Optional[Point]]:
    """Moments of P intersected with a half-space without facet bookkeeping.

    Same values as moments(clip(P, half)); the planar case skips building the polytope.
    """
    if polytope.dim == 2 and not polytope.degenerate:
        return _polygon_moments(_clip_cycle(polytope.vertices, half))
    return moments(clip(polytope, half))


def lattice_count_vs_volume(polytope: Polytope, d: int) -> Tuple[int, Fraction]:
    """|dP cap Z^n| next to its leading term vol(P) d^n"""
    count = len(lattice_points(dilate(polytope, d), d))
    return count, volume(polytope) * Fraction(d) ** polytope.dim
