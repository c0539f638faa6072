"""Tests for exact rational polytope geometry"""
import itertools
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import DegenerateCentroidError, DimensionMismatchError, UnboundedPolytopeError
from src.exact_geometry import (
    HalfSpace,
    Polytope,
    _det,
    _nullspace_vector,
    _solve,
    affine_dimension,
    centroid,
    clip,
    contains,
    dilate,
    lattice_count_vs_volume,
    lattice_points,
    section_moments,
    volume,
)
from src.polytope_io import builtin

F = Fraction


@pytest.fixture
def square():
    return builtin('square')


@pytest.fixture
def simplex2():
    return builtin('simplex2')


def test_dilate_examples(square, simplex2):
    """Dilation scales vertices and facet offsets"""
    assert dilate(square, 1).vertices == square.vertices
    assert dilate(builtin('segment'), 4).vertices == ((F(0),), (F(4),))
    assert set(dilate(simplex2, 2).vertices) == {(0, 0), (2, 0), (0, 2)}
    assert not dilate(simplex2, 2).validate()


def test_lattice_point_counts(square, simplex2):
    """Lattice points of small dilations, in lexicographic order"""
    assert len(lattice_points(dilate(simplex2, 2))) == 6
    assert lattice_points(square).points == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert len(lattice_points(dilate(square, 2))) == 9
    assert len(lattice_points(dilate(simplex2, 4))) == 15
    points = lattice_points(dilate(simplex2, 3)).points
    assert list(points) == sorted(points)


def test_lattice_points_unbounded():
    """Half-spaces that leave a direction open are rejected"""
    with pytest.raises(UnboundedPolytopeError):
        Polytope.from_halfspaces(2, [HalfSpace((-1, 0), 0), HalfSpace((0, -1), 0)])


def test_rational_linear_algebra():
    """Ranks, solves, determinants and null vectors stay exact"""
    assert affine_dimension([(0, 0), (F(1, 3), F(2, 3)), (F(2, 3), F(4, 3))]) == 1
    assert affine_dimension([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]) == 3
    assert _solve([[F(1, 2), 1], [1, -1]], [F(5, 2), F(-1, 3)]) == [F(13, 9), F(16, 9)]
    assert _solve([[1, 2], [2, 4]], [1, 2]) is None
    assert _det([[F(1, 3), 0, 0], [0, 2, 0], [5, 7, F(3, 2)]]) == 1
    ray = _nullspace_vector([[1, 1, 0], [0, 1, 1]], 3)
    assert ray[0] != 0 and ray[0] == -ray[1] == ray[2]
    pentagon = Polytope.from_halfspaces(2, [HalfSpace((-1, 0), 0), HalfSpace((0, -1), 0),
                                            HalfSpace((1, 0), 1), HalfSpace((0, 1), 1),
                                            HalfSpace((1, 1), F(3, 2))])
    assert set(pentagon.vertices) == {(0, 0), (1, 0), (1, F(1, 2)), (F(1, 2), 1), (0, 1)}
    assert volume(pentagon) == F(7, 8)


def test_clip_examples(square):
    """Clip to a slab, to a corner point and by a redundant half-space"""
    half = clip(square, HalfSpace((0, 1), F(1, 2)))
    assert set(half.vertices) == {(0, 0), (1, 0), (1, F(1, 2)), (0, F(1, 2))}
    corner = clip(square, HalfSpace((1, 1), 0))
    assert corner.vertices == ((0, 0),)
    assert corner.degenerate
    assert clip(square, HalfSpace((1, 0), 2)) == square


def test_volume_and_centroid_examples(square, simplex2):
    """Exact volumes and centres of mass"""
    assert volume(square) == 1
    triangle = clip(square, HalfSpace((1, 1), F(1, 2)))
    assert volume(triangle) == F(1, 8)
    assert volume(dilate(simplex2, 2)) == 2
    assert centroid(square) == (F(1, 2), F(1, 2))
    assert centroid(clip(square, HalfSpace((0, 1), F(1, 2)))) == (F(1, 2), F(1, 4))
    assert centroid(simplex2) == (F(1, 3), F(1, 3))


def test_simplex3_moments():
    """Three-dimensional volume via the vertex fan"""
    tetra = builtin('simplex3')
    assert volume(tetra) == F(1, 6)
    assert centroid(tetra) == (F(1, 4), F(1, 4), F(1, 4))
    cube = Polytope.from_vertices(list(itertools.product((0, 1), repeat=3)))
    assert volume(cube) == 1
    cut = clip(cube, HalfSpace((0, 0, 1), F(1, 3)))
    assert volume(cut) == F(1, 3)
    assert centroid(cut) == (F(1, 2), F(1, 2), F(1, 6))


def test_degenerate_centroid(square):
    """Zero-volume results have no centroid"""
    corner = clip(square, HalfSpace((1, 1), 0))
    assert volume(corner) == 0
    with pytest.raises(DegenerateCentroidError, match="degenerate centroid"):
        centroid(corner)


def test_contains(square):
    """Boundary points count as inside"""
    assert contains(square, (F(1, 2), F(1, 2)))
    assert not contains(square, (2, 0))
    assert contains(square, (1, 1))
    with pytest.raises(DimensionMismatchError):
        contains(square, (0,))


def test_section_moments_match_clip(square):
    """Planar fast path agrees with clip + moments"""
    half = HalfSpace((F(3), F(-2)), F(1, 7))
    vol, centre = section_moments(square, half)
    assert vol == volume(clip(square, half))
    assert centre == centroid(clip(square, half))


def test_lattice_count_vs_volume(simplex2):
    """h^0 next to vol(P) d^n"""
    assert lattice_count_vs_volume(simplex2, 4) == (15, F(8))


small = st.integers(min_value=-6, max_value=6)
nonzero = st.integers(min_value=-6, max_value=6).filter(lambda v: v != 0)


@st.composite
def polygons(draw):
    points = draw(st.lists(st.tuples(small, small), min_size=3, max_size=7, unique=True))
    flat = all((b[0] - a[0]) * (c[1] - a[1]) == (b[1] - a[1]) * (c[0] - a[0])
               for a, b, c in itertools.combinations(points, 3))
    assume(not flat)
    return Polytope.from_vertices(points)


@st.composite
def halfplanes(draw):
    normal = (draw(nonzero), draw(small))
    offset = F(draw(st.integers(-30, 30)), draw(st.integers(1, 5)))
    return HalfSpace(normal, offset)


@settings(max_examples=40, deadline=None)
@given(polygons(), st.integers(min_value=1, max_value=5))
def test_dilation_scales_moments(polygon, d):
    """vol(dP) = d^2 vol(P) and centroid(dP) = d centroid(P)"""
    scaled = dilate(polygon, d)
    assert volume(scaled) == d ** 2 * volume(polygon)
    assert centroid(scaled) == tuple(d * c for c in centroid(polygon))


@settings(max_examples=60, deadline=None)
@given(polygons(), halfplanes())
def test_clip_volumes_add_up(polygon, half):
    """Both sides of a hyperplane partition the volume"""
    below = clip(polygon, half)
    above = clip(polygon, half.complement())
    assert volume(below) + volume(above) == volume(polygon)
    for v in below.vertices:
        assert contains(polygon, v)
        assert half.contains(v)


@settings(max_examples=30, deadline=None)
@given(polygons(), st.integers(min_value=1, max_value=10))
def test_lattice_points_match_brute_force(polygon, d):
    """Sweep count equals a direct filter of the bounding box"""
    scaled = dilate(polygon, d)
    lo, hi = scaled.bounding_box()
    brute = [p for p in itertools.product(range(int(lo[0]) - 1, int(hi[0]) + 2),
                                          range(int(lo[1]) - 1, int(hi[1]) + 2))
             if contains(scaled, p)]
    assert list(lattice_points(scaled).points) == sorted(brute)
