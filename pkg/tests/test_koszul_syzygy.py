"""Tests for the weight-graded Koszul engine"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import EngineSettings
from src.errors import BlockLimitError, DimensionMismatchError, PrimeUnluckyError
from src.exact_geometry import contains, dilate
from src.koszul_syzygy import (
    KoszulEngine,
    SyzygyInput,
    betti_table,
    euler_check,
    koszul_differential,
    kpq_weights,
    r_d,
    strand_basis,
    window_cloud,
)
from src.polytope_io import builtin


@pytest.fixture(scope='module')
def segment():
    return builtin('segment')


@pytest.fixture(scope='module')
def simplex2():
    return builtin('simplex2')


@pytest.fixture(scope='module')
def square():
    return builtin('square')


def test_strand_basis_segment(segment):
    """Middle term of the d=2 conic strand: 3 sections times 3 module monomials"""
    basis = strand_basis(SyzygyInput(segment, 2, 1, 1), 'middle')
    assert sum(len(v) for v in basis.values()) == 9
    assert list(basis) == [(w,) for w in range(5)]
    for weight, elements in basis.items():
        assert all(e.weight == weight for e in elements)
        assert elements == sorted(elements, key=lambda e: (e.wedge_part, e.module_part))


def test_strand_basis_trivial_and_veronese(segment, simplex2):
    """p = q = 0 has one element; the Veronese middle term has 6 * 6 elements"""
    basis = strand_basis(SyzygyInput(segment, 1, 0, 0), 'middle')
    assert list(basis) == [(0,)]
    assert len(basis[(0,)]) == 1
    veronese = strand_basis(SyzygyInput(simplex2, 2, 1, 1), 'middle')
    assert sum(len(v) for v in veronese.values()) == 36
    assert all(sum(w) <= 4 for w in veronese)


def test_left_term_empty_cases(segment):
    """q = 0 and p + 1 > h^0 both give an empty left term"""
    assert strand_basis(SyzygyInput(segment, 2, 0, 1), 'left') == {}
    assert strand_basis(SyzygyInput(segment, 1, 1, 2), 'left') == {}


def test_differential_conic_weight_two(segment):
    """Hand-checkable block of the conic at weight 2"""
    block = koszul_differential(SyzygyInput(segment, 2, 1, 1), (2,))
    assert [(e.wedge_part, e.module_part) for e in block.middle] == [((0,), (2,)), ((1,), (1,)), ((2,), (0,))]
    assert [(e.wedge_part, e.module_part) for e in block.right] == [((), (2,))]
    assert [(e.wedge_part, e.module_part) for e in block.left] == [((0, 2), (0,))]
    assert block.d_out == {0: {0: 1, 1: 1, 2: 1}}
    assert block.d_in == {2: {0: 1}, 0: {0: -1}}
    assert block.is_complex()


def test_differential_q_zero_and_off_support(segment):
    """q = 0 has no incoming map; weights outside (p+q)d Delta give empty blocks"""
    block = koszul_differential(SyzygyInput(segment, 2, 0, 2), (2,))
    assert block.left == [] and block.d_in == {}
    empty = koszul_differential(SyzygyInput(segment, 2, 1, 1), (9,))
    assert empty.sizes == (0, 0, 0)
    with pytest.raises(DimensionMismatchError):
        koszul_differential(SyzygyInput(segment, 2, 1, 1), (1, 1))


def test_conic_single_quadric(segment):
    """K_{1,1} of the conic is one weight, 2, normalized to 1/2"""
    for mode in ('prime', 'exact', 'both'):
        cloud = kpq_weights(SyzygyInput(segment, 2, 1, 1), mode)
        assert cloud.entries == {(2,): 1}
        assert cloud.normalized() == [((Fraction(1, 2),), 1)]


def test_veronese_betti_numbers(simplex2):
    """Quadratic Veronese surface: 6, 8, 3 in both modes, weight by weight"""
    for p, expected in zip((1, 2, 3), (6, 8, 3)):
        prime = kpq_weights(SyzygyInput(simplex2, 2, 1, p), 'prime')
        exact = kpq_weights(SyzygyInput(simplex2, 2, 1, p), 'exact')
        assert prime.total() == expected
        assert prime.entries == exact.entries


def test_trivial_cloud(square):
    """K_{0,0} is one-dimensional in weight 0"""
    cloud = kpq_weights(SyzygyInput(square, 3, 0, 0))
    assert cloud.entries == {(0, 0): 1}
    assert cloud.normalized() == []


def test_twisted_cubic_betti_table(segment):
    """Rational normal curve of degree 3: K_{1,1} = 3, K_{2,1} = 2"""
    table = betti_table(segment, 3, range(0, 4), range(0, 3))
    assert table[(0, 0)] == 1
    assert table[(1, 1)] == 3
    assert table[(2, 1)] == 2
    assert table[(3, 1)] == 0
    assert all(table[(p, 2)] == 0 for p in range(4))


@pytest.mark.parametrize('name,d,p,q', [('segment', 3, 2, 1), ('simplex2', 2, 2, 1), ('square', 2, 2, 1)])
def test_all_blocks_are_complexes(name, d, p, q):
    """d_out . d_in = 0 on every block of a strand"""
    delta = builtin(name)
    syz = SyzygyInput(delta, d, q, p)
    for weight in strand_basis(syz, 'middle'):
        assert koszul_differential(syz, weight).is_complex()


@pytest.mark.parametrize('name,d,p,q', [('segment', 3, 1, 1), ('simplex2', 2, 2, 1), ('square', 2, 1, 1),
                                        ('square', 1, 1, 2)])
def test_weight_confinement(name, d, p, q):
    """Weights lie in (p+q)d Delta, normalized weights in Delta"""
    delta = builtin(name)
    cloud = kpq_weights(SyzygyInput(delta, d, q, p))
    scaled = dilate(delta, (p + q) * d)
    assert all(contains(scaled, w) for w in cloud.entries)
    assert all(contains(delta, y) for y, _ in cloud.normalized())
    assert all(m >= 1 for m in cloud.entries.values())


def _square_maps(k):
    return [
        lambda x, y: (x, y), lambda x, y: (k - x, y), lambda x, y: (x, k - y), lambda x, y: (k - x, k - y),
        lambda x, y: (y, x), lambda x, y: (k - y, x), lambda x, y: (y, k - x), lambda x, y: (k - y, k - x),
    ]


def test_square_cloud_symmetry(square):
    """Clouds of the square are invariant under its 8 symmetries"""
    for p in (1, 2):
        cloud = kpq_weights(SyzygyInput(square, 2, 1, p))
        k = (p + 1) * 2
        for f in _square_maps(k):
            assert {f(*w): m for w, m in cloud.entries.items()} == cloud.entries


def test_simplex_cloud_symmetry(simplex2):
    """Clouds of the triangle are invariant under permuting barycentric coordinates"""
    import itertools
    cloud = kpq_weights(SyzygyInput(simplex2, 2, 1, 2))
    k = 3 * 2
    for perm in itertools.permutations(range(3)):
        image = {}
        for (x, y), m in cloud.entries.items():
            bary = (x, y, k - x - y)
            image[(bary[perm[0]], bary[perm[1]])] = m
        assert image == cloud.entries


@pytest.mark.parametrize('name,d', [('segment', 1), ('segment', 2), ('segment', 3), ('simplex2', 1),
                                    ('simplex2', 2), ('square', 1)])
def test_euler_check_small(name, d):
    """Alternating strand dimensions match alternating syzygy dimensions"""
    delta = builtin(name)
    for s in range(0, 6):
        assert euler_check(delta, d, s)


@pytest.mark.slow
@pytest.mark.parametrize('name,d', [('simplex2', 3), ('square', 2), ('square', 3)])
def test_euler_check_large(name, d):
    """Euler identity on the bigger strands"""
    delta = builtin(name)
    for s in range(0, 6):
        assert euler_check(delta, d, s)


def test_block_limit(simplex2):
    """Oversized blocks are refused with the weight and sizes in the message"""
    settings = EngineSettings(block_limit=2)
    with pytest.raises(BlockLimitError) as info:
        kpq_weights(SyzygyInput(simplex2, 2, 1, 1), 'prime', settings)
    assert info.value.weight is not None
    assert 'middle=' in str(info.value)


def test_prime_unlucky(segment, monkeypatch):
    """A prime rank that disagrees with the rational rank is reported"""
    import src.koszul_syzygy as module
    monkeypatch.setattr(module, 'rank_mod_prime', lambda rows, shape, prime: 0)
    engine = KoszulEngine(segment, 2, EngineSettings(mode='both'))
    with pytest.raises(PrimeUnluckyError, match='prime unlucky, rerun'):
        engine.kpq_weights(1, 1)


def test_parallel_matches_serial(simplex2):
    """Worker pools merge into the same ordered cloud"""
    serial = kpq_weights(SyzygyInput(simplex2, 2, 1, 2), 'prime', EngineSettings(workers=1))
    pooled = kpq_weights(SyzygyInput(simplex2, 2, 1, 2), 'prime', EngineSettings(workers=2))
    assert list(serial.entries.items()) == list(pooled.entries.items())


def test_window_cloud(segment):
    """The window picks p in [a r_d, b r_d] and normalizes into Delta"""
    cloud = window_cloud(segment, 4, 1, 0.33, 0.66)
    assert sorted(p for p, _ in cloud.sources) == [2]
    assert len(cloud) > 0
    assert all(contains(segment, y) for y in cloud.points)


@pytest.mark.parametrize('name,d', [
    ('simplex2', 1), ('simplex2', 2), ('square', 1), ('square', 2),
    pytest.param('simplex2', 3, marks=pytest.mark.slow),
    pytest.param('square', 3, marks=pytest.mark.slow),
])
def test_rank_modes_agree_on_every_p(name, d):
    """Modular and rational ranks give the same weight multiplicities for p in [1, r_d]"""
    delta = builtin(name)
    for p in range(1, r_d(delta, d) + 1):
        syz = SyzygyInput(delta, d, 1, p)
        assert kpq_weights(syz, 'prime').entries == kpq_weights(syz, 'exact').entries, p
