"""Weight-graded Koszul cohomology K_{p,q}(X; L_d) of toric embeddings"""
import itertools
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .config import EngineSettings
from .errors import (BlockLimitError, ConfigError, DimensionMismatchError, PrimeUnluckyError,
                     WedgeLimitError)
from .exact_geometry import IntVector, Point, Polytope, dilate, lattice_points
from .helpers.parallel import ordered_map
from .helpers.sparse_rank import SparseRows, compose_is_zero, rank_mod_prime, rank_rational

logger = logging.getLogger(__name__)

TERMS = ('left', 'middle', 'right')


@dataclass(frozen=True)
class SyzygyInput:
    delta: Polytope
    d: int
    q: int
    p: int

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError(f"dilation d must be positive, got {self.d}")
        if self.q < 0 or self.p < 0:
            raise ConfigError(f"p and q must be nonnegative, got p={self.p}, q={self.q}")

    @property
    def divisor(self) -> int:
        return (self.p + self.q) * self.d


@dataclass(frozen=True)
class StrandBasisElement:
    wedge_part: Tuple[int, ...]
    module_part: IntVector
    weight: IntVector


@dataclass
class KoszulBlock:
    """The three terms of one strand at a fixed torus weight.

    d_in maps left -> middle (rows index the middle basis), d_out maps
    middle -> right (rows index the right basis). Entries are +1 or -1.
    """
    weight: IntVector
    left: List[StrandBasisElement]
    middle: List[StrandBasisElement]
    right: List[StrandBasisElement]
    d_in: SparseRows
    d_out: SparseRows

    @property
    def sizes(self) -> Tuple[int, int, int]:
        return len(self.left), len(self.middle), len(self.right)

    @property
    def d_in_shape(self) -> Tuple[int, int]:
        return len(self.middle), len(self.left)

    @property
    def d_out_shape(self) -> Tuple[int, int]:
        return len(self.right), len(self.middle)

    def is_complex(self) -> bool:
        return compose_is_zero(self.d_out, self.d_in)


@dataclass
class WeightCloud:
    """Torus weights of one K_{p,q} with multiplicities"""
    p: int
    q: int
    d: int
    dim: int
    entries: Dict[IntVector, int] = field(default_factory=dict)

    @property
    def divisor(self) -> int:
        return (self.p + self.q) * self.d

    def __len__(self):
        return len(self.entries)

    def total(self) -> int:
        return sum(self.entries.values())

    def normalized(self) -> List[Tuple[Point, int]]:
        """(w / ((p+q)d), multiplicity); empty for the divisor-0 cloud K_{0,0}"""
        if self.divisor == 0:
            return []
        return [(tuple(Fraction(c, self.divisor) for c in w), m) for w, m in self.entries.items()]


@dataclass
class NormalizedCloud:
    """Union of normalized weights over several (p, d), multiplicities summed"""
    q: int
    dim: int
    points: Dict[Point, int] = field(default_factory=dict)
    sources: List[Tuple[int, int]] = field(default_factory=list)

    def add(self, cloud: WeightCloud):
        self.sources.append((cloud.p, cloud.d))
        for point, mult in cloud.normalized():
            self.points[point] = self.points.get(point, 0) + mult

    def sorted_points(self) -> List[Point]:
        return sorted(self.points)

    def __len__(self):
        return len(self.points)


def _vector_add(a: Sequence[int], b: Sequence[int]) -> IntVector:
    return tuple(x + y for x, y in zip(a, b))


def _vector_sub(a: Sequence[int], b: Sequence[int]) -> IntVector:
    return tuple(x - y for x, y in zip(a, b))


class KoszulEngine:
    """Strand bases, differentials and ranks for one (Delta, d)"""

    def __init__(self, delta: Polytope, d: int, settings: Optional[EngineSettings] = None):
        if d < 1:
            raise ConfigError(f"dilation d must be positive, got {d}")
        self.delta = delta
        self.d = d
        self.settings = settings or EngineSettings()
        self.n = delta.dim
        self.zero = (0,) * self.n
        self.sections = lattice_points(dilate(delta, d), d).points
        if not self.sections:
            raise ConfigError(f"{delta.name or 'polytope'} scaled by {d} has no lattice points")
        self._modules: Dict[int, Tuple[IntVector, ...]] = {}
        self._subsets: Dict[int, Dict[IntVector, List[Tuple[int, ...]]]] = {}
        logger.info(f"Koszul engine for {delta.name or 'polytope'}, d={d}: h0 = {len(self.sections)}")

    @property
    def r_d(self) -> int:
        return len(self.sections) - 1

    def module_points(self, m: int) -> Tuple[IntVector, ...]:
        """Monomial basis of H^0(m L_d): lattice points of (m d) Delta"""
        if m < 0:
            return ()
        if m == 0:
            return (self.zero,)
        if m not in self._modules:
            self._modules[m] = lattice_points(dilate(self.delta, m * self.d), m * self.d).points
        return self._modules[m]

    def subsets_by_sum(self, k: int) -> Dict[IntVector, List[Tuple[int, ...]]]:
        """Increasing k-tuples of section indices grouped by their weight sum"""
        if k in self._subsets:
            return self._subsets[k]
        size = len(self.sections)
        if k < 0 or k > size:
            self._subsets[k] = {}
            return self._subsets[k]
        count = math.comb(size, k)
        if count > self.settings.wedge_limit:
            raise WedgeLimitError(count, self.settings.wedge_limit)
        grouped = defaultdict(list)
        sections = self.sections
        for combo in itertools.combinations(range(size), k):
            total = self.zero
            for i in combo:
                total = _vector_add(total, sections[i])
            grouped[total].append(combo)
        self._subsets[k] = dict(grouped)
        logger.debug(f"wedge^{k}: {count} tuples, {len(grouped)} distinct sums")
        return self._subsets[k]

    def term_shape(self, p: int, q: int, term: str) -> Tuple[int, int]:
        """(wedge size, module multiple) of a strand term"""
        if term == 'left':
            return p + 1, q - 1
        if term == 'middle':
            return p, q
        if term == 'right':
            return p - 1, q + 1
        raise ConfigError(f"unknown strand term '{term}' (expected one of {TERMS})")

    def term_at_weight(self, k: int, m: int, weight: IntVector) -> List[StrandBasisElement]:
        if k < 0:
            return []
        by_sum = self.subsets_by_sum(k)
        elements = []
        for u in self.module_points(m):
            for wedge in by_sum.get(_vector_sub(weight, u), ()):
                elements.append(StrandBasisElement(wedge, u, weight))
        elements.sort(key=lambda e: (e.wedge_part, e.module_part))
        return elements

    def term_weights(self, k: int, m: int) -> List[IntVector]:
        if k < 0:
            return []
        sums = self.subsets_by_sum(k)
        weights = {_vector_add(s, u) for s in sums for u in self.module_points(m)}
        return sorted(weights)

    def term_dimensions(self, k: int, m: int) -> Counter:
        """dim of the term wedge^k V (x) H^0(m L_d) in each weight"""
        dims = Counter()
        if k < 0:
            return dims
        for s, wedges in self.subsets_by_sum(k).items():
            for u in self.module_points(m):
                dims[_vector_add(s, u)] += len(wedges)
        return dims

    def strand_basis(self, p: int, q: int, term: str) -> Dict[IntVector, List[StrandBasisElement]]:
        k, m = self.term_shape(p, q, term)
        return {w: self.term_at_weight(k, m, w) for w in self.term_weights(k, m)}

    def _differential(self, source: List[StrandBasisElement],
                      target: List[StrandBasisElement]) -> SparseRows:
        """Koszul map e_S (x) u -> sum_j (-1)^j e_{S - s_j} (x) (u + w_{s_j}), rows index target"""
        index = {(e.wedge_part, e.module_part): i for i, e in enumerate(target)}
        rows: SparseRows = {}
        for col, element in enumerate(source):
            wedge = element.wedge_part
            for j, s in enumerate(wedge):
                key = (wedge[:j] + wedge[j + 1:], _vector_add(element.module_part, self.sections[s]))
                row = index[key]
                rows.setdefault(row, {})[col] = -1 if j % 2 else 1
        return rows

    def block(self, p: int, q: int, weight: Sequence[int]) -> KoszulBlock:
        weight = tuple(weight)
        terms = {}
        for term in TERMS:
            k, m = self.term_shape(p, q, term)
            terms[term] = self.term_at_weight(k, m, weight)
        sizes = (len(terms['left']), len(terms['middle']), len(terms['right']))
        if sizes[1] > self.settings.block_limit:
            raise BlockLimitError(p, q, weight, sizes, self.settings.block_limit)
        d_in = self._differential(terms['left'], terms['middle'])
        d_out = self._differential(terms['middle'], terms['right'])
        return KoszulBlock(weight, terms['left'], terms['middle'], terms['right'], d_in, d_out)

    def _rank(self, rows: SparseRows, shape: Tuple[int, int], mode: str, weight: IntVector) -> int:
        if mode == 'prime':
            return rank_mod_prime(rows, shape, self.settings.prime)
        if mode == 'exact':
            return rank_rational(rows, shape)
        prime_rank = rank_mod_prime(rows, shape, self.settings.prime)
        exact_rank = rank_rational(rows, shape)
        if prime_rank != exact_rank:
            raise PrimeUnluckyError(weight, prime_rank, exact_rank)
        return exact_rank

    def multiplicity(self, p: int, q: int, weight: Sequence[int], mode: Optional[str] = None) -> int:
        """dim of the weight space: |middle| - rank d_in - rank d_out"""
        mode = mode or self.settings.mode
        blk = self.block(p, q, weight)
        if not blk.middle:
            return 0
        rank_in = self._rank(blk.d_in, blk.d_in_shape, mode, blk.weight)
        rank_out = self._rank(blk.d_out, blk.d_out_shape, mode, blk.weight)
        return len(blk.middle) - rank_in - rank_out

    def kpq_weights(self, p: int, q: int, mode: Optional[str] = None) -> WeightCloud:
        mode = mode or self.settings.mode
        weights = self.term_weights(p, q)
        logger.info(f"K_{{{p},{q}}} at d={self.d}: {len(weights)} candidate weights ({mode} mode)")
        if self.settings.workers > 1:
            results = ordered_map(_worker_multiplicity, [(p, q, w, mode) for w in weights],
                                  self.settings.workers, _init_worker, (self.delta, self.d, self.settings))
        else:
            results = [self.multiplicity(p, q, w, mode) for w in weights]
        entries = {w: m for w, m in sorted(zip(weights, results)) if m > 0}
        return WeightCloud(p, q, self.d, self.n, entries)

    def euler_check(self, s: int, mode: Optional[str] = None) -> bool:
        """Alternating dimensions of the strand C_i = wedge^{s-i} V (x) H^0(i L_d) vs its cohomology"""
        chain = Counter()
        homology = Counter()
        for i in range(s + 1):
            sign = -1 if i % 2 else 1
            for w, dim in self.term_dimensions(s - i, i).items():
                chain[w] += sign * dim
            for w, dim in self.kpq_weights(s - i, i, mode).entries.items():
                homology[w] += sign * dim
        weights = set(chain) | set(homology)
        bad = [w for w in weights if chain[w] != homology[w]]
        if bad:
            logger.warning(f"Euler check failed for strand {s} at {len(bad)} weights, e.g. {min(bad)}")
        return not bad


_WORKER_ENGINE: Optional[KoszulEngine] = None


def _init_worker(delta, d, settings):
    global _WORKER_ENGINE
    _WORKER_ENGINE = KoszulEngine(delta, d, settings)


def _worker_multiplicity(args):
    p, q, weight, mode = args
    return _WORKER_ENGINE.multiplicity(p, q, weight, mode)


def engine_for(delta: Polytope, d: int, settings: Optional[EngineSettings]) -> KoszulEngine:
    settings = settings or EngineSettings()
    return _cached_engine(delta, d, settings.prime, settings.block_limit, settings.wedge_limit,
                          settings.workers, settings.mode)


@lru_cache(maxsize=16)
def _cached_engine(delta, d, prime, block_limit, wedge_limit, workers, mode) -> KoszulEngine:
    settings = EngineSettings(prime=prime, block_limit=block_limit, wedge_limit=wedge_limit,
                              workers=workers, mode=mode)
    return KoszulEngine(delta, d, settings)


def r_d(delta: Polytope, d: int) -> int:
    return len(lattice_points(dilate(delta, d), d)) - 1


def strand_basis(syz: SyzygyInput, term: str,
                 settings: Optional[EngineSettings] = None) -> Dict[IntVector, List[StrandBasisElement]]:
    """Basis of one strand term grouped by weight, weights in lexicographic order"""
    return engine_for(syz.delta, syz.d, settings).strand_basis(syz.p, syz.q, term)


def koszul_differential(syz: SyzygyInput, weight: Sequence[int],
                        settings: Optional[EngineSettings] = None) -> KoszulBlock:
    """Basis triple and both differentials at one weight; empty bases off the support"""
    engine = engine_for(syz.delta, syz.d, settings)
    weight = tuple(int(c) for c in weight)
    if len(weight) != engine.n:
        raise DimensionMismatchError(engine.n, len(weight))
    return engine.block(syz.p, syz.q, weight)


def kpq_weights(syz: SyzygyInput, mode: str = 'prime',
                settings: Optional[EngineSettings] = None) -> WeightCloud:
    """Weight cloud of K_{p,q}; mode is 'prime', 'exact' or 'both' (cross-checked)"""
    return engine_for(syz.delta, syz.d, settings).kpq_weights(syz.p, syz.q, mode)


def euler_check(delta: Polytope, d: int, s: int, mode: str = 'prime',
                settings: Optional[EngineSettings] = None) -> bool:
    if s < 0:
        raise ConfigError(f"strand total must be nonnegative, got {s}")
    return engine_for(delta, d, settings).euler_check(s, mode)


def betti_table(delta: Polytope, d: int, p_values: Iterable[int], q_values: Iterable[int],
                mode: str = 'prime', settings: Optional[EngineSettings] = None) -> Dict[Tuple[int, int], int]:
    """dim K_{p,q} for every requested (p, q)"""
    engine = engine_for(delta, d, settings)
    table = {}
    for q in q_values:
        for p in p_values:
            table[(p, q)] = engine.kpq_weights(p, q, mode).total()
    return table


def window_p_values(r: int, a: float, b: float) -> List[int]:
    """Integers p in [a r_d, b r_d], at least 1"""
    lo = max(1, math.ceil(Fraction(a) * r - Fraction(1, 10 ** 12)))
    hi = math.floor(Fraction(b) * r + Fraction(1, 10 ** 12))
    return list(range(lo, min(hi, r) + 1))


def window_cloud(delta: Polytope, d: int, q: int, a: float, b: float, mode: str = 'prime',
                 settings: Optional[EngineSettings] = None,
                 p_cap: Optional[int] = None) -> NormalizedCloud:
    """Normalized weights of K_{p,q}(X; L_d) over a r_d <= p <= b r_d"""
    if not 0 <= a < b <= 1:
        raise ConfigError(f"window needs 0 <= a < b <= 1, got a={a}, b={b}")
    engine = engine_for(delta, d, settings)
    cloud = NormalizedCloud(q, delta.dim)
    for p in window_p_values(engine.r_d, a, b):
        if p_cap is not None and p > p_cap:
            logger.warning(f"window restricted to p <= {p_cap} at d={d}")
            break
        cloud.add(engine.kpq_weights(p, q, mode))
    return cloud
