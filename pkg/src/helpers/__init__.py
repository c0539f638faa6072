"""Helper modules for common operations"""
from .parallel import ordered_map
from .simplex import BoundedSimplex, LPResult, solve_bounded_lp
from .sparse_rank import SparseRows, compose_is_zero, rank_mod_prime, rank_rational

__all__ = ['ordered_map', 'BoundedSimplex', 'LPResult', 'solve_bounded_lp',
           'SparseRows', 'compose_is_zero', 'rank_mod_prime', 'rank_rational']
