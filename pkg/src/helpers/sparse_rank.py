"""Rank of sparse integer blocks over GF(p) and QQ"""
import logging
from typing import Dict, Tuple

from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

SparseRows = Dict[int, Dict[int, int]]


def to_domain_matrix(rows: SparseRows, shape: Tuple[int, int]) -> DomainMatrix:
    """Dict-of-dicts integer matrix as a sparse DomainMatrix over ZZ"""
    elements = {i: {j: ZZ(v) for j, v in row.items() if v} for i, row in rows.items()}
    elements = {i: row for i, row in elements.items() if row}
    return DomainMatrix(elements, shape, ZZ)


def rank_mod_prime(rows: SparseRows, shape: Tuple[int, int], prime: int) -> int:
    if not rows or 0 in shape:
        return 0
    return to_domain_matrix(rows, shape).convert_to(GF(prime)).rank()


def rank_rational(rows: SparseRows, shape: Tuple[int, int]) -> int:
    if not rows or 0 in shape:
        return 0
    return to_domain_matrix(rows, shape).convert_to(QQ).rank()


def compose_is_zero(outer: SparseRows, inner: SparseRows) -> bool:
    """True when outer * inner is the zero matrix, exact integer arithmetic"""
    for r, row in outer.items():
        acc = {}
        for k, a in row.items():
            for j, b in inner.get(k, {}).items():
                acc[j] = acc.get(j, 0) + a * b
        if any(acc.values()):
            logger.debug(f"nonzero composite in row {r}")
            return False
    return True
