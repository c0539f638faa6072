"""Exact bounded-variable simplex for small equality-constrained LPs.

Solves  maximize c.x  subject to  A x = b,  0 <= x_j <= u_j
with integer columns and rational right-hand side. Rows are few (the
centroid constraints), columns may number in the thousands, so the basis
inverse is kept dense and all reduced costs are priced at once as one
integer matrix product over a common denominator.

Entering columns follow Dantzig's rule; after STALL_LIMIT degenerate pivots
in a row the solver switches to Bland's rule until the objective moves again.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import LinearProgramError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 200000
STALL_LIMIT = 50

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2


@dataclass
class LPResult:
    status: str  # 'optimal', 'infeasible' or 'iteration_limit'
    objective: Fraction
    values: List[Fraction]
    iterations: int
    basis: List[int] = field(default_factory=list)
    pivots: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == 'optimal'


class BoundedSimplex:
    """Two-phase primal simplex with bound flips"""

    def __init__(self, columns: Sequence[Sequence[int]], rhs: Sequence, objective: Sequence,
                 upper: Sequence, max_iterations: int = DEFAULT_MAX_ITERATIONS):
        self.m = len(rhs)
        self.n = len(columns)
        if len(objective) != self.n or len(upper) != self.n:
            raise LinearProgramError(
                f"{self.n} columns but {len(objective)} costs and {len(upper)} bounds")
        self.columns: List[tuple] = []
        for j, col in enumerate(columns):
            if len(col) != self.m:
                raise LinearProgramError(f"column {j} has {len(col)} entries, expected {self.m}")
            if any(int(a) != a for a in col):
                raise LinearProgramError(f"column {j} is not integral")
            self.columns.append(tuple(int(a) for a in col))
        self.rhs = [Fraction(b) for b in rhs]
        self.objective = [Fraction(c) for c in objective]
        self.upper: List[Optional[Fraction]] = [Fraction(u) for u in upper]
        if any(u < 0 for u in self.upper):
            raise LinearProgramError("upper bounds must be nonnegative")
        self.max_iterations = max_iterations

        # artificial k carries row k with the sign of b_k
        for k, b in enumerate(self.rhs):
            sign = -1 if b < 0 else 1
            self.columns.append(tuple(sign if i == k else 0 for i in range(self.m)))
            self.upper.append(None)
        total = self.n + self.m
        self.matrix = np.empty((total, self.m), dtype=object)
        for j, col in enumerate(self.columns):
            self.matrix[j, :] = col
        self.x: List[Fraction] = [Fraction(0)] * self.n + [abs(b) for b in self.rhs]
        self.basis = [self.n + k for k in range(self.m)]
        self.state = np.full(total, AT_LOWER, dtype=np.int8)
        self.state[self.basis] = BASIC
        self.fixed = np.array([u == 0 for u in self.upper], dtype=bool)
        self.binv = [[Fraction(-1 if self.rhs[i] < 0 else 1) if i == k else Fraction(0)
                      for k in range(self.m)] for i in range(self.m)]
        self.iterations = 0
        self.pivots = 0

    def solve(self) -> LPResult:
        phase_one = [Fraction(0)] * self.n + [Fraction(-1)] * self.m
        if not self._optimize(phase_one):
            return self._result('iteration_limit')
        infeasibility = sum(self.x[self.n:], Fraction(0))
        if infeasibility > 0:
            logger.debug(f"phase one ended with infeasibility {infeasibility}")
            return self._result('infeasible')
        for k in range(self.n, self.n + self.m):
            self.upper[k] = Fraction(0)
        self.fixed[self.n:] = True
        if not self._optimize(self.objective + [Fraction(0)] * self.m):
            return self._result('iteration_limit')
        return self._result('optimal')

    def _result(self, status: str) -> LPResult:
        values = self.x[:self.n]
        objective = sum((c * v for c, v in zip(self.objective, values)), Fraction(0))
        logger.debug(f"simplex {status} after {self.iterations} steps ({self.pivots} pivots), "
                     f"objective {float(objective):.6f}")
        return LPResult(status, objective, list(values), self.iterations, list(self.basis), self.pivots)

    def _reduced_costs(self, scaled_cost: np.ndarray, cost_denom: int, cost: List[Fraction]) -> np.ndarray:
        """c_j - pi.a_j for every column, scaled to integers"""
        if not self.m:
            return scaled_cost
        pi = [sum((cost[self.basis[i]] * self.binv[i][k] for i in range(self.m)), Fraction(0))
              for k in range(self.m)]
        pi_denom = 1
        for value in pi:
            pi_denom = math.lcm(pi_denom, value.denominator)
        scale = math.lcm(pi_denom, cost_denom)
        pi_num = np.array([int(value * scale) for value in pi], dtype=object)
        return scaled_cost * (scale // cost_denom) - self.matrix.dot(pi_num)

    def _candidates(self, reduced: np.ndarray, bland: bool) -> np.ndarray:
        """Improving nonbasic columns, best first (or by index under Bland's rule)"""
        positive = (reduced > 0).astype(bool)
        negative = (reduced < 0).astype(bool)
        free = ~self.fixed & (self.state != BASIC)
        eligible = free & ((positive & (self.state == AT_LOWER)) | (negative & (self.state == AT_UPPER)))
        found = np.flatnonzero(eligible)
        if bland or len(found) < 2:
            return found
        magnitude = np.abs(reduced[found])
        return found[np.argsort(-magnitude, kind='stable')]

    def _optimize(self, cost: List[Fraction]) -> bool:
        """Run to optimality under `cost`; False when the step budget runs out"""
        cost_denom = 1
        for c in cost:
            cost_denom = math.lcm(cost_denom, c.denominator)
        scaled_cost = np.array([int(c * cost_denom) for c in cost], dtype=object)
        stalled = 0
        while True:
            reduced = self._reduced_costs(scaled_cost, cost_denom, cost)
            candidates = self._candidates(reduced, stalled >= STALL_LIMIT)
            if not len(candidates):
                return True
            # bound flips leave the prices unchanged, so the list is walked until the basis moves
            for j in candidates:
                j = int(j)
                if self.iterations >= self.max_iterations:
                    logger.warning(f"simplex stopped after {self.iterations} steps")
                    return False
                self.iterations += 1
                direction = 1 if self.state[j] == AT_LOWER else -1
                pivoted, length = self._step(j, direction)
                stalled = stalled + 1 if length == 0 else 0
                if pivoted:
                    break

    def _step(self, j: int, direction: int) -> Tuple[bool, Fraction]:
        """Move x_j in `direction`; (basis changed, step length)"""
        col = self.columns[j]
        alpha = [sum((self.binv[i][k] * col[k] for k in range(self.m) if col[k]), Fraction(0))
                 for i in range(self.m)]
        best = self.upper[j]
        leave = None
        for i in range(self.m):
            delta = -direction * alpha[i]
            if delta == 0:
                continue
            var = self.basis[i]
            if delta < 0:
                limit = self.x[var] / -delta
            elif self.upper[var] is None:
                continue
            else:
                limit = (self.upper[var] - self.x[var]) / delta
            if best is None or limit < best:
                best, leave = limit, i
            elif limit == best and leave is not None and var < self.basis[leave]:
                leave = i
        if best is None:
            raise LinearProgramError(f"unbounded direction at column {j}")
        self.x[j] += direction * best
        for i in range(self.m):
            if alpha[i]:
                self.x[self.basis[i]] -= direction * best * alpha[i]
        if leave is None:
            self.state[j] = AT_UPPER if direction > 0 else AT_LOWER
            return False, best

        out = self.basis[leave]
        # snap the leaving variable onto the bound it reached
        if self.upper[out] is not None and self.x[out] == self.upper[out]:
            self.state[out] = AT_UPPER
        else:
            self.x[out] = Fraction(0)
            self.state[out] = AT_LOWER
        pivot = alpha[leave]
        row = [value / pivot for value in self.binv[leave]]
        for i in range(self.m):
            if i == leave:
                self.binv[i] = row
            elif alpha[i]:
                factor = alpha[i]
                self.binv[i] = [a - factor * b for a, b in zip(self.binv[i], row)]
        self.basis[leave] = j
        self.state[j] = BASIC
        self.pivots += 1
        return True, best


def solve_bounded_lp(columns: Sequence[Sequence[int]], rhs: Sequence, objective: Sequence,
                     upper: Sequence, max_iterations: int = DEFAULT_MAX_ITERATIONS) -> LPResult:
    """maximize objective.x s.t. columns x = rhs, 0 <= x <= upper (exact)"""
    return BoundedSimplex(columns, rhs, objective, upper, max_iterations).solve()
