"""
Square linear solves for the moment orthogonality systems.

Rational systems are cleared to integers row by row and solved with
fraction-free (Bareiss) elimination, so every intermediate stays an integer
and the result is exact. Real or complex systems go through mpmath's pivoted
LU at working precision and report the 1-norm condition number.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence

import mpmath

from mopasym.core.errors import SingularMomentMatrix
from mopasym.core.precision import Number, PrecisionContext, is_exact, to_mpf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearSolution:
    values: List[Number]
    exact: bool
    condition: Optional[Any] = None


def _integer_rows(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> List[List[int]]:
    rows: List[List[int]] = []
    for row, b in zip(matrix, rhs):
        entries = [Fraction(v) for v in row] + [Fraction(b)]
        scale = math.lcm(*(v.denominator for v in entries))
        rows.append([int(v * scale) for v in entries])
    return rows


def solve_exact(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> List[Fraction]:
    """Bareiss elimination on the integer-scaled augmented matrix."""
    size = len(matrix)
    if size == 0:
        return []
    m = _integer_rows(matrix, rhs)
    previous = 1
    for k in range(size):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if m[i][k] != 0), None)
            if swap is None:
                raise SingularMomentMatrix(f"moment matrix is singular (rank deficiency at column {k})")
            m[k], m[swap] = m[swap], m[k]
        pivot = m[k][k]
        for i in range(k + 1, size):
            factor = m[i][k]
            row = m[i]
            top = m[k]
            for j in range(k + 1, size + 1):
                row[j] = (row[j] * pivot - factor * top[j]) // previous
            row[k] = 0
        previous = pivot
    solution: List[Fraction] = [Fraction(0)] * size
    for i in range(size - 1, -1, -1):
        acc = Fraction(m[i][size])
        for j in range(i + 1, size):
            acc -= m[i][j] * solution[j]
        solution[i] = acc / m[i][i]
    return solution


def solve_real(matrix: Sequence[Sequence[Any]], rhs: Sequence[Any], ctx: PrecisionContext) -> LinearSolution:
    size = len(matrix)
    if size == 0:
        return LinearSolution(values=[], exact=False, condition=mpmath.mpf(1))
    with ctx.workdps(ctx.guard):
        a = mpmath.matrix([[to_mpf(v) for v in row] for row in matrix])
        b = mpmath.matrix([to_mpf(v) for v in rhs])
        try:
            x = mpmath.lu_solve(a, b)
            condition = mpmath.mnorm(a, 1) * mpmath.mnorm(mpmath.inverse(a), 1)
        except ZeroDivisionError as exc:
            raise SingularMomentMatrix(f"moment matrix is numerically singular: {exc}") from exc
        values = [x[i] for i in range(size)]
    logger.debug("Real-mode solve of size %s, condition %s", size, mpmath.nstr(condition, 5))
    if condition * ctx.eps > 1:
        raise SingularMomentMatrix(
            f"moment matrix condition {mpmath.nstr(condition, 5)} exceeds the working precision"
        )
    return LinearSolution(values=values, exact=False, condition=condition)


def solve_linear(matrix: Sequence[Sequence[Any]], rhs: Sequence[Any], ctx: PrecisionContext) -> LinearSolution:
    """Exact when every entry is rational, otherwise pivoted LU."""
    if all(is_exact(*row) for row in matrix) and is_exact(*rhs):
        return LinearSolution(values=list(solve_exact(matrix, rhs)), exact=True)
    return solve_real(matrix, rhs, ctx)
