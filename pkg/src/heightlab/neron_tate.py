"""Telescoping approximation of the canonical (Neron-Tate) height.

For a point P on a smooth fiber, repeated doubling gives the sequence
``q_l = h([2^l] P) / 4^l`` where h is the exact *fiber* Weil height of the
embedded point (the (x : y : 1) factor; the base factor (s : 1) is constant
along the fiber and enters the total height separately).  Doubling pulls the
fiber polarization back to its fourth power, so consecutive terms differ by
at most ``c * lambda / 4^(l+1)`` with ``lambda = max(1, h(s))``, and the
geometric series telescopes to the two-row bound

    |q_l - q_m| <= c * lambda / 4^m        (m <= l),

which is how a finite table certifies convergence.  The estimate at depth m
is q_m with error bound ``c_cal * lambda / 4^m`` for an empirically
calibrated constant c_cal.

Exactness: the table stores the raw integer heights h([2^l] P); over F_p(u)
the quotient q_l = h_l / 4^l is an exact Fraction, over Q the exact datum is
the integer H_l with q_l = log(H_l)/4^l converted to float only in views and
reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import ResourceLimitError
from .exact_arith import Rationals, base_field_label
from .elliptic import (FiberPoint, add, base_height, doubling_fiber_heights,
                       fiber_height, total_height)
from .heights import ExactHeight

MAX_DOUBLING_DEPTH = 10


@dataclass(frozen=True)
class ConvergenceTable:
    """Fiber heights of P, [2]P, [4]P, ..., [2^depth]P with the base scale.

    ``fiber_heights[l]`` is the exact integer height of [2^l]P (multiplicative
    H over Q, degree over F_p(u)); ``base`` is the exact height of (s : 1).
    """

    point: FiberPoint
    depth: int
    fiber_heights: tuple[int, ...]
    base: ExactHeight

    @property
    def field(self):
        return self.base.field

    def q_exact(self, level: int) -> Fraction | None:
        """Exact q_l where the field allows: h_l / 4^l over F_p(u), None
        over Q (where q_l involves a log)."""
        if isinstance(self.field, Rationals):
            return None
        return Fraction(self.fiber_heights[level], 4 ** level)

    def q_float(self, level: int) -> float:
        """Float view of q_l."""
        h = self.fiber_heights[level]
        if isinstance(self.field, Rationals):
            return math.log(h) / 4 ** level
        return h / 4 ** level

    def base_scale(self) -> Union[float, int]:
        """lambda = max(1, h(s)): float over Q (log scale), int over F_p(u)."""
        if isinstance(self.field, Rationals):
            return max(1.0, self.base.log_value())
        return max(1, self.base.value)

    def pair_gap(self, l: int, m: int) -> float:
        """|q_l - q_m| as a float."""
        return abs(self.q_float(l) - self.q_float(m))

    def rows(self) -> list[dict]:
        """Report rows, one per level (deterministic: no floats beyond the
        float views of exact data)."""
        out = []
        for level, h in enumerate(self.fiber_heights):
            q = self.q_exact(level)
            out.append({
                "level": level,
                "fiber_height": h,
                "q_exact": None if q is None else f"{q.numerator}/{q.denominator}",
                "q": self.q_float(level),
            })
        return out


def convergence_table(point: FiberPoint, depth: int) -> ConvergenceTable:
    """Build the doubling table down to ``depth`` (1 <= depth <= 10).

    The depth cap is a resource guard: heights grow like 4^depth, so depth
    10 already means millions of digits on high fibers; the coordinate size
    guard inside the group law provides the second line of defense.
    """
    if not isinstance(depth, int) or not 1 <= depth <= MAX_DOUBLING_DEPTH:
        raise ResourceLimitError(
            f"doubling depth must be in 1..{MAX_DOUBLING_DEPTH}, got {depth!r}")
    fast = doubling_fiber_heights(point, depth)
    if fast is not None:
        return ConvergenceTable(point, depth, fast, base_height(point))
    heights = [fiber_height(point).value]
    current = point
    for _ in range(depth):
        current = add(current, current)
        heights.append(fiber_height(current).value)
    return ConvergenceTable(point, depth, tuple(heights), base_height(point))


@dataclass(frozen=True)
class NTEstimate:
    """A depth-m canonical height estimate with its telescoping error bound."""

    estimate: float
    depth: int
    error_bound: float
    c_cal: float
    table: ConvergenceTable


def neron_tate(point: FiberPoint, depth: int, c_cal: float) -> NTEstimate:
    """Estimate the canonical height by q_depth, with error bound
    ``c_cal * lambda / 4^depth``."""
    table = convergence_table(point, depth)
    lam = float(table.base_scale())
    return NTEstimate(
        estimate=table.q_float(depth),
        depth=depth,
        error_bound=c_cal * lam / 4 ** depth,
        c_cal=c_cal,
        table=table,
    )


def telescoping_consistency(table: ConvergenceTable, c_cal: float,
                            rel_tol: float = 1e-9) -> bool:
    """Whether |q_l - q_m| <= c_cal * lambda / 4^m holds for every pair
    m <= l of table rows (float comparison at relative tolerance)."""
    lam = float(table.base_scale())
    for m in range(table.depth + 1):
        bound = c_cal * lam / 4 ** m
        for l in range(m, table.depth + 1):
            if table.pair_gap(l, m) > bound * (1 + rel_tol):
                return False
    return True


def max_pair_ratio(table: ConvergenceTable) -> float:
    """max over pairs m <= l of |q_l - q_m| / (lambda / 4^m): the empirical
    telescoping constant of one table."""
    lam = float(table.base_scale())
    worst = 0.0
    for m in range(table.depth + 1):
        scale = lam / 4 ** m
        for l in range(m, table.depth + 1):
            worst = max(worst, table.pair_gap(l, m) / scale)
    return worst


@dataclass(frozen=True)
class HeightInequalityCheck:
    """Verdict of the two-bound comparison between the canonical-height
    estimate and the exact total height of one point.

    ``residual = |estimate - h_total|`` must stay below
    ``c_cal * lambda + error_bound``: the first term bounds the distance
    between canonical and total height, the second the estimate's own
    telescoping error.
    """

    ok: bool
    estimate: float
    total_log: float
    residual: float
    bound: float
    base_scale: float
    depth: int
    field_label: str


def height_inequality_from_estimate(est: NTEstimate) -> HeightInequalityCheck:
    """The comparison above, reusing an estimate (and its doubling table)
    that the caller already paid for."""
    lam = float(est.table.base_scale())
    total = total_height(est.table.point).log_value()
    residual = abs(est.estimate - total)
    bound = est.c_cal * lam + est.error_bound
    return HeightInequalityCheck(
        ok=residual <= bound,
        estimate=est.estimate,
        total_log=total,
        residual=residual,
        bound=bound,
        base_scale=lam,
        depth=est.depth,
        field_label=base_field_label(est.table.field),
    )


def height_inequality_check(point: FiberPoint, depth: int,
                            c_cal: float) -> HeightInequalityCheck:
    return height_inequality_from_estimate(neron_tate(point, depth, c_cal))
