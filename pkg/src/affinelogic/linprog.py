"""Simplex over exact rationals.

Standard form: minimize c.x subject to A x = b, x >= 0.  Two phases, full
tableau, Bland's rule throughout (smallest eligible index enters, ties in the
ratio test go to the row whose basic variable has the smallest index), so the
method terminates without cycling.  No floating point anywhere.

Infeasible problems come back with a Farkas certificate y: y.A <= 0
componentwise and y.b > 0, stated for the caller's row orientation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class SimplexResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    farkas: tuple[Fraction, ...] | None = None


class _Tableau:
    def __init__(self, a: list[list[Fraction]], b: list[Fraction], ncols: int):
        self.a = a           # m rows, ncols columns
        self.b = b
        self.m = len(a)
        self.ncols = ncols
        self.basis: list[int] = []
        self.obj: list[Fraction] = []
        self.obj_value = ZERO

    def set_objective(self, cost: list[Fraction]) -> None:
        """Recompute the reduced-cost row for the current basis."""
        self.obj = list(cost)
        self.obj_value = ZERO
        for r, bv in enumerate(self.basis):
            f = cost[bv]
            if f != 0:
                row = self.a[r]
                self.obj = [o - f * v for o, v in zip(self.obj, row)]
                self.obj_value -= f * self.b[r]

    def pivot(self, row: int, col: int) -> None:
        inv = ONE / self.a[row][col]
        self.a[row] = [v * inv for v in self.a[row]]
        self.b[row] *= inv
        prow = self.a[row]
        pb = self.b[row]
        for r in range(self.m):
            if r != row:
                f = self.a[r][col]
                if f != 0:
                    self.a[r] = [v - f * w for v, w in zip(self.a[r], prow)]
                    self.b[r] -= f * pb
        f = self.obj[col]
        if f != 0:
            self.obj = [v - f * w for v, w in zip(self.obj, prow)]
            self.obj_value -= f * pb
        self.basis[row] = col

    def run(self, allowed: int) -> str:
        """Bland simplex over columns [0, allowed)."""
        while True:
            enter = next((j for j in range(allowed) if self.obj[j] < 0), None)
            if enter is None:
                return OPTIMAL
            best_row = -1
            best_ratio: Fraction | None = None
            for r in range(self.m):
                coef = self.a[r][enter]
                if coef > 0:
                    ratio = self.b[r] / coef
                    if best_ratio is None or ratio < best_ratio or (
                        ratio == best_ratio and self.basis[r] < self.basis[best_row]
                    ):
                        best_ratio = ratio
                        best_row = r
            if best_row < 0:
                return UNBOUNDED
            self.pivot(best_row, enter)


def solve_standard(
    a_rows: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    cost: Sequence[Fraction],
) -> SimplexResult:
    """Minimize cost.x subject to a_rows x = b, x >= 0."""
    m = len(a_rows)
    n = len(cost)
    signs = [ONE] * m
    a: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(m):
        row = list(map(Fraction, a_rows[i]))
        if len(row) != n:
            raise ValueError("row length does not match cost length")
        bi = Fraction(b[i])
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
            signs[i] = -ONE
        a.append(row + [ONE if k == i else ZERO for k in range(m)])
        rhs.append(bi)

    t = _Tableau(a, rhs, n + m)
    t.basis = [n + i for i in range(m)]
    phase1 = [ZERO] * n + [ONE] * m
    t.set_objective(phase1)
    status = t.run(n + m)
    assert status == OPTIMAL  # phase 1 is bounded below by 0
    if -t.obj_value > 0:
        # y_i = 1 - reduced cost of the i-th artificial column.
        y = [ONE - t.obj[n + i] for i in range(m)]
        farkas = tuple(signs[i] * y[i] for i in range(m))
        return SimplexResult(INFEASIBLE, farkas=farkas)

    # Drive basic artificials out; drop rows that are redundant.
    keep: list[int] = []
    for r in range(t.m):
        if t.basis[r] >= n:
            col = next((j for j in range(n) if t.a[r][j] != 0), None)
            if col is None:
                continue  # redundant equation
            t.pivot(r, col)
        keep.append(r)
    if len(keep) != t.m:
        t.a = [t.a[r] for r in keep]
        t.b = [t.b[r] for r in keep]
        t.basis = [t.basis[r] for r in keep]
        t.m = len(keep)

    t.set_objective(list(map(Fraction, cost)) + [ZERO] * m)
    status = t.run(n)  # artificial columns may never re-enter
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED)
    x = [ZERO] * n
    for r, bv in enumerate(t.basis):
        if bv < n:
            x[bv] = t.b[r]
    value = sum((c * v for c, v in zip(cost, x)), start=ZERO)
    return SimplexResult(OPTIMAL, x=tuple(x), value=value)
