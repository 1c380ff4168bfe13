"""Exact linear algebra over Fraction: solving, rank, affine factoring."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class LinearSolution:
    """Outcome of gauss_solve.

    If consistent, x is one exact solution (free variables set to 0) and
    free_count is the dimension of the solution set.  If inconsistent,
    combination holds row multipliers y with y^T A = 0 but y^T b != 0.
    """

    consistent: bool
    x: tuple[Fraction, ...] | None = None
    free_count: int = 0
    combination: tuple[Fraction, ...] | None = None


def gauss_solve(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> LinearSolution:
    m = len(rows)
    n = len(rows[0]) if m else 0
    # Augment with the identity to track the row combination applied.
    a = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])]
         + [ONE if k == i else ZERO for k in range(m)] for i in range(m)]
    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = ONE / a[row][col]
        a[row] = [v * inv for v in a[row]]
        for r in range(m):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[row])]
        pivots.append((row, col))
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if a[r][n] != 0:
            return LinearSolution(False, combination=tuple(a[r][n + 1:]))
    x = [ZERO] * n
    for r, c in pivots:
        x[c] = a[r][n]
    return LinearSolution(True, x=tuple(x), free_count=n - len(pivots))


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = len(rows)
    if m == 0:
        return 0
    n = len(rows[0])
    a = [list(map(Fraction, r)) for r in rows]
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = ONE / a[rank][col]
        a[rank] = [v * inv for v in a[rank]]
        for r in range(m):
            if r != rank and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[rank])]
        rank += 1
        if rank == m:
            break
    return rank


def affinely_independent(points: Sequence[Sequence[Fraction]]) -> bool:
    """True when no point is an affine combination of the others."""
    if not points:
        return True
    cols = [list(p) + [ONE] for p in points]
    return matrix_rank(cols) == len(points)


@dataclass
class FactorConflict:
    """Two keys share identical coordinates but carry different values."""

    key_a: Hashable
    key_b: Hashable


@dataclass
class FactorResidue:
    """An inconsistent linear system: multipliers over the distinct-point
    equations combining to 0 = nonzero."""

    keys: tuple[Hashable, ...]
    combination: tuple[Fraction, ...]


@dataclass
class FactorResult:
    """Affine factoring outcome: value(key) = offset + coeffs . point(key)."""

    ok: bool
    offset: Fraction | None = None
    coeffs: tuple[Fraction, ...] | None = None
    conflict: FactorConflict | None = None
    residue: FactorResidue | None = None


def affine_factor(
    keys: Sequence[Hashable],
    points: Sequence[Sequence[Fraction]],
    values: Sequence[Fraction],
) -> FactorResult:
    """Find c0, c with values[k] = c0 + c . points[k] for every key.

    Failure comes with a certificate: either a pair of keys whose points agree
    while the values differ, or row multipliers exhibiting an inconsistent
    system over distinct points.
    """
    seen: dict[tuple[Fraction, ...], int] = {}
    reps: list[int] = []
    for i, p in enumerate(points):
        key = tuple(p)
        j = seen.get(key)
        if j is None:
            seen[key] = i
            reps.append(i)
        elif values[i] != values[j]:
            return FactorResult(False, conflict=FactorConflict(keys[j], keys[i]))
    rows = [[ONE] + list(points[i]) for i in reps]
    rhs = [values[i] for i in reps]
    sol = gauss_solve(rows, rhs)
    if not sol.consistent:
        assert sol.combination is not None
        return FactorResult(
            False,
            residue=FactorResidue(tuple(keys[i] for i in reps), sol.combination),
        )
    assert sol.x is not None
    return FactorResult(True, offset=sol.x[0], coeffs=tuple(sol.x[1:]))
