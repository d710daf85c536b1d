"""Exact feasibility of closed linear systems over the rationals.

Rows are integer tuples (a_1, ..., a_d, b) encoding a.y <= b (or a.y = b
for equality rows).  Equalities are removed by exact substitution, the
remaining inequalities by Fourier-Motzkin elimination.  All arithmetic is
integer, rows are gcd-normalized and deduplicated, so corner contacts
(measure-zero intersections of closed cells) are decided exactly.

Dimension is capped at 3: at desk scale FM does not blow up and stays
simple to audit.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

MAX_DIM = 3


def _normalize(row: tuple) -> tuple:
    g = 0
    for v in row:
        g = gcd(g, v)
    if g > 1:
        return tuple(v // g for v in row)
    return row


def _substitute_equality(rows: Iterable[tuple], eq: tuple, dim: int):
    """Eliminate one variable using the equality a.y = b.

    Returns (new_rows, new_dim) or None when the equality itself is
    infeasible (0 = b with b != 0).
    """
    j = max(range(dim), key=lambda i: abs(eq[i]))
    if eq[j] == 0:
        if eq[dim] != 0:
            return None
        return list(rows), dim
    m = eq[j]
    out = []
    for c in rows:
        cj = c[j]
        if m > 0:
            row = tuple(m * c[i] - cj * eq[i] for i in range(dim + 1))
        else:
            row = tuple(cj * eq[i] - m * c[i] for i in range(dim + 1))
        out.append(row[:j] + row[j + 1:])
    return out, dim - 1


def feasible(
    ineqs: Sequence[tuple],
    equalities: Sequence[tuple] = (),
    dim: int | None = None,
) -> bool:
    """True iff the closed system {a.y <= b} ∩ {a.y = b} has a solution."""
    if dim is None:
        dim = (len(ineqs[0]) - 1) if ineqs else (len(equalities[0]) - 1)
    if dim > MAX_DIM:
        raise ValueError(f"exact feasibility capped at dimension {MAX_DIM}")
    rows = list(ineqs)
    pending = list(equalities)
    while pending:
        eq = pending.pop()
        result = _substitute_equality(rows, eq, dim)
        if result is None:
            return False
        rows, new_dim = result
        if pending:
            # an equality a.y = b is the pair a.y <= b, -a.y <= -b;
            # substituting into both halves keeps them paired
            reduced = []
            for other in pending:
                halves = _substitute_equality(
                    [other, tuple(-v for v in other)], eq, dim
                )
                if halves is None:
                    return False
                reduced.append(halves[0][0])
            pending = reduced
        dim = new_dim
    rows = {_normalize(r) for r in rows}
    for k in range(dim - 1, -1, -1):
        uppers, lowers, kept = [], [], set()
        for r in rows:
            if r[k] > 0:
                uppers.append(r)
            elif r[k] < 0:
                lowers.append(r)
            else:
                kept.add(r[:k] + r[k + 1:])
        for u in uppers:
            uk = u[k]
            for low in lowers:
                lk = -low[k]
                row = tuple(
                    lk * u[i] + uk * low[i]
                    for i in range(len(u))
                    if i != k
                )
                kept.add(_normalize(row))
        rows = kept
    return all(r[0] >= 0 for r in rows)
