"""Exact feasibility of linear inequality systems by Fourier-Motzkin elimination.

A system is a list of rows ``(a, b)`` read as ``a . w >= b`` with rational
entries. Rows are kept as integer tuples scaled by their gcd, so the
arithmetic is exact. Small systems only: the oracle feeds at most 2^n rows
in n <= 4 variables.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence


def _integer_row(a: Sequence, b) -> tuple[tuple[int, ...], int]:
    fr = [Fraction(c) for c in a] + [Fraction(b)]
    lcm = reduce(math.lcm, (f.denominator for f in fr), 1)
    ints = [int(f * lcm) for f in fr]
    return tuple(ints[:-1]), ints[-1]


def _reduce(rows: Iterable[tuple[tuple[int, ...], int]]) -> dict | None:
    # direction (a / gcd(a)) -> (b, gcd(a)); keeps the tightest b / gcd(a).
    # None means some row reads 0 >= b with b > 0.
    out: dict[tuple[int, ...], tuple[int, int]] = {}
    for a, b in rows:
        g = reduce(math.gcd, a, 0)
        if g == 0:
            if b > 0:
                return None
            continue
        key = tuple(c // g for c in a)
        old = out.get(key)
        if old is None or b * old[1] > old[0] * g:
            out[key] = (b, g)
    return out


def feasible(rows: Iterable[tuple[Sequence, object]]) -> bool:
    """True iff some real w satisfies every ``a . w >= b``."""
    system = _reduce(_integer_row(a, b) for a, b in rows)
    if system is None:
        return False
    if not system:
        return True
    nvars = len(next(iter(system)))
    alive = set(range(nvars))
    while alive and system:
        def cost(j):
            pos = sum(1 for a in system if a[j] > 0)
            neg = sum(1 for a in system if a[j] < 0)
            return pos * neg - pos - neg

        j = min(sorted(alive), key=cost)
        alive.discard(j)
        pos, neg, rows = [], [], []
        for a, (b, g) in system.items():
            # stored row reads a . w >= b / g
            if a[j] > 0:
                pos.append((a, b, g))
            elif a[j] < 0:
                neg.append((a, b, g))
            else:
                rows.append((tuple(c * g for c in a), b))
        for ap, bp, gp in pos:
            sp = ap[j]
            for an, bn, gn in neg:
                sn = -an[j]
                # gp*gn * (sn * row_p + sp * row_n) cancels w_j
                a = tuple(gp * gn * (sn * x + sp * y) for x, y in zip(ap, an))
                rows.append((a, sn * gn * bp + sp * gp * bn))
        system = _reduce(rows)
        if system is None:
            return False
    return True
