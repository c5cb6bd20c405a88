"""Exact convex-combination feasibility via Phase-I simplex over rationals.

Decides whether a point equals some convex combination of a finite set of
generators, with Bland's rule for termination and Fraction arithmetic
throughout.  Large generator pools are handled by delayed column
generation: a small active set is solved first and the Phase-I dual
(Farkas) certificate either proves infeasibility for the whole pool or
names columns that must join the active set.
"""

from __future__ import annotations

from fractions import Fraction

from .rationals import ONE, ZERO

Vec = tuple[Fraction, ...]


def _phase1(target: Vec, cols: list[Vec]):
    """Phase-I simplex for  sum_j w_j cols[j] = target, w >= 0, sum w = 1.

    Returns (weights, None) when feasible and (None, y) otherwise, where
    y is the dual certificate: y . col <= 0 for every supplied column
    (with the weight-sum entry appended) and y . rhs > 0.
    """
    m = len(target) + 1
    n = len(cols)
    rows: list[list[Fraction]] = []
    for i in range(len(target)):
        row = [g[i] for g in cols]
        rows.append(row + [ZERO] * m + [target[i]])
        rows[-1][n + i] = ONE
    rows.append([ONE] * n + [ZERO] * m + [ONE])
    rows[-1][n + m - 1] = ONE
    basis = list(range(n, n + m))

    cost = [ZERO] * (n + m + 1)
    for row in rows:
        for j in range(n + m + 1):
            cost[j] -= row[j]
    for j in range(n, n + m):
        cost[j] += ONE

    width = n + m
    while True:
        enter = -1
        for j in range(width):
            if cost[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best: Fraction | None = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        assert leave >= 0, "phase-I subproblem cannot be unbounded"
        piv = rows[leave][enter]
        prow = rows[leave]
        if piv != 1:
            for j in range(width + 1):
                prow[j] /= piv
        for i in range(m):
            if i == leave:
                continue
            f = rows[i][enter]
            if f != 0:
                row = rows[i]
                for j in range(width + 1):
                    if prow[j] != 0:
                        row[j] -= f * prow[j]
        f = cost[enter]
        if f != 0:
            for j in range(width + 1):
                if prow[j] != 0:
                    cost[j] -= f * prow[j]
        basis[leave] = enter

    if -cost[-1] != 0:
        # infeasible: y_i = 1 - reduced cost of the i-th artificial
        y = [ONE - cost[n + i] for i in range(m)]
        return None, y
    weights = [ZERO] * n
    for i, var in enumerate(basis):
        if var < n:
            weights[var] = rows[i][-1]
    return weights, None


def _col(g: Vec) -> tuple[Fraction, ...]:
    return g + (ONE,)


def convex_combination(target: Vec, generators: list[Vec],
                       seed: list[int] | None = None,
                       active_start: int = 24) -> list[Fraction] | None:
    """Weights over `generators` reproducing `target`, or None.

    All vectors share one coordinate order; belief coordinates are
    nonnegative, which Phase-I needs.  `seed` names generator indices to
    put in the initial active set (e.g. known extreme points).  The
    returned weight list is indexed like `generators`.
    """
    if not generators:
        return None
    if seed:
        active = list(dict.fromkeys(seed))
    else:
        active = list(range(min(active_start, len(generators))))
    in_active = set(active)
    while True:
        weights, y = _phase1(target, [generators[j] for j in active])
        if weights is not None:
            out = [ZERO] * len(generators)
            for pos, j in enumerate(active):
                out[j] = weights[pos]
            return out
        if len(active) == len(generators):
            return None
        batch = max(16, len(active))  # geometric growth keeps rounds few
        added = 0
        for j in range(len(generators)):
            if j in in_active:
                continue
            col = _col(generators[j])
            score = sum((yi * ci for yi, ci in zip(y, col)), ZERO)
            if score > 0:
                active.append(j)
                in_active.add(j)
                added += 1
                if added >= batch:
                    break
        if added == 0:
            return None  # Farkas certificate holds for every column


def in_convex_hull(target: Vec, generators: list[Vec]) -> bool:
    return convex_combination(target, generators) is not None
