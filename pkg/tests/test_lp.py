"""Exact convex-combination feasibility."""

from __future__ import annotations

import random
from fractions import Fraction as Q

from mdpmon.lp import convex_combination, in_convex_hull


def vec(*xs):
    return tuple(Q(x) for x in xs)


class TestConvexCombination:
    def test_midpoint_of_segment(self):
        w = convex_combination(vec("1/2", "1/2"), [vec(1, 0), vec(0, 1)])
        assert w == [Q(1, 2), Q(1, 2)]

    def test_point_outside_segment(self):
        assert convex_combination(vec("3/4", "1/2"),
                                  [vec(1, 0), vec(0, 1)]) is None

    def test_exact_duplicate(self):
        w = convex_combination(vec(1, 0), [vec(1, 0), vec(0, 1)])
        assert w is not None and sum(w) == 1
        assert w[0] * vec(1, 0)[0] + w[1] * vec(0, 1)[0] == 1

    def test_no_generators(self):
        assert convex_combination(vec(1), []) is None

    def test_degenerate_collinear_set(self):
        pts = [vec("1/4", "3/4"), vec("1/2", "1/2"), vec("3/4", "1/4")]
        assert in_convex_hull(pts[1], [pts[0], pts[2]])
        assert not in_convex_hull(pts[0], [pts[1], pts[2]])

    def test_weights_reconstruct_target(self):
        rng = random.Random(3)
        for _ in range(30):
            dim = rng.randint(2, 5)
            gens = []
            for _ in range(rng.randint(2, 8)):
                parts = [rng.randint(0, 6) for _ in range(dim)]
                total = sum(parts) or 1
                gens.append(tuple(Q(p, total) for p in parts))
            coeffs = [rng.randint(0, 4) for _ in gens]
            csum = sum(coeffs) or 1
            target = tuple(
                sum((Q(c, csum) * g[k] for c, g in zip(coeffs, gens)), Q(0))
                for k in range(dim))
            w = convex_combination(target, gens)
            assert w is not None
            assert sum(w) == 1 and all(x >= 0 for x in w)
            for k in range(dim):
                assert sum((wi * g[k] for wi, g in zip(w, gens)), Q(0)) == target[k]

    def test_column_generation_matches_direct(self):
        rng = random.Random(4)
        for _ in range(10):
            gens = []
            for _ in range(60):
                parts = [rng.randint(0, 5) for _ in range(3)]
                total = sum(parts) or 1
                gens.append(tuple(Q(p, total) for p in parts))
            target = gens[rng.randrange(len(gens))]
            others = [g for g in gens if g != target]
            lazy = convex_combination(target, others) is not None
            direct = convex_combination(target, others,
                                        seed=list(range(len(others)))) is not None
            assert lazy == direct
