"""Bounded-reachability risk vectors, scaling, and the indicator reduction."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction as Q

import pytest

from mdpmon.core import Dist, Mdp, RiskVector, dirac
from mdpmon.errors import ModelSyntaxError
from mdpmon.risk import (bounded_reach, parse_risk_file, parse_risk_spec,
                         risk_indicator_reduce, scale_risk)

from conftest import random_mdp


def chain_toward_fail():
    """Four-state chain, single action, 1/2 toward the fail state per step."""
    names = ("c0", "c1", "c2", "fail")
    trans = {
        (0, 0): Dist({0: Q(1, 2), 1: Q(1, 2)}),
        (1, 0): Dist({1: Q(1, 2), 2: Q(1, 2)}),
        (2, 0): Dist({2: Q(1, 2), 3: Q(1, 2)}),
        (3, 0): dirac(3),
    }
    return Mdp(state_names=names, action_names=("go",), obs_names=(),
               init=dirac(0), avail=((0,),) * 4, trans=trans, obs=None,
               labels={"fail": frozenset({3})})


def brute_force_reach(m, target, horizon, start):
    """Path-sum over every length-`horizon` path, for single-action models."""
    total = Q(0)
    frontier = {start: Q(1)}
    for _ in range(horizon):
        nxt = {}
        for s, p in frontier.items():
            if s in target:
                total += p
                continue
            for t, q in m.trans[(s, m.avail[s][0])].items():
                nxt[t] = nxt.get(t, Q(0)) + p * q
        frontier = nxt
    total += sum((p for s, p in frontier.items() if s in target), Q(0))
    return total


class TestBoundedReach:
    def test_target_state_is_one_for_any_horizon(self):
        m = chain_toward_fail()
        for h in (0, 1, 5):
            assert bounded_reach(m, m.labels["fail"], h)[3] == 1

    def test_zero_horizon_outside_target(self):
        m = chain_toward_fail()
        r = bounded_reach(m, m.labels["fail"], 0)
        assert r[0] == 0 and r[1] == 0 and r[2] == 0

    def test_chain_equals_exhaustive_path_sum(self):
        m = chain_toward_fail()
        r = bounded_reach(m, m.labels["fail"], 3)
        assert r[0] == brute_force_reach(m, {3}, 3, 0) == Q(1, 8)
        r5 = bounded_reach(m, m.labels["fail"], 5)
        assert r5[0] == brute_force_reach(m, {3}, 5, 0)

    def test_monotone_in_horizon_and_mode(self):
        rng = random.Random(5)
        for _ in range(10):
            m = random_mdp(rng)
            target = frozenset({0})
            prev = None
            for h in range(4):
                mx = bounded_reach(m, target, h, "max")
                mn = bounded_reach(m, target, h, "min")
                assert all(a >= b for a, b in zip(mx.values, mn.values))
                if prev is not None:
                    assert all(a >= b for a, b in zip(mx.values, prev.values))
                prev = mx

    def test_chain_max_equals_min(self):
        rng = random.Random(6)
        for _ in range(10):
            m = random_mdp(rng, single_action=True)
            target = frozenset({m.num_states - 1})
            assert bounded_reach(m, target, 4, "max") == \
                bounded_reach(m, target, 4, "min")

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            bounded_reach(chain_toward_fail(), frozenset({3}), 1, "sup")


class TestScaleRisk:
    def test_worked_pair(self):
        r, lam = scale_risk(RiskVector((Q(1), Q(2))), Q(1))
        assert r.values == (Q(1, 2), Q(1))
        assert lam == Q(1, 2)

    def test_identity_when_already_bounded(self):
        r = RiskVector((Q(1, 2), Q(1)))
        scaled, lam = scale_risk(r, Q(1, 3))
        assert scaled == r and lam == Q(1, 3)

    def test_forced_by_definition(self):
        scaled, lam = scale_risk(RiskVector((Q(0), Q(0), Q(5))), Q(2))
        assert scaled.values == (Q(0), Q(0), Q(1))
        assert lam == Q(2, 5)

    def test_threshold_preserved(self):
        rng = random.Random(11)
        for _ in range(50):
            vals = tuple(Q(rng.randint(0, 9), rng.randint(1, 5)) for _ in range(4))
            r = RiskVector(vals)
            lam = Q(rng.randint(0, 9), rng.randint(1, 5))
            scaled, lam2 = scale_risk(r, lam)
            for v, v2 in zip(r.values, scaled.values):
                assert (v > lam) == (v2 > lam2)


class TestIndicator:
    def test_simple_split(self):
        r = risk_indicator_reduce(RiskVector((Q(3, 10), Q(7, 10))), Q(1, 2))
        assert r.values == (Q(0), Q(1))

    def test_zero_threshold(self):
        r = risk_indicator_reduce(RiskVector((Q(0), Q(1, 10))), Q(0))
        assert r.values == (Q(0), Q(1))

    def test_airport_split_between_distinct_risks(self, airport):
        r = bounded_reach(airport, airport.labels["crash"], 6, "max")
        distinct = sorted(set(r.values), reverse=True)
        assert len(distinct) >= 2
        lam = (distinct[0] + distinct[1]) / 2
        ind = risk_indicator_reduce(r, lam)
        for v, i in zip(r.values, ind.values):
            assert i == (1 if v == distinct[0] else 0)


class TestSpecParsing:
    def test_reach_max_spec(self, airport):
        spec = parse_risk_spec("reach-max(crash,6)")
        assert spec.kind == "reach-max" and spec.horizon == 6
        r = spec.resolve(airport)
        assert r == bounded_reach(airport, airport.labels["crash"], 6, "max")

    def test_reach_min_spec(self, airport):
        r = parse_risk_spec("reach-min(crash,6)").resolve(airport)
        assert r == bounded_reach(airport, airport.labels["crash"], 6, "min")

    def test_bad_spec(self):
        with pytest.raises(ModelSyntaxError):
            parse_risk_spec("eventually(crash)")

    def test_risk_file(self, fork):
        r = parse_risk_file("risk s2 1\nrisk s4 13/20\n", fork)
        assert r[fork.state_id("s2")] == 1
        assert r[fork.state_id("s4")] == Q(13, 20)
        assert r[fork.state_id("s0")] == 0
