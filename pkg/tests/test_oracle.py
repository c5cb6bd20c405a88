"""Brute-force trace-risk oracle."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction as Q

import pytest

from mdpmon.core import Dist, Mdp, RiskVector, dirac
from mdpmon.errors import InstanceTooLarge, TraceImpossible
from mdpmon.filtering import initial_belief, mc_risk, mc_step
from mdpmon.oracle import (DcScheduler, all_dc_schedulers, oracle_trace_prob,
                           oracle_trace_risk, oracle_trace_risk_naive)
from mdpmon.risk import bounded_reach, scale_risk
from mdpmon.simulator import SimConfig, simulate

from conftest import random_mdp, random_risk


class TestTraceRisk:
    def test_chain_equals_filter(self, airport_chain):
        m = airport_chain
        r = bounded_reach(m, m.labels["crash"], 6, "max")
        trace = [m.obs_id(nm) for nm in ("R_o", "M_o", "L_o")]
        b = initial_belief(m, trace[0])
        for z in trace[1:]:
            b = mc_step(m, b, z)
        assert oracle_trace_risk(m, trace, r) == mc_risk(b, r)

    def test_fork_quarter(self, fork):
        r = RiskVector.of(fork, {fork.state_id("s3"): Q(1)})
        z0 = fork.obs_id("z0")
        assert oracle_trace_risk(fork, [z0, z0], r) == Q(1, 4)

    def test_matches_naive_enumeration(self):
        rng = random.Random(13)
        for k in range(12):
            m = random_mdp(rng, max_states=3, max_actions=2, max_obs=2)
            r = random_risk(rng, m)
            _, trace = simulate(m, SimConfig(seed=k, length=3))
            assert oracle_trace_risk(m, trace, r) == \
                oracle_trace_risk_naive(m, trace, r)

    def test_impossible_trace(self, airport):
        r = random_risk(random.Random(1), airport)
        with pytest.raises(TraceImpossible):
            oracle_trace_risk(airport, [airport.obs_id("L_o")], r)

    def test_cap_enforced(self, airport):
        r = random_risk(random.Random(1), airport)
        trace = [airport.obs_id("R_o")] + [airport.obs_id("M_o")] * 5
        with pytest.raises(InstanceTooLarge):
            oracle_trace_risk(airport, trace, r, cap=3)

    def test_scales_linearly_and_preserves_threshold(self):
        rng = random.Random(17)
        for k in range(10):
            m = random_mdp(rng, max_states=4)
            r = random_risk(rng, m)
            _, trace = simulate(m, SimConfig(seed=k, length=3))
            lam = Q(rng.randint(0, 6), rng.randint(1, 4))
            value = oracle_trace_risk(m, trace, r)
            scaled_r, scaled_lam = scale_risk(r, lam)
            scaled_value = oracle_trace_risk(m, trace, scaled_r)
            c = max(Q(1), r.max())
            assert scaled_value == value / c
            assert (value > lam) == (scaled_value > scaled_lam)


class TestTraceProb:
    def test_dirac_consistent_trace(self):
        m = Mdp(state_names=("u", "v"), action_names=("a",), obs_names=("x", "y"),
                init=dirac(0), avail=((0,), (0,)),
                trans={(0, 0): dirac(1), (1, 0): dirac(1)},
                obs=(dirac(0), dirac(1)))
        sched = DcScheduler({(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 0})
        assert oracle_trace_prob(m, sched, [0, 1, 1]) == 1
        assert oracle_trace_prob(m, sched, [0, 0, 1]) == 0

    def test_airport_always_progress(self, airport):
        """Pr[R_o M_o] factors into the initial reading times the
        documented one-step normalizer 13/24."""
        sched = DcScheduler({(s, 0): (airport.action_id("p")
                                      if airport.action_id("p") in airport.avail[s]
                                      else airport.avail[s][0])
                             for s in range(airport.num_states)})
        trace = [airport.obs_id("R_o"), airport.obs_id("M_o")]
        assert oracle_trace_prob(airport, sched, trace) == Q(13, 48)
        assert Q(13, 48) == Q(1, 2) * Q(13, 24)


class TestRandomizedNeverBeatsDeterministic:
    def evaluate_randomized(self, m, trace, r, policies):
        """Exact conditional weighted risk of a randomized per-step policy
        by full path enumeration."""
        prob = Q(0)
        weighted = Q(0)
        stack = [(s, p * m.obs[s][trace[0]], 0)
                 for s, p in m.init.items()]
        while stack:
            s, w, i = stack.pop()
            if w == 0:
                continue
            if i == len(trace) - 1:
                prob += w
                weighted += w * r[s]
                continue
            for a, pa in policies[i].get(s, {}).items():
                for t, q in m.trans[(s, a)].items():
                    stack.append((t, w * pa * q * m.obs[t][trace[i + 1]], i + 1))
        return (weighted / prob) if prob > 0 else None

    def test_sampled_randomized_schedulers(self):
        rng = random.Random(23)
        checked = 0
        while checked < 8:
            m = random_mdp(rng, max_states=4, max_actions=2, max_obs=2)
            r = random_risk(rng, m)
            _, trace = simulate(m, SimConfig(seed=checked, length=3))
            try:
                best = oracle_trace_risk(m, trace, r)
            except TraceImpossible:
                continue
            for _ in range(25):
                policies = []
                for _i in range(len(trace) - 1):
                    pol = {}
                    for s in range(m.num_states):
                        acts = m.avail[s]
                        weights = [rng.randint(0, 3) for _ in acts]
                        if sum(weights) == 0:
                            weights[0] = 1
                        pol[s] = {a: Q(w, sum(weights))
                                  for a, w in zip(acts, weights) if w}
                    policies.append(pol)
                value = self.evaluate_randomized(m, trace, r, policies)
                if value is not None:
                    assert value <= best
            checked += 1


def test_all_dc_schedulers_enumeration_size():
    m = Mdp(state_names=("u", "v"), action_names=("a", "b"),
            obs_names=("z",), init=dirac(0), avail=((0, 1), (0,)),
            trans={(0, 0): dirac(0), (0, 1): dirac(1), (1, 0): dirac(1)},
            obs=(dirac(0), dirac(0)))
    scheds = list(all_dc_schedulers(m, 2))
    assert len(scheds) == (2 * 1) ** 2
    assert len({tuple(sorted(s.table.items())) for s in scheds}) == 4
