"""Benchmark generators and the experiment harness."""

from __future__ import annotations

import random
from fractions import Fraction as Q

import pytest

from mdpmon.bench import (BenchCase, blowup_ext_sa, blowup_sa, gen_airport,
                          gen_blowup, gen_blowup_ext, gen_evade, gen_refuel,
                          render_table, run_bench)
from mdpmon.core import (ObsKind, StructureKind, classify, compose,
                         lift_state_action_obs, validate)
from mdpmon.filtering import (MonitorSession, hull_reduce, initial_belief,
                              mdp_risk, mdp_step)
from mdpmon.modelio import serialize_model, serialize_results
from mdpmon.oracle import oracle_trace_risk
from mdpmon.risk import bounded_reach
from mdpmon.simulator import SimConfig, simulate

from conftest import MODELS


class TestAirport:
    def test_smallest_instance_matches_bundled_files(self):
        world, sensor = gen_airport(3, 3, "A")
        assert serialize_model(world) == (MODELS / "airport_world.mdp").read_text()
        assert serialize_model(sensor) == (MODELS / "airport_sensor.mdp").read_text()

    @pytest.mark.parametrize("lanes,res,kind", [
        (3, 3, "A"), (4, 3, "A"), (3, 4, "B"), (5, 5, "A"), (4, 4, "B"),
    ])
    def test_generated_models_validate(self, lanes, res, kind):
        world, sensor = gen_airport(lanes, res, kind)
        assert validate(world) == []
        assert validate(sensor) == []
        joint = compose(world, sensor)
        assert validate(joint) == []
        kindc, obsk = classify(joint)
        assert kindc is StructureKind.GENERAL
        assert obsk is ObsKind.STOCHASTIC

    def test_joint_state_count_law(self):
        for lanes, res, skind, sensor_states in [(3, 3, "A", 1), (4, 4, "B", 2)]:
            world, sensor = gen_airport(lanes, res, skind)
            joint = compose(world, sensor)
            assert joint.num_states <= lanes * res * sensor_states
            assert world.num_states == lanes * res

    def test_probabilities_interpolate_linearly(self):
        world, _ = gen_airport(3, 5, "A")
        # entering gets less likely as the plane closes in
        probs = []
        for d in (4, 3, 2, 1):
            row = world.trans[(world.state_id(f"R_D{d}"), world.action_id("none"))]
            probs.append(row[world.state_id(f"M_D{d}")])
        assert probs == sorted(probs, reverse=True)


class TestRefuel:
    def test_validates_and_battery_absorbing(self):
        m = gen_refuel(4, 5, "A")
        assert validate(m) == []
        kindc, obsk = classify(m)
        # kind A reads the cell exactly; the battery stays hidden anyway
        assert kindc is StructureKind.GENERAL and obsk is ObsKind.DETERMINISTIC
        kindc_b, obsk_b = classify(gen_refuel(3, 3, "B"))
        assert kindc_b is StructureKind.GENERAL and obsk_b is ObsKind.STOCHASTIC
        for s in m.labels["depleted"]:
            assert m.avail[s] == (m.action_id("stay"),)
            assert m.trans[(s, m.action_id("stay"))].is_dirac()

    def test_battery_is_hidden_state(self):
        m = gen_refuel(3, 4, "A")
        r = bounded_reach(m, m.labels["depleted"], 8, "max")
        sess = MonitorSession(m, r, mode="mdp")
        _p, trace = simulate(m, SimConfig(seed=1, length=10))
        dims = [sess.feed(z).dim for z in trace]
        assert max(dims) >= 2  # several battery levels share one reading

    def test_two_state_sensor_variant_doubles_states(self):
        a = gen_refuel(3, 3, "A")
        b = gen_refuel(3, 3, "B")
        assert b.num_states > a.num_states


class TestEvade:
    def test_view_variant_alphabet_law(self):
        d = 4
        m = gen_evade(d, "V", 2)
        assert validate(m) == []
        assert len(m.obs_names) == d * d * (d * d + 1)
        kindc, obsk = classify(m)
        assert kindc is StructureKind.GENERAL
        # the reading is a function of the state pair: deterministic rows
        assert obsk is ObsKind.DETERMINISTIC

    def test_incentive_variant_hides_incentive(self):
        m = gen_evade(4, "I")
        assert validate(m) == []
        # dimension exceeds 1 once the incentive matters: the belief spans
        # several incentive values under the same observations
        r = bounded_reach(m, m.labels["crash"], 6, "max")
        for seed in range(10):
            _p, trace = simulate(m, SimConfig(seed=seed, length=6))
            sess = MonitorSession(m, r, mode="mdp")
            dims = [sess.feed(z).dim for z in trace]
            assert max(dims) >= 2

    def test_crash_states_absorbing(self):
        m = gen_evade(3, "V", 1)
        for s in m.labels["crash"]:
            assert len(m.avail[s]) == 1
            a = m.avail[s][0]
            assert m.trans[(s, a)].is_dirac() and m.trans[(s, a)][s] == 1


class TestBlowup:
    def test_component_count_and_shape(self):
        for n in (1, 3, 5):
            sa = blowup_sa(n)
            m = gen_blowup(n)
            assert sa.num_states == 2 * n
            assert m.num_states == 2 * n  # identical rows collapse in the lift
            assert validate(m) == []
            kindc, obsk = classify(m)
            assert obsk is ObsKind.DETERMINISTIC
            assert m.init.total() == 1
            assert all(p == Q(1, 2 * n) for _s, p in m.init.items())

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_vertex_counts_are_exponential(self, n):
        m = gen_blowup(n)
        a = m.obs_id("A")
        beliefs = [initial_belief(m, a)]
        for k in range(4):
            beliefs = hull_reduce(mdp_step(m, beliefs, a))
            if k >= 1:  # traces of 3..5 symbols
                assert len(beliefs) == 2 ** n

    def test_extension_game_under_mass_preserving_choices(self):
        """Dropping any product vertex lets the matched exit suffix
        underestimate the exact risk, when choices must preserve mass."""
        m = gen_blowup_ext(3)
        assert validate(m) == []
        a = m.obs_id("A")
        beliefs = [initial_belief(m, a)]
        for _ in range(2):
            beliefs = hull_reduce(mdp_step(m, beliefs, a, keep_all=True))
        assert len(beliefs) == 8

        def bits_of(b):
            out = []
            for i in (1, 2, 3):
                has_h = any(m.state_names[s].startswith(f"h{i}") for s, _p in b.items)
                out.append("1" if has_h else "0")
            return "".join(out)

        by_bits = {bits_of(b): b for b in beliefs}
        assert sorted(by_bits) == sorted(f"{i:03b}" for i in range(8))
        for bits, dropped in by_bits.items():
            suffix = [m.obs_id(("H" if c == "1" else "L") + str(i))
                      for i, c in enumerate(bits, start=1)]
            exact = oracle_trace_risk(m, [a, a, a] + suffix, m.risk)
            assert exact == 1
            pruned = [b for b in beliefs if b != dropped]
            for z in suffix:
                pruned = hull_reduce(mdp_step(m, pruned, z, keep_all=True))
            assert mdp_risk(pruned, m.risk) == Q(2, 3) < exact

    def test_extension_full_estimator_reaches_exact_risk_anyway(self):
        """With unrestricted (mass-sacrificing) choices the deliberate
        mismatch schedulers recover the maximal risk from any seven of
        the eight product beliefs; the companion test above shows the
        restricted reading."""
        m = gen_blowup_ext(3)
        a = m.obs_id("A")
        beliefs = [initial_belief(m, a)]
        for _ in range(2):
            beliefs = hull_reduce(mdp_step(m, beliefs, a))
        # the tracked vertex set collapses to per-state points
        assert all(len(b.items) == 1 for b in beliefs)
        suffix = [m.obs_id("H1"), m.obs_id("L2"), m.obs_id("L3")]
        cur = beliefs
        for z in suffix:
            cur = hull_reduce(mdp_step(m, cur, z))
        assert mdp_risk(cur, m.risk) == 1


class TestHarness:
    def small_cases(self):
        world, sensor = gen_airport(3, 3, "A")
        airport = compose(world, sensor)
        r = bounded_reach(airport, airport.labels["crash"], 8, "max")
        return [BenchCase("airport-A", airport, r, ("ff", "unr-epi"))]

    def test_rows_carry_method_specific_columns(self):
        rows = run_bench(self.small_cases(), seeds=[0, 1], max_len=6,
                         timeout_ms=None)
        by_method = {}
        for row in rows:
            by_method.setdefault(row.method, []).append(row)
        assert all(r.beliefs_max >= 1 for r in by_method["ff"])
        assert all(r.unrolled_states == 0 for r in by_method["ff"])
        assert all(r.unrolled_states > 0 for r in by_method["unr-epi"])
        assert all(r.beliefs_max == 0 for r in by_method["unr-epi"])

    def test_deterministic_given_seeds(self):
        def csv_without_time(rows):
            out = [r.to_result_row() for r in rows]
            for r in out:
                r.time_ms = 0.0
            return serialize_results(out)

        a = run_bench(self.small_cases(), seeds=[0, 1, 2], max_len=5,
                      timeout_ms=None)
        b = run_bench(self.small_cases(), seeds=[0, 1, 2], max_len=5,
                      timeout_ms=None)
        assert csv_without_time(a) == csv_without_time(b)

    def test_render_table_aggregates(self):
        rows = run_bench(self.small_cases(), seeds=[0], max_len=4,
                         timeout_ms=None)
        table = render_table(rows)
        assert "airport-A" in table and "ff" in table and "unr-epi" in table
        assert table.splitlines()[0].split()[:3] == ["id", "method", "N"]
