"""Shared fixtures: bundled models, random-model corpus, acceptance report."""

from __future__ import annotations

import random
from fractions import Fraction as Q
from pathlib import Path

import pytest

from mdpmon.bench import gen_airport
from mdpmon.core import Dist, Mdp, RiskVector, compose, induce_chain, validate
from mdpmon.modelio import parse_model

MODELS = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture(scope="session")
def airport_world():
    return parse_model((MODELS / "airport_world.mdp").read_text())


@pytest.fixture(scope="session")
def airport_sensor():
    return parse_model((MODELS / "airport_sensor.mdp").read_text())


@pytest.fixture(scope="session")
def airport(airport_world, airport_sensor):
    return compose(airport_world, airport_sensor)


@pytest.fixture(scope="session")
def airport_chain(airport):
    return induce_chain(airport, "p")


@pytest.fixture(scope="session")
def fork():
    """Five-state branching model; only s2 and s4 emit z1."""
    return parse_model((MODELS / "belief_fork.mdp").read_text())


@pytest.fixture(scope="session")
def split():
    """Two-state model with one stochastic observation row and risks 1, 2."""
    return parse_model((MODELS / "obs_split.mdp").read_text())


def random_dist(rng: random.Random, keys, denom_max=8) -> Dist:
    den = rng.randint(1, denom_max)
    cuts = sorted(rng.randint(0, den) for _ in range(len(keys) - 1))
    parts, prev = [], 0
    for c in cuts + [den]:
        parts.append(c - prev)
        prev = c
    entries = {k: Q(p, den) for k, p in zip(keys, parts) if p}
    if not entries:
        entries = {rng.choice(list(keys)): Q(1)}
    return Dist(entries)


def random_mdp(rng: random.Random, max_states=6, max_actions=3, max_obs=3,
               denom_max=8, dirac=False, single_action=False) -> Mdp:
    """Random valid model within the corpus bounds of the test plan.

    `dirac=True` samples a Kripke structure (every distribution Dirac),
    `single_action=True` a Markov chain.
    """
    n = rng.randint(2, max_states)
    nz = rng.randint(1, max_obs)
    avail, trans = [], {}
    for s in range(n):
        k = 1 if single_action else rng.randint(1, max_actions)
        acts = tuple(range(k))
        avail.append(acts)
        for a in acts:
            if dirac:
                trans[(s, a)] = Dist({rng.randrange(n): Q(1)})
            else:
                keys = rng.sample(range(n), rng.randint(1, min(3, n)))
                trans[(s, a)] = random_dist(rng, keys, denom_max)
    if dirac:
        obs = tuple(Dist({rng.randrange(nz): Q(1)}) for _ in range(n))
        init = Dist({rng.randrange(n): Q(1)})
    else:
        obs = tuple(random_dist(rng, rng.sample(range(nz), rng.randint(1, nz)),
                                denom_max) for _ in range(n))
        init = random_dist(rng, rng.sample(range(n), rng.randint(1, min(3, n))),
                           denom_max)
    m = Mdp(
        state_names=tuple(f"s{i}" for i in range(n)),
        action_names=tuple(f"a{i}" for i in range(max_actions)),
        obs_names=tuple(f"z{i}" for i in range(nz)),
        init=init, avail=tuple(avail), trans=trans, obs=obs,
    )
    assert not validate(m)
    return m


def random_risk(rng: random.Random, m: Mdp) -> RiskVector:
    return RiskVector(tuple(Q(rng.randint(0, 8), rng.randint(1, 4))
                            for _ in range(m.num_states)))


_acceptance_results: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "test_acceptance" in str(item.fspath):
        _acceptance_results.append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}")
