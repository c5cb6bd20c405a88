"""Brute-force ground truth for the trace risk.

Enumerates deterministic per-step action choices (one action per state
per step, the class of schedulers that suffices for the supremum), keeps
the Bayes-conditioned state distribution of every branch, and maximizes
the conditional weighted risk over all branches.  Branches that agree on
the conditioned distribution are merged, which shares path prefixes
across schedulers without changing the result; actions whose entire
successor mass is inconsistent with the next symbol are collapsed into a
single representative, since they all contribute nothing.

This module knows nothing about convex hulls or the unrolling
construction; it exists to check them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import Mdp, RiskVector
from .errors import InstanceTooLarge, TraceImpossible
from .rationals import ONE, ZERO

DEFAULT_CAP = 2_000_000


@dataclass(frozen=True)
class DcScheduler:
    """Deterministic counter scheduler: (state, step) -> action id.

    Steps count action positions, 0 .. len(trace)-2 for a trace with
    len(trace) symbols.
    """

    table: dict[tuple[int, int], int]

    def action(self, s: int, i: int) -> int:
        return self.table[(s, i)]


def _initial_masses(m: Mdp, z: int) -> dict[int, Fraction]:
    out = {}
    for s, p in m.init.items():
        w = p * m.obs[s][z]
        if w != 0:
            out[s] = w
    return out


def _options(m: Mdp, s: int, z: int):
    """Successor contributions per action; duplicate rows and zero-mass
    actions are collapsed, since they branch to identical children."""
    opts = []
    saw_drop = False
    for a in m.avail[s]:
        contrib = []
        for t, q in m.trans[(s, a)].items():
            w = q * m.obs[t][z]
            if w != 0:
                contrib.append((t, w))
        if contrib:
            row = tuple(contrib)
            if row not in opts:
                opts.append(row)
        else:
            saw_drop = True
    if saw_drop:
        opts.append(())
    return opts


def oracle_trace_risk(m: Mdp, trace: list[int], r: RiskVector,
                      cap: int = DEFAULT_CAP) -> Fraction:
    """Exact supremum of the conditional weighted risk over all schedulers.

    Raises TraceImpossible when no scheduler gives the trace positive
    probability and InstanceTooLarge when the enumeration would exceed
    `cap` branch expansions.
    """
    masses = _initial_masses(m, trace[0])
    if not masses:
        raise TraceImpossible("initial observation has probability zero")
    total = sum(masses.values(), ZERO)
    start = tuple(sorted((s, p / total) for s, p in masses.items()))

    memo: dict[tuple[int, tuple], Fraction | None] = {}
    opt_cache: dict[tuple[int, int], list] = {}
    work = 0

    def options(step: int, s: int):
        key = (step, s)
        if key not in opt_cache:
            opt_cache[key] = _options(m, s, trace[step + 1])
        return opt_cache[key]

    def best(step: int, bel: tuple) -> Fraction | None:
        nonlocal work
        if step == len(trace) - 1:
            return sum((p * r[s] for s, p in bel), ZERO)
        key = (step, bel)
        if key in memo:
            return memo[key]
        per_state = [options(step, s) for s, _ in bel]
        result: Fraction | None = None
        for choice in itertools.product(*per_state):
            work += 1
            if work > cap:
                raise InstanceTooLarge(f"oracle exceeded cap of {cap} expansions")
            entries: dict[int, Fraction] = {}
            for (s, p), contrib in zip(bel, choice):
                for t, w in contrib:
                    entries[t] = entries.get(t, ZERO) + p * w
            tot = sum(entries.values(), ZERO)
            if tot == 0:
                continue
            nxt = tuple(sorted((t, v / tot) for t, v in entries.items()))
            sub = best(step + 1, nxt)
            if sub is not None and (result is None or sub > result):
                result = sub
        memo[key] = result
        return result

    value = best(0, start)
    if value is None:
        raise TraceImpossible("no scheduler matches the trace")
    return value


def oracle_trace_prob(m: Mdp, sched: DcScheduler, trace: list[int]) -> Fraction:
    """Exact Pr[trace] under one scheduler: sum over matching paths of
    path probability times per-state observation weights."""
    masses = _initial_masses(m, trace[0])
    for i, z in enumerate(trace[1:]):
        nxt: dict[int, Fraction] = {}
        for s, p in masses.items():
            a = sched.action(s, i)
            for t, q in m.trans[(s, a)].items():
                w = p * q * m.obs[t][z]
                if w != 0:
                    nxt[t] = nxt.get(t, ZERO) + w
        masses = nxt
        if not masses:
            return ZERO
    return sum(masses.values(), ZERO)


def all_dc_schedulers(m: Mdp, steps: int):
    """Every deterministic counter scheduler over the full state set.

    Exponential; intended for tiny cross-check instances only.
    """
    states = range(m.num_states)
    per_step = [list(itertools.product(*[m.avail[s] for s in states]))
                for _ in range(steps)]
    for combo in itertools.product(*per_step):
        table = {}
        for i, row in enumerate(combo):
            for s in states:
                table[(s, i)] = row[s]
        yield DcScheduler(table)


def oracle_trace_risk_naive(m: Mdp, trace: list[int], r: RiskVector) -> Fraction:
    """Literal definition: enumerate schedulers, then paths, apply Bayes.

    Only usable on very small instances; serves as a cross-check of the
    shared-prefix implementation above.
    """
    steps = len(trace) - 1
    best: Fraction | None = None
    for sched in all_dc_schedulers(m, steps):
        prob = ZERO
        weighted = ZERO
        stack = [(s0, p0 * m.obs[s0][trace[0]], 0)
                 for s0, p0 in m.init.items() if m.obs[s0][trace[0]] != 0]
        while stack:
            s, w, i = stack.pop()
            if w == 0:
                continue
            if i == steps:
                prob += w
                weighted += w * r[s]
                continue
            a = sched.action(s, i)
            for t, q in m.trans[(s, a)].items():
                stack.append((t, w * q * m.obs[t][trace[i + 1]], i + 1))
        if prob > 0:
            ratio = weighted / prob
            if best is None or ratio > best:
                best = ratio
    if best is None:
        raise TraceImpossible("no scheduler matches the trace")
    return best
