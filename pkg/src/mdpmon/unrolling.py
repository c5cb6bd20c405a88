"""Trace unrolling and max-reachability: the polynomial-time monitor.

Pipeline: split states so observations become deterministic, unroll the
split model for the consumed trace with a terminal lottery that moves
risk mass to an absorbing goal, and condition by looping every
observation mismatch back to the initial distribution.  The maximal
probability of reaching the goal in the conditioned unrolling equals the
trace risk (after risk scaling).

The layered shape makes policy evaluation a single backward sweep: every
value is an affine function a + b*V of the scalar V = value of the
initial distribution (the restart target), so exact policy iteration
never needs a general linear solve.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .core import Dist, Mdp, RiskVector
from .errors import NumericPrecision, SessionDead, StepTimeout, TraceImpossible
from .filtering import FeedResult, ks_init, ks_step
from .rationals import ONE, Q, ZERO

DEFAULT_EPSILON = Q(1, 10**6)


def det_obs_transform(m: Mdp) -> tuple[Mdp, tuple[tuple[int, int], ...]]:
    """Split each state into one copy per observation it can emit.

    The copy (s, z) inherits s's actions; incoming probability mass is
    multiplied by obs(s)(z), the initial distribution is weighted the
    same way, and the copy emits z deterministically.  For every path of
    the original there are weighted copy-paths with identical trace
    distribution, scheduler by scheduler.  Returns the split model and a
    map from new state id to (original state, observation id).
    """
    if m.obs is None:
        raise ValueError("det_obs_transform needs an observable model")
    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def intern(s: int, z: int) -> int:
        key = (s, z)
        if key not in index:
            index[key] = len(order)
            order.append(key)
        return index[key]

    init_entries = {}
    for s, p in m.init.items():
        for z, w in m.obs[s].items():
            init_entries[intern(s, z)] = p * w
    frontier = list(order)
    seen = set(order)
    while frontier:
        s, _z = frontier.pop()
        for a in m.avail[s]:
            for t, _q in m.trans[(s, a)].items():
                for z2, _w in m.obs[t].items():
                    if (t, z2) not in seen:
                        seen.add((t, z2))
                        intern(t, z2)
                        frontier.append((t, z2))
    avail = []
    trans: dict[tuple[int, int], Dist] = {}
    obs_rows = []
    names = []
    for j, (s, z) in enumerate(order):
        names.append(f"{m.state_names[s]}@{m.obs_names[z]}")
        avail.append(tuple(m.avail[s]))
        for a in m.avail[s]:
            entries = {}
            for t, q in m.trans[(s, a)].items():
                for z2, w in m.obs[t].items():
                    entries[index[(t, z2)]] = q * w
            trans[(j, a)] = Dist(entries)
        obs_rows.append(Dist({z: ONE}))
    split = Mdp(
        state_names=tuple(names),
        action_names=m.action_names,
        obs_names=m.obs_names,
        init=Dist(init_entries),
        avail=tuple(avail),
        trans=trans,
        obs=tuple(obs_rows),
    )
    return split, tuple(order)


def obs_tags(m_prime: Mdp) -> tuple[int, ...]:
    """The unique symbol of each state of a deterministic-observation model."""
    tags = []
    for row in m_prime.obs:
        support = sorted(row.support())
        if len(support) != 1:
            raise ValueError("model does not have deterministic observations")
        tags.append(support[0])
    return tuple(tags)


@dataclass
class UnrolledMdp:
    """Layered copy of a deterministic-observation model for one trace.

    Layer i holds the states materialized for trace position i; the last
    layer's single action is the terminal lottery sending r'(s) to the
    absorbing goal and the rest to the absorbing sink.  In the
    conditioned variant every state whose symbol mismatches its layer's
    trace symbol has its rows replaced by the initial distribution, and
    only states reachable under those dynamics are kept.
    """

    m_prime: Mdp
    trace: tuple[int, ...]
    r_scaled: RiskVector
    layers: tuple[tuple[int, ...], ...]
    conditioned: bool
    tags: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.tags:
            self.tags = obs_tags(self.m_prime)

    @property
    def num_states(self) -> int:
        return sum(len(layer) for layer in self.layers) + 2  # + goal, sink

    def matched(self, layer: int) -> tuple[bool, ...]:
        z = self.trace[layer]
        return tuple(self.tags[s] == z for s in self.layers[layer])


def unroll(m_prime: Mdp, trace: list[int], r_scaled: RiskVector) -> UnrolledMdp:
    """Unconditioned layered copy (one layer per trace symbol)."""
    layers = [tuple(sorted(m_prime.init.support()))]
    for _ in range(len(trace) - 1):
        nxt: set[int] = set()
        for s in layers[-1]:
            for a in m_prime.avail[s]:
                nxt.update(m_prime.trans[(s, a)].support())
        layers.append(tuple(sorted(nxt)))
    return UnrolledMdp(m_prime=m_prime, trace=tuple(trace), r_scaled=r_scaled,
                       layers=tuple(layers), conditioned=False)


def condition(u: UnrolledMdp) -> UnrolledMdp:
    """Loop mismatching states back to the initial distribution and prune.

    Mismatched states stop expanding (their row is the initial
    distribution over layer 0, which is already materialized), so layer
    i+1 only needs the successors of matched layer-i states.
    """
    m_prime = u.m_prime
    tags = u.tags
    layers = [tuple(sorted(m_prime.init.support()))]
    for i in range(len(u.trace) - 1):
        z = u.trace[i]
        nxt: set[int] = set()
        for s in layers[i]:
            if tags[s] != z:
                continue
            for a in m_prime.avail[s]:
                nxt.update(m_prime.trans[(s, a)].support())
        layers.append(tuple(sorted(nxt)))
    return UnrolledMdp(m_prime=m_prime, trace=u.trace, r_scaled=u.r_scaled,
                       layers=tuple(layers), conditioned=True, tags=tags)


def _greedy_line(u: UnrolledMdp, v: Fraction,
                 deadline: float | None = None) -> tuple[Fraction, Fraction]:
    """One backward sweep at restart value v.

    Returns (A, B) for the greedy policy: its exact reach probability is
    A + B * V(sigma) with V the value of the initial distribution, i.e.
    A/(1-B) once solved.  Ties between actions break toward the smaller
    action index.
    """
    m_prime = u.m_prime
    tags = u.tags
    last = len(u.trace) - 1
    vals: dict[int, tuple[Fraction, Fraction]] = {}
    for i in range(last, -1, -1):
        if deadline is not None and time.perf_counter() > deadline:
            raise StepTimeout("reachability solve exceeded the per-feed budget")
        z = u.trace[i]
        nxt_vals = vals
        vals = {}
        for s in u.layers[i]:
            if tags[s] != z:
                vals[s] = (ZERO, ONE)  # restart: value is V itself
            elif i == last:
                vals[s] = (u.r_scaled[s], ZERO)  # terminal lottery
            else:
                best: tuple[Fraction, Fraction] | None = None
                best_score = None
                for a in m_prime.avail[s]:
                    acc_a = ZERO
                    acc_b = ZERO
                    for t, p in m_prime.trans[(s, a)].items():
                        ta, tb = nxt_vals[t]
                        acc_a += p * ta
                        acc_b += p * tb
                    score = acc_a + acc_b * v
                    if best_score is None or score > best_score:
                        best_score = score
                        best = (acc_a, acc_b)
                vals[s] = best
    acc_a = ZERO
    acc_b = ZERO
    for s, p in u.m_prime.init.items():
        ta, tb = vals[s]
        acc_a += p * ta
        acc_b += p * tb
    return acc_a, acc_b


def max_reach(u: UnrolledMdp, engine: str = "epi",
              epsilon: Fraction = DEFAULT_EPSILON,
              deadline: float | None = None,
              iteration_cap: int = 50_000):
    """Maximal probability of reaching the goal in the conditioned unrolling.

    "epi" (exact policy iteration) returns the exact rational value;
    "ivi" (interval value iteration) returns certified (lower, upper)
    bounds with upper - lower <= epsilon, raising NumericPrecision if the
    gap does not close within the iteration cap.
    """
    if not u.conditioned:
        raise ValueError("max_reach needs a conditioned unrolling")
    if engine == "epi":
        v = ZERO
        for _ in range(iteration_cap):
            a, b = _greedy_line(u, v, deadline)
            phi = a + b * v
            if phi <= v:
                return v
            assert b < ONE
            v = a / (ONE - b)
        raise NumericPrecision("policy iteration failed to converge")
    if engine == "ivi":
        # Value-iteration sweeps from below.  Each iterate is rounded down
        # to the 2^-64 grid: still a sound lower bound (the sweep is
        # monotone) and it keeps the rational arithmetic from growing with
        # the iteration count.  A candidate upper bound U certifies exactly
        # when one sweep shows it is a prefixpoint: the sweep value at any
        # x at or above the true value never exceeds x, and always does
        # below it, so the check passes iff U really is an upper bound.
        grid = 1 << 64
        lo = ZERO
        for k in range(iteration_cap):
            a, b = _greedy_line(u, lo, deadline)
            nxt = a + b * lo
            lo = Q(nxt.numerator * grid // nxt.denominator, grid)
            if k % 4 == 0 or k < 4:
                hi = min(lo + epsilon, ONE)
                a2, b2 = _greedy_line(u, hi, deadline)
                if a2 + b2 * hi <= hi:
                    return lo, hi
        raise NumericPrecision(
            f"interval iteration gap above {epsilon} after {iteration_cap} sweeps")
    raise ValueError(f"unknown engine {engine!r}")


def qualitative_monitor(m: Mdp, trace: list[int], r: RiskVector) -> bool:
    """Can any scheduler both match the trace and end in a positive-risk
    state?  Solved by a support-set traversal plus a final risk check."""
    support = ks_init(m, trace[0])
    for z in trace[1:]:
        if not support:
            return False
        support = ks_step(m, support, z)
    return any(r[s] > 0 for s in support)


class UnrollingSession:
    """Stateful unrolling monitor: one layer appended per observation.

    The previously terminal layer's lottery is replaced by ordinary rows
    into the new layer, a fresh lottery is attached, the new layer is
    conditioned, and the reachability value is re-solved from scratch
    (values change globally when a layer is appended, the structure does
    not).  `rebuild=True` forces the batch construction every feed; the
    result is identical either way.  Risk values are reported in the
    units of the supplied risk vector, undoing the internal scaling.
    """

    def __init__(self, m: Mdp, r: RiskVector, engine: str = "epi",
                 epsilon: Fraction = DEFAULT_EPSILON, rebuild: bool = False,
                 per_step_timeout_ms: float | None = None):
        from .risk import scale_risk

        if m.obs is None:
            raise ValueError("monitoring needs an observable model")
        self.model = m
        self.risk = r
        self.engine = engine
        self.epsilon = epsilon
        self.rebuild = rebuild
        self.per_step_timeout_ms = per_step_timeout_ms
        self.m_prime, self.state_map = det_obs_transform(m)
        r_prime_orig = RiskVector(tuple(r[s] for s, _z in self.state_map))
        self.r_scaled, _lam = scale_risk(r_prime_orig, ZERO)
        self.scale = max(ONE, r_prime_orig.max())
        self._tags = obs_tags(self.m_prime)
        self.trace: list[int] = []
        self.layers: list[tuple[int, ...]] = []
        self.support: frozenset[int] | None = None
        self.steps = 0
        self.dead = False
        self.death_reason: str | None = None
        self.last_bounds: tuple[Fraction, Fraction] | None = None
        self.history: list[FeedResult] = []

    def _extend(self) -> None:
        i = len(self.trace) - 1
        if i == 0:
            self.layers.append(tuple(sorted(self.m_prime.init.support())))
            return
        z_prev = self.trace[i - 1]
        nxt: set[int] = set()
        for s in self.layers[i - 1]:
            if self._tags[s] != z_prev:
                continue
            for a in self.m_prime.avail[s]:
                nxt.update(self.m_prime.trans[(s, a)].support())
        self.layers.append(tuple(sorted(nxt)))

    def _unrolled(self) -> UnrolledMdp:
        return UnrolledMdp(m_prime=self.m_prime, trace=tuple(self.trace),
                           r_scaled=self.r_scaled, layers=tuple(self.layers),
                           conditioned=True, tags=self._tags)

    def feed(self, z: int) -> FeedResult:
        if self.dead:
            raise SessionDead(self.death_reason or "session is dead")
        start = time.perf_counter()
        deadline = None
        if self.per_step_timeout_ms is not None:
            deadline = start + self.per_step_timeout_ms / 1000.0
        self.trace.append(z)
        try:
            if self.steps == 0:
                self.support = ks_init(self.model, z)
            else:
                self.support = ks_step(self.model, self.support, z)
            if not self.support:
                raise TraceImpossible("no state is consistent with the trace")
            if self.rebuild:
                u = condition(unroll(self.m_prime, self.trace, self.r_scaled))
                self.layers = list(u.layers)
            else:
                self._extend()
                u = self._unrolled()
            if self.engine == "ivi":
                lo, hi = max_reach(u, "ivi", self.epsilon, deadline)
                self.last_bounds = (lo * self.scale, hi * self.scale)
                value = lo * self.scale
            else:
                value = max_reach(u, "epi", deadline=deadline) * self.scale
                self.last_bounds = (value, value)
            if deadline is not None and time.perf_counter() > deadline:
                raise StepTimeout("feed exceeded the per-step budget")
        except (TraceImpossible, StepTimeout, NumericPrecision) as exc:
            self.dead = True
            self.death_reason = f"{type(exc).__name__}: {exc}"
            raise
        self.steps += 1
        result = FeedResult(risk=value, time_ms=(time.perf_counter() - start) * 1000.0,
                            beliefs=0, dim=len(self.support),
                            unrolled_states=u.num_states)
        self.history.append(result)
        return result
