"""Forward state estimators and the convex-hull vertex monitor.

Three estimators share one session interface:

* support mode  -- track the set of states that can have emitted the
  trace (positivity only; exact on Kripke structures, conservative
  support information on any model);
* chain mode    -- track a single Bayes-normalized belief (Markov chains);
* mdp mode      -- track the vertex set of the convex hull of all
  beliefs reachable under any scheduler, updating with deterministic
  per-step action choices and eliminating interior beliefs by an exact
  LP feasibility test.

Every belief produced here is either the distinguished zero belief or
sums to exactly 1 in rational arithmetic.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction

from .core import Mdp, RiskVector
from .errors import SessionDead, StepTimeout, TraceImpossible
from .lp import convex_combination
from .rationals import ONE, ZERO


class Belief:
    """Sparse distribution over states; the empty belief is the zero belief."""

    __slots__ = ("items",)

    def __init__(self, items):
        if isinstance(items, dict):
            items = tuple(sorted((s, p) for s, p in items.items() if p != 0))
        self.items = tuple(items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Belief) and self.items == other.items

    def __hash__(self) -> int:
        return hash(self.items)

    def __repr__(self) -> str:
        inner = ", ".join(f"{s}: {p}" for s, p in self.items)
        return f"Belief({{{inner}}})"

    def __getitem__(self, s: int) -> Fraction:
        for t, p in self.items:
            if t == s:
                return p
        return ZERO

    @property
    def is_zero(self) -> bool:
        return not self.items

    def support(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.items)

    def total(self) -> Fraction:
        return sum((p for _, p in self.items), ZERO)

    def dot(self, r: RiskVector) -> Fraction:
        return sum((p * r[s] for s, p in self.items), ZERO)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.items)


ZERO_BELIEF = Belief(())


def initial_belief(m: Mdp, z: int) -> Belief:
    """Bayes-conditioned initial belief for the first observation."""
    entries = {}
    for s, p in m.init.items():
        w = p * m.obs[s][z]
        if w != 0:
            entries[s] = w
    total = sum(entries.values(), ZERO)
    if total == 0:
        return ZERO_BELIEF
    return Belief({s: w / total for s, w in entries.items()})


def ks_init(m: Mdp, z: int) -> frozenset[int]:
    return frozenset(s for s in m.init.support() if m.obs[s][z] > 0)


def ks_step(m: Mdp, prev: frozenset[int], z: int) -> frozenset[int]:
    """States reachable in one step from `prev` that can emit z."""
    out = set()
    for s in prev:
        for a in m.avail[s]:
            for t in m.trans[(s, a)].support():
                if t not in out and m.obs[t][z] > 0:
                    out.add(t)
    return frozenset(out)


def ks_risk(support: frozenset[int], r: RiskVector) -> Fraction:
    if not support:
        raise TraceImpossible("empty support set")
    return max(r[s] for s in support)


def chain_action(m: Mdp, s: int) -> int:
    if len(m.avail[s]) != 1:
        raise ValueError(f"state {s} has {len(m.avail[s])} actions; not a chain")
    return m.avail[s][0]


def mc_step(m: Mdp, bel: Belief, z: int) -> Belief:
    """Single-action Bayes update; returns the zero belief when the
    normalizer vanishes."""
    if bel.is_zero:
        return ZERO_BELIEF
    entries: dict[int, Fraction] = {}
    for s, p in bel.items:
        row = m.trans[(s, chain_action(m, s))]
        for t, q in row.items():
            w = p * q * m.obs[t][z]
            if w != 0:
                entries[t] = entries.get(t, ZERO) + w
    total = sum(entries.values(), ZERO)
    if total == 0:
        return ZERO_BELIEF
    return Belief({t: w / total for t, w in entries.items()})


def mc_risk(bel: Belief, r: RiskVector) -> Fraction:
    if bel.is_zero:
        raise TraceImpossible("zero belief")
    return bel.dot(r)


def _step_options(m: Mdp, states: frozenset[int], z: int, cache: dict,
                  keep_all: bool):
    """Per-state successor choices for one observation.

    For each action the contribution is the obs-filtered, pre-multiplied
    successor list with its mass.  Actions whose whole row is filtered
    away are collapsed into one "drop" representative: they all
    contribute nothing and differ only in name.  With `keep_all` those
    actions are excluded instead, restricting the enumeration to
    mass-preserving per-state choices.
    """
    for s in states:
        if s in cache:
            continue
        opts = []
        saw_drop = False
        for a in m.avail[s]:
            contrib = []
            mass = ZERO
            for t, q in m.trans[(s, a)].items():
                w = q * m.obs[t][z]
                if w != 0:
                    contrib.append((t, w))
                    mass += w
            if mass == 0:
                saw_drop = True
            else:
                opts.append((mass, tuple(contrib)))
        if saw_drop and not keep_all:
            opts.append((ZERO, ()))
        cache[s] = tuple(opts)
    return cache


def mdp_step(m: Mdp, beliefs: list[Belief], z: int,
             deadline: float | None = None, keep_all: bool = False) -> list[Belief]:
    """All successor beliefs under deterministic per-step action choices.

    Iterates the Cartesian product of available actions over each
    belief's support only, drops zero-normalizer results, and removes
    exact duplicates.  Order is deterministic (input order, then action
    declaration order).  `keep_all=True` restricts to mass-preserving
    choices: no state may pick an action that is certain to mismatch the
    observation (a deliberate mismatch sacrifices that state's share of
    the conditioning mass and sharpens the belief, which the full
    estimator must allow).
    """
    cache: dict = {}
    out: dict[Belief, None] = {}
    tick = 0
    for bel in beliefs:
        if bel.is_zero:
            continue
        supp = sorted(s for s, _ in bel.items)
        _step_options(m, frozenset(supp), z, cache, keep_all)
        per_state = [cache[s] for s in supp]
        weights = [p for _, p in sorted(bel.items)]
        for choice in itertools.product(*per_state):
            tick += 1
            if deadline is not None and tick % 256 == 0 and time.perf_counter() > deadline:
                raise StepTimeout("mdp step exceeded the per-feed budget")
            entries: dict[int, Fraction] = {}
            total = ZERO
            for w, (mass, contrib) in zip(weights, choice):
                if mass == 0:
                    continue
                total += w * mass
                for t, q in contrib:
                    wq = w * q
                    entries[t] = entries.get(t, ZERO) + wq
            if total == 0:
                continue
            cand = Belief({t: v / total for t, v in entries.items()})
            out.setdefault(cand, None)
    return list(out)


def randomized_step(m: Mdp, bel: Belief, policy: dict[int, dict[int, Fraction]],
                    z: int) -> Belief:
    """Bayes update under a randomized per-step action assignment.

    `policy[s]` is a distribution over the actions of s.  Used to check
    that randomized choices never leave the hull of the tracked vertices.
    """
    entries: dict[int, Fraction] = {}
    for s, p in bel.items:
        for a, pa in policy[s].items():
            for t, q in m.trans[(s, a)].items():
                w = p * pa * q * m.obs[t][z]
                if w != 0:
                    entries[t] = entries.get(t, ZERO) + w
    total = sum(entries.values(), ZERO)
    if total == 0:
        return ZERO_BELIEF
    return Belief({t: v / total for t, v in entries.items()})


def _vectors(bel: Belief, coords: list[int]) -> tuple[Fraction, ...]:
    d = bel.as_dict()
    return tuple(d.get(s, ZERO) for s in coords)


def _pair_witness(target, pool_vecs, limit=32, attempts=600):
    """Cheap 2-generator convex-combination check before running the LP."""
    k = min(limit, len(pool_vecs))
    tried = 0
    for i in range(k):
        for j in range(i + 1, k):
            tried += 1
            if tried > attempts:
                return False
            g1, g2 = pool_vecs[i], pool_vecs[j]
            w = None
            for a, b, c in zip(g1, g2, target):
                if a != b:
                    w = (c - b) / (a - b)
                    break
            if w is None or w < 0 or w > 1:
                continue
            if all(w * a + (1 - w) * b == c for a, b, c in zip(g1, g2, target)):
                return True
    return False


def hull_reduce(cands: list[Belief],
                deadline: float | None = None) -> list[Belief]:
    """Keep exactly the beliefs that are not convex combinations of the rest.

    Interior points are eliminated one at a time and immediately leave
    the LP generator pool for later tests; the final vertex set does not
    depend on the processing order (vertex-hood is a property of the
    whole set), so candidates are visited smallest support first, which
    certifies extreme points early.  Several sound shortcuts run before
    the exact LP:

    * generators are restricted to supports contained in the candidate's
      (nothing else can carry positive weight);
    * a candidate strictly above every generator on some coordinate is a
      vertex outright;
    * a 2-generator witness may use already-eliminated points: an
      interior point is still a member of the set, so any combination
      through it is a valid interiority proof.

    Survivors are returned in the insertion order of `cands`.
    """
    uniq: dict[Belief, None] = {}
    for b in cands:
        if not b.is_zero:
            uniq.setdefault(b, None)
    items = list(uniq)
    n = len(items)
    alive = [True] * n
    supports = [b.support() for b in items]
    # float shadows drive heuristics only (processing order, LP seeding);
    # every accept/reject decision below is exact.
    all_states = sorted(frozenset().union(*supports)) if items else []
    pos_of = {s: k for k, s in enumerate(all_states)}
    shadows = []
    for b in items:
        vec = [0.0] * len(all_states)
        for s, p in b.items:
            vec[pos_of[s]] = float(p)
        shadows.append(vec)
    centroid = [sum(v[k] for v in shadows) / n for k in range(len(all_states))] \
        if items else []

    def dist(u, v) -> float:
        return sum(abs(a - b) for a, b in zip(u, v))

    # innermost points first: interiors tend to fall early, shrinking the
    # generator pools before the expensive extremality proofs run
    order = sorted(range(n),
                   key=lambda i: (len(supports[i]), dist(shadows[i], centroid), i))

    def interior(i: int) -> bool:
        cand = items[i]
        sup_i = supports[i]
        witness_pool = [j for j in range(n) if j != i and supports[j] <= sup_i]
        if not witness_pool:
            return False
        coords = sorted(sup_i)
        target = _vectors(cand, coords)
        witness_pool.sort(key=lambda j: (len(sup_i) - len(supports[j]), j))
        witness_vecs = [_vectors(items[j], coords) for j in witness_pool]
        if _pair_witness(target, witness_vecs):
            return True
        pool = [j for j in witness_pool if alive[j]]
        if not pool:
            return False
        pool_vecs = [_vectors(items[j], coords) for j in pool]
        exceeds = [max(v[k] for v in pool_vecs) for k in range(len(coords))]
        if any(t > mx for t, mx in zip(target, exceeds)):
            return False  # beats every generator on a coordinate: vertex
        near = sorted(range(len(pool)),
                      key=lambda p: dist(shadows[pool[p]], shadows[i]))
        seed = near[:2 * (len(coords) + 2)]
        return convex_combination(target, pool_vecs, seed=seed) is not None

    for i in order:
        if deadline is not None and time.perf_counter() > deadline:
            raise StepTimeout("hull reduction exceeded the per-feed budget")
        if interior(i):
            alive[i] = False
    return [b for b, keep in zip(items, alive) if keep]


def in_hull(bel: Belief, generators: list[Belief]) -> bool:
    """Is `bel` a convex combination of `generators` (inclusive)?"""
    coords = sorted(set().union(*[g.support() for g in generators], bel.support()))
    return convex_combination(
        _vectors(bel, coords), [_vectors(g, coords) for g in generators]
    ) is not None


def mdp_risk(beliefs: list[Belief], r: RiskVector) -> Fraction:
    if not beliefs:
        raise TraceImpossible("empty belief set")
    return max(b.dot(r) for b in beliefs)


@dataclass
class FeedResult:
    """Per-observation monitor output."""

    risk: Fraction
    time_ms: float
    beliefs: int
    dim: int
    unrolled_states: int | None = None


class MonitorSession:
    """Stateful filtering monitor; feeds are strictly sequential.

    mode is one of "ks", "mc", "mdp".  In mdp mode the hull reduction can
    be disabled (`use_hull=False`) to keep every generated belief, which
    reproduces the unreduced-filter behaviour for benchmarks.  A feed
    that raises TraceImpossible or StepTimeout leaves the session dead
    but queryable.
    """

    def __init__(self, m: Mdp, r: RiskVector, mode: str = "mdp",
                 use_hull: bool = True, per_step_timeout_ms: float | None = None):
        if m.obs is None:
            raise ValueError("monitoring needs an observable model")
        if mode not in ("ks", "mc", "mdp"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "mc":
            for s in range(m.num_states):
                chain_action(m, s)
        self.model = m
        self.risk = r
        self.mode = mode
        self.use_hull = use_hull
        self.per_step_timeout_ms = per_step_timeout_ms
        self.steps = 0
        self.dead = False
        self.death_reason: str | None = None
        self.support: frozenset[int] | None = None
        self.belief: Belief | None = None
        self.vertices: list[Belief] | None = None
        self.history: list[FeedResult] = []

    def _deadline(self, start: float) -> float | None:
        if self.per_step_timeout_ms is None:
            return None
        return start + self.per_step_timeout_ms / 1000.0

    def feed(self, z: int) -> FeedResult:
        if self.dead:
            raise SessionDead(self.death_reason or "session is dead")
        start = time.perf_counter()
        deadline = self._deadline(start)
        try:
            risk, nbel, dim = self._advance(z, deadline)
            if deadline is not None and time.perf_counter() > deadline:
                raise StepTimeout("feed exceeded the per-step budget")
        except (TraceImpossible, StepTimeout) as exc:
            self.dead = True
            self.death_reason = f"{type(exc).__name__}: {exc}"
            raise
        self.steps += 1
        result = FeedResult(risk=risk, time_ms=(time.perf_counter() - start) * 1000.0,
                            beliefs=nbel, dim=dim)
        self.history.append(result)
        return result

    def _advance(self, z, deadline):
        m = self.model
        if self.mode == "ks":
            cur = ks_init(m, z) if self.steps == 0 else ks_step(m, self.support, z)
            self.support = cur
            return ks_risk(cur, self.risk), len(cur), len(cur)
        if self.mode == "mc":
            cur = initial_belief(m, z) if self.steps == 0 else mc_step(m, self.belief, z)
            self.belief = cur
            return mc_risk(cur, self.risk), 1, len(cur.items)
        if self.steps == 0:
            first = initial_belief(m, z)
            cands = [] if first.is_zero else [first]
        else:
            cands = mdp_step(m, self.vertices, z, deadline)
        if self.use_hull:
            cands = hull_reduce(cands, deadline)
        if not cands:
            self.vertices = []
            raise TraceImpossible("no belief is consistent with the trace")
        self.vertices = cands
        dim = len(frozenset().union(*[b.support() for b in cands]))
        return mdp_risk(cands, self.risk), len(cands), dim
