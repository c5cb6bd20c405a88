"""Core model types: distributions, MDPs, composition and observation lifts.

Conventions used throughout the package:

* States, actions and observations are dense integer ids; human-readable
  names live in side tables on the model.
* A state-observation MDP emits one symbol per visited state, so a trace
  with k symbols corresponds to paths with k-1 actions and the first
  symbol is emitted by the initial state.
* A state-action-observation MDP (``SaMdp``) attaches the symbol to the
  transition instead: symbol t+1 is drawn from ``obs(s_t, a_t)`` and the
  first symbol from ``obs_init(s_0)``.  Sensors used in ``compose`` are
  ``SaMdp`` instances whose action alphabet is the world state set; there
  the pair (sensor state, world state) resolves the symbol and
  ``obs_init`` is not consulted.
* Models are immutable after construction/validation and safe to share
  across threads; every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .errors import AlphabetMismatch
from .rationals import ONE, Q, ZERO


class Dist:
    """Sparse probability distribution over integer ids.

    Zero entries are dropped at construction; whether the entries sum to
    one is checked by ``validate`` rather than here, so that malformed
    models can be represented and diagnosed.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        items = entries.items() if isinstance(entries, dict) else entries
        self._entries = {k: Q(v) for k, v in items if v != 0}

    def __getitem__(self, key: int) -> Fraction:
        return self._entries.get(key, ZERO)

    def __contains__(self, key: int) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, Dist) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v}" for k, v in self.items())
        return f"Dist({{{inner}}})"

    def items(self):
        """Entries in ascending id order (deterministic iteration)."""
        return sorted(self._entries.items())

    def support(self) -> frozenset[int]:
        return frozenset(self._entries)

    def total(self) -> Fraction:
        return sum(self._entries.values(), ZERO)

    def is_dirac(self) -> bool:
        return len(self._entries) == 1 and next(iter(self._entries.values())) == ONE


def dirac(key: int) -> Dist:
    return Dist({key: ONE})


@dataclass(frozen=True)
class RiskVector:
    """Dense nonnegative state-risk assignment."""

    values: tuple[Fraction, ...]

    @classmethod
    def of_values(cls, num_states: int, mapping, default=ZERO) -> "RiskVector":
        vals = [Q(default)] * num_states
        for s, v in mapping.items():
            vals[s] = Q(v)
        return cls(tuple(vals))

    @classmethod
    def of(cls, m: "Mdp", mapping, default=ZERO) -> "RiskVector":
        return cls.of_values(m.num_states, mapping, default)

    def __getitem__(self, s: int) -> Fraction:
        return self.values[s]

    def max(self) -> Fraction:
        return max(self.values)


@dataclass(frozen=True)
class Mdp:
    """Finite MDP with (optional) per-state observation distributions.

    ``obs is None`` marks a fully observable world model.  ``avail[s]``
    lists the action ids available in s, in declaration order; ``trans``
    is defined exactly on the pairs (s, a) with a in ``avail[s]``.
    """

    state_names: tuple[str, ...]
    action_names: tuple[str, ...]
    obs_names: tuple[str, ...]
    init: Dist
    avail: tuple[tuple[int, ...], ...]
    trans: dict[tuple[int, int], Dist]
    obs: tuple[Dist, ...] | None
    labels: dict[str, frozenset[int]] = field(default_factory=dict)
    risk: RiskVector | None = None

    @property
    def num_states(self) -> int:
        return len(self.state_names)

    def state_id(self, name: str) -> int:
        return self.state_names.index(name)

    def action_id(self, name: str) -> int:
        return self.action_names.index(name)

    def obs_id(self, name: str) -> int:
        return self.obs_names.index(name)

    def successors(self, s: int, a: int) -> Dist:
        return self.trans[(s, a)]


@dataclass(frozen=True)
class SaMdp:
    """MDP variant whose observations are attached to transitions.

    ``obs[(s, a)]`` is the symbol distribution emitted when taking a in s;
    ``obs_init[s]`` (optional) is the symbol emitted by an initial state
    before the first action.  ``lift_state_action_obs`` requires
    ``obs_init``; ``compose`` ignores it.
    """

    state_names: tuple[str, ...]
    action_names: tuple[str, ...]
    obs_names: tuple[str, ...]
    init: Dist
    avail: tuple[tuple[int, ...], ...]
    trans: dict[tuple[int, int], Dist]
    obs: dict[tuple[int, int], Dist]
    obs_init: tuple[Dist, ...] | None = None

    @property
    def num_states(self) -> int:
        return len(self.state_names)

    def state_id(self, name: str) -> int:
        return self.state_names.index(name)

    def action_id(self, name: str) -> int:
        return self.action_names.index(name)


class StructureKind(Enum):
    KRIPKE = "KripkeStructure"
    CHAIN = "MarkovChain"
    GENERAL = "GeneralMdp"


class ObsKind(Enum):
    DETERMINISTIC = "DeterministicObs"
    STOCHASTIC = "StochasticObs"


@dataclass(frozen=True)
class Diagnostic:
    """One violated invariant, naming the offending state/action."""

    kind: str
    state: int | None = None
    action: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        parts = [self.kind]
        if self.state is not None:
            parts.append(f"state={self.state}")
        if self.action is not None:
            parts.append(f"action={self.action}")
        if self.detail:
            parts.append(self.detail)
        return "(" + ", ".join(parts) + ")"


def validate(m: Mdp | SaMdp) -> list[Diagnostic]:
    """Check all structural invariants; empty list means the model is valid.

    Diagnostics are returned, never raised, so callers can report every
    problem at once.
    """
    out: list[Diagnostic] = []
    n = m.num_states
    if n == 0:
        return [Diagnostic("EmptyModel")]
    if m.init.total() != ONE:
        out.append(Diagnostic("NonStochasticInit", detail=f"sum={m.init.total()}"))
    if any(s >= n or s < 0 for s in m.init.support()):
        out.append(Diagnostic("BadInitState"))
    for s in range(n):
        if not m.avail[s]:
            out.append(Diagnostic("NoAction", state=s))
        for a in m.avail[s]:
            row = m.trans.get((s, a))
            if row is None:
                out.append(Diagnostic("MissingRow", state=s, action=a))
            elif row.total() != ONE:
                out.append(Diagnostic("NonStochasticRow", state=s, action=a,
                                      detail=f"sum={row.total()}"))
    for (s, a) in m.trans:
        if a not in m.avail[s]:
            out.append(Diagnostic("RowOutsideAvail", state=s, action=a))
    if isinstance(m, SaMdp):
        for s in range(n):
            for a in m.avail[s]:
                row = m.obs.get((s, a))
                if row is None:
                    out.append(Diagnostic("NoObservation", state=s, action=a))
                elif row.total() != ONE:
                    out.append(Diagnostic("NonStochasticObs", state=s, action=a))
        if m.obs_init is not None:
            for s in m.init.support():
                if m.obs_init[s].total() != ONE:
                    out.append(Diagnostic("NonStochasticObs", state=s, detail="initial"))
    elif m.obs is not None:
        for s in range(n):
            row = m.obs[s]
            if len(row) == 0:
                out.append(Diagnostic("NoObservation", state=s))
            elif row.total() != ONE:
                out.append(Diagnostic("NonStochasticObs", state=s))
    if isinstance(m, Mdp) and m.risk is not None:
        if len(m.risk.values) != n:
            out.append(Diagnostic("RiskLength"))
        elif any(v < 0 for v in m.risk.values):
            out.append(Diagnostic("NegativeRisk"))
    return out


def classify(m: Mdp) -> tuple[StructureKind, ObsKind]:
    """Structure axis per distribution shape, observation axis per obs rows.

    A model that is both all-Dirac and single-action reports KRIPKE; a
    fully observable model (obs is None) is vacuously deterministic on
    the observation axis.
    """
    all_dirac = m.init.is_dirac() and all(row.is_dirac() for row in m.trans.values())
    if m.obs is not None:
        obs_dirac = all(row.is_dirac() for row in m.obs)
    else:
        obs_dirac = True
    if all_dirac and obs_dirac:
        kind = StructureKind.KRIPKE
    elif all(len(m.avail[s]) == 1 for s in range(m.num_states)):
        kind = StructureKind.CHAIN
    else:
        kind = StructureKind.GENERAL
    return kind, ObsKind.DETERMINISTIC if obs_dirac else ObsKind.STOCHASTIC


def compose(world: Mdp, sensor: SaMdp) -> Mdp:
    """Synchronous product of a fully observable world with a sensor.

    The sensor reads the current world state as its action: the joint
    state (u, s) moves with ``P_world(u, a) x P_sensor(s, u)`` and emits
    ``obs_sensor(s, u)``.  Only product states forward-reachable from the
    joint initial support are materialized; dropping unreachable states
    cannot change any trace probability.  World labels and risk lift
    through the first component.
    """
    if set(sensor.action_names) != set(world.state_names):
        raise AlphabetMismatch(
            f"sensor actions {sorted(sensor.action_names)} != "
            f"world states {sorted(world.state_names)}")
    if world.obs is not None:
        raise AlphabetMismatch("world model must be fully observable")
    w_to_sa = tuple(sensor.action_names.index(nm) for nm in world.state_names)

    index: dict[tuple[int, int], int] = {}
    names: list[str] = []

    def intern(u: int, s: int) -> int:
        key = (u, s)
        if key not in index:
            index[key] = len(names)
            names.append(f"{world.state_names[u]}|{sensor.state_names[s]}")
        return index[key]

    init_entries = {}
    for u, pu in world.init.items():
        for s, ps in sensor.init.items():
            init_entries[intern(u, s)] = pu * ps
    frontier = list(index)
    avail: list[tuple[int, ...]] = []
    trans: dict[tuple[int, int], Dist] = {}
    obs_rows: list[Dist] = []
    seen = set(frontier)
    order: list[tuple[int, int]] = list(frontier)
    while frontier:
        u, s = frontier.pop()
        for a in world.avail[u]:
            w_row = world.trans[(u, a)]
            s_row = sensor.trans[(s, w_to_sa[u])]
            for u2, pu in w_row.items():
                for s2, ps in s_row.items():
                    if pu * ps == 0:
                        continue
                    if (u2, s2) not in seen:
                        seen.add((u2, s2))
                        intern(u2, s2)
                        order.append((u2, s2))
                        frontier.append((u2, s2))
    for u, s in order:
        j = index[(u, s)]
        assert j == len(avail)
        avail.append(tuple(world.avail[u]))
        for a in world.avail[u]:
            w_row = world.trans[(u, a)]
            s_row = sensor.trans[(s, w_to_sa[u])]
            entries = {}
            for u2, pu in w_row.items():
                for s2, ps in s_row.items():
                    p = pu * ps
                    if p != 0:
                        entries[index[(u2, s2)]] = entries.get(index[(u2, s2)], ZERO) + p
            trans[(j, a)] = Dist(entries)
        obs_rows.append(sensor.obs[(s, w_to_sa[u])])

    labels = {
        name: frozenset(index[(u, s)] for (u, s) in index if u in states)
        for name, states in world.labels.items()
    }
    risk = None
    if world.risk is not None:
        risk = RiskVector(tuple(world.risk[u] for (u, s) in order))
    return Mdp(
        state_names=tuple(names),
        action_names=world.action_names,
        obs_names=sensor.obs_names,
        init=Dist(init_entries),
        avail=tuple(avail),
        trans=trans,
        obs=tuple(obs_rows),
        labels=labels,
        risk=risk,
    )


def lift_state_action_obs(m: SaMdp) -> tuple[Mdp, tuple[tuple[int, Dist], ...]]:
    """Rewrite transition-attached observations as state observations.

    Each reachable pair (state, observation row that some incoming
    transition or the initial draw attaches to it) becomes one lifted
    state emitting exactly that row.  Tags with identical rows collapse,
    so a model whose rows do not depend on the action is returned
    isomorphic to its input.  The path correspondence is a bijection that
    preserves every trace probability exactly; the returned side table
    maps each lifted state to (original state, emitted row).
    """
    if m.obs_init is None:
        raise ValueError("lift requires obs_init on the state-action model")

    index: dict[tuple[int, Dist], int] = {}
    names: list[str] = []
    order: list[tuple[int, Dist]] = []

    def intern(s: int, row: Dist) -> int:
        key = (s, row)
        if key not in index:
            index[key] = len(names)
            names.append(f"{m.state_names[s]}#{len(names)}")
            order.append(key)
        return index[key]

    init_entries = {}
    for s, p in m.init.items():
        init_entries[intern(s, m.obs_init[s])] = p
    frontier = list(order)
    seen = set(order)
    while frontier:
        s, _row = frontier.pop()
        for a in m.avail[s]:
            out_row = m.obs[(s, a)]
            for s2, _p in m.trans[(s, a)].items():
                key = (s2, out_row)
                if key not in seen:
                    seen.add(key)
                    intern(s2, out_row)
                    frontier.append(key)

    avail: list[tuple[int, ...]] = []
    trans: dict[tuple[int, int], Dist] = {}
    obs_rows: list[Dist] = []
    for s, row in order:
        j = index[(s, row)]
        assert j == len(avail)
        avail.append(tuple(m.avail[s]))
        for a in m.avail[s]:
            out_row = m.obs[(s, a)]
            entries = {}
            for s2, p in m.trans[(s, a)].items():
                entries[index[(s2, out_row)]] = entries.get(index[(s2, out_row)], ZERO) + p
            trans[(j, a)] = Dist(entries)
        obs_rows.append(row)
    lifted = Mdp(
        state_names=tuple(names),
        action_names=m.action_names,
        obs_names=m.obs_names,
        init=Dist(init_entries),
        avail=tuple(avail),
        trans=trans,
        obs=tuple(obs_rows),
    )
    return lifted, tuple(order)


def to_kripke(m: Mdp) -> Mdp:
    """Strip probabilities: each probabilistic branch becomes its own action.

    Every transition distribution with k successors is replaced by k
    Dirac actions.  The initial distribution and observation rows are
    left as they are: neither can be split by adding actions, and the
    support-only estimator ignores their weights anyway.
    """
    action_names = list(m.action_names)
    avail: list[tuple[int, ...]] = []
    trans: dict[tuple[int, int], Dist] = {}
    for s in range(m.num_states):
        acts = []
        for a in m.avail[s]:
            row = m.trans[(s, a)]
            succs = sorted(row.support())
            if len(succs) == 1:
                trans[(s, a)] = dirac(succs[0])
                acts.append(a)
            else:
                for t in succs:
                    name = f"{m.action_names[a]}>{m.state_names[t]}"
                    if name in action_names:
                        b = action_names.index(name)
                    else:
                        b = len(action_names)
                        action_names.append(name)
                    trans[(s, b)] = dirac(t)
                    acts.append(b)
        avail.append(tuple(acts))
    return Mdp(
        state_names=m.state_names,
        action_names=tuple(action_names),
        obs_names=m.obs_names,
        init=m.init,
        avail=tuple(avail),
        trans=trans,
        obs=m.obs,
        labels=dict(m.labels),
        risk=m.risk,
    )


def induce_chain(m: Mdp, preferred: str) -> Mdp:
    """Restrict each state to one action: `preferred` if available, else
    the unique available action (error if that is ambiguous)."""
    avail: list[tuple[int, ...]] = []
    trans: dict[tuple[int, int], Dist] = {}
    try:
        pref = m.action_names.index(preferred)
    except ValueError:
        pref = -1
    for s in range(m.num_states):
        if pref in m.avail[s]:
            a = pref
        elif len(m.avail[s]) == 1:
            a = m.avail[s][0]
        else:
            raise ValueError(
                f"state {m.state_names[s]} has no {preferred!r} action and "
                f"{len(m.avail[s])} alternatives")
        avail.append((a,))
        trans[(s, a)] = m.trans[(s, a)]
    return Mdp(
        state_names=m.state_names,
        action_names=m.action_names,
        obs_names=m.obs_names,
        init=m.init,
        avail=tuple(avail),
        trans=trans,
        obs=m.obs,
        labels=dict(m.labels),
        risk=m.risk,
    )
