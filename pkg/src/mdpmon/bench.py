"""Benchmark model generators and the desk-scale experiment harness.

The generator families (documented constants, frozen by golden files):

* airport  -- ground vehicle crossing a runway while a plane descends;
  world positions x plane distances, sensor accuracy improving as the
  plane approaches.  The smallest instance (3 lanes, 3 distances, kind
  A) is the bundled worked example.
* refuel   -- robot with a hidden battery level on a DxD grid with
  charging cells at two corners; slip probability 1/5, label
  ``depleted`` on battery-0 states.
* evade    -- two robots on a DxD grid; the monitored one moves
  uniformly at random, the other is adversarial.  Kind I hides the other
  robot's incentive, kind V reports its cell only within view range.
* blowup / blowup-ext -- the component families whose tracked vertex set
  is 2^n; the extension adds per-component exits to absorbing goal/sink
  states so that dropped vertices can be punished by a suffix.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass
from fractions import Fraction

from .core import Dist, Mdp, RiskVector, SaMdp, compose, dirac, lift_state_action_obs
from .errors import StepTimeout
from .filtering import MonitorSession
from .modelio import ResultRow
from .rationals import ONE, Q, ZERO
from .simulator import SimConfig, simulate
from .unrolling import UnrollingSession


# ---------------------------------------------------------------- airport

def _airport_positions(lanes: int) -> list[str]:
    middles = ["M"] if lanes == 3 else [f"M{j}" for j in range(1, lanes - 1)]
    return ["R"] + middles + ["L"]


def _clamp01(x: Fraction) -> Fraction:
    return min(ONE, max(ZERO, x))


def gen_airport(lanes: int = 3, plane_res: int = 3,
                sensor_kind: str = "A") -> tuple[Mdp, SaMdp]:
    """World and sensor pair; compose() yields the monitorable joint model.

    Entering/crossing probabilities are linear in the normalized plane
    distance f = d/(plane_res-1), clamped to [0,1]:

        enter (no signal)   1/20 + 9f/10        enter (progress)  49f/50 - 12/25
        cross (no signal)   3/2 - f             cross (progress)  27/25 - 9f/50

    Sensor accuracy by distance index k: edge positions 19/20 at k=0 and
    2/(2+k) beyond, middle positions 49/50 at k=0 and 3/(2(k+1)) beyond,
    with the error mass on the adjacent position symbols.
    """
    if lanes < 3 or plane_res < 3:
        raise ValueError("need lanes >= 3 and plane_res >= 3")
    positions = _airport_positions(lanes)
    last = len(positions) - 1
    dmax = plane_res - 1

    def sname(pos: int, d: int) -> str:
        return f"{positions[pos]}_D{d}"

    names = [sname(p, d) for p in range(len(positions)) for d in range(plane_res)]
    sid = {nm: i for i, nm in enumerate(names)}
    action_names = ("none", "p", "w", "pw", "done")
    NONE, P, W, PW, DONE = range(5)
    avail: list[tuple[int, ...]] = [()] * len(names)
    trans: dict[tuple[int, int], Dist] = {}

    def frac(d: int) -> Fraction:
        return Q(d, dmax)

    for pos in range(len(positions)):
        for d in range(plane_res):
            s = sid[sname(pos, d)]
            if d == 0:
                avail[s] = (DONE,)
                if 0 < pos < last:
                    trans[(s, DONE)] = dirac(sid[sname(pos + 1, 0)])
                else:
                    trans[(s, DONE)] = dirac(s)
                continue
            f = frac(d)
            if pos == 0:
                avail[s] = (NONE, P, W, PW)
                p_in = _clamp01(Q(1, 20) + Q(9, 10) * f)
                trans[(s, NONE)] = Dist({s: 1 - p_in, sid[sname(1, d)]: p_in})
                p_in2 = _clamp01(Q(49, 50) * f - Q(24, 50))
                trans[(s, P)] = Dist({sid[sname(0, d - 1)]: 1 - p_in2,
                                      sid[sname(1, d - 1)]: p_in2})
                trans[(s, W)] = dirac(s)
                trans[(s, PW)] = dirac(sid[sname(0, d - 1)])
            elif pos == last:
                avail[s] = (NONE, P)
                trans[(s, NONE)] = dirac(s)
                trans[(s, P)] = dirac(sid[sname(last, d - 1)])
            else:
                avail[s] = (NONE, P)
                q_cross = _clamp01(Q(3, 2) - f)
                trans[(s, NONE)] = Dist({s: 1 - q_cross, sid[sname(pos + 1, d)]: q_cross})
                q_cross2 = _clamp01(Q(27, 25) - Q(9, 50) * f)
                trans[(s, P)] = Dist({sid[sname(pos, d - 1)]: 1 - q_cross2,
                                      sid[sname(pos + 1, d - 1)]: q_cross2})

    crash = frozenset(sid[sname(p, 0)] for p in range(1, last))
    world = Mdp(
        state_names=tuple(names),
        action_names=action_names,
        obs_names=(),
        init=dirac(sid[sname(0, dmax)]),
        avail=tuple(avail),
        trans=trans,
        obs=None,
        labels={"crash": crash},
    )

    obs_symbols = tuple(f"{p}_o" for p in positions)

    def acc_row(pos: int, d: int) -> dict[int, Fraction]:
        if pos in (0, last):
            acc = Q(19, 20) if d == 0 else Q(2, 2 + d)
            nb = 1 if pos == 0 else last - 1
            return {pos: acc, nb: 1 - acc}
        acc = Q(49, 50) if d == 0 else Q(3, 2 * (d + 1))
        err = (1 - acc) / 2
        return {pos: acc, pos - 1: err, pos + 1: err}

    world_state_count = len(names)
    if sensor_kind == "A":
        sensor_states = ("sense",)
        mode_trans = {0: Dist({0: ONE})}
    elif sensor_kind == "B":
        sensor_states = ("fine", "noisy")
        modes = None
        mode_trans = {0: Dist({0: Q(9, 10), 1: Q(1, 10)}),
                      1: Dist({0: Q(1, 2), 1: Q(1, 2)})}
    else:
        raise ValueError(f"unknown sensor kind {sensor_kind!r}")

    sa_trans: dict[tuple[int, int], Dist] = {}
    sa_obs: dict[tuple[int, int], Dist] = {}
    uniform = {z: Q(1, len(obs_symbols)) for z in range(len(obs_symbols))}
    for mode in range(len(sensor_states)):
        for u in range(world_state_count):
            pos = u // plane_res
            d = u % plane_res
            sa_trans[(mode, u)] = mode_trans[mode]
            row = acc_row(pos, d)
            if mode == 1:  # noisy mode: halfway to uniform
                mixed = {z: p / 2 for z, p in uniform.items()}
                for z, p in row.items():
                    mixed[z] = mixed.get(z, ZERO) + p / 2
                row = mixed
            sa_obs[(mode, u)] = Dist(row)
    sensor = SaMdp(
        state_names=sensor_states,
        action_names=tuple(names),
        obs_names=obs_symbols,
        init=dirac(0),
        avail=tuple(tuple(range(world_state_count)) for _ in sensor_states),
        trans=sa_trans,
        obs=sa_obs,
    )
    return world, sensor


# ----------------------------------------------------------------- refuel

def _grid_moves(d: int, x: int, y: int):
    """Clamped 4-neighbourhood target per direction id (n, e, s, w)."""
    steps = [(0, -1), (1, 0), (0, 1), (-1, 0)]
    out = []
    for dx, dy in steps:
        nx, ny = x + dx, y + dy
        if 0 <= nx < d and 0 <= ny < d:
            out.append((nx, ny))
        else:
            out.append((x, y))
    return out


def gen_refuel(d: int = 4, capacity: int = 5, sensor_kind: str = "A") -> Mdp:
    """Battery robot on a DxD grid; chargers at the two diagonal corners.

    The cell is observable, the battery is not.  Moves succeed with
    probability 4/5 (slip: stay put); north/east moves draw an energy
    cost of 1 or 2 (3/4 vs 1/4), south/west always cost 1; arriving on a
    charger refills the battery; battery-0 states are absorbing (label
    ``depleted``).  Sensor kind A reports the cell exactly; kind B is a
    two-state sensor whose noisy mode spreads half the reading over the
    clamped neighbourhood.
    """
    if d < 3:
        raise ValueError("need grid size >= 3")
    chargers = {(0, 0), (d - 1, d - 1)}

    def wname(x: int, y: int, b: int) -> str:
        return f"x{x}y{y}b{b}"

    names = [wname(x, y, b) for x in range(d) for y in range(d)
             for b in range(capacity + 1)]
    sid = {nm: i for i, nm in enumerate(names)}
    action_names = ("n", "e", "s", "w", "stay")
    STAY = 4
    avail: list[tuple[int, ...]] = [()] * len(names)
    trans: dict[tuple[int, int], Dist] = {}

    def arrive(x: int, y: int, b: int) -> int:
        if b <= 0:
            return sid[wname(x, y, 0)]
        if (x, y) in chargers:
            b = capacity
        return sid[wname(x, y, b)]

    for x in range(d):
        for y in range(d):
            moves = _grid_moves(d, x, y)
            for b in range(capacity + 1):
                s = sid[wname(x, y, b)]
                if b == 0:
                    avail[s] = (STAY,)
                    trans[(s, STAY)] = dirac(s)
                    continue
                avail[s] = (0, 1, 2, 3)
                for a, (nx, ny) in enumerate(moves):
                    costs = [(1, Q(3, 4)), (2, Q(1, 4))] if a in (0, 1) \
                        else [(1, ONE)]
                    entries: dict[int, Fraction] = {}
                    for cost, pc in costs:
                        for (cx, cy), pm in (((nx, ny), Q(4, 5)), ((x, y), Q(1, 5))):
                            t = arrive(cx, cy, b - cost)
                            entries[t] = entries.get(t, ZERO) + pc * pm
                    trans[(s, a)] = Dist(entries)

    depleted = frozenset(sid[wname(x, y, 0)] for x in range(d) for y in range(d))
    world = Mdp(
        state_names=tuple(names),
        action_names=action_names,
        obs_names=(),
        init=dirac(sid[wname(0, 0, capacity)]),
        avail=tuple(avail),
        trans=trans,
        obs=None,
        labels={"depleted": depleted},
    )

    cells = [(x, y) for x in range(d) for y in range(d)]
    cell_id = {c: i for i, c in enumerate(cells)}
    obs_symbols = tuple(f"c{x}_{y}" for x, y in cells)

    def noisy_row(x: int, y: int) -> Dist:
        entries = {cell_id[(x, y)]: Q(1, 2)}
        nbrs = _grid_moves(d, x, y)
        err = Q(1, 2) / len(nbrs)
        for nx, ny in nbrs:
            z = cell_id[(nx, ny)]
            entries[z] = entries.get(z, ZERO) + err
        return Dist(entries)

    if sensor_kind == "A":
        sensor_states = ("sense",)
        mode_trans = {0: Dist({0: ONE})}
    elif sensor_kind == "B":
        sensor_states = ("fine", "noisy")
        mode_trans = {0: Dist({0: Q(9, 10), 1: Q(1, 10)}),
                      1: Dist({0: Q(1, 2), 1: Q(1, 2)})}
    else:
        raise ValueError(f"unknown sensor kind {sensor_kind!r}")
    sa_trans = {}
    sa_obs = {}
    for mode in range(len(sensor_states)):
        for u, nm in enumerate(names):
            x = int(nm[1:nm.index("y")])
            y = int(nm[nm.index("y") + 1:nm.index("b")])
            sa_trans[(mode, u)] = mode_trans[mode]
            if mode == 0:
                sa_obs[(mode, u)] = dirac(cell_id[(x, y)])
            else:
                sa_obs[(mode, u)] = noisy_row(x, y)
    sensor = SaMdp(
        state_names=sensor_states,
        action_names=tuple(names),
        obs_names=obs_symbols,
        init=dirac(0),
        avail=tuple(tuple(range(len(names))) for _ in sensor_states),
        trans=sa_trans,
        obs=sa_obs,
    )
    return compose(world, sensor)


# ------------------------------------------------------------------ evade

def gen_evade(d: int = 4, kind: str = "V", view_range: int = 2) -> Mdp:
    """Two-robot navigation; the adversary's cell or incentive is hidden.

    Kind V: states (own, other); the other robot picks a cardinal
    direction nondeterministically and the move succeeds with
    probability 4/5 (slip: stays); the observation is (own, other)
    within Chebyshev view range and (own, far) beyond it.  Kind I:
    states (own, other, incentive); actions move-per-incentive (same
    slip) or re-draw the incentive uniformly; the observation is always
    (own, other).  Co-location is an absorbing crash (label ``crash``).
    """
    if d < 3:
        raise ValueError("need grid size >= 3")
    cells = [(x, y) for x in range(d) for y in range(d)]
    cell_id = {c: i for i, c in enumerate(cells)}

    def own_moves(c):
        x, y = c
        opts = set(_grid_moves(d, x, y)) | {c}
        return sorted(opts)

    def own_dist(c):
        opts = _grid_moves(d, c[0], c[1])
        entries: dict = {}
        w = Q(1, len(opts))
        for t in opts:
            entries[t] = entries.get(t, ZERO) + w
        return entries

    if kind == "V":
        names = [f"o{cell_id[a]}_r{cell_id[b]}" for a in cells for b in cells]
        sid = {nm: i for i, nm in enumerate(names)}

        def st(a, b):
            return sid[f"o{cell_id[a]}_r{cell_id[b]}"]

        action_names = ("n", "e", "s", "w", "stuck")
        STUCK = 4
        obs_names = tuple(f"see_{cell_id[a]}_{cell_id[b]}" for a in cells for b in cells) \
            + tuple(f"far_{cell_id[a]}" for a in cells)

        def obs_of(a, b):
            if max(abs(a[0] - b[0]), abs(a[1] - b[1])) <= view_range:
                return cell_id[a] * len(cells) + cell_id[b]
            return len(cells) * len(cells) + cell_id[a]

        avail: list[tuple[int, ...]] = [()] * len(names)
        trans: dict[tuple[int, int], Dist] = {}
        obs_rows: list[Dist] = [None] * len(names)
        for a in cells:
            for b in cells:
                s = st(a, b)
                obs_rows[s] = dirac(obs_of(a, b))
                if a == b:
                    avail[s] = (STUCK,)
                    trans[(s, STUCK)] = dirac(s)
                    continue
                avail[s] = (0, 1, 2, 3)
                odist = own_dist(a)
                for act in range(4):
                    nb = _grid_moves(d, b[0], b[1])[act]
                    entries: dict[int, Fraction] = {}
                    for oa, w in odist.items():
                        for rb, wr in ((nb, Q(4, 5)), (b, Q(1, 5))):
                            t = st(oa, rb)
                            entries[t] = entries.get(t, ZERO) + w * wr
                    trans[(s, act)] = Dist(entries)
        crash = frozenset(st(a, a) for a in cells)
        start = st((0, 0), (d - 1, d - 1))
        return Mdp(
            state_names=tuple(names),
            action_names=action_names,
            obs_names=obs_names,
            init=dirac(start),
            avail=tuple(avail),
            trans=trans,
            obs=tuple(obs_rows),
            labels={"crash": crash},
        )

    if kind != "I":
        raise ValueError(f"unknown evade kind {kind!r}")
    dirs = ("n", "e", "s", "w")
    names = [f"o{cell_id[a]}_r{cell_id[b]}_i{k}"
             for a in cells for b in cells for k in range(4)]
    sid = {nm: i for i, nm in enumerate(names)}

    def sti(a, b, k):
        return sid[f"o{cell_id[a]}_r{cell_id[b]}_i{k}"]

    action_names = ("move", "rethink", "stuck")
    MOVE, RETHINK, STUCK = 0, 1, 2
    obs_names = tuple(f"see_{cell_id[a]}_{cell_id[b]}" for a in cells for b in cells)
    avail = [()] * len(names)
    trans = {}
    obs_rows = [None] * len(names)
    for a in cells:
        for b in cells:
            z = cell_id[a] * len(cells) + cell_id[b]
            for k in range(4):
                s = sti(a, b, k)
                obs_rows[s] = dirac(z)
                if a == b:
                    avail[s] = (STUCK,)
                    trans[(s, STUCK)] = dirac(s)
                    continue
                avail[s] = (MOVE, RETHINK)
                odist = own_dist(a)
                nb = _grid_moves(d, b[0], b[1])[k]
                entries: dict[int, Fraction] = {}
                for oa, w in odist.items():
                    for rb, wr in ((nb, Q(4, 5)), (b, Q(1, 5))):
                        t = sti(oa, rb, k)
                        entries[t] = entries.get(t, ZERO) + w * wr
                trans[(s, MOVE)] = Dist(entries)
                entries = {}
                for oa, w in odist.items():
                    for k2 in range(4):
                        t = sti(oa, b, k2)
                        entries[t] = entries.get(t, ZERO) + w * Q(1, 4)
                trans[(s, RETHINK)] = Dist(entries)
    crash = frozenset(sti(a, a, k) for a in cells for k in range(4))
    init = Dist({sti((0, 0), (d - 1, d - 1), k): Q(1, 4) for k in range(4)})
    return Mdp(
        state_names=tuple(names),
        action_names=action_names,
        obs_names=obs_names,
        init=init,
        avail=tuple(avail),
        trans=trans,
        obs=tuple(obs_rows),
        labels={"crash": crash},
    )


# ----------------------------------------------------------------- blowup

def blowup_sa(n: int) -> SaMdp:
    """State-action-observation form of the 2^n vertex family.

    n two-state components with uniform initial mass 1/(2n); action A
    swaps within a component, B holds the high state, and both are
    observed as the same symbol, so the trace never reveals the choices.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    names = []
    for i in range(1, n + 1):
        names += [f"h{i}", f"l{i}"]
    sid = {nm: i for i, nm in enumerate(names)}
    A, B = 0, 1
    avail = []
    trans = {}
    obs = {}
    a_row = dirac(0)
    for i in range(1, n + 1):
        h, low = sid[f"h{i}"], sid[f"l{i}"]
        avail_h = (A, B)
        trans[(h, A)] = dirac(low)
        trans[(h, B)] = dirac(h)
        trans[(low, A)] = dirac(h)
        obs[(h, A)] = a_row
        obs[(h, B)] = a_row
        obs[(low, A)] = a_row
    for nm in names:
        avail.append((A, B) if nm.startswith("h") else (A,))
    init = Dist({s: Q(1, 2 * n) for s in range(len(names))})
    return SaMdp(
        state_names=tuple(names),
        action_names=("A", "B"),
        obs_names=("A",),
        init=init,
        avail=tuple(avail),
        trans=trans,
        obs=obs,
        obs_init=tuple(a_row for _ in names),
    )


def gen_blowup(n: int) -> Mdp:
    lifted, _ = lift_state_action_obs(blowup_sa(n))
    return lifted


def blowup_ext_sa(n: int) -> SaMdp:
    """The exit extension: per-component actions H_i/L_i leave for the
    absorbing goal/sink (high state to goal under H_i, low state to goal
    under L_i), self-loop elsewhere, and are observed as themselves."""
    if n < 1:
        raise ValueError("need n >= 1")
    names = []
    for i in range(1, n + 1):
        names += [f"h{i}", f"l{i}"]
    names += ["top", "bot"]
    sid = {nm: i for i, nm in enumerate(names)}
    action_names = ["A", "B"] + [f"H{i}" for i in range(1, n + 1)] \
        + [f"L{i}" for i in range(1, n + 1)]
    obs_names = ["A"] + action_names[2:]
    obs_id = {nm: i for i, nm in enumerate(obs_names)}

    def obs_row(action: int) -> Dist:
        nm = action_names[action]
        return dirac(obs_id["A"] if nm in ("A", "B") else obs_id[nm])

    A, B = 0, 1
    top, bot = sid["top"], sid["bot"]
    avail: list[tuple[int, ...]] = [()] * len(names)
    trans = {}
    obs = {}
    for i in range(1, n + 1):
        h, low = sid[f"h{i}"], sid[f"l{i}"]
        acts_h = [A, B]
        acts_l = [A]
        trans[(h, A)] = dirac(low)
        trans[(h, B)] = dirac(h)
        trans[(low, A)] = dirac(h)
        for j in range(1, n + 1):
            hj = action_names.index(f"H{j}")
            lj = action_names.index(f"L{j}")
            acts_h += [hj, lj]
            acts_l += [hj, lj]
            if j == i:
                trans[(h, hj)] = dirac(top)
                trans[(h, lj)] = dirac(bot)
                trans[(low, hj)] = dirac(bot)
                trans[(low, lj)] = dirac(top)
            else:
                trans[(h, hj)] = dirac(h)
                trans[(h, lj)] = dirac(h)
                trans[(low, hj)] = dirac(low)
                trans[(low, lj)] = dirac(low)
        avail[h] = tuple(acts_h)
        avail[low] = tuple(acts_l)
    all_actions = tuple(range(len(action_names)))
    for s in (top, bot):
        avail[s] = all_actions
        for a in all_actions:
            trans[(s, a)] = dirac(s)
    for (s, a) in trans:
        obs[(s, a)] = obs_row(a)
    init = Dist({sid[f"{c}{i}"]: Q(1, 2 * n)
                 for i in range(1, n + 1) for c in ("h", "l")})
    return SaMdp(
        state_names=tuple(names),
        action_names=tuple(action_names),
        obs_names=tuple(obs_names),
        init=init,
        avail=tuple(avail),
        trans=trans,
        obs=obs,
        obs_init=tuple(dirac(obs_id["A"]) for _ in names),
    )


def gen_blowup_ext(n: int) -> Mdp:
    """Lifted extension model with label ``goal`` and the 0/1 risk on it."""
    sa = blowup_ext_sa(n)
    lifted, state_map = lift_state_action_obs(sa)
    top = sa.state_id("top")
    goal = frozenset(j for j, (s, _row) in enumerate(state_map) if s == top)
    risk = RiskVector.of_values(lifted.num_states, {s: ONE for s in goal})
    return dataclasses.replace(lifted, labels={"goal": goal}, risk=risk)


# ---------------------------------------------------------------- harness

@dataclass
class BenchCase:
    id: str
    model: Mdp
    risk: RiskVector
    methods: tuple[str, ...]


@dataclass
class BenchRow:
    """Aggregates of one (model, seed, method) run."""

    id: str
    method: str
    seed: int
    trace_len: int
    time_ms: float
    beliefs_avg: float
    beliefs_max: int
    dim_avg: float
    dim_max: int
    unrolled_states: int
    risk: Fraction | None
    timed_out: bool

    def to_result_row(self) -> ResultRow:
        return ResultRow(
            id=f"{self.id}/s{self.seed}",
            method=self.method,
            trace_len=self.trace_len,
            time_ms=self.time_ms,
            beliefs=self.beliefs_max or None,
            dim=self.dim_max or None,
            unrolled_states=self.unrolled_states or None,
            risk=self.risk,
        )


METHODS = ("ff", "ff-noch", "unr-epi", "unr-ivi")


def _make_session(method: str, m: Mdp, r: RiskVector, timeout_ms: float | None):
    if method == "ff":
        return MonitorSession(m, r, mode="mdp", use_hull=True,
                              per_step_timeout_ms=timeout_ms)
    if method == "ff-noch":
        return MonitorSession(m, r, mode="mdp", use_hull=False,
                              per_step_timeout_ms=timeout_ms)
    if method == "unr-epi":
        return UnrollingSession(m, r, engine="epi", per_step_timeout_ms=timeout_ms)
    if method == "unr-ivi":
        return UnrollingSession(m, r, engine="ivi", per_step_timeout_ms=timeout_ms)
    raise ValueError(f"unknown method {method!r}")


def run_case(case: BenchCase, seed: int, method: str, max_len: int,
             timeout_ms: float | None) -> BenchRow:
    _path, trace = simulate(case.model, SimConfig(seed=seed, length=max_len))
    session = _make_session(method, case.model, case.risk, timeout_ms)
    beliefs: list[int] = []
    dims: list[int] = []
    total_ms = 0.0
    s_u = 0
    risk_value: Fraction | None = None
    timed_out = False
    consumed = 0
    for z in trace:
        try:
            res = session.feed(z)
        except StepTimeout:
            timed_out = True
            break
        consumed += 1
        total_ms += res.time_ms
        beliefs.append(res.beliefs)
        dims.append(res.dim)
        if res.unrolled_states:
            s_u = max(s_u, res.unrolled_states)
        risk_value = res.risk
    return BenchRow(
        id=case.id,
        method=method,
        seed=seed,
        trace_len=consumed,
        time_ms=total_ms,
        beliefs_avg=(sum(beliefs) / len(beliefs)) if beliefs else 0.0,
        beliefs_max=max(beliefs, default=0),
        dim_avg=(sum(dims) / len(dims)) if dims else 0.0,
        dim_max=max(dims, default=0),
        unrolled_states=s_u,
        risk=risk_value,
        timed_out=timed_out,
    )


def run_bench(cases: list[BenchCase], seeds: list[int], max_len: int,
              timeout_ms: float | None = 1000.0) -> list[BenchRow]:
    rows = []
    for case in cases:
        for method in case.methods:
            for seed in seeds:
                rows.append(run_case(case, seed, method, max_len, timeout_ms))
    return rows


def render_table(rows: list[BenchRow]) -> str:
    """Aligned text table aggregated per (id, method) over seeds."""
    groups: dict[tuple[str, str], list[BenchRow]] = {}
    for row in rows:
        groups.setdefault((row.id, row.method), []).append(row)
    header = ["id", "method", "N", "T_avg", "T_max", "B_avg", "B_max",
              "D_avg", "D_max", "S_u"]
    lines = [header]
    for (cid, method), grp in sorted(groups.items()):
        ok = [g for g in grp if not g.timed_out]
        lines.append([
            cid, method, f"{len(ok)}/{len(grp)}",
            f"{sum(g.time_ms for g in ok) / len(ok):.1f}" if ok else "-",
            f"{max(g.time_ms for g in ok):.1f}" if ok else "-",
            f"{sum(g.beliefs_avg for g in ok) / len(ok):.1f}" if ok else "-",
            f"{max(g.beliefs_max for g in ok)}" if ok else "-",
            f"{sum(g.dim_avg for g in ok) / len(ok):.1f}" if ok else "-",
            f"{max(g.dim_max for g in ok)}" if ok else "-",
            f"{max(g.unrolled_states for g in ok)}" if ok else "-",
        ])
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    out = []
    for line in lines:
        out.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
    return "\n".join(out) + "\n"


def desk_suite() -> list[BenchCase]:
    """Small instances of every family, tuned to finish in minutes."""
    from .risk import bounded_reach

    world, sensor = gen_airport(3, 3, "A")
    airport = compose(world, sensor)
    airport_risk = bounded_reach(airport, airport.labels["crash"], 12, "max")
    refuel = gen_refuel(4, 5, "A")
    refuel_risk = bounded_reach(refuel, refuel.labels["depleted"], 10, "max")
    evade = gen_evade(4, "V", 1)
    evade_risk = bounded_reach(evade, evade.labels["crash"], 8, "max")
    return [
        BenchCase("airport-A", airport, airport_risk, ("ff", "unr-epi")),
        BenchCase("refuel-A", refuel, refuel_risk, ("ff", "unr-epi")),
        BenchCase("evade-V", evade, evade_risk, ("ff-noch", "unr-epi")),
    ]
