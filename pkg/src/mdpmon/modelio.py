"""Text formats: model files, trace files, and the results CSV.

The model format is line based and diffable.  Grammar summary (full
description with a worked example lives in docs/model-format.md):

    mdp [world|sensor]        header; kind defaults to state-observation
    state  <name>...          optional explicit state declarations
    action <state> <name>...  optional: pins the action order of a state
    init   <state> <prob>
    trans  <state> <action> <target> <prob>
    obs    <state> <obsname> <prob>            state observation row
    sobs   <state> <action> <obsname> <prob>   transition-attached row
    label  <name> <state>...
    risk   <state> <value>
    #      comment (blank lines ignored)

Probabilities are exact rationals (``3/4``) or terminating decimals
(``0.75``); no value ever passes through a binary float.  In ``sensor``
files the ``obs`` lines give the initial-observation rows and ``sobs``
the per-transition rows.  If any explicit ``state`` line is present,
every state mention must be declared; otherwise states, actions and
observations are declared implicitly by first mention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Dist, Mdp, RiskVector, SaMdp, validate
from .errors import (DuplicateDeclaration, EmptyTrace, ModelSyntaxError,
                     UndeclaredSymbol, UnknownObservation, ValidationFailure)
from .rationals import format_decimal, format_rational, parse_rational

CSV_HEADER = "id,method,trace_len,time_ms,beliefs,dim,unrolled_states,risk"


class _Interner:
    def __init__(self, kind: str):
        self.kind = kind
        self.names: list[str] = []
        self.ids: dict[str, int] = {}
        self.strict = False

    def declare(self, name: str, line: int) -> int:
        if name in self.ids:
            raise DuplicateDeclaration(f"{self.kind} {name!r} declared twice", line)
        self.ids[name] = len(self.names)
        self.names.append(name)
        return self.ids[name]

    def get(self, name: str, line: int) -> int:
        if name not in self.ids:
            if self.strict:
                raise UndeclaredSymbol(f"unknown {self.kind} {name!r}", line)
            self.ids[name] = len(self.names)
            self.names.append(name)
        return self.ids[name]


def parse_model(text: str) -> Mdp | SaMdp:
    """Parse a model file; raises a ModelError subtype on any problem.

    The returned model has passed ``validate``.
    """
    lines = text.splitlines()
    header_kind = None
    states = _Interner("state")
    actions = _Interner("action")
    obs_names = _Interner("observation")
    init_entries: dict[int, Fraction] = {}
    order_pins: dict[int, list[int]] = {}
    trans_entries: dict[tuple[int, int], dict[int, Fraction]] = {}
    trans_order: dict[int, list[int]] = {}
    obs_entries: dict[int, dict[int, Fraction]] = {}
    sobs_entries: dict[tuple[int, int], dict[int, Fraction]] = {}
    labels: dict[str, set[int]] = {}
    risk_entries: dict[int, Fraction] = {}

    def rational(tok: str, ln: int) -> Fraction:
        try:
            return parse_rational(tok)
        except (ValueError, ZeroDivisionError):
            raise ModelSyntaxError(f"bad rational {tok!r}", ln)

    for ln, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        key = toks[0]
        if header_kind is None:
            if key != "mdp":
                raise ModelSyntaxError(f"expected 'mdp' header, got {key!r}", ln)
            header_kind = toks[1] if len(toks) > 1 else "obs"
            if header_kind not in ("obs", "world", "sensor"):
                raise ModelSyntaxError(f"unknown model kind {header_kind!r}", ln)
            continue
        if key == "state":
            for name in toks[1:]:
                states.declare(name, ln)
            states.strict = True
        elif key == "action":
            if len(toks) < 3:
                raise ModelSyntaxError("action needs a state and one or more names", ln)
            s = states.get(toks[1], ln)
            if s in order_pins:
                raise DuplicateDeclaration(f"action order for {toks[1]!r} pinned twice", ln)
            order_pins[s] = [actions.get(a, ln) for a in toks[2:]]
        elif key == "init":
            if len(toks) != 3:
                raise ModelSyntaxError("init needs a state and a probability", ln)
            s = states.get(toks[1], ln)
            if s in init_entries:
                raise DuplicateDeclaration(f"init {toks[1]!r} given twice", ln)
            init_entries[s] = rational(toks[2], ln)
        elif key == "trans":
            if len(toks) != 5:
                raise ModelSyntaxError("trans needs state action target prob", ln)
            s = states.get(toks[1], ln)
            a = actions.get(toks[2], ln)
            t = states.get(toks[3], ln)
            row = trans_entries.setdefault((s, a), {})
            if t in row:
                raise DuplicateDeclaration(
                    f"trans {toks[1]} {toks[2]} {toks[3]} given twice", ln)
            row[t] = rational(toks[4], ln)
            trans_order.setdefault(s, [])
            if a not in trans_order[s]:
                trans_order[s].append(a)
        elif key == "obs":
            if len(toks) != 4:
                raise ModelSyntaxError("obs needs state obsname prob", ln)
            s = states.get(toks[1], ln)
            z = obs_names.get(toks[2], ln)
            row = obs_entries.setdefault(s, {})
            if z in row:
                raise DuplicateDeclaration(f"obs {toks[1]} {toks[2]} given twice", ln)
            row[z] = rational(toks[3], ln)
        elif key == "sobs":
            if len(toks) != 5:
                raise ModelSyntaxError("sobs needs state action obsname prob", ln)
            s = states.get(toks[1], ln)
            a = actions.get(toks[2], ln)
            z = obs_names.get(toks[3], ln)
            row = sobs_entries.setdefault((s, a), {})
            if z in row:
                raise DuplicateDeclaration(
                    f"sobs {toks[1]} {toks[2]} {toks[3]} given twice", ln)
            row[z] = rational(toks[4], ln)
        elif key == "label":
            if len(toks) < 3:
                raise ModelSyntaxError("label needs a name and one or more states", ln)
            if toks[1] in labels:
                raise DuplicateDeclaration(f"label {toks[1]!r} given twice", ln)
            labels[toks[1]] = {states.get(t, ln) for t in toks[2:]}
        elif key == "risk":
            if len(toks) != 3:
                raise ModelSyntaxError("risk needs a state and a value", ln)
            s = states.get(toks[1], ln)
            if s in risk_entries:
                raise DuplicateDeclaration(f"risk {toks[1]!r} given twice", ln)
            risk_entries[s] = rational(toks[2], ln)
        else:
            raise ModelSyntaxError(f"unknown keyword {key!r}", ln)

    if header_kind is None:
        raise ModelSyntaxError("empty model file", len(lines))
    n = len(states.names)
    avail = []
    for s in range(n):
        pinned = order_pins.get(s, trans_order.get(s, []))
        extra = [a for a in trans_order.get(s, []) if a not in pinned]
        avail.append(tuple(pinned + extra))
    trans = {sa: Dist(row) for sa, row in trans_entries.items()}
    init = Dist(init_entries)
    common = dict(
        state_names=tuple(states.names),
        action_names=tuple(actions.names),
        obs_names=tuple(obs_names.names),
        init=init,
        avail=tuple(avail),
        trans=trans,
    )
    if header_kind == "sensor":
        obs_init = None
        if obs_entries:
            obs_init = tuple(Dist(obs_entries.get(s, {})) for s in range(n))
        model: Mdp | SaMdp = SaMdp(
            obs={sa: Dist(row) for sa, row in sobs_entries.items()},
            obs_init=obs_init,
            **common,
        )
    else:
        if sobs_entries:
            raise ModelSyntaxError("sobs lines are only allowed in 'mdp sensor' files")
        obs = None
        if header_kind == "obs":
            obs = tuple(Dist(obs_entries.get(s, {})) for s in range(n))
        risk = None
        if risk_entries:
            risk = RiskVector.of_values(n, risk_entries)
        model = Mdp(obs=obs, labels={k: frozenset(v) for k, v in labels.items()},
                    risk=risk, **common)
    diags = validate(model)
    if diags:
        raise ValidationFailure(diags)
    return model


def parse_trace(text: str, m: Mdp) -> list[int]:
    """Whitespace-separated observation tokens -> ids in model order.

    Tokens may be names or raw integer ids; names win when a name is
    itself a digit string.
    """
    toks = text.split()
    if not toks:
        raise EmptyTrace("trace file contains no observations")
    out = []
    for pos, tok in enumerate(toks):
        if tok in m.obs_names:
            out.append(m.obs_names.index(tok))
        elif tok.isdigit() and int(tok) < len(m.obs_names):
            out.append(int(tok))
        else:
            raise UnknownObservation(tok, pos)
    return out


def serialize_trace(trace: list[int], m: Mdp) -> str:
    return " ".join(m.obs_names[z] for z in trace) + "\n"


def serialize_model(m: Mdp | SaMdp) -> str:
    """Lossless text form; parse(serialize(m)) is isomorphic to m."""
    out = []
    if isinstance(m, SaMdp):
        out.append("mdp sensor")
    elif m.obs is None:
        out.append("mdp world")
    else:
        out.append("mdp")
    out.append("state " + " ".join(m.state_names))
    for s in range(m.num_states):
        if m.avail[s]:
            out.append(f"action {m.state_names[s]} "
                       + " ".join(m.action_names[a] for a in m.avail[s]))
    for s, p in m.init.items():
        out.append(f"init {m.state_names[s]} {format_rational(p)}")
    for s in range(m.num_states):
        for a in m.avail[s]:
            for t, p in m.trans[(s, a)].items():
                out.append(f"trans {m.state_names[s]} {m.action_names[a]} "
                           f"{m.state_names[t]} {format_rational(p)}")
    if isinstance(m, SaMdp):
        if m.obs_init is not None:
            for s in range(m.num_states):
                for z, p in m.obs_init[s].items():
                    out.append(f"obs {m.state_names[s]} {m.obs_names[z]} "
                               f"{format_rational(p)}")
        for s in range(m.num_states):
            for a in m.avail[s]:
                for z, p in m.obs[(s, a)].items():
                    out.append(f"sobs {m.state_names[s]} {m.action_names[a]} "
                               f"{m.obs_names[z]} {format_rational(p)}")
    else:
        if m.obs is not None:
            for s in range(m.num_states):
                for z, p in m.obs[s].items():
                    out.append(f"obs {m.state_names[s]} {m.obs_names[z]} "
                               f"{format_rational(p)}")
        for name in sorted(m.labels):
            members = " ".join(m.state_names[s] for s in sorted(m.labels[name]))
            out.append(f"label {name} {members}")
        if m.risk is not None:
            for s, v in enumerate(m.risk.values):
                if v != 0:
                    out.append(f"risk {m.state_names[s]} {format_rational(v)}")
    return "\n".join(out) + "\n"


@dataclass
class ResultRow:
    """One monitor/bench result line; matches the CSV schema exactly."""

    id: str
    method: str
    trace_len: int
    time_ms: float
    beliefs: int | None = None
    dim: int | None = None
    unrolled_states: int | None = None
    risk: Fraction | None = None


def serialize_results(rows, exact: bool = False) -> str:
    """Fixed-schema CSV; risk as 12-significant-digit decimal by default."""
    out = [CSV_HEADER]
    for r in rows:
        if r.risk is None:
            risk = ""
        elif exact:
            risk = format_rational(r.risk)
        else:
            risk = format_decimal(r.risk, 12)
        cells = [
            r.id,
            r.method,
            str(r.trace_len),
            f"{r.time_ms:.3f}",
            "" if r.beliefs is None else str(r.beliefs),
            "" if r.dim is None else str(r.dim),
            "" if r.unrolled_states is None else str(r.unrolled_states),
            risk,
        ]
        out.append(",".join(cells))
    return "\n".join(out) + "\n"
