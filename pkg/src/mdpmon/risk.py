"""State-risk vectors: step-bounded reachability, scaling, indicator reduction.

The risk of a state is either supplied explicitly or computed as the
optimal probability of reaching a labelled set within a finite horizon,
by exact Bellman backups over rationals.  Unbounded reachability lives in
the unrolling engine, not here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import Mdp, RiskVector
from .errors import ModelSyntaxError, UndeclaredSymbol
from .rationals import ONE, Q, ZERO, parse_rational


def bounded_reach(m: Mdp, target: frozenset[int], horizon: int,
                  mode: str = "max") -> RiskVector:
    """r(s) = opt over schedulers of Pr(reach target within `horizon` steps).

    Target states count as reached immediately (r = 1 for any horizon);
    `mode` is "max" or "min".
    """
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
    pick = max if mode == "max" else min
    vals = [ONE if s in target else ZERO for s in range(m.num_states)]
    for _ in range(horizon):
        nxt = list(vals)
        for s in range(m.num_states):
            if s in target:
                continue
            nxt[s] = pick(
                sum((p * vals[t] for t, p in m.trans[(s, a)].items()), ZERO)
                for a in m.avail[s]
            )
        vals = nxt
    return RiskVector(tuple(vals))


def scale_risk(r: RiskVector, lam: Fraction) -> tuple[RiskVector, Fraction]:
    """Divide by c = max(1, max r) so risks land in [0,1].

    Threshold decisions are preserved: v > lam iff v/c > lam/c.
    """
    c = max(ONE, r.max())
    return RiskVector(tuple(v / c for v in r.values)), Q(lam) / c


def risk_indicator_reduce(r: RiskVector, lam: Fraction) -> RiskVector:
    """r'(s) = 1 if r(s) > lam else 0.

    Turns the quantitative maximum-risk threshold question into a
    qualitative one: the indicator risk is positive along a trace exactly
    when some reachable end state exceeds the threshold.
    """
    return RiskVector(tuple(ONE if v > lam else ZERO for v in r.values))


@dataclass(frozen=True)
class RiskSpec:
    """Parsed risk request: bounded reachability or an explicit vector."""

    kind: str  # "reach-max" | "reach-min" | "explicit"
    target_label: str | None = None
    horizon: int = 0
    explicit: RiskVector | None = None

    def resolve(self, m: Mdp) -> RiskVector:
        if self.kind == "explicit":
            assert self.explicit is not None
            return self.explicit
        if self.target_label not in m.labels:
            raise UndeclaredSymbol(f"model has no label {self.target_label!r}")
        mode = "max" if self.kind == "reach-max" else "min"
        return bounded_reach(m, m.labels[self.target_label], self.horizon, mode)


_SPEC_RE = re.compile(r"^(reach-max|reach-min)\(\s*([\w.-]+)\s*,\s*(\d+)\s*\)$")


def parse_risk_spec(text: str) -> RiskSpec:
    """Parse the CLI form ``reach-max(<label>,<H>)`` / ``reach-min(...)``."""
    match = _SPEC_RE.match(text.strip())
    if not match:
        raise ModelSyntaxError(f"bad risk spec {text!r}; "
                               "expected reach-max(<label>,<H>) or reach-min(<label>,<H>)")
    kind, label, horizon = match.groups()
    return RiskSpec(kind=kind, target_label=label, horizon=int(horizon))


def parse_risk_file(text: str, m: Mdp) -> RiskVector:
    """Explicit vector from ``risk <state> <value>`` lines; absent states get 0."""
    entries = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 3 or toks[0] != "risk":
            raise ModelSyntaxError("expected 'risk <state> <value>'", ln)
        if toks[1] not in m.state_names:
            raise UndeclaredSymbol(f"unknown state {toks[1]!r}", ln)
        entries[m.state_names.index(toks[1])] = parse_rational(toks[2])
    return RiskVector.of(m, entries)
