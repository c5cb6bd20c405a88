"""Seeded trace generation with uniform action resolution.

Replay contract (version 1, keep stable): draws come from a counter-based
generator, ``draw(i) = splitmix64(seed ^ GOLDEN) at counter i``, purely
integer arithmetic, so identical (seed, model, length) give bit-identical
output on every platform.  Sampling order per run: initial state, initial
observation, then per step action / successor / observation, one draw
each, always consumed even for Dirac distributions.  A distribution is
sampled by comparing the exact rational ``bits / 2**64`` against
cumulative probabilities in ascending id order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Dist, Mdp
from .rationals import Q

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GAMMA) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class CounterRng:
    """Stateless-by-counter stream: the i-th draw is a pure function of
    (seed, i), so streams can be replayed or split by offsetting."""

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & _MASK
        self.counter = counter

    def next_bits(self) -> int:
        value = _splitmix64((self.seed ^ (self.counter * _GAMMA)) & _MASK)
        self.counter += 1
        return value

    def uniform(self):
        """Exact rational in [0, 1) from 64 generator bits."""
        return Q(self.next_bits(), 1 << 64)

    def sample(self, dist: Dist) -> int:
        """Cumulative-threshold sampling in ascending id order."""
        u = self.uniform()
        acc = Q(0)
        items = dist.items()
        for key, p in items:
            acc += p
            if u < acc:
                return key
        return items[-1][0]

    def choice(self, seq):
        return seq[self.next_bits() % len(seq)]


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: trace length counts observations (>= 1)."""

    seed: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be >= 1")


def simulate(m: Mdp, cfg: SimConfig) -> tuple[list[int], list[int]]:
    """Sample one hidden path and its visible trace.

    Actions are resolved uniformly over the available set; this is the
    evaluation strategy, not a model assumption.  Returns (path, trace)
    with len(trace) == cfg.length and len(path) == cfg.length.
    """
    if m.obs is None:
        raise ValueError("simulation needs an observable model")
    rng = CounterRng(cfg.seed)
    s = rng.sample(m.init)
    path = [s]
    trace = [rng.sample(m.obs[s])]
    for _ in range(cfg.length - 1):
        a = rng.choice(m.avail[s])
        s = rng.sample(m.trans[(s, a)])
        path.append(s)
        trace.append(rng.sample(m.obs[s]))
    return path, trace
