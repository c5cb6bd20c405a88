"""Conservative runtime risk monitoring for partially observable MDPs.

Two independent engines compute the scheduler-supremum conditional risk
of the hidden current state given a growing observation trace: a
convex-hull belief filter and a trace-unrolling reachability solver.
They agree exactly, and a brute-force oracle checks both.
"""

from .core import (Diagnostic, Dist, Mdp, ObsKind, RiskVector, SaMdp,
                   StructureKind, classify, compose, dirac, induce_chain,
                   lift_state_action_obs, to_kripke, validate)
from .errors import (AlphabetMismatch, InstanceTooLarge, MdpmonError,
                     NumericPrecision, SessionDead, StepTimeout,
                     TraceImpossible)
from .filtering import (Belief, FeedResult, MonitorSession, ZERO_BELIEF,
                        hull_reduce, in_hull, initial_belief, ks_init,
                        ks_risk, ks_step, mc_risk, mc_step, mdp_risk,
                        mdp_step)
from .modelio import (ResultRow, parse_model, parse_trace, serialize_model,
                      serialize_results, serialize_trace)
from .oracle import (DcScheduler, oracle_trace_prob, oracle_trace_risk,
                     oracle_trace_risk_naive)
from .risk import (RiskSpec, bounded_reach, parse_risk_file, parse_risk_spec,
                   risk_indicator_reduce, scale_risk)
from .simulator import CounterRng, SimConfig, simulate
from .unrolling import (UnrolledMdp, UnrollingSession, condition,
                        det_obs_transform, max_reach, qualitative_monitor,
                        unroll)

__version__ = "0.1.0"
