"""Command line interface.

Subcommands: monitor (stream a trace through an engine), oracle (exact
brute-force trace risk), simulate (seeded trace generation), bench (the
desk-scale experiment harness) and generate (benchmark family models).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import bench as benchmod
from .core import Mdp, compose
from .errors import MdpmonError, StepTimeout, TraceImpossible
from .filtering import MonitorSession
from .modelio import (ResultRow, parse_model, parse_trace, serialize_model,
                      serialize_results, serialize_trace)
from .oracle import oracle_trace_risk
from .rationals import format_decimal, format_rational
from .risk import parse_risk_file, parse_risk_spec
from .simulator import SimConfig, simulate
from .unrolling import UnrollingSession


def _load_model(path: str) -> Mdp:
    model = parse_model(Path(path).read_text())
    if not isinstance(model, Mdp):
        raise MdpmonError(f"{path} is a sensor model; compose it with a world first")
    return model


def _load_risk(args, m: Mdp):
    if getattr(args, "risk_file", None):
        return parse_risk_file(Path(args.risk_file).read_text(), m)
    if getattr(args, "risk", None):
        return parse_risk_spec(args.risk).resolve(m)
    if m.risk is not None:
        return m.risk
    raise MdpmonError("no risk given: use --risk, --risk-file, or risk lines "
                      "in the model file")


def _cmd_monitor(args) -> int:
    m = _load_model(args.model)
    r = _load_risk(args, m)
    trace = parse_trace(Path(args.trace).read_text(), m)
    if args.method == "filter":
        session = MonitorSession(m, r, mode=args.mode, use_hull=not args.no_ch,
                                 per_step_timeout_ms=args.per_step_timeout)
    else:
        session = UnrollingSession(
            m, r, engine=args.engine,
            epsilon=Fraction(args.epsilon).limit_denominator(10**12),
            rebuild=args.rebuild, per_step_timeout_ms=args.per_step_timeout)
    rows = []
    run_id = Path(args.model).stem
    method = args.method if args.method == "filter" else f"unroll-{args.engine}"
    status = 0
    for i, z in enumerate(trace):
        try:
            res = session.feed(z)
        except TraceImpossible:
            print(f"step {i + 1}: trace impossible", file=sys.stderr)
            status = 2
            break
        except StepTimeout:
            print(f"step {i + 1}: per-step timeout", file=sys.stderr)
            status = 3
            break
        rows.append(ResultRow(
            id=run_id, method=method, trace_len=i + 1, time_ms=res.time_ms,
            beliefs=res.beliefs or None, dim=res.dim,
            unrolled_states=res.unrolled_states, risk=res.risk))
    text = serialize_results(rows, exact=(args.emit == "rational"))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


def _cmd_oracle(args) -> int:
    m = _load_model(args.model)
    r = _load_risk(args, m)
    trace = parse_trace(Path(args.trace).read_text(), m)
    try:
        value = oracle_trace_risk(m, trace, r, cap=args.cap)
    except TraceImpossible:
        print("trace impossible")
        return 2
    print(f"{format_rational(value)} ({format_decimal(value)})")
    return 0


def _cmd_simulate(args) -> int:
    m = _load_model(args.model)
    path, trace = simulate(m, SimConfig(seed=args.seed, length=args.length))
    text = serialize_trace(trace, m)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.emit_path:
        print("# path: " + " ".join(m.state_names[s] for s in path), file=sys.stderr)
    return 0


def _parse_seed_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok]


def _cmd_bench(args) -> int:
    cases = benchmod.desk_suite()
    seeds = _parse_seed_range(args.seeds)
    rows = benchmod.run_bench(cases, seeds, args.max_len, args.timeout_ms)
    csv_text = serialize_results([r.to_result_row() for r in rows])
    if args.out:
        Path(args.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    sys.stderr.write(benchmod.render_table(rows))
    return 0


def _cmd_generate(args) -> int:
    params = [int(p) if p.isdigit() else p for p in args.params.split(",") if p]
    if args.family == "airport":
        lanes, res, kind = params
        world, sensor = benchmod.gen_airport(int(lanes), int(res), str(kind))
        if args.world_out:
            Path(args.world_out).write_text(serialize_model(world))
        if args.sensor_out:
            Path(args.sensor_out).write_text(serialize_model(sensor))
        model = compose(world, sensor)
    elif args.family == "refuel":
        d, cap, kind = params
        model = benchmod.gen_refuel(int(d), int(cap), str(kind))
    elif args.family == "evade":
        d, kind, view = (params + [0])[:3]
        model = benchmod.gen_evade(int(d), str(kind), int(view))
    elif args.family == "blowup":
        model = benchmod.gen_blowup(int(params[0]))
    elif args.family == "blowup-ext":
        model = benchmod.gen_blowup_ext(int(params[0]))
    else:
        raise MdpmonError(f"unknown family {args.family!r}")
    text = serialize_model(model)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdpmon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    mon = sub.add_parser("monitor", help="stream a trace through a monitor engine")
    mon.add_argument("--model", required=True)
    mon.add_argument("--trace", required=True)
    mon.add_argument("--method", choices=["filter", "unroll"], default="filter")
    mon.add_argument("--mode", choices=["ks", "mc", "mdp"], default="mdp",
                     help="filter estimator (filter method only)")
    mon.add_argument("--no-ch", action="store_true",
                     help="keep all generated beliefs (skip hull reduction)")
    mon.add_argument("--engine", choices=["epi", "ivi"], default="epi",
                     help="reachability engine (unroll method only)")
    mon.add_argument("--epsilon", type=float, default=1e-6)
    mon.add_argument("--rebuild", action="store_true",
                     help="rebuild the unrolling from scratch every feed")
    mon.add_argument("--per-step-timeout", type=float, default=None,
                     metavar="MS")
    mon.add_argument("--risk")
    mon.add_argument("--risk-file")
    mon.add_argument("--emit", choices=["csv", "rational"], default="csv")
    mon.add_argument("--out")
    mon.set_defaults(func=_cmd_monitor)

    orc = sub.add_parser("oracle", help="exact brute-force trace risk")
    orc.add_argument("--model", required=True)
    orc.add_argument("--trace", required=True)
    orc.add_argument("--risk")
    orc.add_argument("--risk-file")
    orc.add_argument("--cap", type=int, default=2_000_000)
    orc.set_defaults(func=_cmd_oracle)

    sim = sub.add_parser("simulate", help="seeded trace generation")
    sim.add_argument("--model", required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--length", type=int, required=True)
    sim.add_argument("--out")
    sim.add_argument("--emit-path", action="store_true")
    sim.set_defaults(func=_cmd_simulate)

    ben = sub.add_parser("bench", help="desk-scale benchmark harness")
    ben.add_argument("--suite", choices=["desk"], default="desk")
    ben.add_argument("--seeds", default="0..9")
    ben.add_argument("--max-len", type=int, default=100)
    ben.add_argument("--timeout-ms", type=float, default=1000.0)
    ben.add_argument("--out")
    ben.set_defaults(func=_cmd_bench)

    gen = sub.add_parser("generate", help="emit a benchmark family model")
    gen.add_argument("--family", required=True,
                     choices=["airport", "refuel", "evade", "blowup", "blowup-ext"])
    gen.add_argument("--params", default="",
                     help="comma separated, e.g. 3,3,A for airport")
    gen.add_argument("--out")
    gen.add_argument("--world-out", help="airport only: write the world factor")
    gen.add_argument("--sensor-out", help="airport only: write the sensor factor")
    gen.set_defaults(func=_cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MdpmonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
