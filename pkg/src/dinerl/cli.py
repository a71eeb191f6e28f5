"""Command-line entry point.

Subcommands:
    run     headless adaptation run, prints a JSON summary
    serve   live run with the telemetry/control service attached
    replay  serve a previously recorded trace file
    sweep   threshold-vs-event-count curves as CSV

Any config key can be overridden with repeated --set section.key=value.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from .config import RunConfig, apply_overrides, load_config
from .errors import ConfigurationError, DataError
from .runtime import ControlLoop, extremum_counts, interaction_counts
from .server import TelemetryServer, TraceReplayer, read_trace


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="key-value config file")
    p.add_argument(
        "--set", metavar="SECTION.KEY=VALUE", action="append", default=[],
        dest="overrides", help="override one config key (repeatable)",
    )
    p.add_argument("--steps", type=int, help="shorthand for --set run.total_steps=N")
    p.add_argument("--seed", type=int, help="shorthand for --set run.seed=N")


def _add_serve_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--host", help="bind address (default 127.0.0.1)")
    p.add_argument("--port", type=int, help="bind port; 0 picks a free one")
    p.add_argument(
        "--exit-when-done", action="store_true",
        help="quit after the stream ends instead of keeping the service up",
    )


def _build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = load_config(args.config, cfg)
    if args.overrides:
        apply_overrides(cfg, args.overrides)
    if getattr(args, "steps", None) is not None:
        cfg.total_steps = args.steps
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "trace", None):
        cfg.trace = args.trace
    if getattr(args, "host", None):
        cfg.host = args.host
    if getattr(args, "port", None) is not None:
        cfg.port = args.port
    cfg.validate()
    return cfg


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad threshold grid: {text!r}") from exc


def _linger(bus, loop) -> None:
    print("stream finished; service stays up (Ctrl-C to quit)", flush=True)
    while True:
        bus.service(loop)
        time.sleep(0.05)


def cmd_run(args) -> int:
    cfg = _build_config(args)
    summary = ControlLoop(cfg).run()
    print(json.dumps(summary.to_dict(), indent=2))
    return 0


def cmd_serve(args) -> int:
    cfg = _build_config(args)
    server = TelemetryServer(cfg.host, cfg.port, mode="live").start()
    print(f"listening on {server.host}:{server.port}", flush=True)
    loop = ControlLoop(cfg)
    try:
        summary = loop.run(record_sink=server.record_sink, bus=server.bus)
        print(json.dumps(summary.to_dict(), indent=2), flush=True)
        if not args.exit_when_done:
            _linger(server.bus, loop)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def cmd_replay(args) -> int:
    replayer = TraceReplayer(args.trace)
    host = args.host or "127.0.0.1"
    port = args.port if args.port is not None else 7364
    server = TelemetryServer(host, port, mode="replay").start()
    print(f"listening on {server.host}:{server.port}", flush=True)
    try:
        if args.wait_for_client:
            while not server.has_clients():
                time.sleep(0.02)
        sent = replayer.run(server.record_sink, server.bus, rate=args.rate)
        print(f"replayed {sent} records", flush=True)
        if not args.exit_when_done:
            _linger(server.bus, replayer)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def cmd_sweep(args) -> int:
    if args.from_trace:
        _, records = read_trace(args.from_trace)
        if not records:
            raise DataError(f"{args.from_trace}: no step records")
    else:
        cfg = _build_config(args)
        # record at the permissive extremes so every candidate event is present
        cfg.thresholds.rho = 0.0
        cfg.thresholds.phi = 0.0
        records = []
        ControlLoop(cfg).run(record_sink=records.append)
    rows = [("kind", "threshold", "event_count", "step_count")]
    for rho in _parse_grid(args.rho):
        events, steps = interaction_counts(records, rho)
        rows.append(("rho", rho, events, steps))
    for phi in _parse_grid(args.phi):
        events, steps = extremum_counts(records, phi)
        rows.append(("phi", phi, events, steps))
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        csv.writer(out).writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dinerl",
        description="Decomposed deep RL autoscaling runs with live decision explanations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="headless run, JSON summary on stdout")
    _add_config_args(p_run)
    p_run.add_argument("--trace", metavar="FILE", help="write the JSONL step trace here")
    p_run.set_defaults(func=cmd_run)

    p_serve = sub.add_parser("serve", help="live run plus telemetry/control service")
    _add_config_args(p_serve)
    p_serve.add_argument("--trace", metavar="FILE", help="also persist the JSONL trace")
    _add_serve_args(p_serve)
    p_serve.set_defaults(func=cmd_serve)

    p_replay = sub.add_parser("replay", help="serve a recorded trace file")
    p_replay.add_argument("trace", help="JSONL trace produced by run/serve")
    p_replay.add_argument("--rate", type=float, default=0.0, help="records per second (0 = unpaced)")
    p_replay.add_argument(
        "--wait-for-client", action="store_true",
        help="hold the stream until the first client connects",
    )
    _add_serve_args(p_replay)
    p_replay.set_defaults(func=cmd_replay)

    p_sweep = sub.add_parser("sweep", help="DINE counts across threshold grids, CSV output")
    _add_config_args(p_sweep)
    p_sweep.add_argument("--from-trace", metavar="FILE", help="reuse a recorded trace (record at phi=0)")
    p_sweep.add_argument("--rho", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    p_sweep.add_argument("--phi", default="0,0.01,0.05,0.1,0.2,0.5,1.0")
    p_sweep.add_argument("--out", metavar="FILE", help="CSV path (default stdout)")
    p_sweep.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
