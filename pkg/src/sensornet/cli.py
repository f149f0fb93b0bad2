"""Command-line harness.

    sensornet run --topology F --algo A --crypto C --seed N --duration MS \
                  --traffic F2 [--sink ID] --out F3 [--trace F4] [--csv F5]
    sensornet compare A B [--out F]
    sensornet topology --nodes N --edges M --seed S

Exit status: 0 success, 1 invalid input, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .scenario import (
    ALGORITHMS, CRYPTOS, ComparisonError, Scenario, ScenarioError, compare_runs,
    dump_report, messages_csv, parse_traffic, run_scenario,
)
from .simnet import TopologyError, load_topology, random_connected_topology

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("sensornet")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_run(args) -> int:
    topo = load_topology(Path(args.topology).read_text(encoding="utf-8"))
    traffic = parse_traffic(Path(args.traffic).read_text(encoding="utf-8")) if args.traffic else []
    scenario = Scenario(
        topology=topo, algorithm=args.algo, crypto=args.crypto, seed=args.seed,
        duration_ms=args.duration, traffic=traffic, sink=args.sink,
        topology_name=Path(args.topology).name, table_capacity=args.table_capacity,
    )
    scenario.validate()
    result = run_scenario(scenario)
    _write(args.out, result.report_text())
    if args.trace:
        _write(args.trace, result.trace)
    if args.csv:
        _write(args.csv, messages_csv(result.report))
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = json.loads(Path(args.report_a).read_text(encoding="utf-8"))
    b = json.loads(Path(args.report_b).read_text(encoding="utf-8"))
    _write(args.out, dump_report(compare_runs(a, b)))
    return EXIT_OK


def _cmd_topology(args) -> int:
    if args.nodes < 1:
        raise ScenarioError("nodes", "must be positive")
    _write(args.out, random_connected_topology(args.nodes, args.edges, args.seed).to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sensornet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one scenario and write its report")
    run.add_argument("--topology", required=True)
    run.add_argument("--algo", required=True, choices=ALGORITHMS)
    run.add_argument("--crypto", default="none", choices=CRYPTOS)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--duration", type=int, default=10_000, help="simulated ms")
    run.add_argument("--traffic")
    run.add_argument("--sink", type=int)
    run.add_argument("--table-capacity", type=int, default=32)
    run.add_argument("--out", default="-")
    run.add_argument("--trace", help="write the event trace here")
    run.add_argument("--csv", help="write the per-message table here")
    run.set_defaults(func=_cmd_run)

    cmp_ = sub.add_parser("compare", help="per-message latency deltas of two reports")
    cmp_.add_argument("report_a")
    cmp_.add_argument("report_b")
    cmp_.add_argument("--out", default="-")
    cmp_.set_defaults(func=_cmd_compare)

    topo = sub.add_parser("topology", help="emit a random connected topology file")
    topo.add_argument("--nodes", type=int, required=True)
    topo.add_argument("--edges", type=int, required=True)
    topo.add_argument("--seed", type=int, default=0)
    topo.add_argument("--out", default="-")
    topo.set_defaults(func=_cmd_topology)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, TopologyError, ComparisonError, OSError,
            json.JSONDecodeError, KeyError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error
        log.error("runtime failure: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
