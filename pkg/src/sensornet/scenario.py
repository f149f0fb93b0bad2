"""Scenario composition, execution and report comparison."""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field

from .crypto import CRYPTO_MODELS, SecureRouting
from .kernel import BROADCAST, ErrorCode
from .routing import MODELS, Dsdv, Dsr, Flooding, TreeRouting
from .simnet import Scheduler, SplitMix64, Topology, build_nodes
from .wire import WireBuffer

ALGORITHMS = tuple(MODELS)
CRYPTOS = ("none",) + tuple(CRYPTO_MODELS)
KEY_STREAM_SALT = 0x6B65795F73616C74
MIN_PAYLOAD = 2


class ScenarioError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class ComparisonError(ValueError):
    pass


@dataclass(frozen=True)
class TrafficItem:
    at_ms: int
    src: int
    dst: int
    payload_len: int


def parse_traffic(text: str) -> list[TrafficItem]:
    items = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ScenarioError("traffic", f"line {lineno}: expected 'at_ms src dst payload_len'")
        try:
            items.append(TrafficItem(*(int(f) for f in fields)))
        except ValueError:
            raise ScenarioError("traffic", f"line {lineno}: non-integer field") from None
    return items


@dataclass
class Scenario:
    topology: Topology
    algorithm: str
    crypto: str = "none"
    seed: int = 0
    duration_ms: int = 10_000
    traffic: list[TrafficItem] = field(default_factory=list)
    sink: int | None = None
    topology_name: str = "<inline>"
    table_capacity: int = 32

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ScenarioError("algo", f"unknown algorithm {self.algorithm!r}")
        if self.crypto not in CRYPTOS:
            raise ScenarioError("crypto", f"unknown crypto {self.crypto!r}")
        if not 0 <= self.seed < 1 << 64:
            raise ScenarioError("seed", "must be an unsigned 64-bit integer")
        if self.duration_ms < 0:
            raise ScenarioError("duration", "must be non-negative")
        if self.table_capacity < 1:
            raise ScenarioError("table_capacity", "must be positive")
        if self.algorithm == "tree":
            if self.sink is None:
                raise ScenarioError("sink", "tree routing needs a sink")
            if self.sink not in self.topology:
                raise ScenarioError("sink", f"node {self.sink} not in topology")
        for i, t in enumerate(self.traffic):
            if t.src not in self.topology or t.dst not in self.topology:
                raise ScenarioError("traffic", f"item {i} references an unknown node")
            if not 0 <= t.at_ms <= self.duration_ms:
                raise ScenarioError("traffic", f"item {i} is scheduled outside [0, duration]")
            if t.payload_len < MIN_PAYLOAD:
                raise ScenarioError("traffic", f"item {i} payload shorter than {MIN_PAYLOAD} bytes")
        if len(self.traffic) > 1 << 16:
            raise ScenarioError("traffic", "at most 65536 messages per run")


def message_payload(msg_id: int, length: int) -> bytes:
    buf = WireBuffer(capacity=length)
    buf.write_uint(16, msg_id)
    buf.write_bytes(bytes((msg_id * 31 + j) & 0xFF for j in range(MIN_PAYLOAD, length)))
    return buf.getvalue()


def group_key(seed: int) -> bytes:
    rng = SplitMix64(seed ^ KEY_STREAM_SALT)
    return b"".join(rng.next_u64().to_bytes(8, "big") for _ in range(2))


def build_models(scenario: Scenario, scheduler: Scheduler) -> dict:
    """Instantiate one (possibly secured) routing stack per node."""
    topo = scenario.topology
    models = {}
    for n, f in build_nodes(scheduler).items():
        if scenario.algorithm == "flood":
            model = Flooding(f.radio, f.timer, f.clock)
        elif scenario.algorithm == "tree":
            model = TreeRouting(f.radio, f.timer, f.clock, is_sink=(n == scenario.sink))
        elif scenario.algorithm == "dsdv":
            model = Dsdv(f.radio, f.timer, f.clock, table_capacity=scenario.table_capacity)
        else:
            model = Dsr(f.radio, f.timer, f.clock, max_latency_ms=topo.max_latency(),
                        cache_capacity=scenario.table_capacity)
        if scenario.crypto != "none":
            crypto = CRYPTO_MODELS[scenario.crypto]()
            crypto.key_setup(BROADCAST, group_key(scenario.seed))
            model = SecureRouting(model, crypto)
        models[n] = (model, f)
    return models


def _inner(model):
    return model.routing if isinstance(model, SecureRouting) else model


@dataclass
class RunResult:
    report: dict
    trace: str

    def report_text(self) -> str:
        return dump_report(self.report)


def run_scenario(scenario: Scenario, taps=()) -> RunResult:
    """Simulate ``scenario``; each tap sees every delivered frame."""
    scenario.validate()
    sched = Scheduler(scenario.topology, seed=scenario.seed)
    sched.taps.extend(taps)
    models = build_models(scenario, sched)

    for t in scenario.traffic:
        if t.payload_len > models[t.src][0].mtu:
            raise ScenarioError("traffic", f"payload_len {t.payload_len} exceeds the "
                                f"{models[t.src][0].mtu}-byte limit of this stack")

    records = [
        {"id": i, "at_ms": t.at_ms, "src": t.src, "dst": t.dst, "len": t.payload_len,
         "status": "lost", "delivered_at": None, "latency_ms": None}
        for i, t in enumerate(scenario.traffic)
    ]
    payloads = [message_payload(i, t.payload_len) for i, t in enumerate(scenario.traffic)]
    send_errors: Counter = Counter()
    corrupted = 0

    def receiver(node: int):
        def on_receive(sender: int, payload: bytes) -> None:
            nonlocal corrupted
            if len(payload) < MIN_PAYLOAD:
                return
            msg_id = WireBuffer(payload).read_uint(16)
            if msg_id >= len(records):
                return
            rec = records[msg_id]
            if rec["dst"] != node or rec["status"] == "delivered":
                return
            if payload != payloads[msg_id] or sender != rec["src"]:
                corrupted += 1
                return
            rec["status"] = "delivered"
            rec["delivered_at"] = sched.now
            rec["latency_ms"] = sched.now - rec["at_ms"]
        return on_receive

    for n, (model, _) in models.items():
        model.reg_recv_callback(receiver(n))
    for model, _ in models.values():
        model.enable()

    by_src: dict[int, list[int]] = {}
    for i, t in enumerate(scenario.traffic):
        by_src.setdefault(t.src, []).append(i)
    for src, ids in by_src.items():
        ids.sort(key=lambda i: (scenario.traffic[i].at_ms, i))
        _schedule_traffic(sched, models[src], ids, records, payloads, send_errors)

    sched.run_until(scenario.duration_ms)

    delivered = [r for r in records if r["status"] == "delivered"]
    latencies = [r["latency_ms"] for r in delivered]
    failures: Counter = Counter()
    for model, _ in models.values():
        for layer in {model, _inner(model)}:
            for key in ("no_route", "buffer_full", "no_key", "route_broken", "table_full"):
                failures[key] += layer.stats[key]
    sent = len(records)
    report = {
        "scenario": {
            "topology": scenario.topology_name,
            "nodes": len(scenario.topology),
            "links": len(scenario.topology.links()),
            "algo": scenario.algorithm,
            "crypto": scenario.crypto,
            "seed": scenario.seed,
            "duration_ms": scenario.duration_ms,
            "sink": scenario.sink,
        },
        "app": {
            "sent": sent,
            "delivered": len(delivered),
            "delivery_ratio": len(delivered) / sent if sent else 0.0,
            "corrupted": corrupted,
            "send_errors": dict(sorted(send_errors.items())),
            "latency_ms": {
                "mean": sum(latencies) / len(latencies) if latencies else None,
                "max": max(latencies) if latencies else None,
            },
        },
        "radio": {
            "transmissions": dict(sorted(sched.transmissions.items())),
            "bytes": dict(sorted(sched.tx_bytes.items())),
            "link_attempts": sum(sched.sent.values()),
            "link_delivered": sum(sched.delivered.values()),
            "link_dropped": sum(sched.dropped.values()),
        },
        "routing": {
            "failures": {k: v for k, v in sorted(failures.items()) if v},
            "table_sizes": {str(n): m.table_size() for n, (m, _) in models.items()},
            "convergence_round": _convergence_round(scenario, models),
        },
        "messages": records,
    }
    return RunResult(report, sched.trace_text())


def _schedule_traffic(sched, stack, ids, records, payloads, send_errors) -> None:
    model, facets = stack
    queue = list(ids)

    def fire():
        now = sched.now
        while queue and records[queue[0]]["at_ms"] <= now:
            i = queue.pop(0)
            err = model.send(records[i]["dst"], payloads[i])
            if err:
                records[i]["status"] = err.name
                send_errors[err.name] += 1
        if queue:
            facets.timer.set_timer(records[queue[0]]["at_ms"] - now, fire)

    facets.timer.set_timer(records[queue[0]]["at_ms"], fire)


def _convergence_round(scenario: Scenario, models) -> int | None:
    inner = [_inner(m) for m, _ in models.values()]
    if scenario.algorithm == "dsdv":
        return max(m.last_change_ms // m.update_period + 1 for m in inner)
    if scenario.algorithm == "tree":
        return max(m.last_change_ms // m.beacon_period + 1 for m in inner)
    return None


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def messages_csv(report: dict) -> str:
    out = io.StringIO()
    cols = ["id", "at_ms", "src", "dst", "len", "status", "delivered_at", "latency_ms"]
    writer = csv.DictWriter(out, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for rec in report["messages"]:
        writer.writerow({c: "" if rec[c] is None else rec[c] for c in cols})
    return out.getvalue()


def _traffic_key(report: dict) -> list[tuple]:
    return [(m["id"], m["at_ms"], m["src"], m["dst"], m["len"]) for m in report["messages"]]


def compare_runs(a: dict, b: dict) -> dict:
    """Per-message latency deltas between two runs over identical traffic."""
    sa, sb = a["scenario"], b["scenario"]
    for key in ("nodes", "links", "seed"):
        if sa[key] != sb[key]:
            raise ComparisonError(f"runs differ in {key}: {sa[key]} vs {sb[key]}")
    if _traffic_key(a) != _traffic_key(b):
        raise ComparisonError("runs carry different traffic")
    rows = []
    for ma, mb in zip(a["messages"], b["messages"]):
        la, lb = ma["latency_ms"], mb["latency_ms"]
        rows.append({
            "id": ma["id"], "latency_a": la, "latency_b": lb,
            "delta": lb - la if la is not None and lb is not None else None,
        })
    mean_a, mean_b = a["app"]["latency_ms"]["mean"], b["app"]["latency_ms"]["mean"]
    if mean_a and mean_b is not None:
        overhead = (mean_b - mean_a) / mean_a * 100.0
    else:
        overhead = None
    return {
        "a": {"algo": sa["algo"], "crypto": sa["crypto"]},
        "b": {"algo": sb["algo"], "crypto": sb["crypto"]},
        "delivery_ratio": [a["app"]["delivery_ratio"], b["app"]["delivery_ratio"]],
        "mean_latency_ms": [mean_a, mean_b],
        "overhead_pct": overhead,
        "max_abs_delta": max((abs(r["delta"]) for r in rows if r["delta"] is not None), default=None),
        "transmissions": [a["radio"]["transmissions"], b["radio"]["transmissions"]],
        "messages": rows,
    }
