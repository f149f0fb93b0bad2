import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from sensornet import cli
from sensornet.scenario import (
    ComparisonError, Scenario, ScenarioError, TrafficItem, compare_runs, message_payload,
    messages_csv, parse_traffic, run_scenario,
)
from sensornet.simnet import load_topology, random_connected_topology

GOLDEN = Path(__file__).parent / "golden"


def run_cli(tmp_path, *args):
    out = tmp_path / "report.json"
    code = cli.main(["run", *args, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_golden_flood_report(tmp_path):
    code, report, out = run_cli(
        tmp_path, "--topology", str(GOLDEN / "path3.topo"), "--algo", "flood", "--seed", "1",
        "--duration", "1000", "--traffic", str(GOLDEN / "one_message.traffic"))
    assert code == 0
    assert out.read_text() == (GOLDEN / "flood_path3_report.json").read_text()
    assert report["app"]["delivery_ratio"] == 1.0
    assert report["radio"]["transmissions"] == {"FLOOD": 3}


def test_disconnected_dsdv_no_route(tmp_path):
    topo = tmp_path / "two.topo"
    topo.write_text("4\n0 1\n2 3\n")
    traffic = tmp_path / "t.traffic"
    traffic.write_text("".join(f"{3000 + 10 * i} {i % 2} {2 + i % 2} 6\n" for i in range(5)))
    code, report, _ = run_cli(tmp_path, "--topology", str(topo), "--algo", "dsdv",
                              "--duration", "5000", "--traffic", str(traffic))
    assert code == 0
    assert report["app"]["delivery_ratio"] == 0.0
    assert report["app"]["send_errors"] == {"NO_ROUTE": 5}
    assert report["routing"]["failures"]["no_route"] == 5


def test_exit_codes(tmp_path, monkeypatch):
    topo = str(GOLDEN / "path3.topo")
    assert cli.main(["run", "--topology", topo, "--algo", "bogus"]) == 1
    assert cli.main(["run", "--topology", str(tmp_path / "missing"), "--algo", "flood"]) == 1
    assert cli.main(["run", "--topology", topo, "--algo", "tree", "--out", str(tmp_path / "x")]) == 1
    bad = tmp_path / "bad.traffic"
    bad.write_text("5 0 9 4\n")
    assert cli.main(["run", "--topology", topo, "--algo", "flood", "--traffic", str(bad),
                     "--out", str(tmp_path / "x")]) == 1

    def boom(_):
        raise RuntimeError("simulated crash")

    monkeypatch.setattr(cli, "run_scenario", boom)
    assert cli.main(["run", "--topology", topo, "--algo", "flood", "--out", str(tmp_path / "x")]) == 2


def test_determinism_byte_identical(tmp_path):
    topo = tmp_path / "g.topo"
    topo.write_text(random_connected_topology(12, 24, seed=2, drop_prob=0.2).to_text())
    traffic = tmp_path / "t.traffic"
    traffic.write_text("".join(f"{2000 + 7 * i} {i % 12} {(5 * i + 3) % 12} 10\n" for i in range(30)))
    outs = []
    for k in range(2):
        out, trace = tmp_path / f"r{k}.json", tmp_path / f"t{k}.txt"
        assert cli.main(["run", "--topology", str(topo), "--algo", "dsr", "--crypto", "xor",
                         "--seed", "99", "--duration", "6000", "--traffic", str(traffic),
                         "--out", str(out), "--trace", str(trace)]) == 0
        outs.append((out.read_bytes(), trace.read_bytes()))
    assert outs[0] == outs[1]


def _run(topo_text, algo, crypto="none", n_msgs=20, seed=5, sink=None):
    topo = load_topology(topo_text)
    nodes = topo.nodes
    traffic = [TrafficItem(3000 + 11 * i, nodes[-1], nodes[0], 12) for i in range(n_msgs)]
    return run_scenario(Scenario(topo, algo, crypto, seed, 6000, traffic, sink=sink)).report


def test_compare_dsdv_vs_secure_identity():
    text = random_connected_topology(10, 18, seed=3).to_text()
    diff = compare_runs(_run(text, "dsdv"), _run(text, "dsdv", "identity"))
    assert all(r["delta"] == 0 for r in diff["messages"])
    assert diff["overhead_pct"] == 0.0 and diff["max_abs_delta"] == 0


def test_compare_self():
    rep = _run("3\n0 1\n1 2\n", "dsdv")
    diff = compare_runs(rep, rep)
    assert all(r["delta"] == 0 for r in diff["messages"])


def test_compare_flood_vs_dsdv_sends():
    flood, dsdv = _run("3\n0 1\n1 2\n", "flood", n_msgs=10), _run("3\n0 1\n1 2\n", "dsdv", n_msgs=10)
    diff = compare_runs(flood, dsdv)
    # 3 FLOOD frames per message against 2 DSDV_DATA hops
    assert flood["radio"]["transmissions"]["FLOOD"] == 30
    assert dsdv["radio"]["transmissions"]["DSDV_DATA"] == 20
    assert diff["transmissions"][0]["FLOOD"] > diff["transmissions"][1]["DSDV_DATA"]


def test_compare_rejects_different_traffic():
    a = _run("3\n0 1\n1 2\n", "dsdv", n_msgs=3)
    b = _run("3\n0 1\n1 2\n", "dsdv", n_msgs=4)
    with pytest.raises(ComparisonError):
        compare_runs(a, b)


def test_compare_cli(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(_run("3\n0 1\n1 2\n", "dsdv")))
    b.write_text(json.dumps(_run("3\n0 1\n1 2\n", "dsdv", "xor")))
    assert cli.main(["compare", str(a), str(b)]) == 0
    assert json.loads(capsys.readouterr().out)["max_abs_delta"] == 0
    c = tmp_path / "c.json"
    c.write_text(json.dumps(_run("3\n0 1\n1 2\n", "dsdv", n_msgs=2)))
    assert cli.main(["compare", str(a), str(c)]) == 1


def test_topology_command(tmp_path):
    out = tmp_path / "g.topo"
    assert cli.main(["topology", "--nodes", "8", "--edges", "12", "--seed", "4", "--out", str(out)]) == 0
    assert len(load_topology(out.read_text()).links()) == 12


def test_tree_scenario_and_csv(tmp_path):
    rep = _run("4\n0 1\n1 2\n2 3\n", "tree", sink=0, n_msgs=5)
    assert rep["app"]["delivery_ratio"] == 1.0
    assert rep["routing"]["convergence_round"] == 1
    rows = messages_csv(rep).splitlines()
    assert rows[0] == "id,at_ms,src,dst,len,status,delivered_at,latency_ms" and len(rows) == 6


def test_traffic_parse_errors():
    assert parse_traffic("# c\n\n1 2 3 4\n") == [TrafficItem(1, 2, 3, 4)]
    with pytest.raises(ScenarioError):
        parse_traffic("1 2 3\n")
    with pytest.raises(ScenarioError):
        parse_traffic("1 2 x 4\n")


def test_validation_names_field():
    topo = load_topology("2\n0 1\n")
    cases = [
        (Scenario(topo, "nope"), "algo"),
        (Scenario(topo, "flood", crypto="rot13"), "crypto"),
        (Scenario(topo, "flood", seed=-1), "seed"),
        (Scenario(topo, "tree"), "sink"),
        (Scenario(topo, "flood", traffic=[TrafficItem(0, 0, 5, 4)]), "traffic"),
        (Scenario(topo, "flood", duration_ms=10, traffic=[TrafficItem(11, 0, 1, 4)]), "traffic"),
        (Scenario(topo, "flood", traffic=[TrafficItem(0, 0, 1, 1)]), "traffic"),
        (Scenario(topo, "dsr", traffic=[TrafficItem(0, 0, 1, 100)]), "traffic"),
    ]
    for scenario, name in cases:
        with pytest.raises(ScenarioError) as exc:
            run_scenario(scenario)
        assert exc.value.field == name


def test_message_payload_carries_id():
    p = message_payload(0x1234, 6)
    assert p[:2] == b"\x12\x34" and len(p) == 6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["flood", "dsdv", "dsr"]),
       st.floats(0.0, 0.6), st.integers(1, 15))
def test_delivery_ratio_bounds(seed, algo, drop, n_msgs):
    topo = random_connected_topology(8, 12, seed=seed % 1000, drop_prob=drop)
    traffic = [TrafficItem(1500 + 13 * i, i % 8, (i * 3 + 1) % 8, 8) for i in range(n_msgs)]
    rep = run_scenario(Scenario(topo, algo, "none", seed, 4000, traffic)).report
    assert 0.0 <= rep["app"]["delivery_ratio"] <= 1.0
    assert rep["app"]["corrupted"] == 0
    r = rep["radio"]
    assert r["link_attempts"] == r["link_delivered"] + r["link_dropped"]
