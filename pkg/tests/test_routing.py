import pytest

from netutil import Inbox, build_network, path_topology, ring_topology
from oracles import adjacency, bfs_dist, diameter, is_valid_path
from sensornet.kernel import BROADCAST, ErrorCode
from sensornet.routing import Dsdv, Dsr, Flooding, TreeRouting
from sensornet.routing.dsr import is_simple
from sensornet.routing.tree import NO_HOPS
from sensornet.simnet import Topology, load_topology, random_connected_topology
from sensornet.wire import DsdvAdvert, DsdvUpdate, Flood, MsgKind, decode, encode


def flood_net(topo, ttl=16, seed=0):
    sched, models, facets = build_network(topo, lambda n, f: Flooding(f.radio, f.timer, f.clock, ttl=ttl), seed)
    inbox = Inbox(sched)
    for n, m in models.items():
        inbox.attach(n, m)
        m.enable()
    return sched, models, facets, inbox


def tree_net(topo, sink):
    sched, models, facets = build_network(
        topo, lambda n, f: TreeRouting(f.radio, f.timer, f.clock, is_sink=(n == sink)))
    inbox = Inbox(sched)
    for n, m in models.items():
        inbox.attach(n, m)
        m.enable()
    return sched, models, facets, inbox


def dsdv_net(topo, capacity=64, seed=0):
    sched, models, facets = build_network(
        topo, lambda n, f: Dsdv(f.radio, f.timer, f.clock, table_capacity=capacity), seed)
    inbox = Inbox(sched)
    for n, m in models.items():
        inbox.attach(n, m)
        m.enable()
    return sched, models, facets, inbox


def dsr_net(topo, seed=0):
    sched, models, facets = build_network(
        topo, lambda n, f: Dsr(f.radio, f.timer, f.clock, max_latency_ms=topo.max_latency()), seed)
    inbox = Inbox(sched)
    for n, m in models.items():
        inbox.attach(n, m)
        m.enable()
    return sched, models, facets, inbox


# -- flooding ---------------------------------------------------------------

def test_flood_path_delivers_once_each(path3):
    sched, models, _, inbox = flood_net(path3, ttl=8)
    assert models[0].send(BROADCAST, b"hello") is ErrorCode.OK
    sched.run_until(50)
    assert inbox.got.get(0) is None
    assert inbox.got[1] == [(1, 0, b"hello")]
    assert inbox.got[2] == [(2, 0, b"hello")]
    assert sched.transmissions["FLOOD"] == 3


def test_flood_ttl_one_stops_after_first_hop(path3):
    sched, models, _, inbox = flood_net(path3, ttl=1)
    models[0].send(BROADCAST, b"x")
    sched.run_until(50)
    assert inbox.count(1) == 1 and inbox.count(2) == 0


def test_flood_replayed_seq_suppressed(path3):
    sched, models, facets, inbox = flood_net(path3)
    frame = encode(Flood(0, 7, 16, b"dup"))
    facets[0].radio.send(BROADCAST, frame)
    sched.run_until(10)
    facets[0].radio.send(BROADCAST, frame)
    sched.run_until(20)
    assert inbox.count(1) == 1 and inbox.count(2) == 1
    assert models[1].stats["duplicate"] >= 1


def test_flood_seq_wraps():
    from sensornet.routing.flooding import seq_newer
    assert seq_newer(1, 0) and seq_newer(0, 0xFFFF) and not seq_newer(0, 1)
    assert not seq_newer(5, 5)


def test_flood_cache_evicts_oldest_originator():
    topo = path_topology(2)
    sched, models, facets, _ = build_network(
        topo, lambda n, f: Flooding(f.radio, f.timer, f.clock, cache_capacity=2)) + (None,)
    models[1].enable()
    facets[0].radio.enable()
    for origin in (10, 11, 12):
        facets[0].radio.send(1, encode(Flood(origin, 1, 1, b"")))
        sched.run_for(5)
    assert sorted(models[1].seen.keys()) == [11, 12]


def test_flood_completeness_on_random_graphs():
    for seed in range(10):
        topo = random_connected_topology(25, 50, seed)
        sched, models, _, inbox = flood_net(topo)
        models[0].send(BROADCAST, b"p")
        sched.run_until(200)
        reach = set(bfs_dist(adjacency(topo), 0)) - {0}
        assert {n for n in inbox.got} == reach
        assert all(inbox.count(n) == 1 for n in reach)


# -- tree -------------------------------------------------------------------

def star(n):
    topo = Topology(range(n))
    for i in range(1, n):
        topo.add_link(0, i)
    return topo


def test_tree_star_one_round():
    sched, models, _, _ = tree_net(star(6), sink=0)
    sched.run_until(10)
    for n in range(1, 6):
        assert (models[n].parent, models[n].my_hops) == (0, 1)


def test_tree_tie_keeps_parent():
    # diamond: 3 hears depth-1 beacons from 1 and 2; first one wins
    topo = load_topology("4\n0 1\n0 2 2\n1 3\n2 3\n")
    sched, models, _, _ = tree_net(topo, sink=0)
    sched.run_until(2500)
    assert (models[3].parent, models[3].my_hops) == (1, 2)


def test_tree_disconnected_node_has_no_parent():
    topo = load_topology("3\n0 1\n")
    sched, models, _, _ = tree_net(topo, sink=0)
    sched.run_until(5000)
    assert models[2].parent is None and models[2].my_hops == NO_HOPS
    assert models[2].send(0, b"x") is ErrorCode.NO_ROUTE


def test_tree_convergecast_on_path(path3):
    sched, models, _, inbox = tree_net(path3, sink=0)
    assert models[2].send(0, b"up") is ErrorCode.NO_ROUTE
    sched.run_until(10)
    sent_before = sched.transmissions["TREE_DATA"]
    assert models[2].send(0, b"up") is ErrorCode.OK
    sched.run_until(20)
    assert inbox.got[0] == [(12, 2, b"up")]
    assert sched.transmissions["TREE_DATA"] - sent_before == 2


def test_tree_rejects_non_sink_receiver(path3):
    sched, models, _, _ = tree_net(path3, sink=0)
    sched.run_until(10)
    assert models[2].send(1, b"x") is ErrorCode.NO_ROUTE


def test_tree_depth_matches_bfs_and_acyclic():
    for seed in range(5):
        topo = random_connected_topology(30, 60, seed, latency_ms=3)
        sched, models, _, _ = tree_net(topo, sink=4)
        sched.run_until(2000)
        depth = bfs_dist(adjacency(topo), 4)
        for n, m in models.items():
            assert m.my_hops == depth[n]
            hops, cur = 0, n
            while cur != 4:
                cur = models[cur].parent
                hops += 1
                assert hops <= len(models)
            assert hops == depth[n]


# -- dsdv -------------------------------------------------------------------

def test_dsdv_path_two_rounds(path3):
    sched, models, _, _ = dsdv_net(path3)
    sched.run_until(1001)
    e = models[0].entry(2)
    assert (e.dest, e.next_hop, e.hops) == (2, 1, 2)
    assert models[0].entry(0).hops == 0 and models[0].entry(0).next_hop == 0


def test_dsdv_tie_and_stale_are_ignored(path3):
    sched, models, facets, _ = dsdv_net(path3)
    sched.run_until(1500)
    before = models[0].entry(2)
    facets[1].radio.send(0, encode(DsdvUpdate((DsdvAdvert(2, 2, before.hops, before.seq),))))
    facets[1].radio.send(0, encode(DsdvUpdate((DsdvAdvert(2, 2, 0, before.seq - 2),))))
    sched.run_until(1510)
    assert models[0].entry(2) == before


def test_dsdv_ring_two_hops():
    sched, models, _, inbox = dsdv_net(ring_topology(4))
    sched.run_until(3000)
    before = sched.transmissions["DSDV_DATA"]
    assert models[0].send(2, b"r") is ErrorCode.OK
    sched.run_until(3010)
    assert [(s, p) for _, s, p in inbox.got[2]] == [(0, b"r")]
    assert sched.transmissions["DSDV_DATA"] - before == 2


def test_dsdv_unknown_and_self(path3):
    sched, models, _, inbox = dsdv_net(path3)
    sched.run_until(3000)
    assert models[0].send(99, b"x") is ErrorCode.NO_ROUTE
    assert models[0].send(BROADCAST, b"x") is ErrorCode.NO_ROUTE
    before = sum(sched.transmissions.values())
    sched.taps.append(lambda ev: pytest.fail("self send touched the radio"))
    assert models[0].send(0, b"me") is ErrorCode.OK
    assert inbox.got[0] == [(3000, 0, b"me")]
    assert sum(sched.transmissions.values()) == before


def test_dsdv_breaks_routes_after_silence(path3):
    sched, models, _, _ = dsdv_net(path3)
    sched.run_until(2500)
    models[1].disable()
    models[2].disable()
    sched.run_until(7000)
    e = models[0].entry(2)
    assert e.broken and e.seq % 2 == 1
    assert models[0].send(2, b"x") is ErrorCode.NO_ROUTE


def test_dsdv_seq_monotone_and_convergence_on_random_graphs():
    for seed in range(5):
        topo = random_connected_topology(30, 60, seed)
        sched, models, _, _ = dsdv_net(topo)
        history = {}

        def check(_ev):
            for n, m in models.items():
                for dest, e in m.table.items():
                    assert e.seq >= history.get((n, dest), 0)
                    history[(n, dest)] = e.seq

        sched.taps.append(check)
        rounds = diameter(adjacency(topo)) + 1
        sched.run_until(rounds * 1000 - 1)
        adj = adjacency(topo)
        for n, m in models.items():
            dist = bfs_dist(adj, n)
            for d in models:
                assert m.entry(d).hops == dist[d]


def test_dsdv_eviction_prefers_lowest_seq_non_neighbor():
    topo = path_topology(6)
    sched, models, _, _ = dsdv_net(topo, capacity=4)
    sched.run_until(6000)
    table = models[0].table
    assert len(table) == 4
    assert 0 in table and 1 in table
    assert models[0].stats["evicted"] > 0


# -- dsr --------------------------------------------------------------------

def test_dsr_discovers_and_delivers(path3):
    sched, models, _, inbox = dsr_net(path3)
    assert models[0].send(2, b"d") is ErrorCode.OK
    sched.run_until(50)
    assert models[0].route(2) == (0, 1, 2)
    assert [(s, p) for _, s, p in inbox.got[2]] == [(0, b"d")]
    assert models[0].rreqs_sent == 1
    models[0].send(2, b"e")
    sched.run_until(100)
    assert models[0].rreqs_sent == 1 and inbox.count(2) == 2


def test_dsr_disconnected_target_times_out():
    topo = load_topology("4\n0 1\n2 3\n")
    sched, models, _, inbox = dsr_net(topo)
    assert models[0].send(3, b"x") is ErrorCode.OK
    sched.run_until(models[0].timeout_ms + 1)
    assert models[0].stats["no_route"] == 1 and len(models[0].pending) == 0
    assert inbox.count(3) == 0


def test_dsr_pending_buffer_overflow():
    topo = load_topology("3\n0 1\n")
    sched, models, _, _ = dsr_net(topo)
    codes = [models[0].send(2, b"x") for _ in range(5)]
    assert codes[:4] == [ErrorCode.OK] * 4 and codes[4] is ErrorCode.BUFFER_FULL
    assert models[0].rreqs_sent == 1


def test_dsr_paths_valid_on_random_graphs():
    for seed in range(8):
        topo = random_connected_topology(20, 40, seed)
        sched, models, _, inbox = dsr_net(topo)
        for d in range(1, 5):
            models[0].send(d, bytes([d, d]))
        sched.run_until(500)
        for d in range(1, 5):
            path = models[0].route(d)
            assert path is not None and is_simple(path) and is_valid_path(topo, path)
            assert inbox.count(d) == 1


def test_dsr_repairs_after_link_loss():
    topo = ring_topology(6)
    sched, models, _, inbox = dsr_net(topo)
    models[0].send(2, b"a")
    sched.run_until(100)
    path = models[0].route(2)
    assert path == (0, 1, 2)
    topo.remove_link(1, 2)
    models[0].send(2, b"b")
    sched.run_until(1000)
    new = models[0].route(2)
    assert new is not None and is_valid_path(topo, new) and new[1] == 5
    assert [p for _, _, p in inbox.got[2]] == [b"a", b"b"]


# -- enable / disable -------------------------------------------------------

@pytest.mark.parametrize("make", [flood_net, dsdv_net, dsr_net, lambda t: tree_net(t, 0)])
def test_disabled_send_and_receive(make, path3):
    sched, models, facets, inbox = make(path3)
    sched.run_until(1500)
    models[1].disable()
    models[1].disable()
    assert models[1].send(0, b"x") is ErrorCode.DISABLED
    forwarded = models[1].stats["forwarded"]
    models[0].send(2, b"y") if not isinstance(models[0], TreeRouting) else models[2].send(0, b"y")
    sched.run_until(1600)
    assert models[1].stats["forwarded"] == forwarded
    assert inbox.count(1) == 0


def _dsdv_tables(models):
    # next hops may legitimately differ between equal-cost routes
    return {n: sorted((d, e.hops, e.broken) for d, e in m.table.items()) for n, m in models.items()}


def test_reenable_resumes_with_state():
    topo = random_connected_topology(10, 20, seed=4)
    sched_a, models_a, _, _ = dsdv_net(topo)
    sched_a.run_until(6000)
    sched_b, models_b, _, inbox_b = dsdv_net(topo)
    sched_b.run_until(4000)
    models_b[3].disable()
    models_b[3].enable()
    sched_b.run_until(6000)
    assert _dsdv_tables(models_a) == _dsdv_tables(models_b)
    assert models_b[3].send(7, b"again") is ErrorCode.OK
    sched_b.run_until(6100)
    assert inbox_b.count(7) == 1


def test_flood_frames_decode_with_expected_ttl(path3):
    sched, models, _, _ = flood_net(path3)
    seen = []
    sched.taps.append(lambda ev: seen.append((ev.kind.sender, decode(ev.kind.payload).ttl)))
    models[0].send(BROADCAST, b"t")
    sched.run_until(10)
    assert seen == [(0, 16), (1, 15), (1, 15), (2, 14)]
