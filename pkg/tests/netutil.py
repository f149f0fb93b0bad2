"""Network-building helpers shared by the test modules."""
from sensornet.simnet import Scheduler, Topology, build_nodes


def path_topology(n: int, **link) -> Topology:
    topo = Topology(range(n))
    for i in range(n - 1):
        topo.add_link(i, i + 1, **link)
    return topo


def ring_topology(n: int) -> Topology:
    topo = path_topology(n)
    topo.add_link(n - 1, 0)
    return topo


def build_network(topology, factory, seed=0, mtu=None):
    """One model per node; ``factory(node_id, facets)`` builds it."""
    sched = Scheduler(topology, seed=seed) if mtu is None else Scheduler(topology, seed=seed, mtu=mtu)
    facets = build_nodes(sched)
    models = {n: factory(n, f) for n, f in facets.items()}
    return sched, models, facets


class Inbox:
    """Receive handler recording ``(time, sender, payload)`` per node."""

    def __init__(self, sched):
        self.sched = sched
        self.got: dict[int, list] = {}

    def attach(self, node, model):
        return model.reg_recv_callback(
            lambda sender, payload: self.got.setdefault(node, []).append(
                (self.sched.now, sender, bytes(payload))))

    def count(self, node):
        return len(self.got.get(node, []))

