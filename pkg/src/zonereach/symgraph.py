"""Abstract zone graph: nodes, successors, subsumption, and an exhaustive oracle."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from . import zone as zn
from .automaton import Network, enabled_product_edges, is_accepting, lu_bounds


class OracleLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SymNode:
    state: tuple
    zone: zn.Dbm

    def describe(self, net: Network | None = None) -> str:
        if net is None:
            return f"({self.state}, {zn.render(self.zone)})"
        locs = ",".join(p.locations[q] for p, q in zip(net.processes, self.state))
        return f"(<{locs}>, {zn.render(self.zone, net.clocks)})"


def _lu(net: Network):
    lu = net._cache.get("lu")
    if lu is None:
        lu = net._cache["lu"] = lu_bounds(net)
    return lu


def _require_clocks(net: Network):
    if net.nclocks == 0:
        raise ValueError(f"network {net.name} declares no clocks")


def initial_node(net: Network) -> SymNode:
    _require_clocks(net)
    z = zn.extrapolate_lu_plus(zn.initial_zone(net.nclocks), _lu(net))
    return SymNode(net.initial_state, z)


def post_zone(z, guard, resets):
    """Un-abstracted successor zone: delay, then guard, then resets."""
    z = zn.delay(z)
    for c in guard:
        z = zn.constrain(z, c.clock + 1, c.op, c.constant)
        if z is zn.EMPTY:
            return zn.EMPTY
    return zn.reset(z, [x + 1 for x in resets])


def successors(net: Network, node: SymNode, shuffle_seed=None) -> list:
    """Extrapolated successors of ``node``, in edge enumeration order."""
    lu = _lu(net)
    out = []
    for e in enabled_product_edges(net, node.state, shuffle_seed):
        z = post_zone(node.zone, e.guard, e.resets)
        if z is zn.EMPTY:
            continue
        out.append(SymNode(e.target, zn.extrapolate_lu_plus(z, lu)))
    return out


def node_subsumes(big: SymNode, small: SymNode) -> bool:
    return big.state == small.state and zn.includes(big.zone, small.zone)


def oracle_enumerate(net: Network, node_limit: int = 1_000_000):
    """Every node of the abstract zone graph, deduplicated by equality only.

    Returns ``(reachable, nodes)``. Raises :class:`OracleLimitExceeded` if
    more than ``node_limit`` distinct nodes are found.
    """
    start = initial_node(net)
    seen = {start}
    queue = deque([start])
    reachable = False
    while queue:
        n = queue.popleft()
        if is_accepting(net, n.state):
            reachable = True
        for s in successors(net, n):
            if s not in seen:
                seen.add(s)
                if len(seen) > node_limit:
                    raise OracleLimitExceeded(
                        f"more than {node_limit} nodes in the zone graph of {net.name}")
                queue.append(s)
    return reachable, seen
