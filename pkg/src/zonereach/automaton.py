"""Timed automata, networks with binary synchronization, and product edges."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple

from .zone import NO_BOUND, LUBounds

OPS = ("<", "<=", "=", ">=", ">")


class ModelError(ValueError):
    """A network that violates a structural rule."""


@dataclass(frozen=True)
class Constraint:
    clock: int  # index into Network.clocks
    op: str
    constant: int

    def __post_init__(self):
        if self.op not in OPS:
            raise ModelError(f"unknown comparison operator {self.op!r}")
        if not isinstance(self.constant, int) or self.constant < 0:
            raise ModelError(f"guard constant must be a natural number, got {self.constant!r}")


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    action: str
    guard: tuple = ()
    resets: tuple = ()


@dataclass(frozen=True)
class TimedAutomaton:
    name: str
    locations: tuple
    initial: int
    accepting: frozenset = frozenset()
    edges: tuple = ()

    def __post_init__(self):
        n = len(self.locations)
        if n == 0:
            raise ModelError(f"process {self.name} has no locations")
        if len(set(self.locations)) != n:
            raise ModelError(f"duplicate location name in process {self.name}")
        if not 0 <= self.initial < n:
            raise ModelError(f"process {self.name}: invalid initial location")
        for q in self.accepting:
            if not 0 <= q < n:
                raise ModelError(f"process {self.name}: invalid accepting location {q}")
        for e in self.edges:
            if not (0 <= e.source < n and 0 <= e.target < n):
                raise ModelError(f"process {self.name}: edge endpoint out of range")

    @property
    def actions(self) -> frozenset:
        return frozenset(e.action for e in self.edges)

    def location_index(self, name: str) -> int:
        return self.locations.index(name)


class SyncEnd(NamedTuple):
    process: int
    action: str


@dataclass(frozen=True)
class Sync:
    left: SyncEnd
    right: SyncEnd


class ProductEdge(NamedTuple):
    guard: tuple
    resets: tuple
    label: str
    target: tuple


@dataclass(frozen=True, eq=True)
class Network:
    """A fixed list of processes over a shared, ordered clock set.

    States of the product are tuples of location indices, one per process.
    """

    name: str
    clocks: tuple
    processes: tuple
    syncs: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if len(set(self.clocks)) != len(self.clocks):
            raise ModelError("duplicate clock name")
        if not self.processes:
            raise ModelError("network has no processes")
        names = [p.name for p in self.processes]
        if len(set(names)) != len(names):
            raise ModelError("duplicate process name")
        nclocks = len(self.clocks)
        for p in self.processes:
            for e in p.edges:
                for c in e.guard:
                    if not 0 <= c.clock < nclocks:
                        raise ModelError(f"process {p.name}: guard on unknown clock {c.clock}")
                for x in e.resets:
                    if not 0 <= x < nclocks:
                        raise ModelError(f"process {p.name}: reset of unknown clock {x}")
        for s in self.syncs:
            for end in (s.left, s.right):
                if not 0 <= end.process < len(self.processes):
                    raise ModelError(f"sync references unknown process {end.process}")
                if end.action not in self.processes[end.process].actions:
                    raise ModelError(
                        f"sync action {end.action!r} not in alphabet of "
                        f"{self.processes[end.process].name}")
            if s.left.process == s.right.process:
                raise ModelError("sync pair within a single process")

    @property
    def initial_state(self) -> tuple:
        return tuple(p.initial for p in self.processes)

    @property
    def nclocks(self) -> int:
        return len(self.clocks)

    def _tables(self):
        t = self._cache.get("tables")
        if t is None:
            synced = {(end.process, end.action) for s in self.syncs for end in (s.left, s.right)}
            outgoing = []
            for p in self.processes:
                per_loc = [[] for _ in p.locations]
                for e in p.edges:
                    per_loc[e.source].append(e)
                outgoing.append(per_loc)
            t = (synced, outgoing)
            self._cache["tables"] = t
        return t

    def outgoing(self, process: int, location: int) -> list:
        return self._tables()[1][process][location]


def lu_bounds(net: Network) -> LUBounds:
    """Global per-clock maximal constants of lower-bound and upper-bound guards."""
    lo = [NO_BOUND] * net.nclocks
    up = [NO_BOUND] * net.nclocks
    for p in net.processes:
        for e in p.edges:
            for c in e.guard:
                if c.op in (">", ">=", "="):
                    lo[c.clock] = max(lo[c.clock], c.constant)
                if c.op in ("<", "<=", "="):
                    up[c.clock] = max(up[c.clock], c.constant)
    return LUBounds(tuple(lo), tuple(up))


def enabled_product_edges(net: Network, state: tuple, shuffle_seed=None) -> list:
    """Edges of the product leaving ``state``.

    Local edges come first in process then declaration order, followed by
    synchronized pairs in sync declaration order. Guards are not evaluated
    here; a zone decides whether an edge can fire.
    """
    key = ("edges", state)
    edges = net._cache.get(key)
    if edges is None:
        synced, outgoing = net._tables()
        edges = []
        for i, p in enumerate(net.processes):
            for e in outgoing[i][state[i]]:
                if (i, e.action) in synced:
                    continue
                target = state[:i] + (e.target,) + state[i + 1:]
                edges.append(ProductEdge(e.guard, e.resets, f"{p.name}.{e.action}", target))
        for s in net.syncs:
            i, a = s.left
            j, b = s.right
            for e1 in outgoing[i][state[i]]:
                if e1.action != a:
                    continue
                for e2 in outgoing[j][state[j]]:
                    if e2.action != b:
                        continue
                    target = list(state)
                    target[i] = e1.target
                    target[j] = e2.target
                    resets = e1.resets + tuple(x for x in e2.resets if x not in e1.resets)
                    label = f"{net.processes[i].name}.{a}|{net.processes[j].name}.{b}"
                    edges.append(ProductEdge(e1.guard + e2.guard, resets, label, tuple(target)))
        net._cache[key] = edges
    if shuffle_seed is None:
        return list(edges)
    out = list(edges)
    random.Random(f"{shuffle_seed}:{state}").shuffle(out)
    return out


def is_accepting(net: Network, state: tuple) -> bool:
    return all(q in p.accepting for p, q in zip(net.processes, state))


def state_names(net: Network, state: tuple) -> tuple:
    return tuple(p.locations[q] for p, q in zip(net.processes, state))
