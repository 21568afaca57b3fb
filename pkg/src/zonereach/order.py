"""Topological-like orders on locations and their pointwise product.

Each process gets a linear order from a DFS that ignores edges into the
current DFS stack; the remaining edges form a DAG whose reverse postorder is
used. Product states are compared pointwise, and ``linear_key`` extends that
partial order to a total one for heap-based selection.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class TopoOrder:
    index: tuple  # location id -> position

    def __len__(self):
        return len(self.index)

    def sequence(self) -> list:
        """Location ids sorted by position."""
        return sorted(range(len(self.index)), key=self.index.__getitem__)


@dataclass(frozen=True)
class JointOrder:
    per_process: tuple


class Cmp(Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def _successor_lists(p, shuffle_seed):
    succ = [[] for _ in p.locations]
    for e in p.edges:
        succ[e.source].append(e.target)
    if shuffle_seed is not None:
        rng = random.Random(shuffle_seed)
        for s in succ:
            rng.shuffle(s)
    return succ


def dag_edges(p, shuffle_seed=None) -> list:
    """(src, dst) pairs kept by the back-edge-pruning DFS, in discovery order."""
    return _dfs(p, shuffle_seed)[1]


def _dfs(p, shuffle_seed):
    succ = _successor_lists(p, shuffle_seed)
    n = len(p.locations)
    on_stack = [False] * n
    done = [False] * n
    postorder = []
    kept = []
    start = p.initial
    on_stack[start] = True
    stack = [(start, iter(succ[start]))]
    while stack:
        u, it = stack[-1]
        for v in it:
            if on_stack[v]:
                continue  # back edge (or self loop)
            kept.append((u, v))
            if not done[v]:
                on_stack[v] = True
                stack.append((v, iter(succ[v])))
                break
        else:
            stack.pop()
            on_stack[u] = False
            done[u] = True
            postorder.append(u)
    return postorder, kept


def extract_dag_order(p, shuffle_seed=None) -> TopoOrder:
    postorder, _ = _dfs(p, shuffle_seed)
    seq = postorder[::-1]
    seq += [q for q in range(len(p.locations)) if q not in set(postorder)]
    index = [0] * len(seq)
    for pos, q in enumerate(seq):
        index[q] = pos
    return TopoOrder(tuple(index))


def joint_order(net, shuffle_seed=None) -> JointOrder:
    """Per-process orders; each process gets its own seed derived from ``shuffle_seed``."""
    orders = []
    for i, p in enumerate(net.processes):
        seed = None if shuffle_seed is None else f"{shuffle_seed}:{i}"
        orders.append(extract_dag_order(p, seed))
    return JointOrder(tuple(orders))


def joint_compare(j: JointOrder, a: tuple, b: tuple) -> Cmp:
    le = ge = True
    for order, qa, qb in zip(j.per_process, a, b):
        ia, ib = order.index[qa], order.index[qb]
        if ia < ib:
            ge = False
        elif ia > ib:
            le = False
    if le and ge:
        return Cmp.EQUAL
    if le:
        return Cmp.LESS
    if ge:
        return Cmp.GREATER
    return Cmp.INCOMPARABLE


def linear_key(j: JointOrder, state: tuple) -> tuple:
    idx = tuple(order.index[q] for order, q in zip(j.per_process, state))
    return (sum(idx), idx)


def dump_order(net, j: JointOrder) -> str:
    lines = []
    for p, order in zip(net.processes, j.per_process):
        lines.append(f"{p.name}: " + " < ".join(p.locations[q] for q in order.sequence()))
    return "\n".join(lines)
