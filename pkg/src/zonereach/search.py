"""Reachability with subsumption and pluggable waiting-list policies.

The loop keeps a passed set P of pairwise incomparable nodes and a waiting
list W included in P. A new successor is dropped if some node of P already
covers it; otherwise every node of P it covers is evicted from both sets
before it is added. Policies only differ in which waiting node is taken next:

``bfs``       FIFO
``dfs``       LIFO
``rank_bfs``  highest rank first; ranks are propagated through a tree over P
``waiting``   minimal state w.r.t. the joint topological order
``tw_bfs``    true-zone nodes first, then as ``waiting``

Ties are always broken in insertion order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import count

from . import zone as zn
from .automaton import Network, is_accepting
from .order import JointOrder, joint_order, linear_key
from .symgraph import SymNode, initial_node, node_subsumes, successors

INFINITE_RANK = math.inf


class Strategy(str, Enum):
    BFS = "bfs"
    DFS = "dfs"
    RANK_BFS = "rank_bfs"
    WAITING = "waiting"
    TW_BFS = "tw_bfs"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        key = name.strip().lower().replace("-", "_")
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown strategy {name!r} (expected one of {names})") from None

    @property
    def needs_order(self) -> bool:
        return self in (Strategy.WAITING, Strategy.TW_BFS)


_ALIASES = {"r_bfs": "rank_bfs", "w_bfs": "waiting", "twbfs": "tw_bfs"}

ALL_STRATEGIES = tuple(Strategy)


class Answer(str, Enum):
    REACHABLE = "reachable"
    UNREACHABLE = "unreachable"


class InvariantViolation(AssertionError):
    pass


@dataclass
class StrategyConfig:
    strategy: Strategy
    order: JointOrder | None = None
    edge_seed: object = None
    order_seed: object = None

    def __post_init__(self):
        if not isinstance(self.strategy, Strategy):
            self.strategy = Strategy.parse(self.strategy)


@dataclass
class SearchStats:
    visited: int = 0
    mistakes: int = 0
    stored_max: int = 0
    stored_final: int = 0
    visited_ranking: int = 0

    def as_dict(self) -> dict:
        return {
            "visited": self.visited,
            "mistakes": self.mistakes,
            "stored_max": self.stored_max,
            "stored_final": self.stored_final,
            "visited_ranking": self.visited_ranking,
        }


class StoredNode:
    __slots__ = ("node", "rank", "in_waiting", "expanded", "removed", "parent", "children", "seq")

    def __init__(self, node, seq, rank=0):
        self.node = node
        self.seq = seq
        self.rank = rank
        self.in_waiting = False
        self.expanded = False
        self.removed = False
        self.parent = None
        self.children = {}  # used as an ordered set

    def __repr__(self):
        return f"StoredNode({self.node}, rank={self.rank})"


def init_rank(n: StoredNode) -> None:
    n.rank = INFINITE_RANK if zn.is_true_zone(n.node.zone) else 0


class PassedTree:
    """Discovery tree over the passed set, rooted at a virtual node."""

    def __init__(self, stats: SearchStats | None = None):
        self.root = StoredNode(None, -1)
        self.stats = stats if stats is not None else SearchStats()

    def live_ancestor(self, n: StoredNode) -> StoredNode:
        while n.removed:
            n = n.parent
        return n

    def insert(self, child: StoredNode, parent: StoredNode | None) -> None:
        parent = self.root if parent is None else self.live_ancestor(parent)
        child.parent = parent
        parent.children[child] = None

    def splice_remove(self, n: StoredNode) -> None:
        parent = n.parent
        del parent.children[n]
        for c in n.children:
            c.parent = parent
            parent.children[c] = None
        n.children = {}

    def max_rank_waiting(self, n: StoredNode):
        best = 0
        stack = [n]
        while stack:
            m = stack.pop()
            self.stats.visited_ranking += 1
            if m.in_waiting:
                if m.rank > best:
                    best = m.rank
            else:
                stack.extend(m.children)
        return best

    def nodes(self):
        stack = list(self.root.children)
        while stack:
            m = stack.pop()
            yield m
            stack.extend(m.children)


def rank_update(new: StoredNode, subsumed: StoredNode, tree: PassedTree) -> None:
    if subsumed.in_waiting:
        return
    new.rank = max(new.rank, 1 + tree.max_rank_waiting(subsumed))


class WaitingList:
    """Heap of waiting nodes ordered per policy; removal is lazy."""

    def __init__(self, strategy: Strategy, order: JointOrder | None = None):
        if strategy.needs_order and order is None:
            raise ValueError(f"strategy {strategy.value} needs a joint order")
        self.strategy = strategy
        self.order = order
        self._heap = []
        self._size = 0

    def key(self, n: StoredNode):
        s = self.strategy
        if s is Strategy.BFS:
            return (n.seq,)
        if s is Strategy.DFS:
            return (-n.seq,)
        if s is Strategy.RANK_BFS:
            return (-n.rank, n.seq)
        k = linear_key(self.order, n.node.state)
        if s is Strategy.WAITING:
            return (k, n.seq)
        if zn.is_true_zone(n.node.zone):
            return (0, (0, ()), n.seq)
        return (1, k, n.seq)

    def push(self, n: StoredNode) -> None:
        n.in_waiting = True
        heapq.heappush(self._heap, (self.key(n), n.seq, n))
        self._size += 1

    def discard(self, n: StoredNode) -> None:
        if n.in_waiting:
            n.in_waiting = False
            self._size -= 1

    def pop(self) -> StoredNode:
        while self._heap:
            _, _, n = heapq.heappop(self._heap)
            if n.in_waiting:
                n.in_waiting = False
                self._size -= 1
                return n
        raise IndexError("pop from empty waiting list")

    def __len__(self):
        return self._size

    def __iter__(self):
        return (n for _, _, n in self._heap if n.in_waiting)


def policy_select(waiting: WaitingList) -> StoredNode:
    return waiting.pop()


@dataclass
class SearchResult:
    answer: Answer
    stats: SearchStats
    passed: list = field(default_factory=list)  # final P, StoredNode objects
    strategy: Strategy | None = None

    @property
    def reachable(self) -> bool:
        return self.answer is Answer.REACHABLE


class Explorer:
    """One run of the reachability loop.

    ``observer(explorer)`` is called after every iteration, at a point where
    eviction has completed. With ``check_invariants`` the run asserts the
    structural invariants of the passed set and of the rank machinery as it
    goes; this is quadratic and meant for tests.
    """

    def __init__(self, net: Network, cfg: StrategyConfig, observer=None, check_invariants=False):
        self.net = net
        self.cfg = cfg
        strategy = cfg.strategy
        order = cfg.order
        if strategy.needs_order and order is None:
            order = joint_order(net, cfg.order_seed)
        self.order = order
        self.stats = SearchStats()
        self.waiting = WaitingList(strategy, order)
        self.passed = {}  # state -> list of StoredNode
        self.size = 0
        self.ranked = strategy is Strategy.RANK_BFS
        self.tree = PassedTree(self.stats) if self.ranked else None
        self.observer = observer
        self.check = check_invariants
        self._seq = count()

    def _store(self, n: StoredNode, parent: StoredNode | None) -> None:
        if self.ranked:
            self.tree.insert(n, parent)
        self.passed.setdefault(n.node.state, []).append(n)
        self.size += 1
        if self.size > self.stats.stored_max:
            self.stats.stored_max = self.size
        self.waiting.push(n)

    def _evict(self, n: StoredNode) -> None:
        self.waiting.discard(n)
        self.passed[n.node.state].remove(n)
        self.size -= 1
        n.removed = True
        if self.ranked:
            self.tree.splice_remove(n)
        if n.expanded:
            self.stats.mistakes += 1

    def _add_successor(self, succ: SymNode, parent: StoredNode) -> None:
        bucket = self.passed.get(succ.state, ())
        for b in bucket:
            if zn.includes(b.node.zone, succ.zone):
                return
        new = StoredNode(succ, next(self._seq))
        if self.ranked:
            init_rank(new)
        for s in [s for s in bucket if zn.includes(succ.zone, s.node.zone)]:
            if self.ranked:
                rank_update(new, s, self.tree)
            self._evict(s)
        if self.check and self.ranked and zn.is_true_zone(succ.zone) and new.rank != INFINITE_RANK:
            raise InvariantViolation(f"true-zone node {succ} has rank {new.rank}")
        self._store(new, parent)

    def run(self) -> SearchResult:
        root = StoredNode(initial_node(self.net), next(self._seq))
        if self.ranked:
            init_rank(root)
        self._store(root, None)
        answer = Answer.UNREACHABLE
        edge_seed = self.cfg.edge_seed
        while len(self.waiting):
            if self.check and self.ranked:
                top = max((w.rank for w in self.waiting), default=0)
            current = policy_select(self.waiting)
            if self.check and self.ranked and current.rank < top:
                raise InvariantViolation(f"popped rank {current.rank} below waiting maximum {top}")
            current.expanded = True
            self.stats.visited += 1
            if is_accepting(self.net, current.node.state):
                answer = Answer.REACHABLE
                break
            for succ in successors(self.net, current.node, edge_seed):
                self._add_successor(succ, current)
            if self.check:
                self.check_invariants()
            if self.observer is not None:
                self.observer(self)
        self.stats.stored_final = self.size
        if self.check:
            self.check_invariants(final=True)
        return SearchResult(answer, self.stats, self.stored_nodes(), self.cfg.strategy)

    def stored_nodes(self) -> list:
        return [n for bucket in self.passed.values() for n in bucket]

    def check_invariants(self, final=False) -> None:
        waiting = list(self.waiting)
        if len(waiting) != len(self.waiting):
            raise InvariantViolation("waiting list size out of sync")
        for w in waiting:
            if w.removed or w not in self.passed.get(w.node.state, ()):
                raise InvariantViolation(f"waiting node {w} is not in the passed set")
        for bucket in self.passed.values():
            for a in bucket:
                for b in bucket:
                    if a is not b and zn.includes(a.node.zone, b.node.zone):
                        raise InvariantViolation(f"{a} subsumes {b} in the passed set")
        if self.ranked:
            for w in waiting:
                if w.children:
                    raise InvariantViolation(f"waiting node {w} is not a leaf of the passed tree")
            in_tree = set(self.tree.nodes())
            if in_tree != set(self.stored_nodes()):
                raise InvariantViolation("passed tree and passed set disagree")
        if final and self.stats.stored_final > self.stats.stored_max:
            raise InvariantViolation("stored_final exceeds stored_max")


def check_reachability(net: Network, cfg: StrategyConfig | Strategy | str, **kwargs) -> SearchResult:
    if not isinstance(cfg, StrategyConfig):
        cfg = StrategyConfig(cfg)
    return Explorer(net, cfg, **kwargs).run()
