"""Model text format, built-in model generators and stats reports.

Text format, one declaration per line, fields separated by ``:``::

    system:<name>
    clock:<name>
    process:<name>
    location:<process>:<name>[:initial][:accepting]
    edge:<process>:<src>:<dst>:<action>[:guard=<atom>(&&<atom>)*][:reset=<clock>(,<clock>)*]
    sync:<process>@<action>:<process>@<action>

Atoms are ``<clock><op><nat>`` with ``op`` one of ``< <= = >= >``. Lines
starting with ``#`` are comments.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field

from .automaton import Constraint, Edge, ModelError, Network, Sync, SyncEnd, TimedAutomaton
from .symgraph import oracle_enumerate
from .zone import includes

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")
_ATOM = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_.]*)\s*(<=|>=|<|>|=)\s*(\d+)\s*\Z")


class ModelSyntaxError(ModelError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _fields(raw: str):
    """Split on ':' keeping the 1-based column where each field starts."""
    out = []
    col = 1
    for part in raw.split(":"):
        stripped = part.strip()
        lead = len(part) - len(part.lstrip())
        out.append((stripped, col + lead))
        col += len(part) + 1
    return out


class _ProcBuilder:
    def __init__(self, name):
        self.name = name
        self.locations = []
        self.initial = []
        self.accepting = set()
        self.edges = []  # (src, dst, action, guard, resets), names unresolved


def parse_model(text: str) -> Network:
    name = None
    clocks = []
    procs = {}
    syncs = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = _fields(raw)

        def err(i, msg):
            col = fields[i][1] if i < len(fields) else len(raw) + 1
            return ModelSyntaxError(lineno, col, msg)

        def ident(i, what):
            if i >= len(fields):
                raise err(i, f"missing {what}")
            tok = fields[i][0]
            if not _NAME.match(tok):
                raise err(i, f"invalid {what} {tok!r}")
            return tok

        def proc(i):
            pname = ident(i, "process name")
            if pname not in procs:
                raise err(i, f"unknown process {pname!r}")
            return procs[pname]

        kind = fields[0][0]
        if kind == "system":
            if len(fields) != 2:
                raise err(2, "expected system:<name>")
            if name is not None:
                raise err(0, "duplicate system declaration")
            name = ident(1, "system name")
        elif kind == "clock":
            if len(fields) != 2:
                raise err(2, "expected clock:<name>")
            c = ident(1, "clock name")
            if c in clocks:
                raise err(1, f"duplicate clock {c!r}")
            clocks.append(c)
        elif kind == "process":
            if len(fields) != 2:
                raise err(2, "expected process:<name>")
            p = ident(1, "process name")
            if p in procs:
                raise err(1, f"duplicate process {p!r}")
            procs[p] = _ProcBuilder(p)
        elif kind == "location":
            p = proc(1)
            loc = ident(2, "location name")
            if loc in p.locations:
                raise err(2, f"duplicate location {loc!r} in process {p.name}")
            flags = set()
            for i in range(3, len(fields)):
                flag = fields[i][0]
                if flag not in ("initial", "accepting") or flag in flags:
                    raise err(i, f"unexpected location attribute {flag!r}")
                flags.add(flag)
            if "initial" in flags:
                if p.initial:
                    raise err(3, f"process {p.name} has two initial locations")
                p.initial.append(len(p.locations))
            if "accepting" in flags:
                p.accepting.add(len(p.locations))
            p.locations.append(loc)
        elif kind == "edge":
            p = proc(1)
            src = ident(2, "source location")
            dst = ident(3, "target location")
            action = ident(4, "action")
            guard, resets = [], []
            seen = set()
            for i in range(5, len(fields)):
                tok = fields[i][0]
                key, eq, val = tok.partition("=")
                key = key.strip()
                if not eq or key not in ("guard", "reset") or key in seen:
                    raise err(i, f"unexpected edge attribute {tok!r}")
                seen.add(key)
                if key == "guard":
                    if val.strip():
                        for atom in val.split("&&"):
                            m = _ATOM.match(atom)
                            if not m:
                                raise err(i, f"malformed guard atom {atom.strip()!r}")
                            guard.append((m.group(1), m.group(2), int(m.group(3)), i))
                else:
                    if val.strip():
                        for c in val.split(","):
                            c = c.strip()
                            if not _NAME.match(c):
                                raise err(i, f"invalid clock name {c!r}")
                            resets.append((c, i))
            p.edges.append((lineno, fields, src, dst, action, guard, resets))
        elif kind == "sync":
            if len(fields) != 3:
                raise err(min(len(fields), 3), "expected sync:<process>@<action>:<process>@<action>")
            ends = []
            for i in (1, 2):
                pname, at, action = fields[i][0].partition("@")
                if not at or not _NAME.match(pname.strip()) or not _NAME.match(action.strip()):
                    raise err(i, f"malformed sync end {fields[i][0]!r}")
                if pname.strip() not in procs:
                    raise err(i, f"unknown process {pname.strip()!r}")
                ends.append((pname.strip(), action.strip(), i))
            if ends[0][0] == ends[1][0]:
                raise err(2, "sync pair within a single process")
            syncs.append((lineno, fields, ends))
        else:
            raise err(0, f"unknown declaration {kind!r}")

    if name is None:
        raise ModelError("missing system declaration")
    if not procs:
        raise ModelError("no process declared")

    order = list(procs)
    clock_index = {c: k for k, c in enumerate(clocks)}
    processes = []
    for p in procs.values():
        if not p.locations:
            raise ModelError(f"process {p.name} has no locations")
        if not p.initial:
            raise ModelError(f"process {p.name} has no initial location")
        loc_index = {q: k for k, q in enumerate(p.locations)}
        edges = []
        for lineno, fields, src, dst, action, guard, resets in p.edges:
            for pos, loc in ((2, src), (3, dst)):
                if loc not in loc_index:
                    raise ModelSyntaxError(lineno, fields[pos][1], f"unknown location {loc!r} in process {p.name}")
            g = []
            for c, op, k, i in guard:
                if c not in clock_index:
                    raise ModelSyntaxError(lineno, fields[i][1], f"unknown clock {c!r}")
                g.append(Constraint(clock_index[c], op, k))
            r = []
            for c, i in resets:
                if c not in clock_index:
                    raise ModelSyntaxError(lineno, fields[i][1], f"unknown clock {c!r}")
                if clock_index[c] not in r:
                    r.append(clock_index[c])
            edges.append(Edge(loc_index[src], loc_index[dst], action, tuple(g), tuple(r)))
        processes.append(TimedAutomaton(p.name, tuple(p.locations), p.initial[0],
                                        frozenset(p.accepting), tuple(edges)))
    sync_objs = []
    for lineno, fields, ends in syncs:
        pair = []
        for pname, action, i in ends:
            k = order.index(pname)
            if action not in processes[k].actions:
                raise ModelSyntaxError(lineno, fields[i][1], f"unknown action {action!r} in process {pname}")
            pair.append(SyncEnd(k, action))
        sync_objs.append(Sync(pair[0], pair[1]))
    return Network(name, tuple(clocks), tuple(processes), tuple(sync_objs))


def load_model(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def render_model(net: Network) -> str:
    lines = [f"system:{net.name}"]
    lines += [f"clock:{c}" for c in net.clocks]
    for p in net.processes:
        lines.append(f"process:{p.name}")
    for p in net.processes:
        for k, q in enumerate(p.locations):
            line = f"location:{p.name}:{q}"
            if k == p.initial:
                line += ":initial"
            if k in p.accepting:
                line += ":accepting"
            lines.append(line)
        for e in p.edges:
            line = f"edge:{p.name}:{p.locations[e.source]}:{p.locations[e.target]}:{e.action}"
            if e.guard:
                line += ":guard=" + "&&".join(f"{net.clocks[c.clock]}{c.op}{c.constant}" for c in e.guard)
            if e.resets:
                line += ":reset=" + ",".join(net.clocks[x] for x in e.resets)
            lines.append(line)
    for s in net.syncs:
        a, b = s.left, s.right
        lines.append(f"sync:{net.processes[a.process].name}@{a.action}:{net.processes[b.process].name}@{b.action}")
    return "\n".join(lines) + "\n"


# -- generators ---------------------------------------------------------------

def generate_racing(short_first: bool = False) -> Network:
    """The four-location racing automaton over clock ``y``.

    ``short_first`` declares the guarded shortcut q1->q3 before q1->q2,
    which is the unlucky order for plain BFS.
    """
    y = 0
    to_q2 = Edge(0, 1, "a")
    shortcut = Edge(0, 2, "c", (Constraint(y, ">", 1),))
    edges = [to_q2, Edge(1, 2, "b"), shortcut]
    if short_first:
        edges = [shortcut, to_q2, Edge(1, 2, "b")]
    edges += [Edge(2, 3, "d", (Constraint(y, "<=", 5),)), Edge(3, 0, "e", (), (y,))]
    p = TimedAutomaton("A", ("q1", "q2", "q3", "q4"), 0, frozenset(), tuple(edges))
    return Network("racing", ("y",), (p,))


def generate_blowup(n: int) -> Network:
    """Chain of ``n`` diamonds; only the longest path yields the biggest zone.

    Segment ``i`` goes from q_{2i-1} to q_{2i+1}, either directly, which is
    only allowed while ``x_i = 0``, or through q_{2i} where time may pass.
    Both routes reset ``x_{i+1}`` (segment ``n`` resets nothing), so at
    q_{2n+1} the clocks satisfy ``x_1 >= x_2 >= ... >= x_n`` with ``x_i = x_{i+1}``
    exactly when segment ``i`` was short. That yields 2^n pairwise distinct
    zones, all contained in the one of the all-long path. The short edge is
    declared first, so BFS reaches every q_{2i+1} through a small zone first.
    """
    if n < 1:
        raise ValueError("blowup needs n >= 1")
    locs = tuple(f"q{k}" for k in range(1, 2 * n + 2)) + ("qf",)
    edges = []
    for i in range(1, n + 1):
        x = i - 1
        start, mid, end = 2 * i - 2, 2 * i - 1, 2 * i
        nxt = (i,) if i < n else ()
        edges.append(Edge(start, end, f"s{i}", (Constraint(x, "=", 0),), nxt))
        edges.append(Edge(start, mid, f"l{i}", (), nxt))
        edges.append(Edge(mid, end, f"m{i}"))
    edges.append(Edge(2 * n, len(locs) - 1, "f", (Constraint(0, "<", 0),)))
    p = TimedAutomaton("B", locs, 0, frozenset({len(locs) - 1}), tuple(edges))
    return Network(f"blowup{n}", tuple(f"x{i}" for i in range(1, n + 1)), (p,))


FISCHER_LOCATIONS = ("A", "req", "wait", "cs")


def generate_fischer(n: int, lower_guard: str = ">", write_bound: int = 1, read_bound: int = 2) -> Network:
    """Fischer's mutual exclusion protocol for ``n`` processes.

    Each process P_i has clock ``x_i`` and locations A, req, wait, cs:

    * A -> req when id = 0, reset x_i
    * req -> wait if x_i <= write_bound, set id := i, reset x_i
    * wait -> req when id = 0, reset x_i
    * wait -> cs if x_i > read_bound and id = i
    * cs -> A, set id := 0

    The shared variable ``id`` is a separate process with locations
    ``id0 .. idn`` synchronizing with each P_i. The accepting states are
    those with P_1 and P_2 both in cs; every location of the other
    processes is accepting so that only those two components matter.

    ``lower_guard=">="`` with ``read_bound=0`` gives the classic broken
    variant where a process may enter without waiting.
    """
    if n < 2:
        raise ValueError("fischer needs n >= 2")
    if lower_guard not in (">", ">="):
        raise ValueError("lower_guard must be '>' or '>='")
    procs = []
    syncs = []
    lock_edges = []
    for i in range(1, n + 1):
        x = i - 1
        edges = (
            Edge(0, 1, "try", (), (x,)),
            Edge(1, 2, "set", (Constraint(x, "<=", write_bound),), (x,)),
            Edge(2, 1, "retry", (), (x,)),
            Edge(2, 3, "enter", (Constraint(x, lower_guard, read_bound),)),
            Edge(3, 0, "exit"),
        )
        accepting = frozenset({3}) if i <= 2 else frozenset(range(4))
        procs.append(TimedAutomaton(f"P{i}", FISCHER_LOCATIONS, 0, accepting, edges))
        lock_edges.append(Edge(0, 0, f"try{i}"))
        lock_edges.append(Edge(0, 0, f"retry{i}"))
        lock_edges.append(Edge(i, i, f"enter{i}"))
        for k in range(n + 1):
            lock_edges.append(Edge(k, i, f"set{i}"))
            lock_edges.append(Edge(k, 0, f"exit{i}"))
        for act in ("try", "set", "retry", "enter", "exit"):
            syncs.append(Sync(SyncEnd(i - 1, act), SyncEnd(n, f"{act}{i}")))
    lock_locs = tuple(f"id{k}" for k in range(n + 1))
    procs.append(TimedAutomaton("id", lock_locs, 0, frozenset(range(n + 1)), tuple(lock_edges)))
    name = f"fischer{n}" if lower_guard == ">" and read_bound == 2 and write_bound == 1 else f"fischer{n}_mutant"
    return Network(name, tuple(f"x{i}" for i in range(1, n + 1)), tuple(procs), tuple(syncs))


def generate_fischer_mutant(n: int = 2) -> Network:
    """Fischer with the read delay weakened to ``x_i >= 0``."""
    return generate_fischer(n, lower_guard=">=", read_bound=0)


def generate_random(seed, max_locations: int = 6, max_clocks: int = 2,
                    max_processes: int = 2, max_constant: int = 4) -> Network:
    """Small random network; ``max_locations`` bounds the total over processes."""
    rng = random.Random(seed)
    nproc = rng.randint(1, max_processes)
    nclocks = rng.randint(1, max_clocks)
    clocks = tuple(f"c{k}" for k in range(nclocks))
    per_proc = max(1, max_locations // nproc)
    ops = ("<", "<=", "=", ">=", ">")
    procs = []
    for p in range(nproc):
        nloc = rng.randint(1, per_proc)
        edges = []
        for k in range(rng.randint(1, 2 * nloc + 1)):
            guard = tuple(Constraint(rng.randrange(nclocks), rng.choice(ops), rng.randint(0, max_constant))
                          for _ in range(rng.choice((0, 0, 1, 1, 2))))
            resets = tuple(sorted(rng.sample(range(nclocks), rng.randint(0, nclocks))))
            edges.append(Edge(rng.randrange(nloc), rng.randrange(nloc), f"a{k}", guard, resets))
        accepting = frozenset(q for q in range(nloc) if rng.random() < 0.25)
        procs.append(TimedAutomaton(f"R{p}", tuple(f"l{q}" for q in range(nloc)), 0, accepting, tuple(edges)))
    syncs = []
    if nproc == 2 and rng.random() < 0.6:
        a = rng.choice(procs[0].edges).action
        b = rng.choice(procs[1].edges).action
        syncs.append(Sync(SyncEnd(0, a), SyncEnd(1, b)))
    return Network(f"random{seed}", clocks, tuple(procs), tuple(syncs))


GENERATORS = {
    "racing": (generate_racing, False),
    "racing_short": (lambda: generate_racing(short_first=True), False),
    "blowup": (generate_blowup, True),
    "fischer": (generate_fischer, True),
    "fischer_mutant": (generate_fischer_mutant, True),
    "random": (generate_random, True),
}


def generate(spec: str) -> Network:
    """Build a model from ``NAME`` or ``NAME:N``, e.g. ``blowup:4``."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower().replace("-", "_")
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r} (known: {', '.join(GENERATORS)})")
    fn, takes_n = GENERATORS[name]
    if not takes_n:
        if arg:
            raise ValueError(f"generator {name!r} takes no parameter")
        return fn()
    try:
        n = int(arg)
    except ValueError:
        raise ValueError(f"generator {name!r} needs an integer parameter, e.g. {name}:3") from None
    return fn(n)


# -- stats reports --------------------------------------------------------------

COLUMNS = ("visited", "mistakes", "stored_max", "stored_final", "visited_ranking")


@dataclass
class StatsReport:
    model: str
    rows: list = field(default_factory=list)  # dicts: strategy, COLUMNS..., answer
    seeds: dict = field(default_factory=dict)
    oracle: dict | None = None

    def add(self, strategy: str, stats, answer: str) -> None:
        row = {"strategy": strategy}
        row.update(stats.as_dict())
        row["answer"] = answer
        self.rows.append(row)

    def consistent(self) -> bool:
        return len({r["answer"] for r in self.rows}) <= 1


def emit_stats(report: StatsReport, fmt: str = "table") -> str:
    if fmt == "json":
        doc = {
            "model": report.model,
            "seeds": report.seeds,
            "rows": [{k: r[k] for k in ("strategy",) + COLUMNS + ("answer",)} for r in report.rows],
        }
        if report.oracle is not None:
            doc["oracle"] = report.oracle
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    header = ("strategy",) + COLUMNS + ("answer",)
    cells = [[str(r[h]) for h in header] for r in report.rows]
    widths = [max([len(h)] + [len(c[k]) for c in cells]) for k, h in enumerate(header)]

    def line(values):
        out = []
        for k, v in enumerate(values):
            out.append(v.rjust(widths[k]) if header[k] in COLUMNS else v.ljust(widths[k]))
        return " | ".join(out).rstrip()

    seeds = ", ".join(f"{k}={v}" for k, v in report.seeds.items())
    text = [f"model: {report.model}" + (f"  ({seeds})" if seeds else ""), line(header),
            "-+-".join("-" * w for w in widths)]
    text += [line(c) for c in cells]
    if report.oracle is not None:
        text.append("oracle: " + ", ".join(f"{k}={v}" for k, v in report.oracle.items()))
    return "\n".join(text) + "\n"


def uncovered_nodes(oracle_nodes, passed) -> list:
    """Oracle nodes not included in any node of a final passed set."""
    by_state = {}
    for n in passed:
        by_state.setdefault(n.node.state, []).append(n.node.zone)
    out = []
    for m in oracle_nodes:
        if not any(includes(z, m.zone) for z in by_state.get(m.state, ())):
            out.append(m)
    return out


def oracle_check(net: Network, results, node_limit: int = 1_000_000) -> dict:
    """Cross-check search results against exhaustive enumeration.

    ``results`` is a list of ``SearchResult``. Coverage is only checked for
    runs that explored everything, i.e. ended unreachable.
    """
    reachable, nodes = oracle_enumerate(net, node_limit)
    expected = "reachable" if reachable else "unreachable"
    answers_ok = all(r.answer.value == expected for r in results)
    missing = 0
    for r in results:
        if r.answer.value == "unreachable":
            missing += len(uncovered_nodes(nodes, r.passed))
    return {
        "answer": expected,
        "nodes": len(nodes),
        "answers": "ok" if answers_ok else "mismatch",
        "coverage": "ok" if missing == 0 else f"{missing} uncovered",
    }
