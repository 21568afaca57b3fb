"""Difference bound matrices over nonnegative clocks.

A bound ``x_i - x_j # c`` is stored as a single integer, ``2*c + 1`` for a
weak bound (``<=``) and ``2*c`` for a strict one (``<``). With this encoding
the natural integer order coincides with the tightness order on bounds, so
``min`` and ``<`` work directly. ``INF`` is the "no bound" sentinel and is
always strict.

A :class:`Dbm` is immutable and always canonical. Operators that can produce
an unsatisfiable zone return :data:`EMPTY` and accept it as input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

INF = 1 << 62
LE_ZERO = 1
LT_ZERO = 0

# Guard constants are checked against this so sums of two finite bounds
# never get anywhere near INF.
MAX_CONSTANT = 1 << 40

NO_BOUND = -math.inf  # LU value for a clock absent from the relevant guards


def bound(value, strict: bool = False) -> int:
    """Encode ``(value, <)`` or ``(value, <=)``; ``value`` may be ``math.inf``."""
    if value == math.inf:
        return INF
    value = int(value)
    if abs(value) > MAX_CONSTANT:
        raise OverflowError(f"bound constant {value} out of range")
    return 2 * value + (0 if strict else 1)


def bound_value(b: int):
    return math.inf if b == INF else b >> 1


def bound_is_strict(b: int) -> bool:
    return b == INF or not (b & 1)


def add_bounds(a: int, b: int) -> int:
    if a == INF or b == INF:
        return INF
    return ((a & ~1) + (b & ~1)) | (a & b & 1)


def format_bound(b: int) -> str:
    if b == INF:
        return "<inf"
    return ("<" if bound_is_strict(b) else "<=") + str(bound_value(b))


class _Empty:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return "EMPTY"

    def __reduce__(self):
        return (_Empty, ())


EMPTY = _Empty()


class Dbm:
    """Canonical, nonempty zone over ``dim - 1`` clocks.

    Index 0 is the reference clock. ``entries`` is the row-major flattening
    of the matrix; ``self[i, j]`` bounds ``x_i - x_j``.
    """

    __slots__ = ("dim", "entries", "_hash")

    def __init__(self, dim: int, entries: Sequence[int]):
        self.dim = dim
        self.entries = tuple(entries)
        self._hash = None

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.dim + j]

    def rows(self):
        n = self.dim
        return [list(self.entries[i * n:(i + 1) * n]) for i in range(n)]

    def __eq__(self, other):
        if not isinstance(other, Dbm):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.entries))
        return self._hash

    def __repr__(self):
        return f"Dbm({render(self)})"

    def __str__(self):
        return render(self)


def _closure(m: list, n: int) -> bool:
    """Floyd-Warshall on a flat matrix in place; False on a negative cycle."""
    for k in range(n):
        kn = k * n
        rowk = m[kn:kn + n]
        for i in range(n):
            dik = m[i * n + k]
            if dik == INF:
                continue
            base = i * n
            dik_c = dik & ~1
            dik_s = dik & 1
            for j in range(n):
                dkj = rowk[j]
                if dkj == INF:
                    continue
                s = (dik_c + (dkj & ~1)) | (dik_s & dkj)
                if s < m[base + j]:
                    m[base + j] = s
        if m[kn + k] < LE_ZERO:
            return False
    return all(m[i * n + i] >= LE_ZERO for i in range(n))


def canonicalize(d, dim: int | None = None):
    """Canonical form of ``d`` (a Dbm, a matrix of rows, or a flat list).

    Rows of nested lists are accepted so tests can build arbitrary,
    possibly non-canonical constraint systems. Returns EMPTY when the
    constraints are unsatisfiable over nonnegative valuations.
    """
    if d is EMPTY:
        return EMPTY
    if isinstance(d, Dbm):
        n, m = d.dim, list(d.entries)
    elif dim is None:
        rows = [list(r) for r in d]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("DBM must be square")
        m = [b for r in rows for b in r]
    else:
        n, m = dim, list(d)
    if n < 1:
        raise ValueError("DBM dimension must be >= 1")
    for i in range(n):
        m[i * n + i] = min(m[i * n + i], LE_ZERO)
        m[i] = min(m[i], LE_ZERO)  # clocks are nonnegative
    if not _closure(m, n):
        return EMPTY
    return Dbm(n, m)


def universal_zone(nclocks: int) -> Dbm:
    n = nclocks + 1
    m = [INF] * (n * n)
    for i in range(n):
        m[i] = LE_ZERO
        m[i * n + i] = LE_ZERO
    return Dbm(n, m)


def initial_zone(nclocks: int) -> Dbm:
    """Delay closure of the origin: all clocks equal and nonnegative."""
    if nclocks < 1:
        raise ValueError("need at least one clock")
    n = nclocks + 1
    m = [LE_ZERO] * (n * n)
    for i in range(1, n):
        m[i * n] = INF
    return Dbm(n, m)


def _tighten(m: list, n: int, i: int, j: int, b: int) -> bool:
    """Add ``x_i - x_j <= b`` to canonical ``m`` and restore closure in O(n^2)."""
    if b >= m[i * n + j]:
        return True
    if add_bounds(b, m[j * n + i]) < LE_ZERO:
        return False
    m[i * n + j] = b
    col_i = [m[p * n + i] for p in range(n)]
    row_j = m[j * n:j * n + n]
    for p in range(n):
        via = add_bounds(col_i[p], b)
        if via == INF:
            continue
        base = p * n
        for q in range(n):
            s = add_bounds(via, row_j[q])
            if s < m[base + q]:
                m[base + q] = s
    return True


_OPS = ("<", "<=", "=", ">=", ">")


def _atom_bounds(op: str, constant: int):
    """(upper, lower) encoded bounds for ``x op constant``; None where absent."""
    if op not in _OPS:
        raise ValueError(f"unknown comparison {op!r}")
    if constant < 0:
        raise ValueError("guard constants are natural numbers")
    upper = lower = None
    if op in ("<", "<="):
        upper = bound(constant, strict=(op == "<"))
    elif op in (">", ">="):
        lower = bound(-constant, strict=(op == ">"))
    else:
        upper = bound(constant)
        lower = bound(-constant)
    return upper, lower


def constrain(d, clock: int, op: str, constant: int):
    """Intersect with ``x_clock op constant``; clocks are numbered from 1."""
    if d is EMPTY:
        return EMPTY
    n = d.dim
    if not 1 <= clock < n:
        raise IndexError(f"clock index {clock} out of range for dim {n}")
    upper, lower = _atom_bounds(op, constant)
    m = list(d.entries)
    if upper is not None and not _tighten(m, n, clock, 0, upper):
        return EMPTY
    if lower is not None and not _tighten(m, n, 0, clock, lower):
        return EMPTY
    return Dbm(n, m)


def reset(d, clocks: Iterable[int]):
    if d is EMPTY:
        return EMPTY
    n = d.dim
    m = list(d.entries)
    for x in clocks:
        if not 1 <= x < n:
            raise IndexError(f"clock index {x} out of range for dim {n}")
        for j in range(n):
            m[x * n + j] = m[j]
            m[j * n + x] = m[j * n]
        m[x * n + x] = LE_ZERO
    return Dbm(n, m)


def delay(d):
    if d is EMPTY:
        return EMPTY
    n = d.dim
    m = list(d.entries)
    for i in range(1, n):
        m[i * n] = INF
    return Dbm(n, m)


@dataclass(frozen=True)
class LUBounds:
    """Per-clock maximal lower (``l``) and upper (``u``) guard constants.

    Tuples are indexed by clock number minus one; ``NO_BOUND`` stands for
    minus infinity.
    """

    l: tuple
    u: tuple


def _lower_exceeds(b0x: int, limit) -> bool:
    # D[0][x] < (-limit, <=); against minus infinity the rule always fires
    if limit == NO_BOUND:
        return True
    return b0x < bound(-limit)


def extrapolate_lu_plus(d, lu: LUBounds):
    """Extra+_LU widening followed by re-canonicalization.

    Diagonal entries are left alone. A lower bound that exceeds
    ``U = -inf`` becomes ``x >= 0`` rather than ``x > -inf``.
    """
    if d is EMPTY:
        return EMPTY
    n = d.dim
    if len(lu.l) != n - 1 or len(lu.u) != n - 1:
        raise ValueError("LU bounds do not match DBM dimension")
    e = d.entries
    L = (0,) + tuple(lu.l)
    U = (0,) + tuple(lu.u)
    above_l = [False] + [_lower_exceeds(e[x], L[x]) for x in range(1, n)]
    above_u = [False] + [_lower_exceeds(e[x], U[x]) for x in range(1, n)]
    m = list(e)
    for j in range(1, n):
        if above_u[j]:
            m[j] = LE_ZERO if U[j] == NO_BOUND else bound(-U[j], strict=True)
    for i in range(1, n):
        base = i * n
        li = L[i]
        cut = INF if li == NO_BOUND else bound(li)
        for j in range(n):
            if i == j:
                continue
            b = e[base + j]
            if b == INF:
                continue
            if above_l[i] or b > cut or (j and above_u[j]):
                m[base + j] = INF
    out = canonicalize(m, n)
    assert out is not EMPTY, "extrapolation cannot empty a zone"
    return out


def includes(big: Dbm, small: Dbm) -> bool:
    """True iff ``small`` is a subset of ``big``."""
    if small is EMPTY:
        return True
    if big is EMPTY:
        return False
    if big.dim != small.dim:
        raise ValueError(f"dimension mismatch: {big.dim} vs {small.dim}")
    return all(s <= b for s, b in zip(small.entries, big.entries))


def is_true_zone(d) -> bool:
    if d is EMPTY:
        return False
    n = d.dim
    e = d.entries
    for i in range(n):
        for j in range(n):
            b = e[i * n + j]
            if i == j or i == 0:
                if b != LE_ZERO:
                    return False
            elif b != INF:
                return False
    return True


def valuation_in_zone(v: Sequence, d) -> bool:
    """Membership of a clock valuation (values for clocks 1..dim-1, in order)."""
    if d is EMPTY:
        return False
    n = d.dim
    if len(v) != n - 1:
        raise ValueError("valuation size does not match DBM")
    vals = (Fraction(0),) + tuple(Fraction(x) for x in v)
    if any(x < 0 for x in vals):
        return False
    e = d.entries
    for i in range(n):
        for j in range(n):
            b = e[i * n + j]
            if b == INF:
                continue
            diff = vals[i] - vals[j]
            c = b >> 1
            if diff > c or (diff == c and not (b & 1)):
                return False
    return True


def render(d, clock_names: Sequence[str] | None = None) -> str:
    """Conjunction string such as ``1<y<=5 && x-y<2``; ``true`` if unconstrained."""
    if d is EMPTY:
        return "false"
    n = d.dim
    names = list(clock_names) if clock_names is not None else [f"x{i}" for i in range(1, n)]
    if len(names) != n - 1:
        raise ValueError("clock names do not match DBM")
    names = [""] + names
    parts = []
    for i in range(1, n):
        lo, hi = d[0, i], d[i, 0]
        if lo == LE_ZERO and hi == LE_ZERO:
            parts.append(f"{names[i]}=0")
            continue
        lo_txt = None
        if lo != LE_ZERO:
            lo_txt = f"{-bound_value(lo)}{'<' if bound_is_strict(lo) else '<='}"
        hi_txt = None if hi == INF else f"{'<' if bound_is_strict(hi) else '<='}{bound_value(hi)}"
        if lo_txt and hi_txt:
            if not bound_is_strict(lo) and not bound_is_strict(hi) and -bound_value(lo) == bound_value(hi):
                parts.append(f"{names[i]}={bound_value(hi)}")
            else:
                parts.append(f"{lo_txt}{names[i]}{hi_txt}")
        elif lo_txt:
            parts.append(f"{names[i]}{'>' if bound_is_strict(lo) else '>='}{-bound_value(lo)}")
        elif hi_txt:
            parts.append(f"{names[i]}{hi_txt}")
    for i in range(1, n):
        for j in range(i + 1, n):
            up, down = d[i, j], d[j, i]
            diff = f"{names[i]}-{names[j]}"
            if up != INF and down != INF and not bound_is_strict(up) and not bound_is_strict(down) \
                    and bound_value(up) == -bound_value(down):
                parts.append(f"{diff}={bound_value(up)}")
                continue
            if down != INF:
                parts.append(f"{diff}{'>' if bound_is_strict(down) else '>='}{-bound_value(down)}")
            if up != INF:
                parts.append(f"{diff}{format_bound(up)}")
    return " && ".join(parts) if parts else "true"
