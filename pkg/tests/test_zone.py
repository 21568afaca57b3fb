from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from zonereach import zone as zn
from zone_gen import MAXC, OPS, grid, holds, lu_bounds_for, satisfies, valuations, zones

MANY = settings(max_examples=1000, deadline=None)


def with_valuation(n=None):
    return st.integers(1, 3).flatmap(
        lambda k: st.tuples(zones(nclocks=k), valuations(k))) if n is None else \
        st.tuples(zones(nclocks=n), valuations(n))


# -- encoding -------------------------------------------------------------------

def test_bound_encoding_orders_by_tightness():
    assert zn.bound(3, strict=True) < zn.bound(3) < zn.bound(4, strict=True)
    assert zn.bound(0) == zn.LE_ZERO
    assert zn.bound(0, strict=True) == zn.LT_ZERO
    assert zn.bound(-2) < zn.bound(-1, strict=True)


@pytest.mark.parametrize("a,b,expected", [
    ((2, False), (3, False), (5, False)),
    ((2, True), (3, False), (5, True)),
    ((-2, True), (-3, True), (-5, True)),
])
def test_add_bounds(a, b, expected):
    assert zn.add_bounds(zn.bound(*a), zn.bound(*b)) == zn.bound(*expected)


def test_add_with_infinity():
    assert zn.add_bounds(zn.INF, zn.bound(-7)) == zn.INF
    assert zn.format_bound(zn.INF) == "<inf"
    assert zn.format_bound(zn.bound(4, True)) == "<4"


# -- constructors and examples --------------------------------------------------

def test_initial_zone_is_diagonal():
    z = zn.initial_zone(2)
    assert zn.render(z, ["x", "y"]) == "x-y=0"
    assert zn.valuation_in_zone((3, 3), z)
    assert not zn.valuation_in_zone((3, 2), z)
    with pytest.raises(ValueError):
        zn.initial_zone(0)


def test_true_zone():
    assert zn.is_true_zone(zn.universal_zone(3))
    assert zn.is_true_zone(zn.initial_zone(1))
    assert not zn.is_true_zone(zn.initial_zone(2))
    assert not zn.is_true_zone(zn.EMPTY)


def test_constrain_then_render():
    z = zn.constrain(zn.initial_zone(2), 2, ">", 1)
    z = zn.reset(z, [1])
    z = zn.constrain(zn.delay(z), 2, "<=", 5)
    assert zn.render(z, ["x", "y"]) == "x<4 && 1<y<=5 && x-y>=-5 && x-y<-1"


def test_unsatisfiable_constraint_gives_empty():
    z = zn.constrain(zn.universal_zone(1), 1, "<", 2)
    assert zn.constrain(z, 1, ">", 3) is zn.EMPTY
    assert zn.constrain(z, 1, ">=", 2) is zn.EMPTY
    assert not zn.EMPTY
    assert zn.render(zn.EMPTY) == "false"


def test_canonicalize_detects_negative_cycle():
    rows = [[zn.LE_ZERO, zn.bound(-3)], [zn.bound(2), zn.LE_ZERO]]
    assert zn.canonicalize(rows) is zn.EMPTY


def test_canonicalize_tightens():
    inf = zn.INF
    rows = [[zn.LE_ZERO, zn.LE_ZERO, inf],
            [zn.bound(2), zn.LE_ZERO, zn.bound(0)],
            [inf, zn.bound(1), zn.LE_ZERO]]
    z = zn.canonicalize(rows)
    assert z[2, 0] == zn.bound(3)
    assert z[0, 2] == zn.LE_ZERO


def test_includes_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        zn.includes(zn.universal_zone(1), zn.universal_zone(2))


def test_operations_check_clock_range():
    with pytest.raises(IndexError):
        zn.constrain(zn.universal_zone(1), 2, "<", 1)
    with pytest.raises(IndexError):
        zn.reset(zn.universal_zone(1), [0])
    with pytest.raises(ValueError):
        zn.constrain(zn.universal_zone(1), 1, "!=", 1)


def test_extrapolation_of_racing_zones():
    lu = zn.LUBounds((zn.NO_BOUND, 1), (zn.NO_BOUND, 5))
    names = ["x", "y"]
    z = zn.constrain(zn.constrain(zn.universal_zone(2), 2, ">", 1), 2, "<=", 5)
    assert zn.render(z, names) == "1<y<=5 && x-y>=-5"
    assert zn.render(zn.extrapolate_lu_plus(z, lu), names) == "y>1"
    lu2 = zn.LUBounds((zn.NO_BOUND, 1), (zn.NO_BOUND, 0))
    assert zn.render(zn.extrapolate_lu_plus(z, lu2), names) == "y>0"
    lu3 = zn.LUBounds((zn.NO_BOUND, zn.NO_BOUND), (zn.NO_BOUND, zn.NO_BOUND))
    assert zn.is_true_zone(zn.extrapolate_lu_plus(z, lu3))


def test_extrapolation_drops_diagonal_when_lower_bound_exceeds_u():
    lu = zn.LUBounds((6, 6), (4, 6))
    base = zn.canonicalize([[zn.LE_ZERO] * 3, [zn.INF, zn.LE_ZERO, zn.INF],
                            [zn.INF, zn.bound(0), zn.LE_ZERO]])
    z = zn.constrain(base, 1, ">", 5)
    assert zn.render(zn.extrapolate_lu_plus(z, lu)) == "x1>4"


def test_extrapolation_is_not_monotone():
    # z1 is inside z2 but loses a diagonal constraint that z2 keeps
    lu = zn.LUBounds((10, 10), (4, 10))
    z2 = zn.canonicalize([[zn.LE_ZERO] * 3, [zn.INF, zn.LE_ZERO, zn.INF],
                          [zn.INF, zn.bound(0), zn.LE_ZERO]])
    z1 = zn.constrain(z2, 1, ">", 5)
    assert zn.includes(z2, z1)
    e1, e2 = zn.extrapolate_lu_plus(z1, lu), zn.extrapolate_lu_plus(z2, lu)
    assert not zn.includes(e2, e1)


def test_extrapolation_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        zn.extrapolate_lu_plus(zn.universal_zone(2), zn.LUBounds((1,), (1,)))


def test_render_with_equalities():
    z = zn.constrain(zn.reset(zn.universal_zone(2), [1]), 2, "=", 3)
    assert zn.render(z, ["a", "b"]) == "a=0 && b=3 && a-b=-3"
    assert zn.render(zn.universal_zone(2)) == "true"


def test_dbm_value_semantics():
    a = zn.constrain(zn.universal_zone(2), 1, "<", 3)
    b = zn.constrain(zn.universal_zone(2), 1, "<", 3)
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
    assert a.rows()[1][0] == zn.bound(3, strict=True)


# -- properties -----------------------------------------------------------------

@MANY
@given(zones())
def test_canonicalize_idempotent(z):
    assert zn.canonicalize(z) == z
    assert zn.canonicalize(zn.canonicalize(list(z.entries), z.dim)) == z


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(st.one_of(st.just(zn.INF), st.builds(zn.bound, st.integers(-MAXC, MAXC), st.booleans())),
             min_size=(n + 1) ** 2, max_size=(n + 1) ** 2),
    valuations(n))))
def test_canonicalize_preserves_solutions(case):
    cells, v = case
    dim = len(v) + 1
    z = zn.canonicalize(cells, dim)
    expected = satisfies(v, cells, dim)
    assert zn.valuation_in_zone(v, z) == expected
    if z is not zn.EMPTY:
        assert satisfies(v, z.entries, dim) == expected


@MANY
@given(zones(nclocks=2))
def test_includes_reflexive(z):
    assert zn.includes(z, z)


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), zones(nclocks=n))))
def test_includes_antisymmetric(pair):
    a, b = pair
    if zn.includes(a, b) and zn.includes(b, a):
        assert a == b


@MANY
@given(zones(nclocks=2), st.lists(st.tuples(st.integers(1, 2), st.sampled_from(OPS), st.integers(0, MAXC)),
                                  min_size=2, max_size=4))
def test_includes_transitive_on_chains(z, atoms):
    chain = [z]
    for x, op, c in atoms:
        nz = zn.constrain(chain[-1], x, op, c)
        if nz is zn.EMPTY:
            break
        chain.append(nz)
    for i in range(len(chain)):
        for j in range(i, len(chain)):
            assert zn.includes(chain[i], chain[j])


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), zones(nclocks=n), valuations(n))))
def test_includes_agrees_with_sampling(case):
    big, small, v = case
    if zn.includes(big, small) and zn.valuation_in_zone(v, small):
        assert zn.valuation_in_zone(v, big)


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), lu_bounds_for(n))))
def test_extrapolation_extensive(case):
    z, lu = case
    assert zn.includes(zn.extrapolate_lu_plus(z, lu), z)


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), lu_bounds_for(n))))
def test_extrapolation_idempotent(case):
    z, lu = case
    once = zn.extrapolate_lu_plus(z, lu)
    assert zn.extrapolate_lu_plus(once, lu) == once


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), valuations(n))),
       st.integers(1, 3), st.sampled_from(OPS), st.integers(0, MAXC))
def test_constrain_matches_sampling(case, x, op, c):
    z, v = case
    assume(x <= z.dim - 1)
    got = zn.valuation_in_zone(v, zn.constrain(z, x, op, c))
    assert got == (zn.valuation_in_zone(v, z) and holds(v[x - 1], op, c))


def _reset_val(v, clocks):
    return tuple(Fraction(0) if i + 1 in clocks else x for i, x in enumerate(v))


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), valuations(n), st.sets(st.integers(1, n)))))
def test_reset_image_contains_reset_points(case):
    z, v, clocks = case
    if zn.valuation_in_zone(v, z):
        assert zn.valuation_in_zone(_reset_val(v, clocks), zn.reset(z, clocks))


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), valuations(n), st.integers(1, n))))
def test_reset_points_have_a_preimage(case):
    z, w, x = case
    r = zn.reset(z, [x])
    if not zn.valuation_in_zone(w, r):
        return
    assert w[x - 1] == 0
    # interval endpoints are multiples of 1/2, so a 1/4 grid hits any nonempty one
    found = any(zn.valuation_in_zone(w[:x - 1] + (u,) + w[x:], z) for u in grid(0, 8 + MAXC + 1, 4))
    assert found


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), valuations(n))),
       st.integers(0, 8).map(lambda k: Fraction(k, 2)))
def test_delay_contains_future(case, t):
    z, v = case
    if zn.valuation_in_zone(v, z):
        assert zn.valuation_in_zone(tuple(x + t for x in v), zn.delay(z))


@MANY
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(zones(nclocks=n), valuations(n))))
def test_delay_points_come_from_the_past(case):
    z, w = case
    if not zn.valuation_in_zone(w, zn.delay(z)):
        return
    found = any(zn.valuation_in_zone(tuple(x - t for x in w), z) for t in grid(0, min(w), 4))
    assert found
