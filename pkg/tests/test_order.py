from hypothesis import given, settings
from hypothesis import strategies as st

from zonereach.automaton import Edge, TimedAutomaton
from zonereach.bench import generate_fischer, generate_racing, generate_random
from zonereach.order import (Cmp, JointOrder, TopoOrder, dag_edges, dump_order, extract_dag_order,
                             joint_compare, joint_order, linear_key)


def names(p, order):
    return [p.locations[q] for q in order.sequence()]


def racing_with_back_edge():
    p = generate_racing().processes[0]
    return TimedAutomaton(p.name, p.locations, p.initial, p.accepting, p.edges + (Edge(2, 1, "back"),))


def test_racing_order():
    p = generate_racing().processes[0]
    assert names(p, extract_dag_order(p)) == ["q1", "q2", "q3", "q4"]
    # q4 -> q1 closes the only cycle and is dropped
    assert (3, 0) not in dag_edges(p)


def test_back_edge_choice_depends_on_seed():
    p = racing_with_back_edge()
    assert names(p, extract_dag_order(p, 0)) == ["q1", "q2", "q3", "q4"]
    assert names(p, extract_dag_order(p, 1)) == ["q1", "q3", "q4", "q2"]


def test_unreachable_locations_go_last():
    p = TimedAutomaton("P", ("a", "island", "b"), 0, edges=(Edge(0, 2, "e"),))
    assert names(p, extract_dag_order(p)) == ["a", "b", "island"]


def test_dump_order():
    net = generate_fischer(2)
    text = dump_order(net, joint_order(net))
    assert text.splitlines()[0] == "P1: A < req < wait < cs"
    assert text.splitlines()[-1].startswith("id: id0 < ")


def test_joint_compare_cases():
    j = JointOrder((TopoOrder((0, 1, 2)), TopoOrder((1, 0))))
    assert joint_compare(j, (0, 1), (0, 1)) is Cmp.EQUAL
    assert joint_compare(j, (0, 1), (2, 0)) is Cmp.LESS
    assert joint_compare(j, (2, 0), (0, 1)) is Cmp.GREATER
    assert joint_compare(j, (0, 0), (1, 1)) is Cmp.INCOMPARABLE
    assert linear_key(j, (0, 1)) < linear_key(j, (2, 0))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10_000), st.one_of(st.none(), st.integers(0, 50)))
def test_order_is_topological_for_kept_edges(seed, shuffle):
    net = generate_random(seed)
    for p in net.processes:
        order = extract_dag_order(p, shuffle)
        assert sorted(order.index) == list(range(len(p.locations)))
        kept = set(dag_edges(p, shuffle))
        for u, v in kept:
            assert order.index[u] < order.index[v]
        reach = {p.initial} | {v for _, v in kept}
        for e in p.edges:
            if e.source in reach and (e.source, e.target) not in kept:
                # only edges back into the DFS stack are dropped
                assert order.index[e.target] <= order.index[e.source]


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_linear_key_extends_joint_order(seed, data):
    net = generate_random(seed)
    j = joint_order(net, data.draw(st.integers(0, 9)))
    pick = st.tuples(*[st.integers(0, len(p.locations) - 1) for p in net.processes])
    a, b = data.draw(pick), data.draw(pick)
    c = joint_compare(j, a, b)
    flipped = {Cmp.LESS: Cmp.GREATER, Cmp.GREATER: Cmp.LESS}.get(c, c)
    assert joint_compare(j, b, a) is flipped
    if c is Cmp.LESS:
        assert linear_key(j, a) < linear_key(j, b)
    if c is Cmp.EQUAL:
        assert a == b
