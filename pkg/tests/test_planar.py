import pytest

from fnt import fixtures, generators
from fnt.compose import comp_pt, schedule_index
from fnt.netmodel import LayeredEmbedding, parse_network, validate_network
from fnt.planar import (NotGoodifiable, ScheduleError, ScheduleTrace, bind_schedule,
                        classify_arcs, goodify, greedy_schedule, is_good_embedding,
                        to_3_regular)
from fnt.polyoracle import oracle_pt

WHEEL_ARCS = fixtures.WHEEL_NETF.splitlines()


def wheel_variant(drop=(), extra=()):
    lines = [ln for ln in WHEEL_ARCS if not any(ln.startswith(f"arc {a} ") for a in drop)]
    return parse_network("\n".join(lines + list(extra)))


def test_ring_classes():
    n, e = generators.ring(4)
    cls = classify_arcs(n, e)
    assert cls.a1 == ()
    assert len(cls.a2) == 4
    assert len(n.io_arcs) == 4


def test_wheel_classes():
    n, e = fixtures.wheel()
    cls = classify_arcs(n, e)
    assert set(cls.a1) == {"s0", "s1", "s2", "s3"}
    assert len(cls.a2) == 8


def test_hanging_path_goes_to_a1():
    # spoke s0 subdivided by h; h sits on layer 2 off the ring, with a stub
    text = fixtures.WHEEL_NETF.replace("arc s0 o0 i0 0 2\n", "") + (
        "node h layer=2\n"
        "arc s0 o0 h 0 2 role=cross\n"
        "arc t0 h i0 0 2 role=peel\n"
        "arc x0 _ h 0 1\n")
    n, e = parse_network(text)
    cls = classify_arcs(n, e)
    assert {"s0", "t0"} <= set(cls.a1)
    assert "h" not in cls.reduced[2]
    assert is_good_embedding(n, e)[0]


def test_wheel_is_good():
    n, e = fixtures.wheel()
    assert is_good_embedding(n, e) == (True, [])


def test_two_stubs_on_one_node():
    n, e = wheel_variant(extra=["arc x _ o0 0 1", "arc y o0 _ 0 1"])
    ok, diags = is_good_embedding(n, e)
    assert not ok
    assert "io-sharing" in {d.code for d in diags}


def test_split_inner_layer_not_good():
    n, e = wheel_variant(drop=("q1", "q3"),
                         extra=[f"arc x{k} _ i{k} 0 1" for k in range(4)])
    ok, diags = is_good_embedding(n, e)
    assert not ok
    assert "ring" in {d.code for d in diags}


def test_no_embedding():
    ok, diags = is_good_embedding(fixtures.chain(), None)
    assert not ok and diags[0].code == "no-embedding"


def test_goodify_good_input_unchanged():
    n, e = fixtures.wheel()
    assert goodify(n, e) == (n, e)


def test_goodify_closes_split_layer():
    n, e = wheel_variant(drop=("q1", "q3"),
                         extra=[f"arc x{k} {'_ i' + str(k) if k % 2 else 'i' + str(k) + ' _'} 0 1"
                                for k in range(4)])
    assert validate_network(n, user_input=False) == []
    n2, e2 = goodify(n, e)
    assert is_good_embedding(n2, e2)[0]
    assert len(n2.nodes) <= 2 * len(n.nodes)
    assert len(n2.arcs) <= 2 * len(n.arcs)
    assert e2.outer_k == e.outer_k
    assert oracle_pt(n2).typing == oracle_pt(n).typing


def test_goodify_ring_clash():
    n, e = fixtures.wheel()
    ring = dict(e.ring)
    ring["o1"] = ring["o0"]
    with pytest.raises(NotGoodifiable):
        goodify(n, LayeredEmbedding(e.layer, ring, e.role))


def star(ins, outs):
    lines = ["node c"]
    lines += [f"arc i{k} _ c 0 {k + 2}" for k in range(ins)]
    lines += [f"arc o{k} c _ 0 {k + 3}" for k in range(outs)]
    return parse_network("\n".join(lines))[0]


def test_degree5_becomes_cycle():
    n = star(3, 2)
    n2, _ = to_3_regular(n)
    assert len(n2.nodes) == 5
    assert set(n2.degree().values()) == {3}
    assert len(n2.internal) == 5
    assert len(n2.nodes) <= 2 * len(n.arcs) and len(n2.arcs) <= 3 * len(n.arcs)
    assert oracle_pt(n2).typing == oracle_pt(n).typing


def test_two_cycle_broken():
    n, _ = parse_network("node u\nnode v\narc x _ u 0 4\narc a u v 1 3\n"
                         "arc b v u 0 2\narc y v _ 0 4")
    n2, _ = to_3_regular(n)
    assert len(n2.nodes) == 4
    assert set(n2.degree().values()) == {3}
    pairs = {(a.tail, a.head) for a in n2.internal}
    assert not any((h, t) in pairs for t, h in pairs)
    assert oracle_pt(n2).typing == oracle_pt(n).typing


def test_already_regular_unchanged():
    n, e = fixtures.wheel()
    n2, e2 = to_3_regular(n, e)
    assert n2 == n
    assert e2.layer == e.layer and e2.ring == e.ring


def test_to_3_regular_precondition():
    with pytest.raises(ValueError):
        to_3_regular(fixtures.chain())


def test_ring_schedule_bound():
    n, e = generators.ring(4)
    s = bind_schedule(n, e)
    assert s.index_bound <= 2 * 1 + 4 + len(n.io_arcs)
    assert s.index_bound == schedule_index(n, s)


def test_wheel_schedule_is_permutation():
    n, e = fixtures.wheel()
    s = bind_schedule(n, e)
    assert sorted(s.order) == sorted(a.id for a in n.internal)
    assert comp_pt(n, s).typing == oracle_pt(n).typing


def test_grid_accumulator_bound():
    for cols in (3, 5, 8):
        n, e = generators.grid(3, cols, seed=cols)
        trace = ScheduleTrace()
        s = bind_schedule(n, e, trace)
        assert trace.k == 3
        assert trace.accumulator
        assert all(dim - io <= 2 * 3 + 2 for dim, io in trace.accumulator)
        assert s.index_bound <= 2 * 3 + 4 + len(n.io_arcs)


def test_bind_schedule_rejects_bad_embedding():
    n, e = wheel_variant(drop=("q1", "q3"), extra=[f"arc x{k} _ i{k} 0 1" for k in range(4)])
    with pytest.raises(ValueError):
        bind_schedule(n, e)


def test_greedy():
    s = greedy_schedule(fixtures.chain())
    assert s.order == ("b",) and s.index_bound == 2
    d = fixtures.diamond()
    s = greedy_schedule(d)
    assert s.index_bound <= 4
    assert comp_pt(d, s).typing == oracle_pt(d).typing


def test_greedy_disconnected():
    c = fixtures.CHAIN_NETF
    twin = c + "".join(ln.replace(" u", " u2").replace(" v", " v2").replace("arc a", "arc a2")
                       .replace("arc b", "arc b2").replace("arc c", "arc c2") + "\n"
                       for ln in c.splitlines()[1:])
    n, _ = parse_network(twin)
    with pytest.raises(ScheduleError):
        greedy_schedule(n)


def test_adjacent_expanded_nodes_keep_annotations():
    # neighbouring degree-4 ring nodes are expanded one after the other
    n, e = generators.spoke_grid(3, 4, seed=0)
    n2, e2 = to_3_regular(n, e)
    assert set(n2.degree().values()) == {3}
    assert set(e2.layer) == set(n2.nodes)
    assert e2.outer_k <= 2 * 3


def test_two_cycle_at_high_degree_node_needs_no_gadget():
    text = ("node u\nnode v\narc i1 _ u 0 5\narc i2 _ u 0 5\narc o1 u _ 0 5\n"
            "arc a u v 0 3\narc b v u 0 3\narc o2 v _ 0 5\n")
    n, _ = parse_network(text)
    n2, _ = to_3_regular(n)
    assert set(n2.degree().values()) == {3}
    assert not any(a.hi == 0 for a in n2.arcs)
    assert oracle_pt(n2).typing == oracle_pt(n).typing
