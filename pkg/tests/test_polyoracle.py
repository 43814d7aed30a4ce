import random
from fractions import Fraction

import pytest

from fnt import fixtures, generators
from fnt.netmodel import Arc, FlowNetwork, Interval, parse_network
from fnt.polyoracle import (HPolytope, OracleError, Row, check_tight, constraints_of_network,
                            constraints_of_typing, fm_eliminate, input_safe, maxflow_augmenting,
                            minmax_objective, oracle_pt, output_safe, poly_includes,
                            strong_sub, vertices)
from fnt.typings import flow_bounds, is_subtyping, make_typing

F = Fraction
T1, T2, T3 = fixtures.T1(), fixtures.T2(), fixtures.T3()


def box(names, lo, hi):
    rows = []
    for i in range(len(names)):
        e = [F(0)] * len(names)
        e[i] = F(1)
        rows.append(Row(tuple(e), "<=", F(hi)))
        rows.append(Row(tuple(-x for x in e), "<=", F(-lo)))
    return HPolytope(tuple(names), tuple(rows))


def test_constraints_of_network_counts():
    p = constraints_of_network(fixtures.chain())
    assert len(p.variables) == 3
    assert sum(r.rel == "=" for r in p.rows) == 2
    assert sum(r.rel == "<=" for r in p.rows) == 6
    one, _ = parse_network("node u\narc a _ u 0 5\narc c u _ 0 3")
    assert sum(r.rel == "=" for r in constraints_of_network(one).rows) == 1
    d = constraints_of_network(fixtures.diamond())
    assert len(d.variables) == 6
    assert sum(r.rel == "=" for r in d.rows) == 4


def test_constraints_of_typing_counts():
    p = constraints_of_typing(T1)
    assert sum(r.rel == "<=" for r in p.rows) == 28
    assert [r.rhs for r in p.rows if r.rel == "="] == [0]
    trivial = make_typing(("x",), ("y",), {})
    trivial = type(trivial)(trivial.io_arcs, trivial.directions,
                            {0: trivial.entries[0], 3: trivial.entries[3]})
    rows = constraints_of_typing(trivial).rows
    assert len(rows) == 1 and rows[0].rel == "=" and rows[0].coeffs == (1, -1)


def test_t3_prime_has_a1_cap():
    rows = constraints_of_typing(fixtures.T3_input()).rows
    assert Row((F(1), F(0), F(0), F(0)), "<=", F(10)) in rows


def test_fm_equality_chain():
    p = HPolytope(("x", "y"), (Row((F(1), F(-1)), "=", F(0)),
                               Row((F(0), F(1)), "<=", F(4)),
                               Row((F(0), F(-1)), "<=", F(0))))
    q = fm_eliminate(p, ["y"])
    assert q.variables == ("x",)
    assert minmax_objective(q, [1]) == Interval(F(0), F(4))


def test_fm_box():
    q = fm_eliminate(box(["x", "y"], 0, 1), ["y"])
    assert minmax_objective(q, {"x": 1}) == Interval(F(0), F(1))


def test_fm_projection_matches_vertex_projection():
    rng = random.Random(7)
    for _ in range(5):
        rows = list(box(["x", "y", "z"], 0, 4).rows)
        for _ in range(3):
            c = tuple(F(rng.randint(-3, 3)) for _ in range(3))
            rows.append(Row(c, "<=", F(rng.randint(0, 6))))
        p = HPolytope(("x", "y", "z"), tuple(rows))
        q = fm_eliminate(p, ["z"])
        projected = {v[:2] for v in vertices(p)}
        qv = set(vertices(q))
        # every vertex of the projection is the image of a vertex
        assert qv <= projected
        for v in projected:
            assert q.contains(v)


def test_minmax():
    p = fm_eliminate(constraints_of_network(fixtures.chain()), ["b"])
    assert minmax_objective(p, {"a": 1}) == Interval(F(2), F(3))
    empty = HPolytope(("x",), (Row((F(1),), "<=", F(-1)), Row((F(-1),), "<=", F(0))))
    assert minmax_objective(empty, [1]) is None
    d = constraints_of_network(fixtures.diamond())
    assert minmax_objective(d, {"a": 1}) == Interval(F(0), F(7))


def test_oracle_fixtures():
    t = oracle_pt(fixtures.chain()).typing
    assert t[("a",)] == Interval(F(2), F(3))
    assert flow_bounds(oracle_pt(fixtures.diamond()).typing) == [(0, 7)]
    assert oracle_pt(fixtures.n1()).typing == T1


def test_oracle_dummy_arcs():
    n = FlowNetwork(("u", "v"), (Arc("a", None, "u", 0, 0), Arc("b", "u", "v", 0, 0),
                                 Arc("c", "v", None, 0, 0)))
    t = oracle_pt(n).typing
    assert all(iv == Interval(F(0), F(0)) for iv in t.entries.values())


def test_oracle_io_limit():
    n = generators.one_node(13, seed=0)
    with pytest.raises(OracleError):
        oracle_pt(n)


def test_vertices():
    assert len(vertices(box(["x", "y"], 0, 1))) == 4
    pt = HPolytope(("x",), (Row((F(1),), "=", F(1)), Row((F(1),), "<=", F(2)),
                            Row((F(-1),), "<=", F(0))))
    assert vertices(pt) == [(F(1),)]


def test_vertices_of_t1_are_basic():
    p = constraints_of_typing(T1, orthant=True)
    vs = vertices(p)
    assert vs
    for v in vs:
        assert p.contains(v)
        tight = [r for r in p.rows if sum(c * x for c, x in zip(r.coeffs, v)) == r.rhs]
        assert len(tight) >= T1.dim


def test_vertices_unbounded():
    half = HPolytope(("x",), (Row((F(-1),), "<=", F(0)),))
    with pytest.raises(OracleError):
        vertices(half)


def test_poly_includes():
    p1 = constraints_of_typing(T1, orthant=True)
    p2 = constraints_of_typing(T2, orthant=True)
    p3 = constraints_of_typing(T3, orthant=True)
    assert poly_includes(p1, p3)
    assert not poly_includes(p2, p1)
    assert poly_includes(p1, p1)


def test_check_tight():
    assert check_tight(T1)
    wide = make_typing(("a1", "a2"), ("a3", "a4"), {**{T1.arcs_of(m): (iv.lo, iv.hi)
                                                     for m, iv in T1.entries.items()},
                                                    ("a1",): (0, 100)})
    assert not check_tight(wide)
    bare = make_typing(("x",), ("y",), {})
    bare = type(bare)(bare.io_arcs, bare.directions, {0: bare.entries[0], 3: bare.entries[3]})
    assert check_tight(bare)


def test_strong_subtyping_fact():
    assert is_subtyping(T2, T3)
    assert not strong_sub(T2, T3)
    assert strong_sub(T1, T1)


def test_safe_substitutions():
    assert input_safe(fixtures.T3_input(), T2)
    assert output_safe(fixtures.T3_output(), T2)


def test_maxflow():
    n, _ = parse_network(fixtures.CHAIN_NETF.replace("arc b u v 2 4", "arc b u v 0 4"))
    assert maxflow_augmenting(n) == 3
    assert maxflow_augmenting(fixtures.diamond()) == 7
    zero = FlowNetwork(("u",), (Arc("a", None, "u", 0, 0), Arc("b", "u", None, 0, 0)))
    assert maxflow_augmenting(zero) == 0
    with pytest.raises(OracleError):
        maxflow_augmenting(fixtures.chain())
