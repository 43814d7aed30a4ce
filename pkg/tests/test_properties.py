"""Property tests: compositional typing against the projection oracle."""

import random

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from fnt import generators
from fnt.compose import comp_pt, one_pt, schedule_index
from fnt.netmodel import parse_network, serialize_network
from fnt.planar import greedy_schedule
from fnt.polyoracle import oracle_pt
from fnt.typings import (check_complement_symmetry, is_subtyping, meet, parse_typing,
                         serialize_typing)

SETTINGS = settings(max_examples=40, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])


@st.composite
def small_networks(draw):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(max(n - 1, 0), min(n * (n - 1), 9)))
    p = draw(st.integers(0, 2))
    q = draw(st.integers(0, 2))
    seed = draw(st.integers(0, 10**6))
    return generators.random_network(n, m, p, q, seed=seed)


@SETTINGS
@given(small_networks(), st.randoms(use_true_random=False))
def test_comp_pt_matches_oracle(n, rnd):
    order = [a.id for a in n.internal]
    rnd.shuffle(order)
    got, ref = comp_pt(n, order), oracle_pt(n)
    assert got.ok == ref.ok
    if ref.ok:
        assert got.typing == ref.typing
        assert check_complement_symmetry(got.typing) == []


@SETTINGS
@given(small_networks(), st.randoms(use_true_random=False))
def test_schedule_oblivious(n, rnd):
    a = [x.id for x in n.internal]
    b = a[:]
    rnd.shuffle(b)
    ra, rb = comp_pt(n, a), comp_pt(n, b)
    assert ra.ok == rb.ok
    if ra.ok:
        assert ra.typing == rb.typing


@SETTINGS
@given(small_networks())
def test_every_stage_symmetric(n):
    bad = []
    comp_pt(n, greedy_schedule(n) if n.internal else (),
            observer=lambda k, t: bad.extend(check_complement_symmetry(t)))
    assert bad == []


@SETTINGS
@given(small_networks())
def test_index_at_least_initial_dims(n):
    order = [a.id for a in n.internal]
    deg = max(n.degree().values())
    assert schedule_index(n, order) >= deg


@SETTINGS
@given(st.integers(1, 5), st.integers(0, 10**6), st.booleans())
def test_one_pt_matches_oracle(ports, seed, lower):
    n = generators.one_node(ports, seed=seed, lower=lower)
    assert one_pt(n).typing == oracle_pt(n).typing


@SETTINGS
@given(small_networks())
def test_typing_round_trip(n):
    res = oracle_pt(n)
    if res.ok:
        assert parse_typing(serialize_typing(res.typing)) == res.typing


@SETTINGS
@given(small_networks())
def test_network_round_trip(n):
    assert parse_network(serialize_network(n))[0] == n


@SETTINGS
@given(st.integers(0, 10**6))
def test_meet_is_below_both(seed):
    rng = random.Random(seed)
    net = generators.one_node(3, seed=seed)
    t = oracle_pt(net).typing
    # a second typing on the same arcs: same shape, capacities redrawn
    other = generators.one_node(3, seed=rng.randrange(10**6))
    other = type(net)(net.nodes, tuple(a.__class__(a.id, a.tail, a.head, b.lo, b.hi) if
                                       a.is_input == b.is_input else a
                                       for a, b in zip(net.arcs, other.arcs)), net.name)
    ref = oracle_pt(other)
    assume(ref.ok)
    u = ref.typing
    res = meet(t, u)
    if res.ok:
        assert is_subtyping(t, res.typing) and is_subtyping(u, res.typing)
    assert meet(t, t).typing == t
