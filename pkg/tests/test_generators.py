import pytest

from fnt import generators
from fnt.netmodel import components, serialize_network, validate_network
from fnt.planar import is_good_embedding
from fnt.polyoracle import oracle_pt
from fnt.typings import Feasible


@pytest.mark.parametrize("k, cols", [(1, 3), (1, 6), (2, 3), (2, 7), (3, 4), (4, 5)])
def test_grid_is_good(k, cols):
    n, e = generators.grid(k, cols, seed=k + cols)
    assert validate_network(n, user_input=False) == []
    assert is_good_embedding(n, e) == (True, [])
    assert e.outer_k == k
    assert len(n.nodes) == generators.grid_size(k, cols)
    assert len(n.inputs) == 2 and len(n.outputs) == 2


def test_grid_deterministic():
    a = serialize_network(*generators.grid(2, 6, seed=1))
    b = serialize_network(*generators.grid(2, 6, seed=1))
    c = serialize_network(*generators.grid(2, 6, seed=2))
    assert a == b
    assert a != c


def test_capacity_denominators():
    n, _ = generators.grid(2, 8, seed=4)
    assert all(a.hi.denominator <= 8 and a.hi > 0 for a in n.arcs)


def test_ring():
    n, e = generators.ring(6)
    assert e.outer_k == 1
    assert is_good_embedding(n, e)[0]
    with pytest.raises(ValueError):
        generators.ring(5)


def test_random_network_shape():
    for seed in range(20):
        n = generators.random_network(5, 7, 2, 2, seed=seed)
        assert validate_network(n, user_input=False) == []
        assert len(n.internal) == 7
        assert len(components(n)) == 1


def test_random_min_degree3():
    for seed in range(10):
        n = generators.random_min_degree3(6, 2, 2, 2, seed=seed)
        assert validate_network(n, user_input=False) == []
        inc = n.incidence()
        for v, arcs in inc.items():
            assert len(arcs) >= 3
            assert any(a.head == v for a in arcs) and any(a.tail == v for a in arcs)


def test_spoke_grid_has_degree4_and_two_cycles():
    n, e = generators.spoke_grid(2, 5, seed=3)
    assert max(n.degree().values()) >= 4
    pairs = {(a.tail, a.head) for a in n.internal}
    assert any((h, t) in pairs for t, h in pairs)


@pytest.mark.parametrize("ports", [2, 3])
def test_one_node_feasible(ports):
    for seed in range(10):
        assert isinstance(oracle_pt(generators.one_node(ports, seed=seed)), Feasible)
