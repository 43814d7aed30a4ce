"""Small reference networks and typings used by tests, scripts and demos.

T1..T3 range over inputs a1, a2 and outputs a3, a4. Keys name the arcs
of a subset; the empty and the full set are pinned to [0, 0].
"""

from __future__ import annotations

from .netmodel import FlowNetwork, parse_network
from .typings import Typing, make_typing

CHAIN_NETF = """\
net chain
node u
node v
arc a _ u 0 5
arc b u v 2 4
arc c v _ 0 3
"""

DIAMOND_NETF = """\
net diamond
node u
node v
node w
node t
arc a _ u 0 10
arc b u v 0 4
arc c u w 0 5
arc d v t 0 10
arc e w t 0 3
arc f t _ 0 10
"""

# 2-layer wheel: outer 4-cycle, inner 4-cycle, four spokes
WHEEL_NETF = """\
net wheel
node o0 layer=1 ring=0
node o1 layer=1 ring=1
node o2 layer=1 ring=2
node o3 layer=1 ring=3
node i0 layer=2 ring=0
node i1 layer=2 ring=1
node i2 layer=2 ring=2
node i3 layer=2 ring=3
arc r0 o0 o1 0 4
arc r1 o1 o2 0 4
arc r2 o2 o3 0 4
arc r3 o3 o0 0 4
arc q0 i0 i1 0 3
arc q1 i1 i2 0 3
arc q2 i2 i3 0 3
arc q3 i3 i0 0 3
arc s0 o0 i0 0 2
arc s1 i1 o1 0 2
arc s2 o2 i2 0 2
arc s3 i3 o3 0 2
"""

# a network whose principal typing is T1: two direct routes plus a
# shared detour through the bottleneck u -> v (found by search, oracle-checked)
N1_NETF = """\
net n1
node x1
node x2
node u
node v
node y1
node y2
arc a1 _ x1 0 15
arc a2 _ x2 0 25
arc p x1 y1 0 5
arc r x2 y2 0 15
arc d1 x1 u 0 10
arc d2 x2 u 0 10
arc m u v 0 10
arc e1 v y1 0 10
arc e2 v y2 0 10
arc a3 y1 _ 0 15
arc a4 y2 _ 0 25
"""

_BASE = {
    ("a1",): (0, 15), ("a2",): (0, 25), ("a3",): (-15, 0), ("a4",): (-25, 0),
    ("a1", "a2"): (0, 30), ("a1", "a3"): (-10, 10), ("a1", "a4"): (-25, 15),
    ("a2", "a3"): (-15, 25), ("a2", "a4"): (-10, 10), ("a3", "a4"): (-30, 0),
    ("a1", "a2", "a3"): (0, 25), ("a1", "a2", "a4"): (0, 15),
    ("a1", "a3", "a4"): (-25, 0), ("a2", "a3", "a4"): (-15, 0),
}


def _typing(name: str, changes: dict | None = None, base: dict | None = None) -> Typing:
    ent = dict(base or _BASE)
    ent.update(changes or {})
    return make_typing(("a1", "a2"), ("a3", "a4"), ent, name=name)


def T1() -> Typing:
    return _typing("T1")


def T2() -> Typing:
    return _typing("T2", {("a1", "a3"): (-10, 12), ("a1", "a4"): (-23, 15),
                          ("a2", "a3"): (-15, 23), ("a2", "a4"): (-12, 10)})


def T3() -> Typing:
    return _typing("T3", {("a1", "a3"): (-10, 10), ("a1", "a4"): (-23, 15),
                          ("a2", "a3"): (-15, 23), ("a2", "a4"): (-10, 10)})


_T3_INPUT = {
    ("a1",): (0, 10), ("a2",): (0, 25), ("a3",): (-15, 0), ("a4",): (-25, 0),
    ("a1", "a2"): (0, 30), ("a1", "a3"): (-10, 10), ("a1", "a4"): (-23, 10),
    ("a2", "a3"): (-10, 23), ("a2", "a4"): (-10, 10), ("a3", "a4"): (-30, 0),
    ("a1", "a2", "a3"): (0, 25), ("a1", "a2", "a4"): (0, 15),
    # mirror of {a2} = [0, 25]; the printed listing has [-23, 0] here
    ("a1", "a3", "a4"): (-25, 0), ("a2", "a3", "a4"): (-10, 0),
}


def T3_input() -> Typing:
    """T3 tightened by a1 <= 10: the variant safe for inputs against T2."""
    return _typing("T3p", base=_T3_INPUT)


def T3_input_printed() -> Typing:
    """T3' exactly as printed, kept to show it breaks complement symmetry."""
    return _typing("T3p_printed", {("a1", "a3", "a4"): (-23, 0)}, base=_T3_INPUT)


def T3_output() -> Typing:
    """T3'' in the text: the variant safe for outputs against T2."""
    return _typing("T3pp", base={
        ("a1",): (0, 15), ("a2",): (0, 20), ("a3",): (-15, 0), ("a4",): (-10, 0),
        ("a1", "a2"): (0, 25), ("a1", "a3"): (-10, 10), ("a1", "a4"): (-10, 15),
        ("a2", "a3"): (-15, 10), ("a2", "a4"): (-10, 10), ("a3", "a4"): (-25, 0),
        ("a1", "a2", "a3"): (0, 10), ("a1", "a2", "a4"): (0, 15),
        ("a1", "a3", "a4"): (-20, 0), ("a2", "a3", "a4"): (-15, 0),
    })


def chain() -> FlowNetwork:
    return parse_network(CHAIN_NETF)[0]


def diamond() -> FlowNetwork:
    return parse_network(DIAMOND_NETF)[0]


def n1() -> FlowNetwork:
    return parse_network(N1_NETF)[0]


def wheel():
    return parse_network(WHEEL_NETF)
