"""Planar pipeline: arc classes, good embeddings, 3-regularization, schedules.

Embeddings arrive as onion-peel annotations (layer, ring position, arc
role) rather than rotation systems. Everything here is bookkeeping over
node blocks; no typing is computed.
"""

from __future__ import annotations

import heapq
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .compose import BindingSchedule, ScheduleError, schedule_index
from .netmodel import Arc, Diagnostic, FlowNetwork, LayeredEmbedding, components

__all__ = [
    "EmbeddingError",
    "NotGoodifiable",
    "ArcClasses",
    "SubnetBlock",
    "MergeRecord",
    "ScheduleTrace",
    "annotation_diagnostics",
    "classify_arcs",
    "is_good_embedding",
    "to_3_regular",
    "goodify",
    "bind_schedule",
    "greedy_schedule",
]


class EmbeddingError(ValueError):
    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = tuple(diagnostics)


class NotGoodifiable(ValueError):
    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = tuple(diagnostics)


@dataclass(frozen=True)
class ArcClasses:
    a1: tuple[str, ...]
    a2: tuple[str, ...]
    reduced: Mapping[int, frozenset]  # L_i' per layer
    roles: Mapping[str, str]


@dataclass(frozen=True)
class SubnetBlock:
    nodes: frozenset
    io_arcs: frozenset

    @property
    def dim(self) -> int:
        return len(self.io_arcs)

    @classmethod
    def of(cls, n: FlowNetwork, nodes) -> "SubnetBlock":
        inside = frozenset(nodes)
        io = frozenset(a.id for a in n.arcs
                       if (a.tail in inside) != (a.head in inside))
        return cls(inside, io)


@dataclass(frozen=True)
class MergeRecord:
    phase: str  # "first", "second" or "main"
    joint: tuple[str, ...]
    dim_a: int
    dim_b: int
    merged_dim: int
    merged_io: int  # network IO arcs inside the merged block's interface


@dataclass
class ScheduleTrace:
    """What bind_schedule did, for instrumented checks."""

    k: int = 0
    merges: list[MergeRecord] = field(default_factory=list)
    after_first: list[tuple[int, int, int]] = field(default_factory=list)  # (size, dim, io)
    after_second: list[tuple[int, int, int]] = field(default_factory=list)
    accumulator: list[tuple[int, int]] = field(default_factory=list)  # (dim, io) of P


# ---------------------------------------------------------------- annotations

def annotation_diagnostics(n: FlowNetwork, e: LayeredEmbedding) -> list[Diagnostic]:
    diags = []
    for v in n.nodes:
        if v not in e.layer:
            diags.append(Diagnostic("error", "layer-missing", f"node {v!r} has no layer"))
        elif e.layer[v] < 1:
            diags.append(Diagnostic("error", "layer", f"node {v!r} has layer {e.layer[v]}"))
    slots: dict[tuple[int, int], str] = {}
    for v, pos in e.ring.items():
        if v not in e.layer:
            diags.append(Diagnostic("error", "ring", f"node {v!r} has a ring position but no layer"))
            continue
        key = (e.layer[v], pos)
        if key in slots:
            diags.append(Diagnostic("error", "ring-clash",
                                    f"nodes {slots[key]!r} and {v!r} share ring slot {pos} "
                                    f"on layer {e.layer[v]}"))
        slots[key] = v
    internal = {a.id: a for a in n.internal}
    for aid, tag in e.role.items():
        if tag not in ("peel", "cross"):
            diags.append(Diagnostic("error", "role", f"arc {aid!r} has unknown role {tag!r}"))
        if aid not in internal:
            diags.append(Diagnostic("error", "role", f"role given for non-internal arc {aid!r}"))
    for a in internal.values():
        lt, lh = e.layer.get(a.tail), e.layer.get(a.head)
        if lt is None or lh is None:
            continue
        if abs(lt - lh) > 1:
            diags.append(Diagnostic("error", "layer-gap",
                                    f"arc {a.id!r} joins layers {lt} and {lh}"))
        if e.role.get(a.id) == "peel" and lt != lh:
            diags.append(Diagnostic("error", "role",
                                    f"peel arc {a.id!r} joins layers {lt} and {lh}"))
    return diags


def _peel_degree(n: FlowNetwork, roles: Mapping[str, str]) -> dict[str, int]:
    cnt = dict.fromkeys(n.nodes, 0)
    for a in n.internal:
        if roles[a.id] == "peel":
            cnt[a.tail] += 1
            cnt[a.head] += 1
    return cnt


def classify_arcs(n: FlowNetwork, e: LayeredEmbedding) -> ArcClasses:
    """Split internal arcs into A_#1 (cross, or touching a hanging node) and A_#2."""
    bad = [d for d in annotation_diagnostics(n, e) if d.level == "error"]
    if bad:
        raise EmbeddingError("inconsistent embedding annotations", bad)
    roles = e.roles(n)
    pdeg = _peel_degree(n, roles)
    reduced: dict[int, set] = defaultdict(set)
    for v in n.nodes:
        reduced[e.layer[v]]  # every layer gets an entry
        if pdeg[v] >= 2:
            reduced[e.layer[v]].add(v)
    hanging = {v for v in n.nodes if pdeg[v] <= 1}
    a1, a2 = [], []
    for a in n.internal:
        if roles[a.id] == "cross" or a.tail in hanging or a.head in hanging:
            a1.append(a.id)
        else:
            a2.append(a.id)
    return ArcClasses(tuple(a1), tuple(a2),
                      {i: frozenset(s) for i, s in sorted(reduced.items())}, roles)


# ----------------------------------------------------------- good embeddings

def _two_cycles(n: FlowNetwork) -> list[tuple[Arc, Arc]]:
    by_pair = {(a.tail, a.head): a for a in n.internal}
    out = []
    for a in n.internal:
        b = by_pair.get((a.head, a.tail))
        if b is not None and a.tail < a.head:
            out.append((a, b))
    return out


def _ring_order(e: LayeredEmbedding, nodes) -> list[str]:
    return sorted((v for v in nodes if v in e.ring), key=lambda v: e.ring[v])


def is_good_embedding(n: FlowNetwork, e: LayeredEmbedding | None) -> tuple[bool, list[Diagnostic]]:
    """Check the standing assumptions and that every L_i' is one simple ring cycle."""
    diags, _ = _goodness(n, e)
    return not diags, diags


def _goodness(n: FlowNetwork, e: LayeredEmbedding | None) -> tuple[list[Diagnostic], ArcClasses | None]:
    if e is None:
        return [Diagnostic("error", "no-embedding", "network carries no layer annotations")], None
    diags = [d for d in annotation_diagnostics(n, e) if d.level == "error"]
    if not n.nodes:
        diags.append(Diagnostic("error", "empty", "network has no nodes"))
        return diags, None
    if len(components(n).blocks) != 1:
        diags.append(Diagnostic("error", "disconnected", "network is not connected"))
    for v, d in n.degree().items():
        if d != 3:
            diags.append(Diagnostic("error", "degree", f"node {v!r} has degree {d}, not 3"))
    for a, b in _two_cycles(n):
        diags.append(Diagnostic("error", "two-cycle", f"arcs {a.id!r} and {b.id!r} form a two-node cycle"))
    io_at: dict[str, list[str]] = defaultdict(list)
    for a in n.io_arcs:
        io_at[a.tail or a.head].append(a.id)
    for v, ids in io_at.items():
        if len(ids) > 1:
            diags.append(Diagnostic("error", "io-sharing",
                                    f"node {v!r} carries several input/output arcs: {', '.join(ids)}"))
    if diags:
        return diags, None
    cls = classify_arcs(n, e)
    for i in range(1, e.outer_k + 1):
        red = cls.reduced.get(i, frozenset())
        if len(red) < 3:
            diags.append(Diagnostic("error", "ring", f"L'_{i} has {len(red)} nodes, too few for a cycle"))
            continue
        adj: dict[str, set] = {v: set() for v in red}
        for a in n.internal:
            if cls.roles[a.id] == "peel" and a.tail in red and a.head in red:
                adj[a.tail].add(a.head)
                adj[a.head].add(a.tail)
        bad_deg = sorted(v for v, s in adj.items() if len(s) != 2)
        if bad_deg:
            diags.append(Diagnostic("error", "ring",
                                    f"L'_{i} is not a simple cycle at {', '.join(bad_deg)}"))
            continue
        start = min(red)
        seen, stack = {start}, [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(red):
            diags.append(Diagnostic("error", "ring", f"L'_{i} splits into several cycles"))
            continue
        missing = sorted(v for v in red if v not in e.ring)
        if missing:
            diags.append(Diagnostic("error", "ring-missing",
                                    f"L'_{i} nodes without ring position: {', '.join(missing)}"))
            continue
        order = _ring_order(e, red)
        for j, u in enumerate(order):
            w = order[(j + 1) % len(order)]
            if w not in adj[u]:
                diags.append(Diagnostic("error", "ring-order",
                                        f"ring neighbours {u!r} and {w!r} on layer {i} share no peel arc"))
                break
    return diags, cls


# -------------------------------------------------------- 3-regularization

def _fresh(used: set, base: str) -> str:
    name, k = base, 1
    while name in used:
        k += 1
        name = f"{base}_{k}"
    used.add(name)
    return name


def to_3_regular(n: FlowNetwork, e: LayeredEmbedding | None = None
                 ) -> tuple[FlowNetwork, LayeredEmbedding | None]:
    """Equivalent network in which every node has degree 3 and no two-node cycle remains.

    Needs every node to have degree >= 3 and both an incoming and an
    outgoing arc (IO arcs count). A node of degree s >= 4 becomes a
    directed s-cycle with capacities [0, K]. A two-node cycle between two
    degree-3 nodes gets a node inserted in each arc and a dummy arc between
    the two new nodes; any other two-node cycle is broken by the expansion.
    """
    inc = n.incidence()
    for v in n.nodes:
        arcs = inc[v]
        if len(arcs) < 3:
            raise ValueError(f"node {v!r} has degree {len(arcs)}; eliminate it first")
        if not any(a.head == v for a in arcs) or not any(a.tail == v for a in arcs):
            raise ValueError(f"node {v!r} lacks an incoming or an outgoing arc; eliminate it first")
    if e is not None:
        bad = [d for d in annotation_diagnostics(n, e) if d.level == "error"]
        if bad:
            raise EmbeddingError("inconsistent embedding annotations", bad)
    K = 1 + sum((a.hi for a in n.arcs), Fraction(0))
    used_nodes = set(n.nodes)
    used_arcs = {a.id for a in n.arcs}
    nodes = list(n.nodes)
    arcs = list(n.arcs)
    layer = dict(e.layer) if e else {}
    ring = dict(e.ring) if e else {}
    role = dict(e.role) if e else {}

    # part 1: two-node cycles. Expanding a node of degree >= 4 already sends
    # the two arcs to distinct cycle nodes, so only degree-3 pairs need the gadget.
    pos = {a.id: i for i, a in enumerate(arcs)}
    for a, b in _two_cycles(n):
        if len(inc[a.tail]) > 3 or len(inc[a.head]) > 3:
            continue
        mids = []
        for c in (a, b):
            mu = _fresh(used_nodes, f"mu_{c.id}")
            half = _fresh(used_arcs, f"{c.id}_2")
            nodes.append(mu)
            arcs[pos[c.id]] = Arc(c.id, c.tail, mu, c.lo, c.hi)
            arcs.append(Arc(half, mu, c.head, c.lo, c.hi))
            mids.append(mu)
            if e:
                layer[mu] = min(layer[c.tail], layer[c.head])
                role[c.id] = role[half] = "cross"
        dummy = _fresh(used_arcs, f"dummy_{a.id}")
        arcs.append(Arc(dummy, mids[0], mids[1], 0, 0))
        if e:
            role[dummy] = "cross"

    # part 2: high-degree nodes
    cur = FlowNetwork(tuple(nodes), tuple(arcs), n.name)
    inc = cur.incidence()
    decl = {a.id: i for i, a in enumerate(arcs)}
    ring_lists = defaultdict(list)
    for v in nodes:
        if v in ring:
            ring_lists[layer[v]].append(v)
    for lst in ring_lists.values():
        lst.sort(key=lambda v: ring[v])
    replace: dict[str, list[str]] = {}  # ring node -> its outer-path replacement
    out_nodes = []
    for v in nodes:
        around = inc[v]
        s = len(around)
        if s <= 3:
            out_nodes.append(v)
            continue
        order = _rotation(v, around, layer, ring, ring_lists, decl) if e else \
            [(0, a) for a in sorted(around, key=lambda a: decl[a.id])]
        cyc = [_fresh(used_nodes, f"{v}_{j}") for j in range(1, s + 1)]
        out_nodes.extend(cyc)
        for (grp, a), vj in zip(order, cyc):
            a = arcs[decl[a.id]]  # the other end may already be expanded
            t = vj if a.tail == v else a.tail
            h = vj if a.head == v else a.head
            arcs[decl[a.id]] = Arc(a.id, t, h, a.lo, a.hi)
            if e:
                layer[vj] = layer[v] + (1 if grp == 3 else 0)
        for j in range(s):
            bid = _fresh(used_arcs, f"{v}_c{j + 1}")
            arcs.append(Arc(bid, cyc[j], cyc[(j + 1) % s], 0, K))
            if e:
                inner = order[j][0] == 3 or order[(j + 1) % s][0] == 3
                role[bid] = "cross" if inner else "peel"
        if e:
            replace[v] = [vj for (grp, _), vj in zip(order, cyc) if grp != 3]
    out = FlowNetwork(tuple(out_nodes), tuple(arcs), n.name)
    if not e:
        return out, None
    # expanded nodes leave only now: later rotations still look up their layers
    for v in replace:
        layer.pop(v, None)
    new_ring = {}
    for i, lst in ring_lists.items():
        flat = []
        for v in lst:
            flat.extend(replace.get(v, [v]))
        for j, v in enumerate(flat):
            new_ring[v] = j
    return out, LayeredEmbedding(layer, new_ring, role)


def _rotation(v, around, layer, ring, ring_lists, decl):
    """Arcs at ``v`` in a planar-compatible cyclic order, tagged by group.

    Groups: 0 ring predecessor, 1 outward arcs and IO, 2 ring successor,
    3 inward arcs and chords. The nodes for group 3 sit one layer deeper.
    """
    i = layer[v]
    pred = succ = None
    if v in ring:
        lst = ring_lists[i]
        j = lst.index(v)
        if len(lst) > 1:
            pred, succ = lst[j - 1], lst[(j + 1) % len(lst)]
    tagged = []
    for a in around:
        x = a.head if a.tail == v else a.tail
        if x is None or layer.get(x, i) < i:
            g = 1
        elif x == pred and layer[x] == i:
            g = 0
        elif x == succ and layer[x] == i:
            g = 2
        else:
            g = 3
        tagged.append((g, a))
    # a ring of two nodes: the single neighbour is both predecessor and successor
    groups = [g for g, _ in tagged]
    if pred is not None and pred == succ and groups.count(0) > 1:
        for k, (g, a) in enumerate(tagged):
            if g == 0:
                tagged[k] = (2, a)
                break
    return sorted(tagged, key=lambda ga: (ga[0], decl[ga[1].id] if ga[0] != 3 else -decl[ga[1].id]))


# ------------------------------------------------------------------ goodify

def goodify(n: FlowNetwork, e: LayeredEmbedding) -> tuple[FlowNetwork, LayeredEmbedding]:
    """Close every broken L_i' ring with dummy arcs, keeping 3-regularity.

    For two ring-consecutive nodes u, w with no peel arc between them, a
    non-peel arc at each end is subdivided by a new node, and the two new
    nodes are joined by a dummy arc [0, 0]. Best effort: anything that
    still fails the good-embedding check raises NotGoodifiable.
    """
    ok, diags = is_good_embedding(n, e)
    if ok:
        return n, e
    blocking = [d for d in diags if d.code in ("ring-clash", "layer-missing", "layer", "degree",
                                               "two-cycle", "disconnected", "no-embedding", "role",
                                               "layer-gap", "io-sharing")]
    if blocking:
        raise NotGoodifiable("input cannot be goodified", blocking)
    arcs = list(n.arcs)
    nodes = list(n.nodes)
    layer, ring, role = dict(e.layer), dict(e.ring), dict(e.role)
    used_nodes, used_arcs = set(nodes), {a.id for a in arcs}
    roles = e.roles(n)
    role.update(roles)  # freeze defaults before ring positions move
    by_layer = defaultdict(list)
    for v in ring:
        by_layer[layer[v]].append(v)
    for i in sorted(by_layer):
        order = sorted(by_layer[i], key=lambda v: ring[v])
        if len(order) < 3:
            raise NotGoodifiable(f"layer {i} has fewer than three ring nodes")
        new_order = []
        for j, u in enumerate(order):
            w = order[(j + 1) % len(order)]
            new_order.append(u)
            if _joined(arcs, role, u, w):
                continue
            chord = next((a for a in arcs if a.is_internal and {a.tail, a.head} == {u, w}), None)
            if chord is not None:
                role[chord.id] = "peel"
                continue
            mids = []
            for end in (u, w):
                k = _pick_split(arcs, role, end)
                if k is None:
                    raise NotGoodifiable(f"no arc at {end!r} can be split to close layer {i}")
                c = arcs[k]
                mu = _fresh(used_nodes, f"g_{end}")
                link = _fresh(used_arcs, f"g_{c.id}")
                nodes.append(mu)
                layer[mu] = i
                if c.head == end:
                    arcs[k] = Arc(c.id, c.tail, mu, c.lo, c.hi)
                    arcs.append(Arc(link, mu, end, c.lo, c.hi))
                else:
                    arcs[k] = Arc(c.id, mu, c.head, c.lo, c.hi)
                    arcs.append(Arc(link, end, mu, c.lo, c.hi))
                role[link] = "peel"
                if c.is_internal and c.id in role and role[c.id] == "peel":
                    role[c.id] = "cross"
                mids.append(mu)
            dummy = _fresh(used_arcs, f"g_dummy_{u}")
            arcs.append(Arc(dummy, mids[0], mids[1], 0, 0))
            role[dummy] = "peel"
            new_order.extend(mids)
        for j, v in enumerate(new_order):
            ring[v] = j
    # roles were frozen before, so drop tags for arcs that no longer exist
    ids = {a.id for a in arcs if a.is_internal}
    role = {a: r for a, r in role.items() if a in ids}
    out = FlowNetwork(tuple(nodes), tuple(arcs), n.name)
    emb = LayeredEmbedding(layer, ring, role)
    ok, diags = is_good_embedding(out, emb)
    if not ok:
        raise NotGoodifiable("dummy arcs did not produce a good embedding", diags)
    return out, emb


def _joined(arcs, role, u, w) -> bool:
    return any(a.is_internal and {a.tail, a.head} == {u, w} and role.get(a.id) == "peel" for a in arcs)


def _pick_split(arcs, role, v):
    """Index of the arc to subdivide at v: an IO arc if present, else the first cross arc."""
    io = [k for k, a in enumerate(arcs) if not a.is_internal and v in (a.tail, a.head)]
    if io:
        return io[0]
    cross = [k for k, a in enumerate(arcs)
             if a.is_internal and v in (a.tail, a.head) and role.get(a.id) != "peel"]
    return cross[0] if cross else None


# -------------------------------------------------------------- schedules

class _Blocks:
    """Union of node blocks with per-pair joint-arc lists (shared between both sides)."""

    def __init__(self, n: FlowNetwork):
        self.arcs = n.arcs
        self.node_id = {v: i for i, v in enumerate(n.nodes)}
        m = len(n.nodes)
        self.parent = list(range(m))
        self.size = [1] * m
        self.dim = [0] * m
        self.io = [0] * m
        self.nbr: list[dict | None] = [{} for _ in range(m)]
        for k, a in enumerate(n.arcs):
            if a.is_internal:
                t, h = self.node_id[a.tail], self.node_id[a.head]
                self.dim[t] += 1
                self.dim[h] += 1
                lst = self.nbr[t].get(h)
                if lst is None:
                    lst = []
                    self.nbr[t][h] = lst
                    self.nbr[h][t] = lst
                lst.append(k)
            else:
                v = self.node_id[a.tail if a.tail is not None else a.head]
                self.dim[v] += 1
                self.io[v] += 1

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def alive(self, x: int) -> bool:
        return self.parent[x] == x

    def key(self, x: int, y: int) -> tuple[int, int]:
        lst = self.nbr[x][y]
        return len(lst), min(lst)

    def merge(self, x: int, y: int, keep: int | None = None) -> tuple[int, list[int]]:
        nb = self.nbr
        joint = sorted(nb[x][y])
        if keep is None:
            keep = x if len(nb[x]) >= len(nb[y]) else y
        gone = y if keep == x else x
        del nb[keep][gone]
        del nb[gone][keep]
        kd = nb[keep]
        for c, lst in nb[gone].items():
            cd = nb[c]
            del cd[gone]
            have = kd.get(c)
            if have is None:
                kd[c] = lst
                cd[keep] = lst
            else:
                have.extend(lst)
        nb[gone] = None
        self.parent[gone] = keep
        self.size[keep] += self.size[gone]
        self.dim[keep] = self.dim[keep] + self.dim[gone] - 2 * len(joint)
        self.io[keep] += self.io[gone]
        return keep, joint

    def roots(self) -> list[int]:
        return [x for x in range(len(self.parent)) if self.parent[x] == x]


def _require_connected(n: FlowNetwork) -> None:
    if n.nodes and len(components(n).blocks) != 1:
        raise ScheduleError("network is disconnected")


def bind_schedule(n: FlowNetwork, e: LayeredEmbedding, trace: ScheduleTrace | None = None,
                  *, check: bool = True) -> BindingSchedule:
    """Binding schedule from a good embedding, with its index bound delta.

    Blocks are merged across every A_#1 arc, then singletons and pairs of
    binding strength >= 2 are absorbed, then one accumulator grows from an
    outermost block by always taking a neighbour of maximal binding
    strength (ties: smallest joint arc, by declaration order).
    """
    if check:
        diags, cls = _goodness(n, e)
        if diags:
            if any(d.code == "disconnected" for d in diags):
                raise ScheduleError("network is disconnected")
            raise EmbeddingError("embedding is not good", diags)
    else:
        cls = classify_arcs(n, e)
    B = _Blocks(n)
    idx = n.arc_index()
    sigma: list[int] = []
    delta = max(B.dim, default=0)
    if trace is not None:
        trace.k = e.outer_k

    def do_merge(x, y, phase, keep=None):
        nonlocal delta
        dx, dy = B.dim[x], B.dim[y]
        r, joint = B.merge(x, y, keep)
        sigma.extend(joint)
        delta = max(delta, dx + dy - 2)
        if trace is not None:
            trace.merges.append(MergeRecord(phase, tuple(n.arcs[k].id for k in joint),
                                            dx, dy, B.dim[r], B.io[r]))
        return r

    def snapshot():
        return [(B.size[r], B.dim[r], B.io[r]) for r in B.roots()]

    # first iteration
    for aid in cls.a1:
        a = n.arcs[idx[aid]]
        x, y = B.find(B.node_id[a.tail]), B.find(B.node_id[a.head])
        if x != y:
            do_merge(x, y, "first")
    if trace is not None:
        trace.after_first = snapshot()

    # second iteration
    work = deque(B.roots())
    while work:
        b = work.popleft()
        if not B.alive(b):
            continue
        best = None
        for c in B.nbr[b]:
            s, low = B.key(b, c)
            if B.size[b] == 1 or B.size[c] == 1 or s >= 2:
                cand = (-s, low, c)
                if best is None or cand < best:
                    best = cand
        if best is not None:
            work.append(do_merge(b, best[2], "second"))
    if trace is not None:
        trace.after_second = snapshot()

    # main iteration
    outer = [v for v in n.nodes if e.layer[v] == 1]
    start = min(outer, key=lambda v: (e.ring.get(v, float("inf")), B.node_id[v]))
    P = B.find(B.node_id[start])
    if trace is not None:
        trace.accumulator.append((B.dim[P], B.io[P]))
    heap = [(-s, low, c) for c in B.nbr[P] for s, low in [B.key(P, c)]]
    heapq.heapify(heap)
    while heap:
        s, low, c = heapq.heappop(heap)
        if not B.alive(c) or c not in B.nbr[P] or B.key(P, c) != (-s, low):
            continue
        touched = list(B.nbr[c])
        P = do_merge(P, c, "main", keep=P)
        for d in touched:
            if d != P and d in B.nbr[P]:
                s2, low2 = B.key(P, d)
                heapq.heappush(heap, (-s2, low2, d))
        if trace is not None:
            trace.accumulator.append((B.dim[P], B.io[P]))
    if len(B.roots()) != 1:
        raise ScheduleError("network is disconnected")
    order = tuple(n.arcs[k].id for k in sigma)
    return BindingSchedule(order, delta)


def greedy_schedule(n: FlowNetwork) -> BindingSchedule:
    """Merge the pair with the smallest merged dimension until one block is left.

    Ties go to the pair owning the earliest declared joint arc. The
    returned bound is the exact index of the schedule.
    """
    _require_connected(n)
    B = _Blocks(n)
    heap = []

    def push(x, y):
        s, low = B.key(x, y)
        heap.append((B.dim[x] + B.dim[y] - 2 * s, low, min(x, y), max(x, y)))

    for x in range(len(n.nodes)):
        for y in B.nbr[x]:
            if x < y:
                push(x, y)
    heapq.heapify(heap)
    sigma: list[int] = []
    while heap:
        md, low, x, y = heapq.heappop(heap)
        if not (B.alive(x) and B.alive(y)) or y not in B.nbr[x]:
            continue
        s, low2 = B.key(x, y)
        if (B.dim[x] + B.dim[y] - 2 * s, low2) != (md, low):
            continue
        r, joint = B.merge(x, y)
        sigma.extend(joint)
        for c in B.nbr[r]:
            s, low = B.key(r, c)
            heapq.heappush(heap, (B.dim[r] + B.dim[c] - 2 * s, low, min(r, c), max(r, c)))
    order = tuple(n.arcs[k].id for k in sigma)
    return BindingSchedule(order, schedule_index(n, order))
