"""Seeded instance families.

All families are deterministic per seed. ``grid`` and ``ring`` carry
good-embedding annotations; the others are plain networks. Capacities
are rationals with denominator at most 8.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .netmodel import Arc, FlowNetwork, LayeredEmbedding

__all__ = ["ladder", "ring", "grid", "grid_size", "spoke_grid", "random_network",
           "random_min_degree3", "one_node", "small_corpus"]


def _cap(rng: random.Random, cap_max: int) -> Fraction:
    den = rng.randint(1, 8)
    return Fraction(rng.randint(1, cap_max * den), den)


class _Builder:
    def __init__(self, name: str, rng: random.Random, cap_max: int):
        self.name, self.rng, self.cap_max = name, rng, cap_max
        self.nodes: list[str] = []
        self.arcs: list[Arc] = []
        self.layer: dict[str, int] = {}
        self.ring: dict[str, int] = {}

    def node(self, v: str, layer: int, ring: int | None = None) -> str:
        self.nodes.append(v)
        self.layer[v] = layer
        if ring is not None:
            self.ring[v] = ring
        return v

    def arc(self, u: str | None, w: str | None, flip: bool | None = None) -> None:
        if flip is None:
            flip = u is not None and w is not None and self.rng.random() < 0.5
        if flip:
            u, w = w, u
        self.arcs.append(Arc(f"e{len(self.arcs)}", u, w, 0, _cap(self.rng, self.cap_max)))

    def io(self, v: str, kind: str, k: int) -> Arc:
        c = _cap(self.rng, self.cap_max)
        return Arc(f"{kind}{k}", None, v, 0, c) if kind == "in" else Arc(f"{kind}{k}", v, None, 0, c)

    def build(self, io: list[Arc]) -> tuple[FlowNetwork, LayeredEmbedding]:
        return (FlowNetwork(tuple(self.nodes), tuple(io) + tuple(self.arcs), self.name),
                LayeredEmbedding(self.layer, self.ring, {}))


def ladder(rungs: int, seed: int = 0, cap_max: int = 8) -> tuple[FlowNetwork, LayeredEmbedding]:
    """1-outerplanar ladder with IO stubs on the four corners.

    End rungs lie on the outer face (peel arcs); inner rungs are chords
    (cross arcs). Two rungs give the plain 4-cycle.
    """
    if rungs < 2:
        raise ValueError("a ladder needs at least 2 rungs")
    rng = random.Random(seed)
    b = _Builder(f"ring{2 * rungs}", rng, cap_max)
    top = [b.node(f"t{j}", 1, j) for j in range(rungs)]
    bot = [b.node(f"b{j}", 1, 2 * rungs - 1 - j) for j in range(rungs)]
    io = [b.io(top[0], "in", 0), b.io(bot[-1], "in", 1),
          b.io(top[-1], "out", 0), b.io(bot[0], "out", 1)]
    for j in range(rungs):
        b.arc(top[j], bot[j])
        if j + 1 < rungs:
            b.arc(top[j], top[j + 1])
            b.arc(bot[j], bot[j + 1])
    return b.build(io)


def ring(n: int, seed: int = 0, cap_max: int = 8) -> tuple[FlowNetwork, LayeredEmbedding]:
    """The k = 1 family on ``n`` nodes (n even, n >= 4)."""
    if n < 4 or n % 2:
        raise ValueError("ring needs an even node count of at least 4")
    return ladder(n // 2, seed, cap_max)


def grid_size(k: int, cols: int) -> int:
    """Node count of ``grid(k, cols)``."""
    return 2 * cols if k == 1 else 2 * cols * (k - 1) + 4


def grid(k: int, cols: int, seed: int = 0, cap_max: int = 8) -> tuple[FlowNetwork, LayeredEmbedding]:
    """k concentric rings of degree-3 nodes joined by radial spokes.

    Ring 1 holds ``cols`` spoke nodes and four IO nodes, rings 2..k-1
    alternate up- and down-spoke nodes, ring k holds ``cols`` nodes.
    Arcs are declared column by column. k = 1 gives ``ladder(cols)``.
    """
    if k < 1 or cols < 3:
        raise ValueError("grid needs k >= 1 and cols >= 3")
    if k == 1:
        return ladder(cols, seed, cap_max)
    rng = random.Random(seed)
    b = _Builder(f"grid{k}x{cols}", rng, cap_max)
    stub_at = {}
    for t in range(4):
        stub_at.setdefault(t * cols // 4, []).append(t)
    # ring membership per column, in ring order
    cols_of: list[list[list[str]]] = [[[] for _ in range(cols)] for _ in range(k)]
    stubs = []
    for j in range(cols):
        for t in stub_at.get(j, []):
            cols_of[0][j].append(f"x{t}")
            stubs.append(f"x{t}")
        cols_of[0][j].append(f"a{j}")
        for i in range(1, k - 1):
            cols_of[i][j] += [f"u{i + 1}_{j}", f"d{i + 1}_{j}"]
        if k >= 2:
            cols_of[k - 1][j].append(f"u{k}_{j}")
    for i in range(k):
        pos = 0
        for j in range(cols):
            for v in cols_of[i][j]:
                b.node(v, i + 1, pos)
                pos += 1
    flat = [[v for j in range(cols) for v in cols_of[i][j]] for i in range(k)]
    succ = [{v: lst[(p + 1) % len(lst)] for p, v in enumerate(lst)} for lst in flat]
    kinds = ["in", "out", "in", "out"]
    io = [b.io(f"x{t}", kinds[t], t // 2) for t in range(4)]
    io.sort(key=lambda a: (a.id[0] == "o", a.id))
    for j in range(cols):
        for i in range(k):
            for v in cols_of[i][j]:
                b.arc(v, succ[i][v])
        b.arc(f"a{j}", f"u2_{j}")
        for i in range(2, k):
            b.arc(f"d{i}_{j}", f"u{i + 1}_{j}")
    return b.build(io)


def spoke_grid(k: int, cols: int, seed: int = 0, cap_max: int = 8,
               two_cycles: int = 2) -> tuple[FlowNetwork, LayeredEmbedding]:
    """k rings of ``cols`` nodes with a spoke at every column: degree-4 nodes.

    Ring arcs run one way round, so every node has in- and out-arcs. A
    few ring arcs get an antiparallel twin, making two-node cycles. Input
    for the 3-regularization checks.
    """
    if k < 1 or cols < 3:
        raise ValueError("spoke_grid needs k >= 1 and cols >= 3")
    rng = random.Random(seed)
    b = _Builder(f"spokes{k}x{cols}", rng, cap_max)
    for i in range(1, k + 1):
        for j in range(cols):
            b.node(f"r{i}_{j}", i, j)
    for i in range(1, k + 1):
        for j in range(cols):
            b.arc(f"r{i}_{j}", f"r{i}_{(j + 1) % cols}", flip=False)
    twins = rng.sample(range(k * cols), min(two_cycles, k * cols))
    for t in sorted(twins):
        i, j = divmod(t, cols)
        b.arc(f"r{i + 1}_{(j + 1) % cols}", f"r{i + 1}_{j}", flip=False)
    for i in range(1, k):
        for j in range(cols):
            b.arc(f"r{i}_{j}", f"r{i + 1}_{j}")
    picks = [t * cols // 4 for t in range(4)] if cols >= 4 else list(range(cols))
    io = []
    for t, j in enumerate(picks[:4]):
        kind = "in" if t % 2 == 0 else "out"
        io.append(b.io(f"r1_{j}", kind, t // 2))
    io.sort(key=lambda a: (a.id[0] == "o", a.id))
    net, emb = b.build(io)
    # the twin of a ring arc is a chord of the face it bounds
    role = {a.id: "cross" for a in net.arcs[len(io) + k * cols: len(io) + k * cols + len(twins)]}
    return net, LayeredEmbedding(emb.layer, emb.ring, role)


def random_network(n: int, m: int, p: int, q: int, seed: int = 0, cap_max: int = 8,
                   lower_prob: float = 0.2) -> FlowNetwork:
    """Connected network: n nodes, m internal arcs, p inputs, q outputs.

    No self-loops or parallel arcs; antiparallel pairs may occur. Some
    arcs get a positive lower capacity, so a few instances are infeasible.
    """
    if n < 1 or m < n - 1 or m > n * (n - 1):
        raise ValueError(f"cannot build a connected simple network with n={n}, m={m}")
    rng = random.Random(seed)
    nodes = [f"v{i}" for i in range(n)]
    pairs: set[tuple[str, str]] = set()
    order = nodes[:]
    rng.shuffle(order)
    for i in range(1, n):
        u, w = order[i], order[rng.randrange(i)]
        pairs.add((u, w) if rng.random() < 0.5 else (w, u))
    while len(pairs) < m:
        u, w = rng.sample(nodes, 2)
        pairs.add((u, w))
    arcs = []
    for i in range(p):
        arcs.append(Arc(f"in{i}", None, rng.choice(nodes), 0, _cap(rng, cap_max)))
    for i in range(q):
        arcs.append(Arc(f"out{i}", rng.choice(nodes), None, 0, _cap(rng, cap_max)))
    plist = sorted(pairs)
    rng.shuffle(plist)
    for k, (u, w) in enumerate(plist):
        hi = _cap(rng, cap_max)
        lo = Fraction(0)
        if rng.random() < lower_prob:
            lo = hi * Fraction(rng.randint(1, 3), 8)
        arcs.append(Arc(f"e{k}", u, w, lo, hi))
    return FlowNetwork(tuple(nodes), tuple(arcs), f"rand{n}_{m}_{seed}")


def small_corpus(count: int, seed: int = 0, max_nodes: int = 8, max_arcs: int = 14,
                 max_io: int = 4, lower_prob: float = 0.2) -> list[FlowNetwork]:
    """Seeded random networks small enough for the projection oracle.

    ``max_arcs`` bounds all arcs, IO arcs included.
    """
    out = []
    for i in range(count):
        r = random.Random(seed + i)
        n = r.randint(1, max_nodes)
        p = r.randint(0, max_io // 2)
        q = r.randint(0, max_io - p)
        m = r.randint(n - 1, min(n * (n - 1), max_arcs - p - q))
        out.append(random_network(n, m, p, q, seed + i, lower_prob=lower_prob))
    return out


def random_min_degree3(n: int, extra: int, p: int, q: int, seed: int = 0, cap_max: int = 8,
                       twin_prob: float = 0.3) -> FlowNetwork:
    """Network where every node has degree >= 3 and both an in- and an out-arc.

    Built on a directed Hamiltonian cycle; chords (sometimes antiparallel
    to a cycle arc) are added until every node reaches degree 3, then
    ``extra`` more. IO arcs count toward degrees.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = random.Random(seed)
    nodes = [f"v{i}" for i in range(n)]
    pairs: list[tuple[str, str]] = []
    have = set()
    for i in range(n):
        e = (nodes[i], nodes[(i + 1) % n])
        if e not in have:
            pairs.append(e)
            have.add(e)
    io = []
    for i in range(p):
        io.append(Arc(f"in{i}", None, rng.choice(nodes), 0, _cap(rng, cap_max)))
    for i in range(q):
        io.append(Arc(f"out{i}", rng.choice(nodes), None, 0, _cap(rng, cap_max)))
    deg = {v: 0 for v in nodes}
    for u, w in pairs:
        deg[u] += 1
        deg[w] += 1
    for a in io:
        deg[a.tail or a.head] += 1

    def add_at(v) -> bool:
        cands = []
        for w in nodes:
            if w == v:
                continue
            for e in ((v, w), (w, v)):
                if e not in have:
                    twin = (e[1], e[0]) in have
                    cands.append((e, twin))
        if not cands:
            return False
        twins = [c for c in cands if c[1]]
        pool = twins if twins and rng.random() < twin_prob else cands
        e, _ = rng.choice(pool)
        pairs.append(e)
        have.add(e)
        deg[e[0]] += 1
        deg[e[1]] += 1
        return True

    for v in nodes:
        while deg[v] < 3:
            if not add_at(v):
                raise ValueError("node count too small for minimum degree 3")
    for _ in range(extra):
        add_at(rng.choice(nodes))
    arcs = [Arc(f"e{k}", u, w, 0, _cap(rng, cap_max)) for k, (u, w) in enumerate(pairs)]
    return FlowNetwork(tuple(nodes), tuple(io) + tuple(arcs), f"deg3_{n}_{seed}")


def one_node(ports: int, seed: int = 0, cap_max: int = 8, lower: bool = True) -> FlowNetwork:
    """A single feasible node with ``ports`` IO arcs.

    Capacities are drawn around a balanced flow, so the node is feasible;
    lower capacities are positive on some arcs when ``lower`` is set.
    """
    if ports < 1:
        raise ValueError("need at least one port")
    rng = random.Random(seed)
    dirs = [rng.random() < 0.5 for _ in range(ports)]  # True: input
    if ports >= 2 and all(dirs):
        dirs[rng.randrange(ports)] = False
    if ports >= 2 and not any(dirs):
        dirs[rng.randrange(ports)] = True
    ins = [i for i, d in enumerate(dirs) if d]
    outs = [i for i, d in enumerate(dirs) if not d]
    flow = [Fraction(0)] * ports
    if ins and outs:
        for i in ins:
            flow[i] = Fraction(rng.randint(0, 4 * cap_max), 4)
        total = sum(flow[i] for i in ins)
        cuts = sorted(Fraction(rng.randint(0, 8), 8) * total for _ in range(len(outs) - 1))
        bounds = [Fraction(0)] + cuts + [total]
        for k, i in enumerate(outs):
            flow[i] = bounds[k + 1] - bounds[k]
    arcs = []
    n_in = n_out = 0
    for i in range(ports):
        f = flow[i]
        lo = Fraction(0)
        if lower and f > 0 and rng.random() < 0.5:
            lo = f * Fraction(rng.randint(0, 8), 8)
        hi = f + Fraction(rng.randint(0, 8 * cap_max), 8)
        if dirs[i]:
            arcs.append(Arc(f"in{n_in}", None, "v", lo, hi))
            n_in += 1
        else:
            arcs.append(Arc(f"out{n_out}", "v", None, lo, hi))
            n_out += 1
    arcs.sort(key=lambda a: (a.is_output, a.id))
    return FlowNetwork(("v",), tuple(arcs), f"node{ports}_{seed}")
