"""Compositional principal typing: break the network into one-node pieces,
type each piece, then splice the cut arcs back one at a time.

Cut arc ``a`` leaves an output half ``a-`` at its tail and an input half
``a+`` at its head. Both halves keep the arc's capacities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernel
from .netmodel import ZERO, Arc, FlowNetwork, Interval
from .typings import Feasible, Infeasible, Typing, TypingError, extend_by_complement

__all__ = [
    "OneNodeBlock",
    "BrokenNetwork",
    "BindingSchedule",
    "ScheduleError",
    "RepairWarning",
    "half_names",
    "break_network",
    "one_pt",
    "bind_one",
    "par_add",
    "tot_add",
    "bind_t",
    "comp_pt",
    "schedule_index",
    "parse_schedule",
    "serialize_schedule",
]


class ScheduleError(ValueError):
    pass


class RepairWarning(UserWarning):
    """A partially defined typing was completed by complement before binding."""


def half_names(arc_id: str) -> tuple[str, str]:
    """(input half at the head, output half at the tail)."""
    return f"{arc_id}+", f"{arc_id}-"


@dataclass(frozen=True)
class OneNodeBlock:
    node: str
    arcs: tuple[str, ...]
    directions: tuple[str, ...]
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    @property
    def dim(self) -> int:
        return len(self.arcs)


@dataclass(frozen=True)
class BrokenNetwork:
    blocks: tuple[OneNodeBlock, ...]


def break_network(n: FlowNetwork) -> BrokenNetwork:
    blocks = []
    inc = n.incidence()
    for v in n.nodes:
        names, dirs, lo, hi = [], [], [], []
        for a in inc[v]:
            if a.is_internal:
                plus, minus = half_names(a.id)
                if a.head == v:
                    names.append(plus)
                    dirs.append("in")
                else:
                    names.append(minus)
                    dirs.append("out")
            else:
                names.append(a.id)
                dirs.append("in" if a.is_input else "out")
            lo.append(a.lo)
            hi.append(a.hi)
        blocks.append(OneNodeBlock(v, tuple(names), tuple(dirs), tuple(lo), tuple(hi)))
    return BrokenNetwork(tuple(blocks))


# ------------------------------------------------ public typing-level ops

def _local_masks(positions: Sequence[int]) -> np.ndarray:
    return kernel.subset_sums([1 << p for p in positions], np.int64)


def _decompose(t: Typing) -> list[tuple[list[str], np.ndarray, np.ndarray]]:
    """Per-block dense arrays of Fractions, arcs in the typing's order."""
    out = []
    for b in t.blocks:
        pos = [i for i in range(t.dim) if b >> i & 1]
        gm = _local_masks(pos)
        lo = np.empty(len(gm), dtype=object)
        hi = np.empty(len(gm), dtype=object)
        for k, m in enumerate(gm):
            iv = t.entries.get(int(m))
            if iv is None:
                raise TypingError(f"entry for {t.arcs_of(int(m))} undefined")
            lo[k], hi[k] = iv.lo, iv.hi
        out.append(([t.io_arcs[i] for i in pos], lo, hi))
    return out


def _compose(io_arcs: Sequence[str], directions: Sequence[str],
             blocks: Iterable[tuple[Sequence[str], np.ndarray, np.ndarray]],
             name: str | None = None) -> Typing:
    pos = {a: i for i, a in enumerate(io_arcs)}
    entries = {0: ZERO, (1 << len(io_arcs)) - 1: ZERO}
    masks = []
    for names, lo, hi in blocks:
        if not names:
            continue
        gm = _local_masks([pos[a] for a in names])
        for k in range(1, len(gm)):
            entries[int(gm[k])] = Interval(lo[k], hi[k])
        masks.append(int(gm[-1]))
    return Typing(tuple(io_arcs), tuple(directions), entries, tuple(masks), name)


def _repaired(t: Typing) -> Typing:
    if all(_block_total(t, b) for b in t.blocks):
        return t
    warnings.warn("typing is partially defined; completing entries by complement",
                  RepairWarning, stacklevel=3)
    return extend_by_complement(t)


def _block_total(t: Typing, b: int) -> bool:
    sub = b
    while sub:
        if sub not in t.entries:
            return False
        sub = (sub - 1) & b
    return True


def _witness(names: Sequence[str], mask: int, lo, hi, stage: str) -> Infeasible:
    subset = tuple(names[i] for i in range(len(names)) if mask >> i & 1)
    return Infeasible(subset, Fraction(lo), Fraction(hi), stage)


def one_pt(block: OneNodeBlock | FlowNetwork) -> Feasible | Infeasible:
    """Principal typing of a one-node network."""
    if isinstance(block, FlowNetwork):
        if len(block.nodes) != 1:
            raise TypingError("one_pt needs a one-node network")
        v = block.nodes[0]
        for a in block.arcs:
            if a.is_internal or (a.tail or a.head) != v:
                raise TypingError("every arc must be an IO arc of the single node")
        ins = [a for a in block.arcs if a.is_input]
        outs = [a for a in block.arcs if a.is_output]
        arcs = ins + outs
        block = OneNodeBlock(v, tuple(a.id for a in arcs),
                             ("in",) * len(ins) + ("out",) * len(outs),
                             tuple(a.lo for a in arcs), tuple(a.hi for a in arcs))
    is_in = [d == "in" for d in block.directions]
    lo, hi, bad = kernel.one_pt(is_in, list(block.lo), list(block.hi), object)
    if bad is not None:
        l, h = _raw_one_pt_bounds(is_in, block, bad)
        return _witness(block.arcs, bad, l, h, "one_pt")
    return Feasible(_compose(block.arcs, block.directions, [(block.arcs, lo, hi)]))


def _raw_one_pt_bounds(is_in, block: OneNodeBlock, mask: int):
    """The unpinned formula value at one subset, for witnesses."""
    P = lambda m: sum((u if i else -l) for k, (i, l, u) in enumerate(zip(is_in, block.lo, block.hi)) if m >> k & 1)
    Q = lambda m: sum((-l if i else u) for k, (i, l, u) in enumerate(zip(is_in, block.lo, block.hi)) if m >> k & 1)
    full = (1 << block.dim) - 1
    return max(-P(full ^ mask), -Q(mask)), min(P(mask), Q(full ^ mask))


def _halves(t: Typing, arc: str, halves: tuple[str, str] | None) -> tuple[int, int]:
    plus, minus = halves or half_names(arc)
    try:
        return t.io_arcs.index(plus), t.io_arcs.index(minus)
    except ValueError:
        raise TypingError(f"halves {plus!r}/{minus!r} not among the typing's arcs") from None


def bind_one(t: Typing, arc: str, halves: tuple[str, str] | None = None) -> Feasible | Infeasible:
    """Splice the two halves of ``arc``; both must sit in the same block."""
    p, q = _halves(t, arc, halves)
    b = t.block_of((1 << p) | (1 << q))
    if b is None:
        raise TypingError("halves lie in different blocks; use bind_t")
    t = _repaired(t)
    blocks = _decompose(t)
    out = []
    for names, lo, hi in blocks:
        if t.io_arcs[p] in names:
            i, j = names.index(t.io_arcs[p]), names.index(t.io_arcs[q])
            keep = [a for a in names if a not in (t.io_arcs[p], t.io_arcs[q])]
            lo2, hi2, bad = kernel.bind_same(lo, hi, len(names), i, j, Fraction(0))
            if bad is not None:
                return _bind_witness(keep, lo, hi, len(names), i, j, lo2, hi2, bad)
            out.append((keep, lo2, hi2))
        else:
            out.append((names, lo, hi))
    return Feasible(_drop_and_compose(t, (p, q), out))


def _bind_witness(keep, lo, hi, d, i, j, lo2, hi2, bad) -> Infeasible:
    if lo2 is None:
        idx = kernel.expand_index(d, i, j)
        return _witness(keep, bad, lo[idx][bad], hi[idx][bad], "bind")
    return _witness(keep, bad, lo2[bad], hi2[bad], "bind")


def _drop_and_compose(t: Typing, drop: Sequence[int], blocks) -> Typing:
    keep = [k for k in range(t.dim) if k not in drop]
    return _compose([t.io_arcs[k] for k in keep], [t.directions[k] for k in keep], blocks, t.name)


def par_add(t1: Typing, t2: Typing) -> Typing:
    """Side-by-side union; subsets mixing the two sides stay undefined."""
    if set(t1.io_arcs) & set(t2.io_arcs):
        raise TypingError("overlapping arc ids")
    d1 = t1.dim
    entries = {}
    for m, iv in t1.entries.items():
        if m == 0 or t1.block_of(m) is not None:
            entries[m] = iv
    for m, iv in t2.entries.items():
        if m and t2.block_of(m) is not None:
            entries[m << d1] = iv
    full = (1 << (d1 + t2.dim)) - 1
    entries[0] = ZERO
    entries[full] = ZERO
    blocks = tuple(t1.blocks) + tuple(b << d1 for b in t2.blocks)
    return Typing(t1.io_arcs + t2.io_arcs, t1.directions + t2.directions, entries, blocks)


def tot_add(t1: Typing, t2: Typing) -> Typing:
    """Total parallel addition: every subset typed by the sum of its two sides."""
    if set(t1.io_arcs) & set(t2.io_arcs):
        raise TypingError("overlapping arc ids")
    parts = []
    for t in (t1, t2):
        if len(t.blocks) > 1:
            raise TypingError("tot_add needs single-block typings")
        if t.dim == 0:
            parts.append(([], np.array([Fraction(0)], dtype=object), np.array([Fraction(0)], dtype=object)))
            continue
        if not _block_total(t, t.blocks[0]):
            raise TypingError("tot_add needs total typings")
        parts.append(_decompose(t)[0])
    (n1, l1, h1), (n2, l2, h2) = parts
    lo, hi = kernel.tot_add(l1, h1, l2, h2, Fraction(0))
    io = t1.io_arcs + t2.io_arcs
    return _compose(io, t1.directions + t2.directions, [(list(n1) + list(n2), lo, hi)])


def bind_t(t: Typing, arc: str, halves: tuple[str, str] | None = None) -> Feasible | Infeasible:
    """Splice ``arc``, fusing its two blocks first when they differ."""
    p, q = _halves(t, arc, halves)
    if t.block_of((1 << p) | (1 << q)) is not None:
        return bind_one(t, arc, halves)
    t = _repaired(t)
    plus, minus = t.io_arcs[p], t.io_arcs[q]
    blocks = _decompose(t)
    bx = next(k for k, (names, _, _) in enumerate(blocks) if plus in names)
    by = next(k for k, (names, _, _) in enumerate(blocks) if minus in names)
    nx, lx, hx = blocks[bx]
    ny, ly, hy = blocks[by]
    i, j = nx.index(plus), ny.index(minus)
    keep = [a for a in nx if a != plus] + [a for a in ny if a != minus]
    lo, hi, bad = kernel.bind_cross(lx, hx, len(nx), i, ly, hy, len(ny), j, Fraction(0))
    if bad is not None:
        if lo is None:
            ix, iy = kernel.expand_index(len(nx), i), kernel.expand_index(len(ny), j)
            return _witness(keep, bad, lx[ix][-1] + ly[iy][-1], hx[ix][-1] + hy[iy][-1], "bind")
        return _witness(keep, bad, lo[bad], hi[bad], "bind")
    out = [blk for k, blk in enumerate(blocks) if k not in (bx, by)]
    out.append((keep, lo, hi))
    return Feasible(_drop_and_compose(t, (p, q), out))


# --------------------------------------------------------------- schedules

@dataclass(frozen=True)
class BindingSchedule:
    order: tuple[str, ...]
    index_bound: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))


def _check_schedule(n: FlowNetwork, order: Sequence[str]) -> None:
    internal = [a.id for a in n.internal]
    if len(order) != len(internal) or set(order) != set(internal):
        raise ScheduleError("schedule is not a permutation of the internal arcs")


def schedule_index(n: FlowNetwork, s: BindingSchedule | Sequence[str]) -> int:
    """Largest block external dimension over all stages, replayed without typings."""
    order = s.order if isinstance(s, BindingSchedule) else tuple(s)
    _check_schedule(n, order)
    deg = n.degree()
    parent = {v: v for v in n.nodes}
    dim = dict(deg)

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    arcs = {a.id: a for a in n.arcs}
    best = max(deg.values(), default=0)
    for aid in order:
        a = arcs[aid]
        x, y = find(a.tail), find(a.head)
        if x == y:
            dim[x] -= 2
        else:
            parent[y] = x
            dim[x] = dim[x] + dim.pop(y) - 2
        best = max(best, dim[x])
    return best


def serialize_schedule(s: BindingSchedule) -> str:
    lines = list(s.order)
    if s.index_bound is not None:
        lines.append(f"# delta={s.index_bound}")
    return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> BindingSchedule:
    order, delta = [], None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("delta="):
                delta = int(body[6:])
            continue
        line = line.split("#", 1)[0].strip()
        if len(line.split()) != 1:
            raise ScheduleError(f"expected one arc id per line, got {raw!r}")
        order.append(line)
    if len(set(order)) != len(order):
        raise ScheduleError("arc listed twice in schedule")
    return BindingSchedule(tuple(order), delta)


# ----------------------------------------------------------------- engine

def _scaling(n: FlowNetwork) -> tuple[int, type | object]:
    scale = 1
    for a in n.arcs:
        scale = math.lcm(scale, a.lo.denominator, a.hi.denominator)
    total = sum(abs(a.hi) for a in n.arcs) * scale
    dtype = np.int64 if total < 2 ** 60 else object
    return scale, dtype


def comp_pt(n: FlowNetwork, s: BindingSchedule | Sequence[str], *,
            observer: Callable[[int, Typing], None] | None = None,
            dtype=None) -> Feasible | Infeasible:
    """Principal typing of ``n`` by splicing cut arcs in schedule order.

    Values are kept as integers scaled by the common denominator of all
    capacities, so the arithmetic is exact. ``observer(k, typing)`` sees
    the whole typing after stage k (k = 0 is the broken network); it is
    meant for tests and is costly on large inputs.
    """
    order = s.order if isinstance(s, BindingSchedule) else tuple(s)
    _check_schedule(n, order)
    scale, auto = _scaling(n)
    dtype = dtype or auto
    if dtype is object:
        conv = lambda x: x.numerator * (scale // x.denominator)
        zero = 0
    elif dtype is np.int64:
        conv = lambda x: x.numerator * (scale // x.denominator)
        zero = np.int64(0)
    else:  # custom number type for audits
        num = dtype
        conv = lambda x: num(x.numerator * (scale // x.denominator))
        zero = num(0)
        dtype = object
    idx = {a.id: k for k, a in enumerate(n.arcs)}
    arcs = n.arcs

    def key_name(key: int) -> str:
        a = arcs[key >> 1]
        if not a.is_internal:
            return a.id
        plus, minus = half_names(a.id)
        return plus if key & 1 else minus

    # key 2e: IO arc e or output half of internal arc e; key 2e+1: input half
    keys: dict[int, list[int]] = {}
    lo_of: dict[int, np.ndarray] = {}
    hi_of: dict[int, np.ndarray] = {}
    owner: dict[int, int] = {}
    inc = n.incidence()
    for bid, v in enumerate(n.nodes):
        ks, is_in, lc, uc = [], [], [], []
        for a in inc[v]:
            e = idx[a.id]
            if a.is_internal:
                k = 2 * e + 1 if a.head == v else 2 * e
                is_in.append(a.head == v)
            else:
                k = 2 * e
                is_in.append(a.is_input)
            ks.append(k)
            lc.append(conv(a.lo))
            uc.append(conv(a.hi))
        lo, hi, bad = kernel.one_pt(is_in, lc, uc, dtype if dtype is not object else object)
        if bad is not None:
            blk = OneNodeBlock(v, tuple(map(key_name, ks)), tuple("in" if f else "out" for f in is_in),
                               tuple(a.lo for a in inc[v]), tuple(a.hi for a in inc[v]))
            l, h = _raw_one_pt_bounds(is_in, blk, bad)
            return _witness(blk.arcs, bad, l, h, f"one_pt({v})")
        keys[bid], lo_of[bid], hi_of[bid] = ks, lo, hi
        for k in ks:
            owner[k] = bid

    net_inputs = {a.id for a in n.inputs}

    def snapshot() -> Typing:
        names_all = [key_name(k) for bid in keys for k in keys[bid]]
        ins = [x for x in names_all if x.endswith("+") or x in net_inputs]
        outs = [x for x in names_all if x not in set(ins)]
        io = ins + outs
        dirs = ["in"] * len(ins) + ["out"] * len(outs)
        blocks = []
        for bid in keys:
            names = [key_name(k) for k in keys[bid]]
            blocks.append((names, _unscale(lo_of[bid], scale), _unscale(hi_of[bid], scale)))
        return _compose(io, dirs, blocks)

    if observer is not None:
        observer(0, snapshot())

    for step, aid in enumerate(order, start=1):
        e = idx[aid]
        kp, km = 2 * e + 1, 2 * e
        bx, by = owner[kp], owner[km]
        if bx == by:
            ks = keys[bx]
            i, j = ks.index(kp), ks.index(km)
            new_keys = [k for k in ks if k != kp and k != km]
            lo, hi, bad = kernel.bind_same(lo_of[bx], hi_of[bx], len(ks), i, j, zero)
            if bad is not None:
                return _engine_witness(key_name, new_keys, lo_of[bx], hi_of[bx], len(ks), i, j,
                                       lo, hi, bad, scale, aid)
        else:
            kx, ky = keys[bx], keys[by]
            i, j = kx.index(kp), ky.index(km)
            new_keys = [k for k in kx if k != kp] + [k for k in ky if k != km]
            lo, hi, bad = kernel.bind_cross(lo_of[bx], hi_of[bx], len(kx), i,
                                            lo_of[by], hi_of[by], len(ky), j, zero)
            if bad is not None:
                if lo is None:
                    ix, iy = kernel.expand_index(len(kx), i), kernel.expand_index(len(ky), j)
                    l = lo_of[bx][ix][-1] + lo_of[by][iy][-1]
                    h = hi_of[bx][ix][-1] + hi_of[by][iy][-1]
                    return _witness(list(map(key_name, new_keys)), bad, Fraction(int(l), scale),
                                    Fraction(int(h), scale), f"bind({aid})")
                return _witness(list(map(key_name, new_keys)), bad, Fraction(int(lo[bad]), scale),
                                Fraction(int(hi[bad]), scale), f"bind({aid})")
            for k in ky:
                owner[k] = bx
            del keys[by], lo_of[by], hi_of[by]
        del owner[kp], owner[km]
        keys[bx], lo_of[bx], hi_of[bx] = new_keys, lo, hi
        if observer is not None:
            observer(step, snapshot())

    io = [a.id for a in n.io_arcs]
    dirs = ["in" if a.is_input else "out" for a in n.io_arcs]
    blocks = []
    for bid in sorted(keys):
        blocks.append(([key_name(k) for k in keys[bid]], _unscale(lo_of[bid], scale),
                       _unscale(hi_of[bid], scale)))
    return Feasible(_compose(io, dirs, blocks, n.name))


def _unscale(arr: np.ndarray, scale: int) -> list[Fraction]:
    return [Fraction(int(x), scale) for x in arr.tolist()]


def _engine_witness(key_name, new_keys, lo0, hi0, d, i, j, lo, hi, bad, scale, aid) -> Infeasible:
    names = list(map(key_name, new_keys))
    if lo is None:
        idx = kernel.expand_index(d, i, j)
        l, h = lo0[idx][bad], hi0[idx][bad]
    else:
        l, h = lo[bad], hi[bad]
    return _witness(names, bad, Fraction(int(l), scale), Fraction(int(h), scale), f"bind({aid})")
