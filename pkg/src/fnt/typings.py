"""Interval typings over input/output arcs.

A typing assigns intervals to subsets of its IO arcs. Subsets are
bitmasks over ``io_arcs``: bit ``i`` stands for ``io_arcs[i]``. The arcs
are partitioned into component blocks; a locally total typing defines
every subset inside a block and nothing that straddles two blocks,
except the empty set and the full set, both pinned to ``[0, 0]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .netmodel import ZERO, Interval, format_rational, to_fraction

__all__ = [
    "Typing",
    "Feasible",
    "Infeasible",
    "TypingError",
    "make_typing",
    "satisfies",
    "flow_bounds",
    "extend_by_complement",
    "meet",
    "is_subtyping",
    "realizable_low_dim",
    "serialize_typing",
    "parse_typing",
    "check_complement_symmetry",
    "DEFAULT_DIM_LIMIT",
]

DEFAULT_DIM_LIMIT = 24


class TypingError(ValueError):
    pass


def _bits(mask: int) -> Iterable[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass(frozen=True, eq=False)
class Typing:
    io_arcs: tuple[str, ...]
    directions: tuple[str, ...]  # "in" / "out", aligned with io_arcs
    entries: Mapping[int, Interval]
    blocks: tuple[int, ...] = ()
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "io_arcs", tuple(self.io_arcs))
        object.__setattr__(self, "directions", tuple(self.directions))
        object.__setattr__(self, "entries", dict(self.entries))
        if len(self.io_arcs) != len(self.directions):
            raise TypingError("io_arcs and directions differ in length")
        if len(set(self.io_arcs)) != len(self.io_arcs):
            raise TypingError("duplicate arc in typing")
        for d in self.directions:
            if d not in ("in", "out"):
                raise TypingError(f"bad direction {d!r}")
        full = self.full_mask
        blocks = tuple(self.blocks)
        if not blocks and full:
            blocks = (full,)
        acc = 0
        for b in blocks:
            if b == 0 or b & acc or b & ~full:
                raise TypingError("component blocks must partition the arcs")
            acc |= b
        if acc != full:
            raise TypingError("component blocks must partition the arcs")
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=_low_bit)))

    # equality ignores the name
    def __eq__(self, other) -> bool:
        if not isinstance(other, Typing):
            return NotImplemented
        return (self.io_arcs == other.io_arcs and self.directions == other.directions
                and self.blocks == other.blocks and self.entries == other.entries)

    def __hash__(self):
        return hash((self.io_arcs, self.blocks, frozenset(self.entries.items())))

    @property
    def dim(self) -> int:
        return len(self.io_arcs)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.io_arcs)) - 1

    @property
    def input_mask(self) -> int:
        return sum(1 << i for i, d in enumerate(self.directions) if d == "in")

    @property
    def output_mask(self) -> int:
        return sum(1 << i for i, d in enumerate(self.directions) if d == "out")

    def mask(self, arcs: Iterable[str]) -> int:
        pos = {a: i for i, a in enumerate(self.io_arcs)}
        m = 0
        for a in arcs:
            if a not in pos:
                raise TypingError(f"unknown arc {a!r}")
            m |= 1 << pos[a]
        return m

    def arcs_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.io_arcs[i] for i in _bits(mask))

    def block_of(self, mask: int) -> int | None:
        """The block containing a nonempty mask, or None if it straddles blocks."""
        for b in self.blocks:
            if mask & b:
                return b if mask & ~b == 0 else None
        return None

    def __getitem__(self, key) -> Interval:
        if not isinstance(key, int):
            key = self.mask(key)
        return self.entries[key]

    def get(self, key, default=None):
        if not isinstance(key, int):
            key = self.mask(key)
        return self.entries.get(key, default)

    def is_locally_total(self) -> bool:
        for b in self.blocks:
            sub = b
            while sub:
                if sub not in self.entries:
                    return False
                sub = (sub - 1) & b
        for m in self.entries:
            if m and m != self.full_mask and self.block_of(m) is None:
                return False
        return True

    def signed_sum(self, f: Mapping[str, Fraction], mask: int) -> Fraction:
        s = Fraction(0)
        for i in _bits(mask):
            v = to_fraction(f[self.io_arcs[i]])
            s += v if self.directions[i] == "in" else -v
        return s

    def renamed(self, mapping: Mapping[str, str]) -> "Typing":
        arcs = tuple(mapping.get(a, a) for a in self.io_arcs)
        return Typing(arcs, self.directions, self.entries, self.blocks, self.name)

    def __repr__(self) -> str:
        return f"Typing({self.name or ''} dim={self.dim} entries={len(self.entries)} blocks={len(self.blocks)})"


def _low_bit(m: int) -> int:
    return (m & -m).bit_length()


@dataclass(frozen=True)
class Feasible:
    typing: Typing
    ok = True

    def unwrap(self) -> Typing:
        return self.typing


@dataclass(frozen=True)
class Infeasible:
    """First witnessing empty interval: ``lo > hi`` on ``subset``."""

    subset: tuple[str, ...]
    lo: Fraction
    hi: Fraction
    stage: str = ""
    ok = False

    def unwrap(self) -> Typing:
        raise TypingError(f"infeasible: subset {{{','.join(self.subset)}}} has empty type "
                          f"[{format_rational(self.lo)},{format_rational(self.hi)}]")


def make_typing(inputs: Sequence[str], outputs: Sequence[str],
                entries: Mapping, blocks: Sequence[Iterable[str]] | None = None,
                name: str | None = None) -> Typing:
    """Build a typing from arc-name keyed entries.

    Keys may be iterables of arc names or bitmasks; values may be Intervals
    or ``(lo, hi)`` pairs. ``∅`` and the full set are filled in.
    """
    io = tuple(inputs) + tuple(outputs)
    dirs = ("in",) * len(inputs) + ("out",) * len(outputs)
    pos = {a: i for i, a in enumerate(io)}

    def to_mask(key):
        if isinstance(key, int):
            return key
        if isinstance(key, str):
            key = (key,)
        m = 0
        for a in key:
            m |= 1 << pos[a]
        return m

    ent = {}
    for k, v in entries.items():
        ent[to_mask(k)] = v if isinstance(v, Interval) else Interval(*v)
    ent.setdefault(0, ZERO)
    ent.setdefault((1 << len(io)) - 1, ZERO)
    bl = tuple(to_mask(tuple(b)) for b in blocks) if blocks else ()
    return Typing(io, dirs, ent, bl, name)


# ------------------------------------------------------------ operations

def _check_domain(f: Mapping[str, Fraction], t: Typing) -> None:
    if set(f) != set(t.io_arcs):
        raise TypingError("assignment domain differs from the typing's arcs")


def satisfies(f: Mapping[str, object], t: Typing) -> bool:
    """True iff the signed flow over every defined subset lies in its type."""
    _check_domain(f, t)
    vals = {a: to_fraction(v) for a, v in f.items()}
    if any(v < 0 for v in vals.values()):
        return False
    for m, iv in t.entries.items():
        if t.signed_sum(vals, m) not in iv:
            return False
    return True


def flow_bounds(t: Typing) -> list[tuple[Fraction, Fraction]]:
    """(min, max) total inflow per component block, read off entry(inputs)."""
    out = []
    ins = t.input_mask
    for b in t.blocks:
        m = b & ins
        iv = t.entries.get(m)
        if iv is None:
            raise TypingError(f"entry for inputs {t.arcs_of(m)} undefined")
        out.append((iv.lo, iv.hi))
    return out


def extend_by_complement(t: Typing) -> Typing:
    """Fill each undefined subset whose in-block complement is defined."""
    ent = dict(t.entries)
    for b in t.blocks:
        for m in list(t.entries):
            if m == 0 or m & ~b:
                continue
            c = b & ~m
            if c == 0:
                continue
            have = ent.get(c)
            mine = -t.entries[m]
            if have is None:
                ent[c] = mine
            elif have != mine:
                raise TypingError(f"complement conflict on {t.arcs_of(m)}: "
                                  f"{t.entries[m]} vs {have}")
    return Typing(t.io_arcs, t.directions, ent, t.blocks, t.name)


def _same_shape(t1: Typing, t2: Typing) -> None:
    if t1.io_arcs != t2.io_arcs or t1.directions != t2.directions:
        raise TypingError("typings range over different IO arcs")


def meet(t1: Typing, t2: Typing) -> Feasible | Infeasible:
    """Entrywise intersection; Infeasible at the first empty intersection."""
    _same_shape(t1, t2)
    if set(t1.entries) != set(t2.entries):
        raise TypingError("typings define different subset families")
    ent = {}
    for m in sorted(t1.entries):
        a, b = t1.entries[m], t2.entries[m]
        iv = a.intersect(b)
        if iv is None:
            return Infeasible(t1.arcs_of(m), max(a.lo, b.lo), min(a.hi, b.hi), "meet")
        ent[m] = iv
    blocks = t1.blocks if t1.blocks == t2.blocks else ()
    return Feasible(Typing(t1.io_arcs, t1.directions, ent, blocks))


def is_subtyping(t1: Typing, t2: Typing) -> bool:
    """``t1 <: t2``: every shared type of t1 contains the type of t2."""
    _same_shape(t1, t2)
    for m, iv in t2.entries.items():
        mine = t1.entries.get(m)
        if mine is not None and not mine.includes(iv):
            return False
    return True


def realizable_low_dim(t: Typing, rule: str = "sum") -> bool | None:
    """Decide whether a dimension 2 or 3 typing is the principal typing of a network.

    ``rule="sum"`` applies the classical sum characterization: for two inputs
    and one output, singletons ``[r1,s1]``, ``[r2,s2]`` and ``[-s3,-r3]``
    with ``r1 + r2 = r3`` and ``max(s1,s2) <= s3 <= s1 + s2``. One input and
    two outputs is handled by the sign flip. ``rule="exact"`` instead checks
    that the singleton box, intersected with conservation, is tight, which
    is what a one-node realization needs. Returns None above dimension 3.
    """
    if rule not in ("sum", "exact"):
        raise ValueError(f"unknown rule {rule!r}")
    d = t.dim
    if d > 3:
        return None
    if d < 2:
        return d == 0 or (d == 1 and t.entries.get(1, ZERO) == ZERO)
    if len(t.blocks) != 1 or not t.is_locally_total():
        return False
    try:
        extend_by_complement(t)
    except TypingError:
        return False
    for m, iv in t.entries.items():
        c = t.full_mask & ~m
        if t.entries.get(c) != -iv:
            return False

    # signed value x_i of the flow on arc i: its singleton type read as a flow range
    ranges = []
    for i, dirn in enumerate(t.directions):
        iv = t.entries[1 << i]
        ranges.append((iv.lo, iv.hi) if dirn == "in" else (-iv.hi, -iv.lo))
    if any(r < 0 for r, _ in ranges):
        return False
    n_in = t.directions.count("in")
    if d == 2:
        if n_in != 1:
            # two inputs or two outputs: only the zero flow is feasible
            return all(r == s == 0 for r, s in ranges)
        (r1, s1), (r2, s2) = ranges
        return r1 == r2 and s1 == s2
    if n_in in (0, 3):
        return all(r == s == 0 for r, s in ranges)
    # sides: the lone arc against the pair
    lone = [i for i in range(3) if (t.directions[i] == "in") == (n_in == 1)][0]
    pair = [i for i in range(3) if i != lone]
    (r1, s1), (r2, s2) = ranges[pair[0]], ranges[pair[1]]
    r3, s3 = ranges[lone]
    if rule == "sum":
        return r1 + r2 == r3 and max(s1, s2) <= s3 <= s1 + s2
    # exact: x3 = x1 + x2 with each x in its box must attain every box endpoint
    return (r3 >= r1 + r2 and s3 <= s1 + s2
            and r1 >= r3 - s2 and s1 <= s3 - r2
            and r2 >= r3 - s1 and s2 <= s3 - r1)


def check_complement_symmetry(t: Typing) -> list[tuple[int, int]]:
    """Pairs (A, complement) whose defined entries are not mirror images."""
    bad = []
    for b in t.blocks:
        for m, iv in t.entries.items():
            if m == 0 or m & ~b:
                continue
            c = b & ~m
            other = t.entries.get(c, ZERO if c == 0 else None)
            if other is not None and other != -iv:
                bad.append((m, c))
    return bad


# -------------------------------------------------------------- TYPF v1

def serialize_typing(t: Typing) -> str:
    ins = [a for a, d in zip(t.io_arcs, t.directions) if d == "in"]
    outs = [a for a, d in zip(t.io_arcs, t.directions) if d == "out"]
    if list(t.io_arcs) != ins + outs:
        # TYPF lists inputs first; reorder into canonical form
        order = [t.io_arcs.index(a) for a in ins + outs]
        t = _permute(t, order)
    head = f"typing {t.name or 'T'} in:{','.join(ins)} out:{','.join(outs)}"
    if len(t.blocks) > 1:
        head += " blocks:" + "|".join(",".join(t.arcs_of(b)) for b in t.blocks)
    lines = [head]
    for m in sorted(t.entries):
        iv = t.entries[m]
        lines.append(f"t {{{','.join(t.arcs_of(m))}}} {format_rational(iv.lo)} {format_rational(iv.hi)}")
    return "\n".join(lines) + "\n"


def _permute(t: Typing, order: Sequence[int]) -> Typing:
    """Reorder arcs: new position j holds old arc ``order[j]``."""
    remap = {old: new for new, old in enumerate(order)}

    def conv(m):
        r = 0
        for i in _bits(m):
            r |= 1 << remap[i]
        return r

    return Typing(tuple(t.io_arcs[i] for i in order), tuple(t.directions[i] for i in order),
                  {conv(m): iv for m, iv in t.entries.items()},
                  tuple(conv(b) for b in t.blocks), t.name)


def parse_typing(text: str) -> Typing:
    header = None
    entries: dict[int, Interval] = {}
    pos: dict[str, int] = {}
    blocks_spec = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("typing"):
            if header is not None:
                raise TypingError(f"line {lineno}: second header")
            parts = body.split()
            if len(parts) < 4 or not parts[2].startswith("in:") or not parts[3].startswith("out:"):
                raise TypingError(f"line {lineno}: expected 'typing <name> in:<..> out:<..>'")
            ins = [a for a in parts[2][3:].split(",") if a]
            outs = [a for a in parts[3][4:].split(",") if a]
            for extra in parts[4:]:
                if extra.startswith("blocks:"):
                    blocks_spec = [[a for a in grp.split(",") if a] for grp in extra[7:].split("|")]
                else:
                    raise TypingError(f"line {lineno}: unexpected token {extra!r}")
            header = (parts[1], ins, outs)
            for i, a in enumerate(ins + outs):
                if a in pos:
                    raise TypingError(f"line {lineno}: arc {a!r} listed twice")
                pos[a] = i
            continue
        if header is None:
            raise TypingError(f"line {lineno}: entry before header")
        if not body.startswith("t "):
            raise TypingError(f"line {lineno}: expected 't {{...}} lo hi'")
        rest = body[2:].strip()
        if not rest.startswith("{") or "}" not in rest:
            raise TypingError(f"line {lineno}: missing subset braces")
        close = rest.index("}")
        names = [a.strip() for a in rest[1:close].split(",") if a.strip()]
        nums = rest[close + 1:].split()
        if len(nums) != 2:
            raise TypingError(f"line {lineno}: expected two bounds")
        try:
            lo, hi = Fraction(nums[0]), Fraction(nums[1])
        except (ValueError, ZeroDivisionError):
            raise TypingError(f"line {lineno}: bad rational") from None
        if lo > hi:
            raise TypingError(f"line {lineno}: empty interval")
        m = 0
        for a in names:
            if a not in pos:
                raise TypingError(f"line {lineno}: unknown arc {a!r}")
            if m & (1 << pos[a]):
                raise TypingError(f"line {lineno}: arc {a!r} repeated")
            m |= 1 << pos[a]
        if m in entries:
            raise TypingError(f"line {lineno}: duplicate subset")
        entries[m] = Interval(lo, hi)
    if header is None:
        raise TypingError("missing typing header")
    name, ins, outs = header
    full = (1 << (len(ins) + len(outs))) - 1
    for m in (0, full):
        if m in entries and entries[m] != ZERO:
            raise TypingError("entries for the empty and the full set must be [0,0]")
        entries[m] = ZERO
    blocks = ()
    if blocks_spec:
        blocks = tuple(sum(1 << pos[a] for a in grp) for grp in blocks_spec)
    try:
        return Typing(tuple(ins + outs), ("in",) * len(ins) + ("out",) * len(outs),
                      entries, blocks, name)
    except KeyError as exc:
        raise TypingError(f"unknown arc {exc.args[0]!r} in blocks") from None
