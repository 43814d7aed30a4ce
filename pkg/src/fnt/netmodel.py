"""Flow network data model and the NETF v1 text format.

Capacities are exact ``Fraction`` values throughout. A missing endpoint
(``None``) marks an input arc (no tail) or an output arc (no head).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

__all__ = [
    "Interval",
    "Arc",
    "FlowNetwork",
    "LayeredEmbedding",
    "Diagnostic",
    "ComponentPartition",
    "NetworkError",
    "to_fraction",
    "format_rational",
    "parse_network",
    "serialize_network",
    "validate_network",
    "components",
    "external_dim",
]


class NetworkError(ValueError):
    """Raised for malformed NETF input. Carries line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


def to_fraction(value) -> Fraction:
    """Exact conversion. Strings accept ``p/q`` and decimal notation."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are only exact if the caller meant the binary value
        return Fraction(value)
    if isinstance(value, str):
        value = value.strip()
    return Fraction(value)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Interval:
    """Closed rational interval ``[lo, hi]`` with ``lo <= hi``."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_fraction(self.lo), to_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def includes(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)},{format_rational(self.hi)}]"


ZERO = Interval(Fraction(0), Fraction(0))


@dataclass(frozen=True)
class Arc:
    id: str
    tail: str | None
    head: str | None
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", to_fraction(self.lo))
        object.__setattr__(self, "hi", to_fraction(self.hi))

    @property
    def is_input(self) -> bool:
        return self.tail is None and self.head is not None

    @property
    def is_output(self) -> bool:
        return self.head is None and self.tail is not None

    @property
    def is_internal(self) -> bool:
        return self.tail is not None and self.head is not None


@dataclass(frozen=True)
class FlowNetwork:
    """Nodes in declaration order plus arcs in declaration order.

    Construction does not validate; use :func:`validate_network`.
    """

    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...]
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "arcs", tuple(self.arcs))

    @cached_property
    def inputs(self) -> tuple[Arc, ...]:
        return tuple(a for a in self.arcs if a.is_input)

    @cached_property
    def outputs(self) -> tuple[Arc, ...]:
        return tuple(a for a in self.arcs if a.is_output)

    @cached_property
    def internal(self) -> tuple[Arc, ...]:
        return tuple(a for a in self.arcs if a.is_internal)

    @cached_property
    def io_arcs(self) -> tuple[Arc, ...]:
        """Canonical IO order: inputs then outputs, each in file order."""
        return self.inputs + self.outputs

    def arc(self, arc_id: str) -> Arc:
        for a in self.arcs:
            if a.id == arc_id:
                return a
        raise KeyError(arc_id)

    def arc_index(self) -> dict[str, int]:
        return {a.id: i for i, a in enumerate(self.arcs)}

    def incidence(self) -> dict[str, list[Arc]]:
        inc: dict[str, list[Arc]] = {v: [] for v in self.nodes}
        for a in self.arcs:
            for v in (a.tail, a.head):
                if v is not None and v in inc:
                    inc[v].append(a)
        return inc

    def degree(self) -> dict[str, int]:
        return {v: len(arcs) for v, arcs in self.incidence().items()}


@dataclass(frozen=True)
class LayeredEmbedding:
    """Onion-peel annotations standing in for a planar embedding.

    ``role`` only lists explicitly tagged internal arcs; untagged arcs get
    a default role from :meth:`roles`.
    """

    layer: Mapping[str, int]
    ring: Mapping[str, int] = field(default_factory=dict)
    role: Mapping[str, str] = field(default_factory=dict)

    @property
    def outer_k(self) -> int:
        return max(self.layer.values(), default=0)

    def roles(self, n: FlowNetwork) -> dict[str, str]:
        """Role of every internal arc, filling in defaults.

        An untagged arc is ``peel`` when both ends sit on the same layer and
        are consecutive in that layer's ring order, ``cross`` otherwise.
        """
        consecutive: set[frozenset] = set()
        by_layer: dict[int, list[tuple[int, str]]] = defaultdict(list)
        for v, pos in self.ring.items():
            if v in self.layer:
                by_layer[self.layer[v]].append((pos, v))
        for members in by_layer.values():
            members.sort()
            r = len(members)
            if r < 2:
                continue
            for j in range(r):
                u, w = members[j][1], members[(j + 1) % r][1]
                if u != w:
                    consecutive.add(frozenset((u, w)))
        out = {}
        for a in n.internal:
            tag = self.role.get(a.id)
            if tag is None:
                same = self.layer.get(a.tail) == self.layer.get(a.head)
                tag = "peel" if same and frozenset((a.tail, a.head)) in consecutive else "cross"
            out[a.id] = tag
        return out


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" or "warning"
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.level}: {self.code}: {self.message}"


@dataclass(frozen=True)
class ComponentPartition:
    """Maximal connected subnetworks, as (node-set, arc-id-set) pairs."""

    blocks: tuple[tuple[frozenset, frozenset], ...]
    diagnostics: tuple[Diagnostic, ...] = ()

    def __len__(self) -> int:
        return len(self.blocks)


# ---------------------------------------------------------------- parsing

def _parse_rational(tok: str, line: int, col: int) -> Fraction:
    try:
        x = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise NetworkError(f"bad rational {tok!r}", line, col) from None
    return x


def _tokens(raw: str) -> list[tuple[int, str]]:
    """Whitespace tokens with 1-based column numbers."""
    out, i, n = [], 0, len(raw)
    while i < n:
        if raw[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not raw[j].isspace():
            j += 1
        out.append((i + 1, raw[i:j]))
        i = j
    return out


def _int_option(value: str, key: str, minimum: int, line: int, col: int) -> int:
    try:
        v = int(value)
    except ValueError:
        raise NetworkError(f"{key} must be an integer, got {value!r}", line, col) from None
    if v < minimum:
        raise NetworkError(f"{key} must be >= {minimum}", line, col)
    return v


def parse_network(text: str) -> tuple[FlowNetwork, LayeredEmbedding | None]:
    """Parse NETF v1. Returns the network and its embedding annotations, if any."""
    name = None
    nodes: list[str] = []
    node_line: dict[str, int] = {}
    arcs: list[Arc] = []
    arc_pos: dict[str, tuple[int, int, int]] = {}
    layer: dict[str, int] = {}
    ring: dict[str, int] = {}
    role: dict[str, str] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = _tokens(body)
        if not toks:
            continue
        col, kw = toks[0]
        if kw == "net":
            if len(toks) != 2:
                raise NetworkError("expected 'net <name>'", lineno, col)
            if name is not None or nodes or arcs:
                raise NetworkError("'net' header must come first", lineno, col)
            name = toks[1][1]
        elif kw == "node":
            if len(toks) < 2:
                raise NetworkError("expected 'node <id>'", lineno, col)
            vcol, v = toks[1]
            if v == "_":
                raise NetworkError("'_' is not a valid node id", lineno, vcol)
            if v in node_line:
                raise NetworkError(f"duplicate node id {v!r}", lineno, vcol)
            node_line[v] = lineno
            nodes.append(v)
            for ocol, opt in toks[2:]:
                key, eq, val = opt.partition("=")
                if not eq:
                    raise NetworkError(f"unexpected token {opt!r}", lineno, ocol)
                if key == "layer":
                    layer[v] = _int_option(val, key, 1, lineno, ocol)
                elif key == "ring":
                    ring[v] = _int_option(val, key, 0, lineno, ocol)
                else:
                    raise NetworkError(f"unknown node option {key!r}", lineno, ocol)
        elif kw == "arc":
            if len(toks) < 6:
                raise NetworkError("expected 'arc <id> <tail> <head> <lo> <hi>'", lineno, col)
            acol, aid = toks[1]
            if aid in arc_pos:
                raise NetworkError(f"duplicate arc id {aid!r}", lineno, acol)
            tail = None if toks[2][1] == "_" else toks[2][1]
            head = None if toks[3][1] == "_" else toks[3][1]
            lo = _parse_rational(toks[4][1], lineno, toks[4][0])
            hi = _parse_rational(toks[5][1], lineno, toks[5][0])
            if lo < 0:
                raise NetworkError(f"negative lower capacity on arc {aid!r}", lineno, toks[4][0])
            if lo > hi:
                raise NetworkError(f"capacity violation lo > hi on arc {aid!r}", lineno, toks[4][0])
            for ocol, opt in toks[6:]:
                key, eq, val = opt.partition("=")
                if key != "role" or not eq or val not in ("peel", "cross"):
                    raise NetworkError(f"unexpected token {opt!r}", lineno, ocol)
                role[aid] = val
            arc_pos[aid] = (lineno, toks[2][0], toks[3][0])
            arcs.append(Arc(aid, tail, head, lo, hi))
        else:
            raise NetworkError(f"unknown keyword {kw!r}", lineno, col)

    for a in arcs:
        line, tcol, hcol = arc_pos[a.id]
        for v, c in ((a.tail, tcol), (a.head, hcol)):
            if v is not None and v not in node_line:
                raise NetworkError(f"arc {a.id!r} references undeclared node {v!r}", line, c)

    net = FlowNetwork(tuple(nodes), tuple(arcs), name)
    emb = None
    if layer or ring or role:
        emb = LayeredEmbedding(layer, ring, role)
    return net, emb


def serialize_network(n: FlowNetwork, e: LayeredEmbedding | None = None) -> str:
    """Canonical NETF v1 text. ``parse_network`` inverts it exactly."""
    lines = []
    if n.name is not None:
        lines.append(f"net {n.name}")
    for v in n.nodes:
        parts = [f"node {v}"]
        if e is not None and v in e.layer:
            parts.append(f"layer={e.layer[v]}")
        if e is not None and v in e.ring:
            parts.append(f"ring={e.ring[v]}")
        lines.append(" ".join(parts))
    for a in n.arcs:
        s = (f"arc {a.id} {a.tail or '_'} {a.head or '_'} "
             f"{format_rational(a.lo)} {format_rational(a.hi)}")
        if e is not None and a.id in e.role:
            s += f" role={e.role[a.id]}"
        lines.append(s)
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- validation

def validate_network(n: FlowNetwork, *, user_input: bool = True) -> list[Diagnostic]:
    """Empty list iff every structural invariant holds (warnings aside)."""
    diags: list[Diagnostic] = []
    seen_nodes: set[str] = set()
    for v in n.nodes:
        if v in seen_nodes:
            diags.append(Diagnostic("error", "duplicate-node", f"node {v!r} declared twice"))
        seen_nodes.add(v)
    seen_arcs: set[str] = set()
    pairs: dict[tuple[str, str], str] = {}
    for a in n.arcs:
        if a.id in seen_arcs:
            diags.append(Diagnostic("error", "duplicate-arc", f"arc {a.id!r} declared twice"))
        seen_arcs.add(a.id)
        if a.tail is None and a.head is None:
            diags.append(Diagnostic("error", "floating-arc", f"arc {a.id!r} has no endpoint"))
        for v in (a.tail, a.head):
            if v is not None and v not in seen_nodes:
                diags.append(Diagnostic("error", "dangling", f"arc {a.id!r} references unknown node {v!r}"))
        if a.tail is not None and a.tail == a.head:
            diags.append(Diagnostic("error", "self-loop", f"arc {a.id!r} is a self-loop at {a.tail!r}"))
        if a.lo < 0 or a.lo > a.hi:
            diags.append(Diagnostic("error", "capacity", f"arc {a.id!r} has bad capacities [{a.lo}, {a.hi}]"))
        if a.is_internal and a.tail != a.head:
            key = (a.tail, a.head)
            if key in pairs:
                diags.append(Diagnostic("error", "multi-arc",
                                        f"arcs {pairs[key]!r} and {a.id!r} both run {a.tail}->{a.head}"))
            else:
                pairs[key] = a.id
        if user_input and a.hi == 0:
            diags.append(Diagnostic("warning", "zero-capacity", f"arc {a.id!r} has upper capacity 0"))
    return diags


def components(n: FlowNetwork) -> ComponentPartition:
    """Connected components, ignoring arc direction. IO arcs join their node's block."""
    parent = {v: v for v in n.nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    diags = []
    for a in n.arcs:
        if a.is_internal and a.tail in parent and a.head in parent:
            ru, rv = find(a.tail), find(a.head)
            if ru != rv:
                parent[rv] = ru
    groups: dict[str, list[str]] = {}
    for v in n.nodes:
        groups.setdefault(find(v), []).append(v)
    arcs_of: dict[str, set[str]] = {r: set() for r in groups}
    for a in n.arcs:
        end = a.tail if a.tail is not None else a.head
        if end is None or end not in parent:
            diags.append(Diagnostic("error", "floating-arc", f"arc {a.id!r} belongs to no node"))
            continue
        arcs_of[find(end)].add(a.id)
    blocks = tuple((frozenset(vs), frozenset(arcs_of[r])) for r, vs in groups.items())
    return ComponentPartition(blocks, tuple(diags))


def external_dim(n: FlowNetwork, nodes: Iterable[str]) -> int:
    """Number of arcs with exactly one endpoint inside ``nodes``.

    IO arcs of the network count, since their missing end is outside.
    """
    inside = set(nodes)
    count = 0
    for a in n.arcs:
        t = a.tail in inside if a.tail is not None else False
        h = a.head in inside if a.head is not None else False
        if t != h:
            count += 1
    return count
