"""Exact polyhedral oracle for checking the compositional engine.

Everything here works on Fractions and uses textbook methods:
Fourier-Motzkin projection, enumeration of basic solutions for vertices,
and Edmonds-Karp for max-flow. It is meant for desk-scale instances.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .netmodel import ZERO, FlowNetwork, Interval, components
from .typings import Feasible, Infeasible, Typing, TypingError

__all__ = [
    "HPolytope",
    "Row",
    "OracleError",
    "constraints_of_network",
    "constraints_of_typing",
    "fm_eliminate",
    "minmax_objective",
    "oracle_pt",
    "vertices",
    "poly_includes",
    "check_tight",
    "input_safe",
    "output_safe",
    "strong_sub",
    "maxflow_augmenting",
]

ORACLE_IO_LIMIT = 12
SAFE_DIM_LIMIT = 6


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction, ...]
    rel: str  # "<=" or "="
    rhs: Fraction

    def holds(self, x: Sequence[Fraction]) -> bool:
        v = sum((c * xi for c, xi in zip(self.coeffs, x)), Fraction(0))
        return v <= self.rhs if self.rel == "<=" else v == self.rhs


@dataclass(frozen=True)
class HPolytope:
    variables: tuple[str, ...]
    rows: tuple[Row, ...]

    def contains(self, x: Sequence[Fraction]) -> bool:
        return all(r.holds(x) for r in self.rows)

    def intersect(self, other: "HPolytope") -> "HPolytope":
        if self.variables != other.variables:
            raise OracleError("variable lists differ")
        return HPolytope(self.variables, self.rows + other.rows)

    @property
    def is_empty_marker(self) -> bool:
        return any(all(c == 0 for c in r.coeffs) and
                   (r.rhs < 0 if r.rel == "<=" else r.rhs != 0) for r in self.rows)


def constraints_of_network(n: FlowNetwork) -> HPolytope:
    """Conservation at each node, plus ``lo <= x <= hi`` per arc.

    Lower capacities are nonnegative, so the lower rows also encode x >= 0.
    """
    var = tuple(a.id for a in n.arcs)
    pos = {a: i for i, a in enumerate(var)}
    rows = []
    w = len(var)
    for v in n.nodes:
        c = [Fraction(0)] * w
        touched = False
        for a in n.arcs:
            if a.head == v:
                c[pos[a.id]] += 1
                touched = True
            if a.tail == v:
                c[pos[a.id]] -= 1
                touched = True
        if touched:
            rows.append(Row(tuple(c), "=", Fraction(0)))
    for a in n.arcs:
        e = [Fraction(0)] * w
        e[pos[a.id]] = Fraction(1)
        rows.append(Row(tuple(e), "<=", a.hi))
        rows.append(Row(tuple(-x for x in e), "<=", -a.lo))
    return HPolytope(var, tuple(rows))


def _signed(t: Typing, mask: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(0) if not mask >> i & 1 else Fraction(1 if d == "in" else -1)
                 for i, d in enumerate(t.directions))


def constraints_of_typing(t: Typing, *, orthant: bool = False,
                          only: Sequence[int] | None = None) -> HPolytope:
    """Two rows per defined entry (one row for the pinned full set).

    The empty set contributes nothing. ``orthant`` adds x >= 0 for every
    arc, which is part of the polytope a typing denotes. ``only`` limits
    the rows to the listed subsets.
    """
    rows = []
    full = t.full_mask
    masks = sorted(t.entries) if only is None else sorted(only)
    for m in masks:
        if m == 0:
            continue
        iv = t.entries[m]
        c = _signed(t, m)
        if iv.lo == iv.hi and m == full:
            rows.append(Row(c, "=", iv.lo))
            continue
        rows.append(Row(c, "<=", iv.hi))
        rows.append(Row(tuple(-x for x in c), "<=", -iv.lo))
    if orthant:
        for i in range(t.dim):
            e = [Fraction(0)] * t.dim
            e[i] = Fraction(-1)
            rows.append(Row(tuple(e), "<=", Fraction(0)))
    return HPolytope(tuple(t.io_arcs), tuple(rows))


# --------------------------------------------------------- Fourier-Motzkin

def _normalize(coeffs: tuple, rhs: Fraction) -> tuple[tuple, Fraction]:
    for c in coeffs:
        if c != 0:
            s = abs(c)
            return tuple(x / s for x in coeffs), rhs / s
    return coeffs, rhs


class _System:
    """Working form: equalities and inequalities with Chernikov histories."""

    def __init__(self, p: HPolytope):
        self.vars = list(p.variables)
        self.eqs: list[tuple[tuple, Fraction]] = []
        self.ineqs: dict[tuple, tuple[Fraction, frozenset]] = {}
        self.infeasible = False
        self.fm_steps = 0
        k = 0
        for r in p.rows:
            if r.rel == "=":
                self.eqs.append((tuple(r.coeffs), r.rhs))
            else:
                self._add(tuple(r.coeffs), r.rhs, frozenset([k]))
                k += 1

    def _add(self, coeffs, rhs, hist):
        coeffs, rhs = _normalize(coeffs, rhs)
        if all(c == 0 for c in coeffs):
            if rhs < 0:
                self.infeasible = True
            return
        old = self.ineqs.get(coeffs)
        if old is None or rhs < old[0] or (rhs == old[0] and len(hist) < len(old[1])):
            self.ineqs[coeffs] = (rhs, hist)

    def substitute(self, j: int) -> bool:
        """Eliminate variable j through an equality, if one mentions it."""
        for k, (c, b) in enumerate(self.eqs):
            if c[j] != 0:
                break
        else:
            return False
        c, b = self.eqs.pop(k)
        piv = c[j]
        neweqs = []
        for c2, b2 in self.eqs:
            if c2[j] != 0:
                f = c2[j] / piv
                c2 = tuple(x - f * y for x, y in zip(c2, c))
                b2 = b2 - f * b
            if all(x == 0 for x in c2):
                if b2 != 0:
                    self.infeasible = True
                continue
            neweqs.append((c2, b2))
        self.eqs = neweqs
        old = self.ineqs
        self.ineqs = {}
        for c2, (b2, h) in old.items():
            if c2[j] != 0:
                f = c2[j] / piv
                c2 = tuple(x - f * y for x, y in zip(c2, c))
                b2 = b2 - f * b
            self._add(c2, b2, h)
        return True

    def fm(self, j: int) -> None:
        pos, neg, rest = [], [], []
        for c, (b, h) in self.ineqs.items():
            (pos if c[j] > 0 else neg if c[j] < 0 else rest).append((c, b, h))
        self.fm_steps += 1
        limit = self.fm_steps + 1
        self.ineqs = {}
        for c, b, h in rest:
            self._add(c, b, h)
        for cp, bp, hp in pos:
            for cn, bn, hn in neg:
                h = hp | hn
                if len(h) > limit:
                    continue  # Chernikov: provably redundant
                a, g = -cn[j], cp[j]
                c = tuple(a * x + g * y for x, y in zip(cp, cn))
                self._add(c, a * bp + g * bn, h)

    def cost(self, j: int) -> int:
        p = sum(1 for c in self.ineqs if c[j] > 0)
        q = sum(1 for c in self.ineqs if c[j] < 0)
        return p * q - p - q


def fm_eliminate(p: HPolytope, drop: Sequence[str]) -> HPolytope:
    """Exact projection of ``p`` onto the variables not in ``drop``."""
    sys_ = _System(p)
    todo = [sys_.vars.index(v) for v in drop]
    # equalities first, until none mentions a dropped variable; FM never
    # touches equalities, so the Chernikov counts below stay valid
    changed = True
    while changed and not sys_.infeasible:
        changed = False
        for j in list(todo):
            if sys_.substitute(j):
                todo.remove(j)
                changed = True
    while todo and not sys_.infeasible:
        j = min(todo, key=sys_.cost)
        sys_.fm(j)
        todo.remove(j)
    keep = [j for j in range(len(sys_.vars)) if j not in {sys_.vars.index(v) for v in drop}]
    names = tuple(sys_.vars[j] for j in keep)
    if sys_.infeasible:
        return HPolytope(names, (Row(tuple(Fraction(0) for _ in keep), "<=", Fraction(-1)),))
    rows = []
    for c, b in sys_.eqs:
        rows.append(Row(tuple(c[j] for j in keep), "=", b))
    for c, (b, _) in sorted(sys_.ineqs.items()):
        rows.append(Row(tuple(c[j] for j in keep), "<=", b))
    return HPolytope(names, tuple(rows))


def minmax_objective(p: HPolytope, coeffs: Mapping[str, Fraction] | Sequence[Fraction]):
    """Exact [min, max] of a linear objective over p, or None when p is empty.

    A fresh variable z is tied to the objective and everything else is
    eliminated; the surviving rows bound z.
    """
    if isinstance(coeffs, Mapping):
        obj = [Fraction(coeffs.get(v, 0)) for v in p.variables]
    else:
        obj = [Fraction(c) for c in coeffs]
    z = "__z__"
    rows = [Row(r.coeffs + (Fraction(0),), r.rel, r.rhs) for r in p.rows]
    rows.append(Row(tuple(obj) + (Fraction(-1),), "=", Fraction(0)))
    q = fm_eliminate(HPolytope(p.variables + (z,), tuple(rows)), p.variables)
    lo, hi = None, None
    for r in q.rows:
        c = r.coeffs[0]
        if c == 0:
            if (r.rhs < 0 if r.rel == "<=" else r.rhs != 0):
                return None
            continue
        v = r.rhs / c
        if r.rel == "=":
            lo = v if lo is None else max(lo, v)
            hi = v if hi is None else min(hi, v)
        elif c > 0:
            hi = v if hi is None else min(hi, v)
        else:
            lo = v if lo is None else max(lo, v)
    if lo is None or hi is None:
        raise OracleError("objective is unbounded")
    if lo > hi:
        return None
    return Interval(lo, hi)


def oracle_pt(n: FlowNetwork) -> Feasible | Infeasible:
    """Principal typing by projection: per component, per subset, exact min/max."""
    io = n.io_arcs
    if len(io) > ORACLE_IO_LIMIT:
        raise OracleError(f"oracle limited to {ORACLE_IO_LIMIT} IO arcs")
    names = tuple(a.id for a in io)
    dirs = tuple("in" if a.is_input else "out" for a in io)
    pos = {a: i for i, a in enumerate(names)}
    entries = {0: ZERO, (1 << len(names)) - 1: ZERO}
    blocks = []
    for nodes, arcids in components(n).blocks:
        sub = FlowNetwork(tuple(v for v in n.nodes if v in nodes),
                          tuple(a for a in n.arcs if a.id in arcids))
        full = constraints_of_network(sub)
        ext = [a.id for a in sub.arcs if not a.is_internal]
        proj = fm_eliminate(full, [a.id for a in sub.arcs if a.is_internal])
        if proj.is_empty_marker:
            return Infeasible(tuple(ext), Fraction(1), Fraction(0), "oracle")
        if not ext:
            # closed component: only feasibility matters
            if _empty(proj):
                return Infeasible((), Fraction(1), Fraction(0), "oracle")
            continue
        # keep the component's arcs in the network's canonical order
        ext.sort(key=lambda a: pos[a])
        proj = fm_eliminate(_reorder(proj, ext), [])
        bmask = sum(1 << pos[a] for a in ext)
        blocks.append(bmask)
        k = len(ext)
        for local in range(1, 1 << k):
            obj = {}
            gm = 0
            for i in range(k):
                if local >> i & 1:
                    a = ext[i]
                    obj[a] = Fraction(1 if dirs[pos[a]] == "in" else -1)
                    gm |= 1 << pos[a]
            iv = minmax_objective(proj, obj)
            if iv is None:
                return Infeasible(tuple(ext), Fraction(1), Fraction(0), "oracle")
            entries[gm] = iv
    return Feasible(Typing(names, dirs, entries, tuple(blocks), n.name))


def _reorder(p: HPolytope, order: Sequence[str]) -> HPolytope:
    idx = [p.variables.index(v) for v in order]
    return HPolytope(tuple(order), tuple(Row(tuple(r.coeffs[i] for i in idx), r.rel, r.rhs)
                                         for r in p.rows))


def _empty(p: HPolytope) -> bool:
    q = fm_eliminate(p, p.variables)
    return q.is_empty_marker


# ---------------------------------------------------------------- vertices

def _solve(rows: Sequence[tuple[tuple, Fraction]], w: int):
    """Unique solution of a square-or-taller system by Gaussian elimination, else None."""
    m = [list(c) + [b] for c, b in rows]
    r = 0
    piv_cols = []
    for col in range(w):
        sel = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if sel is None:
            return None
        m[r], m[sel] = m[sel], m[r]
        pv = m[r][col]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv_cols.append(col)
        r += 1
    for i in range(r, len(m)):
        if m[i][w] != 0:
            return None
    return tuple(m[i][w] for i in range(w))


def _rank(rows: Sequence[tuple], w: int) -> int:
    m = [list(r) for r in rows]
    r = 0
    for col in range(w):
        sel = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        for i in range(r + 1, len(m)):
            if m[i][col] != 0:
                f = m[i][col] / m[r][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    return r


def _int_row(coeffs, rhs) -> tuple[tuple[int, ...], int]:
    """Scale a rational row to coprime integers, direction preserved."""
    den = 1
    for x in (*coeffs, rhs):
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in (*coeffs, rhs)]
    g = 0
    for x in ints[:-1]:
        g = math.gcd(g, x)
    g = g or 1
    return tuple(x // g for x in ints[:-1]), Fraction(ints[-1], g)


def vertices(p: HPolytope) -> list[tuple[Fraction, ...]]:
    """All vertices of a bounded polytope, by basic-solution enumeration.

    Candidate bases are screened in floating point (integer rows, so a
    nonsingular basis has determinant at least 1) and every survivor is
    re-solved and checked in exact arithmetic.
    """
    w = len(p.variables)
    if w > 8:
        raise OracleError("vertex enumeration limited to 8 variables")
    if w == 0:
        return [()] if p.contains(()) else []
    for j in range(w):
        e = [Fraction(0)] * w
        e[j] = Fraction(1)
        try:
            iv = minmax_objective(p, e)
        except OracleError:
            raise OracleError("polytope is unbounded") from None
        if iv is None:
            return []
    eqs = []
    for r in p.rows:
        if r.rel == "=" and _rank([c for c, _ in eqs] + [r.coeffs], w) > len(eqs):
            eqs.append(_int_row(r.coeffs, r.rhs))
    best: dict = {}
    for r in p.rows:
        if r.rel == "<=":
            c, b = _int_row(r.coeffs, r.rhs)
            if any(c) and (c not in best or b < best[c]):
                best[c] = b
    ineqs = list(best.items())
    free = w - len(eqs)
    if free == 0:
        x = _solve(eqs, w)
        return [x] if x is not None and p.contains(x) else []
    A = np.array([c for c, _ in ineqs], dtype=float)
    bvec = np.array([float(b) for _, b in ineqs])
    E = np.array([[float(x) for x in c] for c, _ in eqs], dtype=float).reshape(len(eqs), w)
    ebv = np.array([float(b) for _, b in eqs])
    combos = np.array(list(itertools.combinations(range(len(ineqs)), free)), dtype=np.int64)
    if combos.size == 0:
        return []
    found: set = set()
    seen: set = set()
    scale = 1.0 + float(np.abs(bvec).max(initial=0.0)) + float(np.abs(ebv).max(initial=0.0))
    for chunk in np.array_split(combos, max(1, len(combos) // 20000 + 1)):
        M = np.concatenate((np.broadcast_to(E, (len(chunk),) + E.shape), A[chunk]), axis=1)
        rhs = np.concatenate((np.broadcast_to(ebv, (len(chunk), len(eqs))), bvec[chunk]), axis=1)
        ok = np.abs(np.linalg.det(M)) > 0.5
        if not ok.any():
            continue
        xs = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
        slack = A @ xs.T - bvec[:, None]
        feas = (slack <= 1e-7 * scale).all(axis=0)
        for combo, xf in zip(chunk[ok][feas], xs[feas]):
            key = tuple(np.round(xf, 6))
            if key in seen:
                continue  # degenerate vertex, already confirmed
            x = _solve(eqs + [(ineqs[i][0], ineqs[i][1]) for i in combo], w)
            if x is not None and p.contains(x):
                seen.add(key)
                found.add(x)
    return sorted(found)


def poly_includes(p: HPolytope, q: HPolytope) -> bool:
    """True iff q is a subset of p (q bounded)."""
    if p.variables != q.variables:
        raise OracleError("variable lists differ")
    return all(p.contains(v) for v in vertices(q))


def check_tight(t: Typing) -> bool:
    """Every defined entry equals the true range of its objective over poly(t)."""
    p = constraints_of_typing(t, orthant=True)
    for m, iv in t.entries.items():
        if m == 0:
            continue
        got = minmax_objective(p, _signed(t, m))
        if got is None or got != iv:
            return False
    return True


def _poly(t: Typing) -> HPolytope:
    return constraints_of_typing(t, orthant=True)


def _side_entries(t: Typing, side_mask: int) -> list[int]:
    return [m for m in t.entries if m and m & ~side_mask == 0]


def _safe(t: Typing, u: Typing, side_mask: int) -> bool:
    if t.io_arcs != u.io_arcs or t.directions != u.directions:
        raise OracleError("typings range over different arcs")
    if t.dim > SAFE_DIM_LIMIT:
        raise OracleError(f"safety checks limited to dimension {SAFE_DIM_LIMIT}")
    pt = _poly(t)
    s = constraints_of_typing(t, orthant=True, only=_side_entries(t, side_mask))
    pus = _poly(u).intersect(s)
    return (poly_includes(_poly(u), pt)
            and poly_includes(pus, pt)
            and poly_includes(pt, pus))


def input_safe(t: Typing, u: Typing) -> bool:
    """Replacing a u-component by a t-component is safe for every input t accepts."""
    return _safe(t, u, t.input_mask)


def output_safe(t: Typing, u: Typing) -> bool:
    return _safe(t, u, t.output_mask)


def strong_sub(u: Typing, t: Typing) -> bool:
    """``u`` is a strong subtyping of ``t``."""
    return input_safe(t, u) and output_safe(t, u)


# ---------------------------------------------------------------- max-flow

def maxflow_augmenting(n: FlowNetwork) -> Fraction:
    """Edmonds-Karp on exact rationals, all inputs fed by one source."""
    if any(a.lo != 0 for a in n.arcs):
        raise OracleError("maxflow_augmenting needs all lower capacities to be 0")
    src, snk = object(), object()
    cap: dict = {}

    def add(u, v, c):
        cap.setdefault(u, {}).setdefault(v, Fraction(0))
        cap.setdefault(v, {}).setdefault(u, Fraction(0))
        cap[u][v] += c

    for a in n.arcs:
        u = src if a.tail is None else a.tail
        v = snk if a.head is None else a.head
        add(u, v, a.hi)
    if src not in cap or snk not in cap:
        return Fraction(0)
    total = Fraction(0)
    while True:
        parent = {src: None}
        dq = deque([src])
        while dq and snk not in parent:
            u = dq.popleft()
            for v, c in cap[u].items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    dq.append(v)
        if snk not in parent:
            return total
        path = []
        v = snk
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        push = min(cap[u][v] for u, v in path)
        for u, v in path:
            cap[u][v] -= push
            cap[v][u] += push
        total += push
