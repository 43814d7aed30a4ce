"""Dense interval-typing kernel.

A block typing over ``d`` arcs is a pair of arrays ``lo``, ``hi`` of
length ``2**d`` indexed by local bitmask. Complement within the block is
index ``2**d - 1 - A``, so the mirror image of an array is ``arr[::-1]``.

Only addition, subtraction, negation, max, min and comparisons are used,
so the kernel works unchanged on int64 arrays (scaled capacities), on
object arrays of Fractions, or on any audit number type.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["subset_sums", "one_pt", "bind_same", "bind_cross", "first_empty", "expand_index"]


def subset_sums(values, dtype) -> np.ndarray:
    """Array s with s[A] = sum of values[i] for bits i of A."""
    s = np.zeros(1, dtype=dtype)
    for v in values:
        s = np.concatenate((s, s + v))
    return s


def first_empty(lo: np.ndarray, hi: np.ndarray) -> int | None:
    bad = np.flatnonzero(lo > hi)
    return int(bad[0]) if bad.size else None


def one_pt(is_in, lc, uc, dtype=object):
    """Principal typing of a single node, as dense (lo, hi).

    For a split A + B of the node's arcs the signed inflow through A is
    capped by what A can push in, ``P(A) = uc(A_in) - lc(A_out)``, and by
    what B can drain, ``Q(B) = uc(B_out) - lc(B_in)``. The lower limit is
    the mirror statement. Evaluating at A = empty also tests that the node
    can balance at all. Returns ``(lo, hi, bad)``, with ``bad`` the first
    subset whose interval is empty, or None.
    """
    zero = dtype(0) if dtype is not object else 0
    vp = [u if i else zero - l for i, l, u in zip(is_in, lc, uc)]
    vq = [zero - l if i else u for i, l, u in zip(is_in, lc, uc)]
    P = subset_sums(vp, dtype)
    Q = subset_sums(vq, dtype)
    hi = np.minimum(P, Q[::-1])
    lo = np.maximum(-P[::-1], -Q)
    bad = first_empty(lo, hi)
    lo[0] = hi[0] = zero
    lo[-1] = hi[-1] = zero
    return lo, hi, bad


@lru_cache(maxsize=4096)
def expand_index(d: int, i: int, j: int | None = None) -> np.ndarray:
    """Masks over ``d`` bits with zero at positions i (and j), in order.

    Entry k is the k-th such mask, so indexing a 2**d array with it gives
    the restriction to the remaining arcs, in their original relative order.
    """
    if j is None:
        k = d - 1
        a = np.arange(1 << k, dtype=np.int64)
        low = a & ((1 << i) - 1)
        out = ((a >> i) << (i + 1)) | low
        out.setflags(write=False)
        return out
    p, q = (i, j) if i < j else (j, i)
    a = np.arange(1 << (d - 2), dtype=np.int64)
    # open a gap at p, then at q (q is measured in the d-1 bit space after p is inserted)
    x = ((a >> p) << (p + 1)) | (a & ((1 << p) - 1))
    x = ((x >> q) << (q + 1)) | (x & ((1 << q) - 1))
    x.setflags(write=False)
    return x


def _close(lo1: np.ndarray, hi1: np.ndarray, zero):
    """Re-anchor the full set at [0,0] and meet each entry with its mirror."""
    full = lo1.shape[0] - 1
    if not (lo1[full] <= zero <= hi1[full]):
        # the two halves cannot carry equal flow
        return None, None, full
    lo2, hi2 = lo1.copy(), hi1.copy()
    lo2[full] = hi2[full] = zero
    lo = np.maximum(lo2, -hi2[::-1])
    hi = np.minimum(hi2, -lo2[::-1])
    return lo, hi, first_empty(lo, hi)


def bind_same(lo, hi, d: int, i: int, j: int, zero=0):
    """Splice arcs i and j of one block. Returns (lo, hi, bad)."""
    idx = expand_index(d, i, j)
    return _close(lo[idx], hi[idx], zero)


def bind_cross(lo_x, hi_x, dx: int, i: int, lo_y, hi_y, dy: int, j: int, zero=0):
    """Fuse two blocks by total parallel addition and splice arc i of X with arc j of Y.

    The fused block lists X's remaining arcs first, then Y's. Restricting
    the sum table to subsets without the spliced pair needs only the
    restricted tables, so the full product is never built.
    """
    ix = expand_index(dx, i)
    iy = expand_index(dy, j)
    lx, hx = lo_x[ix], hi_x[ix]
    ly, hy = lo_y[iy], hi_y[iy]
    lo1 = (ly[:, None] + lx[None, :]).ravel()
    hi1 = (hy[:, None] + hx[None, :]).ravel()
    return _close(lo1, hi1, zero)


def tot_add(lo_x, hi_x, lo_y, hi_y, zero=0):
    """Interval sum over X's arcs then Y's arcs; empty and full set pinned to 0."""
    lo = (lo_y[:, None] + lo_x[None, :]).ravel()
    hi = (hi_y[:, None] + hi_x[None, :]).ravel()
    lo[0] = hi[0] = zero
    lo[-1] = hi[-1] = zero
    return lo, hi
