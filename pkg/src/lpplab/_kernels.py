"""Compiled inner loops: counter-based weights and the antidiagonal sweep.

Everything here is nopython/nogil so that trial-level threads run in
parallel.  Fields and regions arrive pre-flattened into integer arrays by
``WeightField.compile`` and ``Region.compiled``.
"""

import math

import numpy as np
from numba import njit

from .regions import OP_AND, OP_BOX, OP_NOT, OP_OR, OP_RECT

M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
INV53 = 1.0 / 9007199254740992.0

NODE_LEAF, NODE_DISCOUNT, NODE_SELECT = 0, 1, 2


@njit(inline="always")
def fmix64(z):
    z = z ^ (z >> S30)
    z = z * M1
    z = z ^ (z >> S27)
    z = z * M2
    return z ^ (z >> S31)


@njit(inline="always")
def point_bits(key, x, y):
    h = fmix64(key ^ np.uint64(x))
    return fmix64(h ^ (np.uint64(y) * GOLDEN))


@njit(inline="always")
def exp_weight(key, x, y):
    u = (float(point_bits(key, x, y) >> S11) + 0.5) * INV53
    return -math.log1p(-u)


@njit(inline="always")
def in_region(rprog, roff, rid, x, y):
    phi = x + y
    psi = y - x
    stack = np.uint64(0)
    one = np.uint64(1)
    for j in range(roff[rid], roff[rid + 1]):
        op = rprog[j, 0]
        if op == OP_RECT:
            b = (rprog[j, 1] <= phi <= rprog[j, 2]) and (rprog[j, 3] <= psi <= rprog[j, 4])
            stack = (stack << one) | np.uint64(b)
        elif op == OP_BOX:
            b = (rprog[j, 1] <= x <= rprog[j, 2]) and (rprog[j, 3] <= y <= rprog[j, 4])
            stack = (stack << one) | np.uint64(b)
        elif op == OP_NOT:
            stack = stack ^ one
        else:
            top = stack & one
            stack = stack >> one
            if op == OP_AND:
                stack = (stack & ~one) | (stack & top)
            elif op == OP_OR:
                stack = stack | top
    return (stack & one) == one


@njit(inline="always")
def resolve_leaf(nodes, rprog, roff, x, y):
    """Index of the leaf that supplies the weight at (x, y); -1 means 0."""
    node = 0
    leaf = -1
    for _ in range(nodes.shape[0]):
        kind = nodes[node, 0]
        if kind == NODE_LEAF:
            leaf = nodes[node, 1]
            break
        inside = in_region(rprog, roff, nodes[node, 1], x, y)
        if kind == NODE_DISCOUNT:
            if inside:
                break
            node = nodes[node, 2]
        elif inside:
            node = nodes[node, 2]
        else:
            node = nodes[node, 3]
    return leaf


@njit(inline="always")
def field_weight(nodes, lkeys, lconst, rprog, roff, x, y):
    if nodes.shape[0] == 1:
        leaf = 0
    else:
        leaf = resolve_leaf(nodes, rprog, roff, x, y)
    w = 0.0
    if leaf >= 0:
        w = lconst[leaf]
        if w != w:
            w = exp_weight(lkeys[leaf], x, y)
    return w


@njit(nogil=True, cache=True)
def weights_block(nodes, lkeys, lconst, rprog, roff, xs, ys):
    out = np.empty(xs.shape[0])
    for j in range(xs.shape[0]):
        out[j] = field_weight(nodes, lkeys, lconst, rprog, roff, xs[j], ys[j])
    return out


@njit(nogil=True, cache=True)
def sweep(x0, y0, x1, y1, nodes, lkeys, lconst, rprog, roff, cons, psi_lo, psi_hi, track, bits):
    """Antidiagonal DP from (x0, y0) to (x1, y1).

    Returns the maximal path weight with the start vertex included and the
    end vertex excluded, or -inf when no admissible path exists.  ``cons``
    is a region id confining every vertex (-1 for none).  With ``track``
    set, bit ``i * (dy + 1) + j`` of ``bits`` records a step from the left
    into cell ``(x0 + i, y0 + j)``; ties prefer the step from below.
    """
    dx = x1 - x0
    dy = y1 - y0
    neg = -np.inf
    if cons >= 0:
        if not in_region(rprog, roff, cons, x0, y0):
            return neg
        if not in_region(rprog, roff, cons, x1, y1):
            return neg
    if dx == 0 and dy == 0:
        return 0.0
    g = np.full(dx + 1, neg)
    w = np.empty(dx + 1)
    leaves = np.zeros(dx + 1, dtype=np.int64)
    g[0] = field_weight(nodes, lkeys, lconst, rprog, roff, x0, y0)
    plain = nodes.shape[0] == 1 and lconst[0] != lconst[0] and cons < 0
    key0 = lkeys[0]
    psi0 = y0 - x0
    pa = 0
    pb = 0
    last = dx + dy
    stride = dy + 1
    for k in range(1, last + 1):
        a = max(0, k - dy)
        b = min(dx, k)
        if cons >= 0:
            # psi = psi0 + k - 2i, so a psi window maps to an i window
            ca = -((-(psi0 + k - psi_hi)) // 2)
            cb = (psi0 + k - psi_lo) // 2
            if ca > a:
                a = ca
            if cb < b:
                b = cb
        if a > b:
            return neg
        if k == last:
            w[a:b + 1] = 0.0
        elif plain:
            for i in range(a, b + 1):
                w[i] = exp_weight(key0, x0 + i, y0 + k - i)
        else:
            for i in range(a, b + 1):
                if cons >= 0 and not in_region(rprog, roff, cons, x0 + i, y0 + k - i):
                    leaves[i] = -2
                else:
                    leaves[i] = resolve_leaf(nodes, rprog, roff, x0 + i, y0 + k - i)
            for i in range(a, b + 1):
                lf = leaves[i]
                j = max(lf, 0)
                val = exp_weight(lkeys[j], x0 + i, y0 + k - i)
                c = lconst[j]
                if c == c:
                    val = c
                if lf == -1:
                    val = 0.0
                elif lf == -2:
                    val = neg
                w[i] = val
        for i in range(b, a - 1, -1):
            below = g[i] if (pa <= i <= pb) else neg
            left = g[i - 1] if (pa <= i - 1 <= pb) else neg
            if below >= left:
                best = below
            else:
                best = left
                if track:
                    idx = i * stride + (k - i)
                    bits[idx >> 3] |= np.uint8(1 << (idx & 7))
            g[i] = best + w[i]
        pa = a
        pb = b
    return g[dx]


@njit(nogil=True, cache=True)
def backtrack(x0, y0, x1, y1, bits):
    dx = x1 - x0
    dy = y1 - y0
    stride = dy + 1
    path = np.empty((dx + dy + 1, 2), dtype=np.int64)
    i = dx
    j = dy
    for s in range(dx + dy, -1, -1):
        path[s, 0] = x0 + i
        path[s, 1] = y0 + j
        if s == 0:
            break
        idx = i * stride + j
        if j > 0 and i > 0:
            if (bits[idx >> 3] >> (idx & 7)) & 1:
                i -= 1
            else:
                j -= 1
        elif i > 0:
            i -= 1
        else:
            j -= 1
    return path
