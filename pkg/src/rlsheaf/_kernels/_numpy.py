"""Vectorised numpy implementations of the table kernels.

Every function here has a twin with the same signature in ``_numba``.
Witness tuples use -1 for "no violation"; the first element of the tuple
is an integer code naming the violated axiom.
"""

from __future__ import annotations

import numpy as np

NONE4 = (0, -1, -1, -1)


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    if hits.size == 0:
        return None
    return tuple(int(v) for v in hits[0])


def order_violation(leq):
    n = leq.shape[0]
    diag = ~np.diag(leq)
    if diag.any():
        i = int(np.argmax(diag))
        return (1, i, i, i)
    anti = leq & leq.T & ~np.eye(n, dtype=bool)
    w = _first(anti)
    if w:
        return (2, w[0], w[1], w[1])
    # leq[i,k] & leq[k,j] & ~leq[i,j]
    bad = leq[:, :, None] & leq[None, :, :] & ~leq[:, None, :]
    w = _first(bad)
    if w:
        return (3, w[0], w[2], w[1])
    return NONE4


def lattice_violation(leq, join, meet, bot, top):
    n = leq.shape[0]
    idx = np.arange(n)
    X, Y = np.meshgrid(idx, idx, indexing="ij")
    up = leq[X, join] & leq[Y, join]
    w = _first(~up)
    if w:
        return (1, w[0], w[1], int(join[w]))
    # z an upper bound of x,y but join[x,y] not <= z
    ub = leq[:, None, :] & leq[None, :, :]
    bad = ub & ~leq[join][:, :, :]
    w = _first(bad)
    if w:
        return (2, w[0], w[1], w[2])
    lo = leq[meet, X] & leq[meet, Y]
    w = _first(~lo)
    if w:
        return (3, w[0], w[1], int(meet[w]))
    lb = leq.T[:, None, :] & leq.T[None, :, :]
    bad = lb & ~leq.T[meet][:, :, :]
    w = _first(bad)
    if w:
        return (4, w[0], w[1], w[2])
    if not leq[bot, :].all():
        return (5, int(np.argmin(leq[bot, :])), -1, -1)
    if not leq[:, top].all():
        return (6, int(np.argmin(leq[:, top])), -1, -1)
    return NONE4


def monoid_violation(prod, top):
    w = _first(prod != prod.T)
    if w:
        return (1, w[0], w[1], -1)
    n = prod.shape[0]
    left = prod[prod][:, :, :]          # left[x,y,z] = prod[prod[x,y], z]
    right = prod[:, prod]               # right[x,y,z] = prod[x, prod[y,z]]
    w = _first(left != right)
    if w:
        return (2, w[0], w[1], w[2])
    bad = prod[:, top] != np.arange(n)
    if bad.any():
        return (3, int(np.argmax(bad)), top, -1)
    return NONE4


def adjunction_violation(leq, prod, imp):
    # lhs[x,y,z] = prod[x,z] <= y ; rhs[x,y,z] = z <= imp[x,y]
    lhs = leq[prod[:, None, :], np.arange(leq.shape[0])[None, :, None]]
    rhs = leq[np.arange(leq.shape[0])[None, None, :], imp[:, :, None]]
    w = _first(lhs != rhs)
    if w:
        return (1, w[0], w[1], w[2])
    return NONE4


def hom_violation(src_op, dst_op, f):
    lhs = f[src_op]
    rhs = dst_op[f[:, None], f[None, :]]
    w = _first(lhs != rhs)
    if w:
        return (w[0], w[1])
    return (-1, -1)


def residuum(leq, prod, join, bot):
    """Return (imp, bad_x, bad_y); imp is valid only when bad_x == -1."""
    n = leq.shape[0]
    acc = np.full((n, n), bot, dtype=np.int64)
    ys = np.arange(n)[None, :]
    for z in range(n):
        below = leq[prod[:, z][:, None], ys]        # prod[x,z] <= y
        acc = np.where(below, join[acc, z], acc)
    ok = leq[prod[np.arange(n)[:, None], acc], ys]
    if not ok.all():
        x, y = _first(~ok)
        return acc, x, y
    return acc, -1, -1


def filter_masks(upmask, prod, top):
    """All subsets (as bitmasks) that are filters; n <= 30 assumed."""
    n = prod.shape[0]
    masks = np.arange(1 << n, dtype=np.int64)
    keep = ((masks >> top) & 1).astype(bool)
    for x in range(n):
        has_x = ((masks >> x) & 1).astype(bool)
        keep &= ~has_x | ((masks & upmask[x]) == upmask[x])
    for x in range(n):
        for y in range(x, n):
            both = (((masks >> x) & 1) & ((masks >> y) & 1)).astype(bool)
            keep &= ~both | ((masks >> prod[x, y]) & 1).astype(bool)
    return masks[keep]
