"""numba-compiled twins of the kernels in ``_numpy``.

Loops exit at the first violation, so valid inputs cost a full scan and
invalid ones usually return early.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def order_violation(leq):
    n = leq.shape[0]
    for i in range(n):
        if not leq[i, i]:
            return (1, i, i, i)
    for i in range(n):
        for j in range(n):
            if i != j and leq[i, j] and leq[j, i]:
                return (2, i, j, j)
    for i in range(n):
        for k in range(n):
            if leq[i, k]:
                for j in range(n):
                    if leq[k, j] and not leq[i, j]:
                        return (3, i, j, k)
    return (0, -1, -1, -1)


@njit(cache=True)
def lattice_violation(leq, join, meet, bot, top):
    n = leq.shape[0]
    for x in range(n):
        for y in range(n):
            j = join[x, y]
            if not (leq[x, j] and leq[y, j]):
                return (1, x, y, j)
    for x in range(n):
        for y in range(n):
            j = join[x, y]
            for z in range(n):
                if leq[x, z] and leq[y, z] and not leq[j, z]:
                    return (2, x, y, z)
    for x in range(n):
        for y in range(n):
            m = meet[x, y]
            if not (leq[m, x] and leq[m, y]):
                return (3, x, y, m)
    for x in range(n):
        for y in range(n):
            m = meet[x, y]
            for z in range(n):
                if leq[z, x] and leq[z, y] and not leq[z, m]:
                    return (4, x, y, z)
    for x in range(n):
        if not leq[bot, x]:
            return (5, x, -1, -1)
    for x in range(n):
        if not leq[x, top]:
            return (6, x, -1, -1)
    return (0, -1, -1, -1)


@njit(cache=True)
def monoid_violation(prod, top):
    n = prod.shape[0]
    for x in range(n):
        for y in range(n):
            if prod[x, y] != prod[y, x]:
                return (1, x, y, -1)
    for x in range(n):
        for y in range(n):
            xy = prod[x, y]
            for z in range(n):
                if prod[xy, z] != prod[x, prod[y, z]]:
                    return (2, x, y, z)
    for x in range(n):
        if prod[x, top] != x:
            return (3, x, top, -1)
    return (0, -1, -1, -1)


@njit(cache=True)
def adjunction_violation(leq, prod, imp):
    n = leq.shape[0]
    for x in range(n):
        for y in range(n):
            r = imp[x, y]
            for z in range(n):
                if leq[prod[x, z], y] != leq[z, r]:
                    return (1, x, y, z)
    return (0, -1, -1, -1)


@njit(cache=True)
def hom_violation(src_op, dst_op, f):
    n = src_op.shape[0]
    for x in range(n):
        for y in range(n):
            if f[src_op[x, y]] != dst_op[f[x], f[y]]:
                return (x, y)
    return (-1, -1)


@njit(cache=True)
def residuum(leq, prod, join, bot):
    n = leq.shape[0]
    imp = np.empty((n, n), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            acc = bot
            for z in range(n):
                if leq[prod[x, z], y]:
                    acc = join[acc, z]
            imp[x, y] = acc
    for x in range(n):
        for y in range(n):
            if not leq[prod[x, imp[x, y]], y]:
                return imp, x, y
    return imp, -1, -1


@njit(cache=True)
def filter_masks(upmask, prod, top):
    n = prod.shape[0]
    out = []
    for m in range(1 << n):
        if not (m >> top) & 1:
            continue
        good = True
        for x in range(n):
            if (m >> x) & 1 and (m & upmask[x]) != upmask[x]:
                good = False
                break
        if not good:
            continue
        for x in range(n):
            if not (m >> x) & 1:
                continue
            for y in range(x, n):
                if (m >> y) & 1 and not (m >> prod[x, y]) & 1:
                    good = False
                    break
            if not good:
                break
        if good:
            out.append(m)
    res = np.empty(len(out), dtype=np.int64)
    for i in range(len(out)):
        res[i] = out[i]
    return res
