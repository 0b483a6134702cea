"""Pure-numpy implementations of the status-table kernels.

Statuses and predicate values share one int8 coding: 0 = Undefined,
1 = Fail/False, 2 = Succeed/True.  Every binary kernel accepts arrays that
broadcast against each other.
"""

from __future__ import annotations

import numpy as np

U, F, S = np.int8(0), np.int8(1), np.int8(2)


def k_and(a, b):
    return np.minimum(a, b)


def k_or(a, b):
    lo = np.minimum(a, b)
    return np.where(lo == U, U, np.maximum(a, b)).astype(np.int8)


def k_seq(a, b):
    return np.where(a == S, b, a).astype(np.int8)


def k_not(a):
    return ((np.int8(3) - a) % np.int8(3)).astype(np.int8)


def k_iff(a, b):
    defined = (a != U) & (b != U)
    return np.where(defined, np.where(a == b, S, F), U).astype(np.int8)


def k_implies(a, b):
    return k_or(k_not(a), b)


def k_assert(p):
    return np.where(p == S, S, U).astype(np.int8)


def k_reduce_exists(a, axis: int):
    if a.shape[axis] == 0:
        return np.full(a.shape[:axis] + a.shape[axis + 1:], F, dtype=np.int8)
    lo = a.min(axis=axis)
    return np.where(lo == U, U, a.max(axis=axis)).astype(np.int8)


def k_reduce_forall(a, axis: int):
    if a.shape[axis] == 0:
        return np.full(a.shape[:axis] + a.shape[axis + 1:], S, dtype=np.int8)
    return a.min(axis=axis).astype(np.int8)


def k_refines(a, b) -> bool:
    return bool(np.all((a == U) | (a == b)))


def k_refines_under(ctx, a, b) -> bool:
    return bool(np.all((ctx != S) | (a == U) | (a == b)))


def k_meet(a, b):
    return np.where(a == b, a, U).astype(np.int8)


def k_join(a, b):
    clash = ((a == F) & (b == S)) | ((a == S) & (b == F))
    if np.any(clash):
        return None
    return np.maximum(a, b).astype(np.int8)


def k_gather(table, idx_list):
    """Look up ``table[i1, .., ik]`` where every index array may hold -1 (undefined)."""
    arrays = np.broadcast_arrays(*idx_list)
    if not arrays:
        return np.asarray(table).copy()
    bad = np.zeros(arrays[0].shape, dtype=bool)
    safe = []
    for arr in arrays:
        bad |= arr < 0
        safe.append(np.where(arr < 0, 0, arr))
    out = table[tuple(safe)]
    return np.where(bad, np.asarray(-1, dtype=table.dtype) if table.dtype != np.int8 else U, out)


def k_acyclic(adj) -> bool:
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    indeg = adj.sum(axis=0).astype(np.int64)
    alive = np.ones(n, dtype=bool)
    frontier = np.flatnonzero(indeg == 0)
    removed = 0
    while frontier.size:
        removed += frontier.size
        alive[frontier] = False
        indeg -= adj[frontier].sum(axis=0)
        indeg[~alive] = -1
        frontier = np.flatnonzero(indeg == 0)
    return removed == n
