"""numba-compiled versions of the status-table kernels.

The Python wrappers broadcast their inputs to a common contiguous shape and
hand flat buffers to fused ``@njit`` loops, which avoids the temporaries that
the numpy formulation allocates for every ``where``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U, F, S = 0, 1, 2


@njit(cache=True)
def _and_flat(a, b, out):
    for i in range(a.size):
        x = a[i]
        y = b[i]
        out[i] = x if x < y else y


@njit(cache=True)
def _or_flat(a, b, out):
    for i in range(a.size):
        x = a[i]
        y = b[i]
        if x == 0 or y == 0:
            out[i] = 0
        else:
            out[i] = x if x > y else y


@njit(cache=True)
def _seq_flat(a, b, out):
    for i in range(a.size):
        out[i] = b[i] if a[i] == 2 else a[i]


@njit(cache=True)
def _iff_flat(a, b, out):
    for i in range(a.size):
        if a[i] == 0 or b[i] == 0:
            out[i] = 0
        elif a[i] == b[i]:
            out[i] = 2
        else:
            out[i] = 1


@njit(cache=True)
def _not_flat(a, out):
    for i in range(a.size):
        x = a[i]
        out[i] = 0 if x == 0 else 3 - x


@njit(cache=True)
def _assert_flat(a, out):
    for i in range(a.size):
        out[i] = 2 if a[i] == 2 else 0


@njit(cache=True)
def _reduce_exists_3d(a, out):
    # j runs outside k so that every pass reads a contiguous row
    outer, n, inner = a.shape
    if inner == 1:
        for i in range(outer):
            lo = 2
            hi = 1
            for j in range(n):
                x = a[i, j, 0]
                lo = x if x < lo else lo
                hi = x if x > hi else hi
            out[i, 0] = 0 if lo == 0 else hi
        return
    hi = np.empty(inner, dtype=np.int8)
    for i in range(outer):
        lo = out[i]
        lo[:] = 2
        hi[:] = 1
        for j in range(n):
            row = a[i, j]
            for k in range(inner):
                x = row[k]
                lo[k] = x if x < lo[k] else lo[k]
                hi[k] = x if x > hi[k] else hi[k]
        for k in range(inner):
            lo[k] = 0 if lo[k] == 0 else hi[k]


@njit(cache=True)
def _reduce_forall_3d(a, out):
    outer, n, inner = a.shape
    for i in range(outer):
        lo = out[i]
        lo[:] = 2
        for j in range(n):
            row = a[i, j]
            for k in range(inner):
                x = row[k]
                lo[k] = x if x < lo[k] else lo[k]


_CHUNK = 4096


@njit(cache=True)
def _refines_flat(a, b):
    # branch-free inner loop per chunk so it vectorises; exit between chunks
    for start in range(0, a.size, _CHUNK):
        bad = 0
        for i in range(start, min(start + _CHUNK, a.size)):
            bad |= (a[i] != 0) & (a[i] != b[i])
        if bad:
            return False
    return True


@njit(cache=True)
def _refines_under_flat(c, a, b):
    for start in range(0, a.size, _CHUNK):
        bad = 0
        for i in range(start, min(start + _CHUNK, a.size)):
            bad |= (c[i] == 2) & (a[i] != 0) & (a[i] != b[i])
        if bad:
            return False
    return True


@njit(cache=True)
def _meet_flat(a, b, out):
    for i in range(a.size):
        out[i] = a[i] if a[i] == b[i] else 0


@njit(cache=True)
def _join_flat(a, b, out):
    for i in range(a.size):
        x = a[i]
        y = b[i]
        if (x == 1 and y == 2) or (x == 2 and y == 1):
            return False
        out[i] = x if x > y else y
    return True


@njit(cache=True)
def _gather_flat(table_flat, idx, strides, fill, out):
    k, m = idx.shape
    for j in range(m):
        pos = 0
        bad = False
        for r in range(k):
            v = idx[r, j]
            if v < 0:
                bad = True
                break
            pos += v * strides[r]
        out[j] = fill if bad else table_flat[pos]


@njit(cache=True)
def _acyclic(adj):
    n = adj.shape[0]
    indeg = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if adj[i, j]:
                indeg[j] += 1
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        if indeg[i] == 0:
            stack[top] = i
            top += 1
    seen = 0
    while top > 0:
        top -= 1
        i = stack[top]
        seen += 1
        for j in range(n):
            if adj[i, j]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    stack[top] = j
                    top += 1
    return seen == n


# ------------------------------------------------------------- wrappers


def _contig(x):
    # np.ascontiguousarray promotes 0-d input to 1-d; np.require keeps the shape
    return np.require(np.asarray(x, dtype=np.int8), requirements="C")


def _prep2(a, b):
    a = np.asarray(a, dtype=np.int8)
    b = np.asarray(b, dtype=np.int8)
    if a.shape != b.shape:
        a, b = np.broadcast_arrays(a, b)
    return _contig(a), _contig(b)


def _binary(fn, a, b):
    a, b = _prep2(a, b)
    out = np.empty(a.shape, dtype=np.int8)
    if a.size:
        fn(a.reshape(-1), b.reshape(-1), out.reshape(-1))
    return out


def k_and(a, b):
    return _binary(_and_flat, a, b)


def k_or(a, b):
    return _binary(_or_flat, a, b)


def k_seq(a, b):
    return _binary(_seq_flat, a, b)


def k_iff(a, b):
    return _binary(_iff_flat, a, b)


def k_not(a):
    a = _contig(a)
    out = np.empty(a.shape, dtype=np.int8)
    if a.size:
        _not_flat(a.reshape(-1), out.reshape(-1))
    return out


def k_implies(a, b):
    return k_or(k_not(a), b)


def k_assert(p):
    a = _contig(p)
    out = np.empty(a.shape, dtype=np.int8)
    if a.size:
        _assert_flat(a.reshape(-1), out.reshape(-1))
    return out


def _reduce(fn, a, axis, empty_value):
    a = np.asarray(a, dtype=np.int8)
    shape = a.shape
    outer = int(np.prod(shape[:axis], dtype=np.int64))
    inner = int(np.prod(shape[axis + 1:], dtype=np.int64))
    n = shape[axis]
    result_shape = shape[:axis] + shape[axis + 1:]
    if n == 0:
        return np.full(result_shape, empty_value, dtype=np.int8)
    a3 = np.ascontiguousarray(a).reshape(outer, n, inner)
    out = np.empty((outer, inner), dtype=np.int8)
    if outer and inner:
        fn(a3, out)
    return out.reshape(result_shape)


def k_reduce_exists(a, axis: int):
    return _reduce(_reduce_exists_3d, a, axis, F)


def k_reduce_forall(a, axis: int):
    return _reduce(_reduce_forall_3d, a, axis, S)


def k_refines(a, b) -> bool:
    a, b = _prep2(a, b)
    return bool(_refines_flat(a.reshape(-1), b.reshape(-1)))


def k_refines_under(ctx, a, b) -> bool:
    c, a, b = np.broadcast_arrays(np.asarray(ctx, np.int8), np.asarray(a, np.int8), np.asarray(b, np.int8))
    c, a, b = (np.ascontiguousarray(x).reshape(-1) for x in (c, a, b))
    return bool(_refines_under_flat(c, a, b))


def k_meet(a, b):
    return _binary(_meet_flat, a, b)


def k_join(a, b):
    a, b = _prep2(a, b)
    out = np.empty(a.shape, dtype=np.int8)
    if a.size and not _join_flat(a.reshape(-1), b.reshape(-1), out.reshape(-1)):
        return None
    return out


def k_gather(table, idx_list):
    table = np.ascontiguousarray(table)
    if not idx_list:
        return table.copy()
    arrays = np.broadcast_arrays(*[np.asarray(i, dtype=np.int64) for i in idx_list])
    shape = arrays[0].shape
    idx = np.ascontiguousarray(np.stack([a.reshape(-1) for a in arrays]))
    strides = np.array([s // table.itemsize for s in table.strides], dtype=np.int64)
    out = np.empty(idx.shape[1], dtype=table.dtype)
    fill = 0 if table.dtype == np.int8 else -1
    if out.size:
        _gather_flat(table.reshape(-1), idx, strides, table.dtype.type(fill), out)
    return out.reshape(shape)


def k_acyclic(adj) -> bool:
    return bool(_acyclic(np.ascontiguousarray(adj, dtype=np.bool_)))
