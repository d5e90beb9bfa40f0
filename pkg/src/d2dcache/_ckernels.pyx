# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``.

Signatures and results match the pure-Python versions exactly, including
floating-point summation order.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64


def lex_trees(const i64[::1] indptr, const i64[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full((n, n), -1, dtype=np.int64)
    parent_arr = np.full((n, n), -1, dtype=np.int64)
    cdef i64[:, ::1] dist = dist_arr
    cdef i64[:, ::1] parent = parent_arr
    cdef i64[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t src, head, tail, e
    cdef i64 u, v, du
    for src in range(n):
        dist[src, src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[src, u] + 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if dist[src, v] < 0:
                    dist[src, v] = du
                    parent[src, v] = u
                    queue[tail] = v
                    tail += 1
    return dist_arr, parent_arr


cdef struct HeapItem:
    double key
    i64 node


cdef inline bint _less(HeapItem a, HeapItem b) nogil:
    return a.key < b.key or (a.key == b.key and a.node < b.node)


cdef inline void _push(HeapItem* heap, Py_ssize_t* size, double key, i64 node) noexcept nogil:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t p
    cdef HeapItem item
    item.key = key
    item.node = node
    size[0] += 1
    while i > 0:
        p = (i - 1) >> 1
        if _less(item, heap[p]):
            heap[i] = heap[p]
            i = p
        else:
            break
    heap[i] = item


cdef inline HeapItem _pop(HeapItem* heap, Py_ssize_t* size) noexcept nogil:
    cdef HeapItem top = heap[0]
    cdef HeapItem last
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t c
    size[0] -= 1
    if size[0] == 0:
        return top
    last = heap[size[0]]
    while True:
        c = 2 * i + 1
        if c >= size[0]:
            break
        if c + 1 < size[0] and _less(heap[c + 1], heap[c]):
            c += 1
        if _less(heap[c], last):
            heap[i] = heap[c]
            i = c
        else:
            break
    heap[i] = last
    return top


def dijkstra_all(const i64[::1] indptr, const i64[::1] indices, const double[::1] weights):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t nnz = indices.shape[0]
    out_arr = np.full((n, n), np.inf)
    cdef double[:, ::1] out = out_arr
    cdef unsigned char[::1] done = np.zeros(max(n, 1), dtype=np.uint8)
    cdef HeapItem* heap = <HeapItem*> malloc((nnz + n + 1) * sizeof(HeapItem))
    if heap == NULL:
        raise MemoryError()
    cdef Py_ssize_t size, src, e, i
    cdef HeapItem top
    cdef double nd
    cdef i64 u, v
    try:
        with nogil:
            for src in range(n):
                for i in range(n):
                    done[i] = 0
                out[src, src] = 0.0
                size = 0
                _push(heap, &size, 0.0, src)
                while size > 0:
                    top = _pop(heap, &size)
                    u = top.node
                    if done[u]:
                        continue
                    done[u] = 1
                    for e in range(indptr[u], indptr[u + 1]):
                        v = indices[e]
                        nd = top.key + weights[e]
                        if nd < out[src, v]:
                            out[src, v] = nd
                            _push(heap, &size, nd, v)
    finally:
        free(heap)
    return out_arr


def cover_sums(const i64[::1] in_indptr, const i64[::1] in_indices, within, const double[::1] coef):
    cdef Py_ssize_t n = in_indptr.shape[0] - 1
    cdef const unsigned char[:, ::1] win = np.ascontiguousarray(within, dtype=np.uint8)
    phi_arr = np.zeros(n)
    cdef double[::1] phi = phi_arr
    cdef i64[::1] stamp = np.full(max(n, 1), -1, dtype=np.int64)
    cdef Py_ssize_t target, j, e
    cdef i64 k
    cdef double c
    with nogil:
        for target in range(n):
            c = coef[target]
            for j in range(n):
                if not win[target, j]:
                    continue
                for e in range(in_indptr[j], in_indptr[j + 1]):
                    k = in_indices[e]
                    if stamp[k] != target:
                        stamp[k] = target
                        if k != target:
                            phi[k] += c
    return phi_arr


def spread_one_attempt(const i64[::1] indptr, const i64[::1] indices, const double[::1] probs,
                       holders, eligible, const double[:, ::1] u_choice,
                       const double[:, ::1] u_success):
    cdef const unsigned char[:, ::1] hold = np.ascontiguousarray(holders, dtype=np.uint8)
    cdef const unsigned char[:, ::1] elig = np.ascontiguousarray(eligible, dtype=np.uint8)
    out_arr = np.array(hold, dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t n_contents = hold.shape[0]
    cdef Py_ssize_t n = hold.shape[1]
    cdef Py_ssize_t c, m, e, pick, last
    cdef i64 v
    cdef double total, thresh, cum
    with nogil:
        for c in range(n_contents):
            for m in range(n):
                if not hold[c, m]:
                    continue
                total = 0.0
                last = -1
                for e in range(indptr[m], indptr[m + 1]):
                    v = indices[e]
                    if not hold[c, v] and elig[c, v] and probs[e] > 0.0:
                        total += probs[e]
                        last = e
                if last < 0:
                    continue
                thresh = u_choice[c, m] * total
                cum = 0.0
                pick = last
                for e in range(indptr[m], indptr[m + 1]):
                    v = indices[e]
                    if not hold[c, v] and elig[c, v] and probs[e] > 0.0:
                        cum += probs[e]
                        if thresh < cum:
                            pick = e
                            break
                if u_success[c, m] < probs[pick]:
                    out[c, indices[pick]] = 1
    return out_arr


def spread_cascade(const i64[::1] indptr, const i64[::1] indices, const double[::1] probs,
                   holders, eligible, const double[:, ::1] u_edge):
    cdef const unsigned char[:, ::1] hold = np.ascontiguousarray(holders, dtype=np.uint8)
    cdef const unsigned char[:, ::1] elig = np.ascontiguousarray(eligible, dtype=np.uint8)
    out_arr = np.array(hold, dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t n_contents = hold.shape[0]
    cdef Py_ssize_t n = hold.shape[1]
    cdef Py_ssize_t c, m, e
    cdef i64 v
    with nogil:
        for c in range(n_contents):
            for m in range(n):
                if not hold[c, m]:
                    continue
                for e in range(indptr[m], indptr[m + 1]):
                    v = indices[e]
                    if not hold[c, v] and elig[c, v] and u_edge[c, e] < probs[e]:
                        out[c, v] = 1
    return out_arr
