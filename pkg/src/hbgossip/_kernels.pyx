# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trace kernels; see _kernels_py for the reference semantics."""

import numpy as np

BACKEND = "cython"


cdef inline double _sq_err(double[::1] x, double[::1] xs) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0, d
    for i in range(x.shape[0]):
        d = x[i] - xs[i]
        acc += d * d
    return acc


cdef inline double _vec_sum(double[::1] x) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(x.shape[0]):
        acc += x[i]
    return acc


def pairwise_trace(x0, x_star, act_i, act_j, double omega, bdiag,
                   bint record_states=False):
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[::1] xp = np.array(x0, dtype=np.float64)
    cdef double[::1] xn = np.empty_like(np.asarray(x))
    cdef double[::1] xs = np.ascontiguousarray(x_star, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(bdiag, dtype=np.float64)
    cdef long[::1] ai = np.ascontiguousarray(act_i, dtype=np.int64)
    cdef long[::1] aj = np.ascontiguousarray(act_j, dtype=np.int64)
    cdef Py_ssize_t K = ai.shape[0], n = x.shape[0]
    cdef Py_ssize_t k, l, a, c

    rel_arr = np.empty(K + 1)
    cdef double[::1] rel = rel_arr
    states_arr = np.empty((K + 1, n)) if record_states else None
    cdef double[:, ::1] states = states_arr if record_states else None

    cdef double d0 = _sq_err(x, xs)
    cdef double denom = d0 if d0 > 0.0 else 1.0
    rel[0] = d0 / denom
    cdef double sum0 = _vec_sum(x)
    cdef double max_dev = 0.0, dev
    cdef double ca = 0.5 * (2.0 - omega), cb = 0.5 * omega
    cdef double[::1] tmp

    if record_states:
        for l in range(n):
            states[0, l] = x[l]

    for k in range(K):
        a = ai[k]
        c = aj[k]
        for l in range(n):
            xn[l] = x[l] + b[l] * (x[l] - xp[l])
        xn[a] = ca * x[a] + cb * x[c] + b[a] * (x[a] - xp[a])
        xn[c] = ca * x[c] + cb * x[a] + b[c] * (x[c] - xp[c])
        tmp = xp
        xp = x
        x = xn
        xn = tmp
        rel[k + 1] = _sq_err(x, xs) / denom
        dev = _vec_sum(x) - sum0
        if dev < 0.0:
            dev = -dev
        if dev > max_dev:
            max_dev = dev
        if record_states:
            for l in range(n):
                states[k + 1, l] = x[l]
    return rel_arr, max_dev, states_arr


def block_trace(x0, x_star, blocks, ei, ej, double omega, double beta,
                bint record_states=False):
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef double[::1] xp = np.array(x0, dtype=np.float64)
    cdef double[::1] xn = np.empty_like(np.asarray(x))
    cdef double[::1] xs = np.ascontiguousarray(x_star, dtype=np.float64)
    cdef long[:, ::1] blk = np.ascontiguousarray(blocks, dtype=np.int64)
    cdef long[::1] eia = np.ascontiguousarray(ei, dtype=np.int64)
    cdef long[::1] eja = np.ascontiguousarray(ej, dtype=np.int64)
    cdef Py_ssize_t K = blk.shape[0], tau = blk.shape[1], n = x.shape[0]
    cdef Py_ssize_t k, l, t, v, a, c, ra, rb, r, nt

    rel_arr = np.empty(K + 1)
    cdef double[::1] rel = rel_arr
    states_arr = np.empty((K + 1, n)) if record_states else None
    cdef double[:, ::1] states = states_arr if record_states else None

    cdef double d0 = _sq_err(x, xs)
    cdef double denom = d0 if d0 > 0.0 else 1.0
    rel[0] = d0 / denom
    cdef double sum0 = _vec_sum(x)
    cdef double max_dev = 0.0, dev, mean

    # per-step scratch, stamped to avoid O(n) clearing of component data
    cdef long[::1] parent = np.arange(n, dtype=np.int64)
    cdef long[::1] stamp = np.full(n, -1, dtype=np.int64)
    cdef long[::1] touched = np.empty(2 * tau, dtype=np.int64)
    cdef double[::1] csum = np.zeros(n, dtype=np.float64)
    cdef long[::1] ccnt = np.zeros(n, dtype=np.int64)
    cdef long[::1] rstamp = np.full(n, -1, dtype=np.int64)
    cdef double[::1] tmp

    if record_states:
        for l in range(n):
            states[0, l] = x[l]

    for k in range(K):
        for l in range(n):
            xn[l] = x[l] + beta * (x[l] - xp[l])
        nt = 0
        for t in range(tau):
            a = eia[blk[k, t]]
            c = eja[blk[k, t]]
            if stamp[a] != k:
                stamp[a] = k
                parent[a] = a
                touched[nt] = a
                nt += 1
            if stamp[c] != k:
                stamp[c] = k
                parent[c] = c
                touched[nt] = c
                nt += 1
            ra = a
            while parent[ra] != ra:
                ra = parent[ra]
            rb = c
            while parent[rb] != rb:
                rb = parent[rb]
            if ra != rb:
                parent[rb] = ra
        for t in range(nt):
            v = touched[t]
            r = v
            while parent[r] != r:
                r = parent[r]
            parent[v] = r
            if rstamp[r] != k:
                rstamp[r] = k
                csum[r] = 0.0
                ccnt[r] = 0
            csum[r] += x[v]
            ccnt[r] += 1
        for t in range(nt):
            v = touched[t]
            r = v
            while parent[r] != r:
                r = parent[r]
            mean = csum[r] / ccnt[r]
            xn[v] = omega * mean + (1.0 - omega) * x[v] + beta * (x[v] - xp[v])
        tmp = xp
        xp = x
        x = xn
        xn = tmp
        rel[k + 1] = _sq_err(x, xs) / denom
        dev = _vec_sum(x) - sum0
        if dev < 0.0:
            dev = -dev
        if dev > max_dev:
            max_dev = dev
        if record_states:
            for l in range(n):
                states[k + 1, l] = x[l]
    return rel_arr, max_dev, states_arr
