"""Pure-Python (numpy) trace kernels.

Reference implementations of the hot iteration loops. The compiled module
`_kernels` mirrors these exactly; this module is the fallback used when the
extension is unavailable. Both return, for a presampled activation
sequence, the per-iteration relative error trace, the worst observed drift
of the value sum, and optionally every intermediate state.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _rel_err_setup(x0, x_star):
    d0 = float(np.sum((x0 - x_star) ** 2))
    denom = d0 if d0 > 0.0 else 1.0
    return d0, denom


def pairwise_trace(x0, x_star, act_i, act_j, omega, bdiag, record_states=False):
    """Single-edge gossip with per-node momentum coefficients.

    Covers baseline pairwise (bdiag = 0, omega = 1), momentum gossip
    (bdiag = beta), and the general diagonal-momentum-matrix rule.

    act_i, act_j: activated node pairs, one per iteration.
    Returns (rel_err[K+1], max_mass_dev, states or None).
    """
    x = np.array(x0, dtype=float)
    xp = x.copy()
    xs = np.asarray(x_star, dtype=float)
    b = np.asarray(bdiag, dtype=float)
    K = len(act_i)
    d0, denom = _rel_err_setup(x, xs)
    rel = np.empty(K + 1)
    rel[0] = d0 / denom
    sum0 = float(np.sum(x))
    max_dev = 0.0
    states = np.empty((K + 1, x.size)) if record_states else None
    if record_states:
        states[0] = x
    ca, cb = 0.5 * (2.0 - omega), 0.5 * omega
    for k in range(K):
        a, c = int(act_i[k]), int(act_j[k])
        xn = x + b * (x - xp)
        xn[a] = ca * x[a] + cb * x[c] + b[a] * (x[a] - xp[a])
        xn[c] = ca * x[c] + cb * x[a] + b[c] * (x[c] - xp[c])
        xp, x = x, xn
        rel[k + 1] = float(np.sum((x - xs) ** 2)) / denom
        dev = abs(float(np.sum(x)) - sum0)
        if dev > max_dev:
            max_dev = dev
        if record_states:
            states[k + 1] = x
    return rel, max_dev, states


def block_trace(x0, x_star, blocks, ei, ej, omega, beta, record_states=False):
    """Block gossip: each iteration activates a set of edges and every
    component of the induced subgraph mixes toward its average; nodes
    outside the subgraph apply only their momentum extrapolation.

    blocks: (K, tau) array of edge indices; ei, ej: edge endpoint arrays.
    Returns (rel_err[K+1], max_mass_dev, states or None).
    """
    x = np.array(x0, dtype=float)
    xp = x.copy()
    xs = np.asarray(x_star, dtype=float)
    K = blocks.shape[0]
    d0, denom = _rel_err_setup(x, xs)
    rel = np.empty(K + 1)
    rel[0] = d0 / denom
    sum0 = float(np.sum(x))
    max_dev = 0.0
    states = np.empty((K + 1, x.size)) if record_states else None
    if record_states:
        states[0] = x
    for k in range(K):
        xn = x + beta * (x - xp)
        # union-find over the activated edges only
        parent = {}

        def find(v):
            root = v
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(v, v) != v:
                parent[v], v = root, parent[v]
            return root

        touched = []
        for e in blocks[k]:
            e = int(e)
            for v in (int(ei[e]), int(ej[e])):
                if v not in parent:
                    parent[v] = v
                    touched.append(v)
            ra, rb = find(int(ei[e])), find(int(ej[e]))
            if ra != rb:
                parent[rb] = ra
        csum = {}
        ccnt = {}
        for v in touched:
            r = find(v)
            csum[r] = csum.get(r, 0.0) + x[v]
            ccnt[r] = ccnt.get(r, 0) + 1
        for v in touched:
            r = find(v)
            mean = csum[r] / ccnt[r]
            xn[v] = omega * mean + (1.0 - omega) * x[v] + beta * (x[v] - xp[v])
        xp, x = x, xn
        rel[k + 1] = float(np.sum((x - xs) ** 2)) / denom
        dev = abs(float(np.sum(x)) - sum0)
        if dev > max_dev:
            max_dev = dev
        if record_states:
            states[k + 1] = x
    return rel, max_dev, states
