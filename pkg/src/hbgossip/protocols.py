"""Gossip protocols over node values.

Each protocol is a per-iteration state transition on the vector of private
node values: momentum pairwise gossip (single edge, all nodes extrapolate),
its block variant (components of a random edge subset average), the
two-register shift-register method, the diagonal-momentum-matrix
generalization of both, and the lazy common-counter form of momentum
gossip. `run_protocol` drives whole seeded trajectories through the
compiled/fallback kernels where the loop is hot.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .topology import Graph, connected_components

KINDS = ("baseline", "mrk", "mrbk", "shift_register", "diag_b", "lazy_mrk")

# largest per-step block-sampling chunk, keeps presampling memory bounded
_BLOCK_CHUNK = 4096


@dataclass(frozen=True)
class GossipState:
    values: np.ndarray
    prev_values: np.ndarray
    iter: int = 0
    last_active: np.ndarray | None = None  # lazy variant only

    @classmethod
    def initial(cls, c) -> "GossipState":
        c = np.array(c, dtype=float)
        return cls(
            values=c,
            prev_values=c.copy(),
            iter=0,
            last_active=np.zeros(c.size, dtype=np.int64),
        )


@dataclass(frozen=True)
class ProtocolConfig:
    kind: str
    omega: float = 1.0
    beta: float = 0.0
    tau: int = 1  # mrbk only
    b_diag: np.ndarray | None = None  # diag_b only
    edge_probs: np.ndarray | None = None  # None = uniform over edges

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown protocol kind {self.kind!r}")
        if self.kind == "baseline":
            if self.omega != 1.0 or self.beta != 0.0:
                raise ValueError("baseline pairwise gossip fixes omega=1, beta=0")
        elif self.kind == "shift_register":
            if not (1.0 <= self.omega < 2.0):
                raise ValueError(f"shift register needs omega in [1, 2), got {self.omega}")
        else:
            if not (0 < self.omega < 2):
                raise ValueError(f"omega must lie in (0, 2), got {self.omega}")
            if self.beta < 0:
                raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.kind == "mrbk" and self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        if self.kind == "diag_b":
            if self.b_diag is None or np.any(np.asarray(self.b_diag) < 0):
                raise ValueError("diag_b needs a nonnegative b_diag vector")


@dataclass(frozen=True)
class ProtocolTrace:
    rel_err: np.ndarray  # length iters+1, rel_err[0] for the initial state
    max_mass_dev: float  # worst |sum(x^k) - sum(c)| along the trajectory
    states: np.ndarray | None = None  # (iters+1, n) when dumped


def _require_edge(g: Graph, i: int, j: int) -> tuple[int, int]:
    e = (i, j) if i < j else (j, i)
    if e not in set(g.edges):
        raise ValueError(f"({i},{j}) is not an edge of the graph")
    return e


def _check_momentum_params(omega, beta):
    if not (0 < omega < 2):
        raise ValueError(f"omega must lie in (0, 2), got {omega}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")


def step_mrk(g: Graph, st: GossipState, edge, omega: float, beta: float) -> GossipState:
    """Momentum pairwise gossip: the activated pair mixes toward its
    average, every node adds its momentum term."""
    i, j = edge
    _require_edge(g, i, j)
    _check_momentum_params(omega, beta)
    x, xp = st.values, st.prev_values
    xn = x + beta * (x - xp)
    xn[i] = 0.5 * (2 - omega) * x[i] + 0.5 * omega * x[j] + beta * (x[i] - xp[i])
    xn[j] = 0.5 * (2 - omega) * x[j] + 0.5 * omega * x[i] + beta * (x[j] - xp[j])
    return replace(st, values=xn, prev_values=x.copy(), iter=st.iter + 1)


def step_mrbk(g: Graph, st: GossipState, edge_subset, omega: float, beta: float) -> GossipState:
    """Momentum block gossip: every component of the selected-edge subgraph
    mixes toward its average; untouched nodes extrapolate only."""
    _check_momentum_params(omega, beta)
    part = connected_components(g, edge_subset)
    x, xp = st.values, st.prev_values
    xn = x + beta * (x - xp)
    for comp in part.components:
        if len(comp) < 2:
            continue  # singleton rule coincides with the extrapolation above
        idx = list(comp)
        mean = float(np.sum(x[idx])) / len(idx)
        for v in idx:
            xn[v] = omega * mean + (1 - omega) * x[v] + beta * (x[v] - xp[v])
    return replace(st, values=xn, prev_values=x.copy(), iter=st.iter + 1)


def step_shift_register(g: Graph, st: GossipState, edge, omega: float) -> GossipState:
    """Two-register gossip: only the activated pair updates, mixing the pair
    average with each node's previous register. Idle nodes keep both
    registers; registers shift only on activation."""
    i, j = edge
    _require_edge(g, i, j)
    if not (1.0 <= omega < 2.0):
        raise ValueError(f"omega must lie in [1, 2), got {omega}")
    x, xp = st.values, st.prev_values
    xn = x.copy()
    xpn = xp.copy()
    pair_avg = (x[i] + x[j]) / 2
    xn[i] = omega * pair_avg + (1 - omega) * xp[i]
    xn[j] = omega * pair_avg + (1 - omega) * xp[j]
    xpn[i] = x[i]
    xpn[j] = x[j]
    return replace(st, values=xn, prev_values=xpn, iter=st.iter + 1)


def step_diag_b(g: Graph, st: GossipState, edge, omega: float, b_diag) -> GossipState:
    """Pairwise gossip with a per-node diagonal momentum matrix; interpolates
    between full-momentum gossip and the shift-register pair rule."""
    i, j = edge
    _require_edge(g, i, j)
    if not (0 < omega < 2):
        raise ValueError(f"omega must lie in (0, 2), got {omega}")
    b = np.asarray(b_diag, dtype=float)
    if b.shape != st.values.shape:
        raise ValueError("b_diag length must match node count")
    if np.any(b < 0):
        raise ValueError("b_diag entries must be >= 0")
    x, xp = st.values, st.prev_values
    xn = x + b * (x - xp)
    xn[i] = 0.5 * (2 - omega) * x[i] + 0.5 * omega * x[j] + b[i] * (x[i] - xp[i])
    xn[j] = 0.5 * (2 - omega) * x[j] + 0.5 * omega * x[i] + b[j] * (x[j] - xp[j])
    return replace(st, values=xn, prev_values=x.copy(), iter=st.iter + 1)


def _catch_up(x: float, xp: float, beta: float, steps: int) -> tuple[float, float]:
    # idle extrapolation applied `steps` times
    for _ in range(steps):
        x, xp = x + beta * (x - xp), x
    return x, xp


def lazy_node_value(st: GossipState, v: int, counter: int, beta: float) -> float:
    """Value node v would hold at the given counter, without mutating state."""
    d = counter - int(st.last_active[v])
    if d < 0:
        raise ValueError(f"counter {counter} precedes node {v} activation")
    x, _ = _catch_up(float(st.values[v]), float(st.prev_values[v]), beta, d)
    return x


def step_lazy_mrk(
    g: Graph,
    st: GossipState,
    edge,
    omega: float,
    beta: float,
    global_counter: int,
) -> GossipState:
    """Common-counter momentum gossip: only the activated pair touches
    storage. Each first replays its deferred extrapolations, then the pair
    exchange is applied; equivalent in trajectory to eager momentum gossip."""
    i, j = edge
    _require_edge(g, i, j)
    _check_momentum_params(omega, beta)
    if st.last_active is None:
        raise ValueError("state carries no activation bookkeeping")
    ki, kj = int(st.last_active[i]), int(st.last_active[j])
    if global_counter < ki or global_counter < kj:
        raise ValueError(
            f"counter {global_counter} regressed before activations ({ki}, {kj})"
        )
    xi, xpi = _catch_up(float(st.values[i]), float(st.prev_values[i]), beta, global_counter - ki)
    xj, xpj = _catch_up(float(st.values[j]), float(st.prev_values[j]), beta, global_counter - kj)
    xn = st.values.copy()
    xpn = st.prev_values.copy()
    xn[i] = 0.5 * (2 - omega) * xi + 0.5 * omega * xj + beta * (xi - xpi)
    xn[j] = 0.5 * (2 - omega) * xj + 0.5 * omega * xi + beta * (xj - xpj)
    xpn[i] = xi
    xpn[j] = xj
    la = st.last_active.copy()
    la[i] = la[j] = global_counter + 1
    return GossipState(values=xn, prev_values=xpn, iter=global_counter + 1, last_active=la)


def sample_edge_sequence(g: Graph, cfg: ProtocolConfig, iters: int, rng) -> np.ndarray:
    """Presample one activated edge index per iteration."""
    if cfg.edge_probs is not None:
        p = np.asarray(cfg.edge_probs, dtype=float)
        if p.shape != (g.m,):
            raise ValueError("edge_probs length must equal edge count")
        return rng.choice(g.m, size=iters, p=p)
    return rng.integers(0, g.m, size=iters)


def sample_edge_blocks(g: Graph, tau: int, iters: int, rng) -> np.ndarray:
    """Presample uniform tau-subsets of edges, one row per iteration."""
    if not (1 <= tau <= g.m):
        raise ValueError(f"tau must lie in [1, {g.m}], got {tau}")
    out = np.empty((iters, tau), dtype=np.int64)
    done = 0
    while done < iters:
        chunk = min(_BLOCK_CHUNK, iters - done)
        scores = rng.random((chunk, g.m))
        out[done : done + chunk] = np.argpartition(scores, tau - 1, axis=1)[:, :tau]
        done += chunk
    return out


def run_protocol(
    cfg: ProtocolConfig,
    g: Graph,
    c,
    iters: int,
    rng,
    dump_states: bool = False,
) -> ProtocolTrace:
    """Run one seeded trajectory; returns the relative-error trace
    ||x^k - x*||^2 / ||x^0 - x*||^2 with x* the mean-consensus vector."""
    c = np.array(c, dtype=float)
    if c.size != g.n:
        raise ValueError("initial values length must equal node count")
    x_star = np.full(g.n, float(c.mean()))
    ei, ej = g.edge_endpoints()

    if cfg.kind in ("baseline", "mrk", "diag_b"):
        seq = sample_edge_sequence(g, cfg, iters, rng)
        if cfg.kind == "diag_b":
            bdiag = np.asarray(cfg.b_diag, dtype=float)
            if bdiag.shape != (g.n,):
                raise ValueError("b_diag length must equal node count")
        else:
            bdiag = np.full(g.n, cfg.beta)
        rel, dev, states = kernels.pairwise_trace(
            c, x_star, ei[seq], ej[seq], cfg.omega, bdiag, record_states=dump_states
        )
        return ProtocolTrace(rel_err=rel, max_mass_dev=dev, states=states)

    if cfg.kind == "mrbk":
        blocks = sample_edge_blocks(g, cfg.tau, iters, rng)
        rel, dev, states = kernels.block_trace(
            c, x_star, blocks, ei, ej, cfg.omega, cfg.beta, record_states=dump_states
        )
        return ProtocolTrace(rel_err=rel, max_mass_dev=dev, states=states)

    # cold variants: per-step python loops
    seq = sample_edge_sequence(g, cfg, iters, rng)
    st = GossipState.initial(c)
    d0 = float(np.sum((c - x_star) ** 2))
    denom = d0 if d0 > 0.0 else 1.0
    rel = np.empty(iters + 1)
    rel[0] = d0 / denom
    sum0 = float(c.sum())
    max_dev = 0.0
    states = np.empty((iters + 1, g.n)) if dump_states else None
    if dump_states:
        states[0] = c
    for k in range(iters):
        e = g.edges[int(seq[k])]
        if cfg.kind == "shift_register":
            st = step_shift_register(g, st, e, cfg.omega)
            snapshot = st.values
        else:  # lazy_mrk
            st = step_lazy_mrk(g, st, e, cfg.omega, cfg.beta, global_counter=k)
            snapshot = np.array(
                [lazy_node_value(st, v, k + 1, cfg.beta) for v in range(g.n)]
            )
        rel[k + 1] = float(np.sum((snapshot - x_star) ** 2)) / denom
        max_dev = max(max_dev, abs(float(snapshot.sum()) - sum0))
        if dump_states:
            states[k + 1] = snapshot
    return ProtocolTrace(rel_err=rel, max_mass_dev=max_dev, states=states)
