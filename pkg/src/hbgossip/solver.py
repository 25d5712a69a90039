"""Sketch-and-project iteration with relaxation and heavy-ball momentum.

Closed-form single-row (Kaczmarz) and row-block (block Kaczmarz) step
kernels over arbitrary consistent linear systems, plus the projection onto
the solution set that defines the convergence target x*.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import Graph, incidence_matrix

# Relative singular-value cutoff used wherever pseudoinverse semantics are
# required on possibly rank-deficient blocks.
SVD_CUTOFF = 1e-10


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray  # (m, n)
    b: np.ndarray  # (m,)
    is_ac: bool = False  # average-consensus system (incidence matrix, b = 0)

    def __post_init__(self):
        if self.A.ndim != 2 or self.A.shape[0] < 1 or self.A.shape[1] < 1:
            raise ValueError("A must be a nonempty 2-D matrix")
        if self.b.shape != (self.A.shape[0],):
            raise ValueError("b length must match row count of A")
        if self.is_ac and np.any(self.b != 0):
            raise ValueError("AC system requires b = 0")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


def ac_system(g: Graph) -> LinearSystem:
    """Consensus-encoding system: incidence matrix of g, zero right-hand side."""
    return LinearSystem(A=incidence_matrix(g), b=np.zeros(g.m), is_ac=True)


@dataclass(frozen=True)
class IterateState:
    x_cur: np.ndarray
    x_prev: np.ndarray

    def __post_init__(self):
        if self.x_cur.shape != self.x_prev.shape:
            raise ValueError("current and previous iterates must have equal length")

    @classmethod
    def initial(cls, x0: np.ndarray) -> "IterateState":
        # momentum methods start with both registers equal
        return cls(x_cur=np.array(x0, dtype=float), x_prev=np.array(x0, dtype=float))


@dataclass(frozen=True)
class SketchSample:
    """A realized sketch: one row index or a block of row indices."""

    kind: str  # "row" | "block"
    rows: tuple

    def __post_init__(self):
        if self.kind not in ("row", "block"):
            raise ValueError(f"unknown sketch kind {self.kind!r}")
        if len(self.rows) == 0:
            raise ValueError("empty sketch sample")
        if self.kind == "row" and len(self.rows) != 1:
            raise ValueError("row sample holds exactly one index")
        if len(set(self.rows)) != len(self.rows):
            raise ValueError("duplicate rows in block sample")


@dataclass(frozen=True)
class SketchDistribution:
    """Row-sampling law: explicit per-row probabilities, or uniform
    tau-subsets of rows without replacement."""

    m: int
    probs: np.ndarray | None = None  # "row" variant
    tau: int | None = None  # "uniform-block" variant

    def __post_init__(self):
        if (self.probs is None) == (self.tau is None):
            raise ValueError("specify exactly one of probs / tau")
        if self.probs is not None:
            p = np.asarray(self.probs, dtype=float)
            if p.shape != (self.m,) or np.any(p <= 0):
                raise ValueError("probs must be length m and strictly positive")
            if abs(p.sum() - 1.0) > 1e-12:
                raise ValueError("probs must sum to 1")
        else:
            if not (1 <= self.tau <= self.m):
                raise ValueError(f"tau must lie in [1, {self.m}]")

    @property
    def kind(self) -> str:
        return "row" if self.probs is not None else "block"

    @classmethod
    def uniform_rows(cls, m: int) -> "SketchDistribution":
        return cls(m=m, probs=np.full(m, 1.0 / m))

    @classmethod
    def uniform_block(cls, m: int, tau: int) -> "SketchDistribution":
        return cls(m=m, tau=tau)


def sample(dist: SketchDistribution, rng: np.random.Generator) -> SketchSample:
    """Draw one sketch from the distribution."""
    if dist.kind == "row":
        i = int(rng.choice(dist.m, p=dist.probs))
        return SketchSample(kind="row", rows=(i,))
    rows = rng.choice(dist.m, size=dist.tau, replace=False)
    return SketchSample(kind="block", rows=tuple(sorted(int(r) for r in rows)))


def rk_step(sys: LinearSystem, x: np.ndarray, i: int) -> np.ndarray:
    """Project x onto the hyperplane of row i."""
    row = sys.A[i]
    nrm2 = float(row @ row)
    if nrm2 == 0.0:
        raise ValueError(f"row {i} is identically zero")
    resid = float(row @ x - sys.b[i])
    return x - (resid / nrm2) * row


def rbk_step(sys: LinearSystem, x: np.ndarray, C) -> np.ndarray:
    """Euclidean projection of x onto the affine set of the rows in C.

    Uses a minimum-norm least-squares solve; rank-deficient blocks are fine.
    """
    C = list(C)
    if len(C) == 0:
        raise ValueError("empty row block")
    sub = sys.A[C]
    resid = sub @ x - sys.b[C]
    z, *_ = np.linalg.lstsq(sub @ sub.T, resid, rcond=SVD_CUTOFF)
    return x - sub.T @ z


def _kernel_step(sys: LinearSystem, x: np.ndarray, s: SketchSample) -> np.ndarray:
    if s.kind == "row":
        return rk_step(sys, x, s.rows[0])
    return rbk_step(sys, x, s.rows)


def shb_step(
    sys: LinearSystem,
    st: IterateState,
    s: SketchSample,
    omega: float,
    beta: float,
) -> IterateState:
    """One stochastic-heavy-ball iteration:

        x+ = x + omega * (proj(x) - x) + beta * (x - x_prev)

    where proj is the single-row or block projection per the sample kind.
    """
    if not (0 < omega < 2):
        raise ValueError(f"omega must lie in (0, 2), got {omega}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    x = st.x_cur
    proj = _kernel_step(sys, x, s)
    x_new = x + omega * (proj - x) + beta * (x - st.x_prev)
    return IterateState(x_cur=x_new, x_prev=x)


def project_to_solution(sys: LinearSystem, x: np.ndarray) -> np.ndarray:
    """Nearest point to x in the solution set of the system.

    AC fast path: the solution set of a connected consensus system is the
    span of the all-ones vector, so the projection is the mean vector.
    """
    if sys.is_ac:
        return np.full_like(np.asarray(x, dtype=float), float(np.mean(x)))
    z, *_ = np.linalg.lstsq(sys.A @ sys.A.T, sys.A @ x - sys.b, rcond=SVD_CUTOFF)
    proj = x - sys.A.T @ z
    resid = sys.A @ proj - sys.b
    scale = max(1.0, float(np.abs(sys.b).max()), float(np.abs(sys.A @ x).max()))
    if float(np.abs(resid).max()) > 1e-8 * scale:
        raise ValueError("system appears inconsistent: projection residual too large")
    return proj


def sketch_matrix_h(sys: LinearSystem, s: SketchSample) -> np.ndarray:
    """The random m x m weighting matrix of the sketched subproblem
    (pseudoinverse of the block Gram matrix, embedded at the sampled rows)."""
    rows = list(s.rows)
    sub = sys.A[rows]
    gram_pinv = np.linalg.pinv(sub @ sub.T, rcond=SVD_CUTOFF)
    H = np.zeros((sys.m, sys.m))
    H[np.ix_(rows, rows)] = gram_pinv
    return H


def sketched_loss(sys: LinearSystem, x: np.ndarray, s: SketchSample) -> float:
    """Diagnostic value 0.5 * (Ax-b)^T H (Ax-b) of the sketched quadratic."""
    rows = list(s.rows)
    sub = sys.A[rows]
    resid = sub @ x - sys.b[rows]
    gram_pinv = np.linalg.pinv(sub @ sub.T, rcond=SVD_CUTOFF)
    return 0.5 * float(resid @ gram_pinv @ resid)


def sketched_gradient(sys: LinearSystem, x: np.ndarray, s: SketchSample) -> np.ndarray:
    """Gradient A^T H (Ax - b) of the sketched quadratic at x."""
    rows = list(s.rows)
    sub = sys.A[rows]
    resid = sub @ x - sys.b[rows]
    gram_pinv = np.linalg.pinv(sub @ sub.T, rcond=SVD_CUTOFF)
    return sub.T @ (gram_pinv @ resid)
