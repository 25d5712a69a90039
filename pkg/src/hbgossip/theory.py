"""Closed-form convergence-rate constants.

Builds the expected projection matrix W = E[A^T H A] for a sketch
distribution, extracts its extreme nonzero spectrum, and evaluates the
rate constants of the basic sketch-and-project method, its heavy-ball
variant, and the accelerated mean-decay regime.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .solver import SVD_CUTOFF, LinearSystem, SketchDistribution

# Above this many tau-subsets the block expectation switches to Monte Carlo.
EXACT_ENUMERATION_LIMIT = 10**5
DEFAULT_MC_SAMPLES = 10**4

ZERO_EIG_REL_CUTOFF = 1e-9


@dataclass(frozen=True)
class RateReport:
    lambda_min_plus: float
    lambda_max: float
    rho: float  # basic rate 1 - lambda_min_plus
    omega: float
    beta: float
    a1: float
    a2: float
    q: float
    delta: float
    valid: bool  # a1 + a2 < 1, i.e. the L2 rate q applies
    thm4_beta_lo: float
    thm4_beta_hi: float
    approximate: bool  # W estimated by Monte Carlo rather than enumerated

    def as_items(self):
        return [
            ("lambda_min_plus", self.lambda_min_plus),
            ("lambda_max", self.lambda_max),
            ("rho", self.rho),
            ("omega", self.omega),
            ("beta", self.beta),
            ("a1", self.a1),
            ("a2", self.a2),
            ("q", self.q),
            ("delta", self.delta),
            ("valid", self.valid),
            ("thm4_beta_lo", self.thm4_beta_lo),
            ("thm4_beta_hi", self.thm4_beta_hi),
            ("approximate", self.approximate),
        ]


def _row_space_projector(sub: np.ndarray) -> np.ndarray:
    """Orthogonal projector A_C^T (A_C A_C^T)^+ A_C onto the block row space."""
    u, s, vt = np.linalg.svd(sub, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((sub.shape[1], sub.shape[1]))
    keep = s > SVD_CUTOFF * s[0]
    vr = vt[keep]
    return vr.T @ vr


def expected_W(
    sys: LinearSystem,
    dist: SketchDistribution,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    seed: int = 0,
) -> tuple[np.ndarray, bool]:
    """Expected projection matrix W = E[A^T H A].

    Returns (W, exact). Single-row distributions and small block
    distributions are enumerated exactly; large block distributions are
    estimated from `mc_samples` seeded draws and flagged exact=False.
    """
    n = sys.n
    if dist.kind == "row":
        W = np.zeros((n, n))
        for i in range(sys.m):
            row = sys.A[i]
            nrm2 = float(row @ row)
            if nrm2 == 0.0:
                continue
            W += dist.probs[i] * np.outer(row, row) / nrm2
        return W, True

    tau = dist.tau
    if math.comb(sys.m, tau) <= EXACT_ENUMERATION_LIMIT:
        W = np.zeros((n, n))
        count = 0
        for C in itertools.combinations(range(sys.m), tau):
            W += _row_space_projector(sys.A[list(C)])
            count += 1
        return W / count, True
    W, _ = expected_W_mc(sys, tau, mc_samples, seed)
    return W, False


def expected_W_mc(
    sys: LinearSystem, tau: int, n_samples: int, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimate of the block expectation.

    Returns (mean, elementwise standard error of the mean).
    """
    rng = np.random.default_rng(seed)
    n = sys.n
    acc = np.zeros((n, n))
    acc2 = np.zeros((n, n))
    for _ in range(n_samples):
        C = rng.choice(sys.m, size=tau, replace=False)
        P = _row_space_projector(sys.A[C])
        acc += P
        acc2 += P * P
    mean = acc / n_samples
    var = np.maximum(acc2 / n_samples - mean * mean, 0.0)
    return mean, np.sqrt(var / n_samples)


def extreme_spectrum(W: np.ndarray) -> tuple[float, float]:
    """(smallest nonzero eigenvalue, largest eigenvalue) of symmetric PSD W.

    Eigenvalues below 1e-9 * lambda_max count as zero.
    """
    if not np.allclose(W, W.T, atol=1e-10):
        raise ValueError("W must be symmetric")
    evals = np.linalg.eigvalsh(W)
    lam_max = float(evals[-1])
    cutoff = ZERO_EIG_REL_CUTOFF * lam_max
    nonzero = evals[evals > cutoff]
    if nonzero.size == 0:
        raise ValueError("degenerate spectrum: no eigenvalue above cutoff")
    return float(nonzero[0]), lam_max


def rate_basic(lambda_min_plus: float) -> float:
    """Linear L2 rate rho = 1 - lambda_min_plus of the momentum-free method."""
    if not (0 < lambda_min_plus <= 1):
        raise ValueError(f"lambda_min_plus must lie in (0, 1], got {lambda_min_plus}")
    return 1.0 - lambda_min_plus


def rate_shb(
    lambda_min_plus: float,
    lambda_max: float,
    omega: float,
    beta: float,
) -> tuple[float, float, float, float, bool]:
    """Heavy-ball L2 rate constants (a1, a2, q, delta, valid).

        a1 = 1 + 3 beta + 2 beta^2 - (omega (2 - omega) + omega beta) lambda_min_plus
        a2 = beta + 2 beta^2 + omega beta lambda_max
        q  = (a1 + sqrt(a1^2 + 4 a2)) / 2,  delta = q - a1

    valid is True when a1 + a2 < 1, in which case a1 + a2 <= q < 1.
    """
    if not (0 < omega < 2):
        raise ValueError(f"omega must lie in (0, 2), got {omega}")
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    a1 = 1 + 3 * beta + 2 * beta**2 - (omega * (2 - omega) + omega * beta) * lambda_min_plus
    a2 = beta + 2 * beta**2 + omega * beta * lambda_max
    q = 0.5 * (a1 + math.sqrt(a1 * a1 + 4 * a2))
    delta = q - a1
    valid = a1 + a2 < 1
    if valid:
        assert a1 + a2 <= q < 1
    return a1, a2, q, delta, valid


def thm4_beta_range(
    omega: float, lambda_min_plus: float, lambda_max: float
) -> tuple[float, float]:
    """Momentum range ((1 - sqrt(omega lambda_min_plus))^2, 1) of the
    accelerated mean-decay regime; requires 0 < omega <= 1 / lambda_max."""
    if not (0 < omega <= 1.0 / lambda_max):
        raise ValueError(
            f"omega must lie in (0, {1.0 / lambda_max}], got {omega}"
        )
    beta_lo = (1.0 - math.sqrt(omega * lambda_min_plus)) ** 2
    return beta_lo, 1.0


def corollary_presets(lambda_min_plus: float, lambda_max: float):
    """Two accelerated (omega, beta) presets with their complexity labels."""
    return [
        {
            "omega": 1.0,
            "beta": (1.0 - math.sqrt(0.99 * lambda_min_plus)) ** 2,
            "complexity": "O~(sqrt(1/lambda_min_plus))",
        },
        {
            "omega": 1.0 / lambda_max,
            "beta": (1.0 - math.sqrt(0.99 * lambda_min_plus / lambda_max)) ** 2,
            "complexity": "O~(sqrt(lambda_max/lambda_min_plus))",
        },
    ]


def rate_report(
    sys: LinearSystem,
    dist: SketchDistribution,
    omega: float = 1.0,
    beta: float = 0.0,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    seed: int = 0,
) -> RateReport:
    """All rate constants for one system + sketch distribution."""
    W, exact = expected_W(sys, dist, mc_samples=mc_samples, seed=seed)
    lam_min, lam_max = extreme_spectrum(W)
    a1, a2, q, delta, valid = rate_shb(lam_min, lam_max, omega, beta)
    if omega <= 1.0 / lam_max:
        beta_lo, beta_hi = thm4_beta_range(omega, lam_min, lam_max)
    else:
        beta_lo = beta_hi = float("nan")
    return RateReport(
        lambda_min_plus=lam_min,
        lambda_max=lam_max,
        rho=rate_basic(lam_min),
        omega=omega,
        beta=beta,
        a1=a1,
        a2=a2,
        q=q,
        delta=delta,
        valid=valid,
        thm4_beta_lo=beta_lo,
        thm4_beta_hi=beta_hi,
        approximate=not exact,
    )
