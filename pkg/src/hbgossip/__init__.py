"""Randomized gossip protocols with heavy-ball momentum.

Library + CLI for average-consensus simulation: momentum pairwise and
block gossip, the shift-register method and its diagonal-momentum
generalization, exact convergence-rate constants, and a seeded experiment
harness.
"""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
__all__ = ["KERNEL_BACKEND", "__version__"]
