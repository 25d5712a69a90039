"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy reference
implementation when the extension was not built. Both expose the same
functions with identical semantics (see _kernels_py docstrings).
"""

from __future__ import annotations

try:
    from ._kernels import BACKEND, block_trace, pairwise_trace
except ImportError:  # pragma: no cover - depends on build environment
    from ._kernels_py import BACKEND, block_trace, pairwise_trace

__all__ = ["BACKEND", "pairwise_trace", "block_trace"]
