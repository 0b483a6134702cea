"""Backend selection for the status-table kernels.

``WSREFINE_BACKEND=numpy`` forces the pure-numpy implementation; otherwise the
numba-compiled kernels are used when numba imports cleanly.
"""

from __future__ import annotations

import os

from . import _numpy

_NAMES = (
    "k_and", "k_or", "k_seq", "k_not", "k_iff", "k_implies", "k_assert",
    "k_reduce_exists", "k_reduce_forall", "k_refines", "k_refines_under",
    "k_meet", "k_join", "k_gather", "k_acyclic",
)


def _select():
    wanted = os.environ.get("WSREFINE_BACKEND", "numba").strip().lower()
    if wanted == "numpy":
        return "numpy", _numpy
    try:
        from . import _numba
    except Exception:  # pragma: no cover - numba missing or broken
        return "numpy", _numpy
    return "numba", _numba


BACKEND, _impl = _select()

k_and = _impl.k_and
k_or = _impl.k_or
k_seq = _impl.k_seq
k_not = _impl.k_not
k_iff = _impl.k_iff
k_implies = _impl.k_implies
k_assert = _impl.k_assert
k_reduce_exists = _impl.k_reduce_exists
k_reduce_forall = _impl.k_reduce_forall
k_refines = _impl.k_refines
k_refines_under = _impl.k_refines_under
k_meet = _impl.k_meet
k_join = _impl.k_join
k_gather = _impl.k_gather
k_acyclic = _impl.k_acyclic


def implementation(name: str):
    """Return the kernel module for ``name`` ('numpy' or 'numba')."""
    if name == "numpy":
        return _numpy
    from . import _numba
    return _numba


__all__ = ["BACKEND", "implementation", *_NAMES]
