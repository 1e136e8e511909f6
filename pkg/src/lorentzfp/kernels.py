"""Kernel dispatch: the compiled ``_core`` extension when importable, else the
numpy / pure-Python ``_fallback``.

Set ``LORENTZFP_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _fallback
from ._fallback import decode, encode, matmul_mod  # noqa: F401

_core = None
if not os.environ.get("LORENTZFP_PURE"):
    try:
        from . import _core
    except ImportError:
        _core = None

BACKEND = "compiled" if _core is not None else "python"
_CORE_MAX_P = 14


def bfs_closure(gens, p: int, cap: int):
    if _core is not None and p <= _CORE_MAX_P:
        return _core.bfs_closure([tuple(g) for g in gens], p, cap)
    return _fallback.bfs_closure(gens, p, cap)


def lorentz_frames(p: int):
    if _core is not None and p <= _CORE_MAX_P:
        return _core.lorentz_frames(p)
    return _fallback.lorentz_frames(p)


def first_chain_candidate(start: int, count: int, qs) -> int:
    if _core is not None and start + 8 * count < _fallback.INT64_SAFE:
        return _core.first_chain_candidate(start, count, list(qs))
    return _fallback.first_chain_candidate(start, count, list(qs))
