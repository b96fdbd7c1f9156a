"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module takes over with identical results.
"""
from __future__ import annotations

from types import ModuleType

from conpat import _pykernels

try:
    from conpat import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS: dict[str, ModuleType | None] = {"cython": _ckernels, "python": _pykernels}
_active: ModuleType = _ckernels if _ckernels is not None else _pykernels


def available_backends() -> list[str]:
    return [name for name, mod in _BACKENDS.items() if mod is not None]


def get_backend() -> str:
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def set_backend(name: str) -> None:
    global _active
    mod = _BACKENDS.get(name)
    if mod is None:
        raise ValueError(f"backend {name!r} is not available; have {available_backends()}")
    _active = mod


def backend_module(name: str | None = None) -> ModuleType:
    if name is None:
        return _active
    mod = _BACKENDS.get(name)
    if mod is None:
        raise ValueError(f"backend {name!r} is not available")
    return mod


def profile_counts(p):
    return _active.profile_counts(p)


def batch_profile_counts(perms):
    return _active.batch_profile_counts(perms)


def profile_sums_first(n: int, first: int):
    return _active.profile_sums_first(n, first)


def overlap_witnesses(k: int, l: int, prefix=()):
    return _active.overlap_witnesses(k, l, tuple(prefix))


def psi_count(p):
    return _active.psi_count(p)


__all__ = [
    "available_backends",
    "get_backend",
    "set_backend",
    "backend_module",
    "profile_counts",
    "batch_profile_counts",
    "profile_sums_first",
    "overlap_witnesses",
    "psi_count",
]
