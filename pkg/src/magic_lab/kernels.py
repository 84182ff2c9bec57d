"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise the numpy
implementation is used. Set ``MAGIC_LAB_KERNELS=python`` to force the
fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from magic_lab import _pykernels

_compiled: ModuleType | None
try:
    from magic_lab import _ckernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

_active: ModuleType = _pykernels


def available_backends() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def use_backend(name: str) -> None:
    global _active
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        _active = _compiled
    elif name == "python":
        _active = _pykernels
    else:
        raise ValueError(f"unknown kernel backend {name!r}")


def backend() -> str:
    return "cython" if _active is _compiled else "python"


def pauli_block(states, x0: int, x1: int):
    return _active.pauli_block(states, x0, x1)


def fwht(v):
    return _active.fwht(v)


def popcount(a):
    return _active.popcount(a)


if os.environ.get("MAGIC_LAB_KERNELS", "").lower() != "python" and _compiled is not None:
    _active = _compiled
