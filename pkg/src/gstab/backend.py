"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled module ``gstab._kernels`` is optional; if it failed to build (or
the env var ``GSTAB_BACKEND=python`` is set) the numpy implementation in
``gstab._kernels_py`` is used.  Both expose identical signatures, so they can
also be swapped programmatically, which the backend benchmark relies on.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

_active = _kernels_py
if _compiled is not None and os.environ.get("GSTAB_BACKEND", "") != "python":
    _active = _compiled
if os.environ.get("GSTAB_BACKEND", "") == "compiled" and _compiled is None:
    raise ImportError("GSTAB_BACKEND=compiled but the extension is not built")


def get():
    """The active kernels module."""
    return _active


def name() -> str:
    return _active.BACKEND_NAME


def available() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.append("compiled")
    return names


def use(which: str) -> None:
    """Force a backend (\"python\" or \"compiled\"); used by benchmarks/tests."""
    global _active
    if which == "python":
        _active = _kernels_py
    elif which == "compiled":
        if _compiled is None:
            raise ValueError("compiled backend is not built")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {which!r}")
