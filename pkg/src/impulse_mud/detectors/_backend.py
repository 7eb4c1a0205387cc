"""Kernel selection: compiled extension when importable, NumPy otherwise.

Set ``IMPULSE_MUD_PURE_PYTHON=1`` to force the NumPy kernels.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

from . import _fallback

python = SimpleNamespace(
    name="python", p_messages=_fallback.p_messages, check_messages=_fallback.check_messages
)

try:
    from . import _kernels
except ImportError:  # extension not built
    compiled = None
else:
    compiled = SimpleNamespace(
        name="cython", p_messages=_kernels.p_messages, check_messages=_kernels.check_messages
    )

if compiled is not None and os.environ.get("IMPULSE_MUD_PURE_PYTHON") != "1":
    active = compiled
else:
    active = python


def get(name: str | None = None) -> SimpleNamespace:
    """Kernel namespace by name (``"cython"``/``"python"``); default is the active one."""
    if name is None:
        return active
    if name == "python":
        return python
    if name == "cython":
        if compiled is None:
            raise ImportError("compiled kernels are not built")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
