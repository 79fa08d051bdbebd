"""Kernel backend selection.

The compiled core (Cython) is used when its extension module imported
successfully; otherwise the pure-numpy fallback takes over with identical
semantics.  Set BOETTCHER_BACKEND=python or =cython to force a choice
(forcing cython raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _fallback

_forced = os.environ.get("BOETTCHER_BACKEND", "").strip().lower()

if _forced in ("python", "fallback", "numpy"):
    impl = _fallback
elif _forced in ("cython", "compiled", "c"):
    from . import _core as impl  # noqa: F401  (ImportError is the signal)
else:
    try:
        from . import _core as impl
    except ImportError:
        impl = _fallback


def backend_name() -> str:
    return impl.BACKEND


def get_impl(name: str):
    """Fetch a specific backend module (for parity tests and benchmarks)."""
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _core  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names
