"""Backend selection for the hot loops.

At import time the compiled extension is preferred; if it is missing (no
compiler at install time) the pure-Python mirror is used.  Both expose the
same two entry points and produce bit-identical results on the same stream.
``AMDIM_FORCE_BACKEND=python|compiled`` overrides the choice, mainly for the
cross-checking tests and the benchmark.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]

    _HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _kernels = None  # type: ignore[assignment]
    _HAVE_COMPILED = False

_FORCED = os.environ.get("AMDIM_FORCE_BACKEND", "").strip().lower()


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _HAVE_COMPILED else ("python",)


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (or the default selection)."""
    if name is None:
        name = _FORCED or ("compiled" if _HAVE_COMPILED else "python")
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if not _HAVE_COMPILED:
            raise RuntimeError("compiled kernels are not available; rebuild the extension")
        return _kernels
    raise ValueError(f"unknown backend {name!r}")


BACKEND = "python" if (_FORCED == "python" or not _HAVE_COMPILED) else "compiled"
