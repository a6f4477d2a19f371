"""Mode-seeking kernel selection: compiled extension or numpy fallback.

The compiled kernel is preferred whenever it imported cleanly.  Set
``MSHF_BACKEND=python`` or ``MSHF_BACKEND=compiled`` to force a choice for
the whole process; per-call overrides go through the ``backend`` argument
of :func:`mshf.modes.minimum_t_distance`.
"""

from __future__ import annotations

import os

from . import _modeseek_py

try:
    from . import _modeseek as _compiled
except ImportError:  # extension not built: pure-python fallback
    _compiled = None

_ENV_CHOICE = os.environ.get("MSHF_BACKEND", "auto").strip().lower() or "auto"


def available_backends() -> tuple[str, ...]:
    return ("python",) if _compiled is None else ("compiled", "python")


def active_backend() -> str:
    """Backend used when no explicit per-call choice is made."""
    if _ENV_CHOICE == "python":
        return "python"
    if _ENV_CHOICE == "compiled":
        if _compiled is None:
            raise RuntimeError(
                "MSHF_BACKEND=compiled but the extension is not built"
            )
        return "compiled"
    return "compiled" if _compiled is not None else "python"


def kernel(name: str | None = None):
    """Resolve a backend name ('compiled', 'python', 'auto' or None)."""
    choice = (name or "auto").strip().lower()
    if choice == "auto":
        choice = active_backend()
    if choice == "python":
        return _modeseek_py.mtd_kernel
    if choice == "compiled":
        if _compiled is None:
            raise RuntimeError(
                "compiled backend unavailable; rebuild the extension or "
                "request backend='python'"
            )
        return _compiled.mtd_kernel
    raise ValueError(f"unknown backend {name!r}")
