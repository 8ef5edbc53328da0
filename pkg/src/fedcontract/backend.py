"""Kernel backend selection.

Prefers the compiled extension ``fedcontract._core`` and falls back to the
pure-Python ``fedcontract._core_py`` when the extension is not built.  Set
``FEDCONTRACT_BACKEND=pure`` or ``FEDCONTRACT_BACKEND=compiled`` to force one.
"""

from __future__ import annotations

import os

from .errors import ConfigError

_requested = os.environ.get("FEDCONTRACT_BACKEND", "").strip().lower()
if _requested not in ("", "auto", "pure", "compiled"):
    raise ConfigError(
        f"FEDCONTRACT_BACKEND must be 'pure' or 'compiled', got {_requested!r}"
    )

if _requested == "pure":
    from . import _core_py as _impl

    _BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        _BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ConfigError(
                "FEDCONTRACT_BACKEND=compiled but the extension module is not built; "
                "reinstall the package or drop the override"
            ) from None
        from . import _core_py as _impl

        _BACKEND = "pure"

stationary_point = _impl.stationary_point
best_menu_on_grid = _impl.best_menu_on_grid


def backend_name() -> str:
    """Name of the kernel backend in use: ``"compiled"`` or ``"pure"``."""
    return _BACKEND
