"""Select the compiled core or the numpy fallback at import.

Set ``QKSVM_BACKEND=python`` to force the fallback even when the extension
is built; ``QKSVM_BACKEND=compiled`` makes a missing extension an error.
"""

import os

from . import _core_py

_requested = os.environ.get("QKSVM_BACKEND", "auto").lower()

if _requested == "python":
    core = _core_py
else:
    try:
        from . import _core as core  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise
        core = _core_py

NAME = "python" if core is _core_py else "compiled"


def available_backends():
    """Return a mapping of backend name to kernel module for every importable backend."""
    out = {"python": _core_py}
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        out["compiled"] = _core
    return out
