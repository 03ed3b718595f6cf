"""Hot-kernel backend selection.

The compiled Cython extension is used when available; otherwise the pure
numpy fallback.  Set STACKFORGE_PURE=1 to force the fallback (used by the
benchmark and the backend-equivalence tests).  Both backends produce
bitwise-identical output.
"""

import os

from . import pure as _pure

if os.environ.get("STACKFORGE_PURE", "").strip() not in ("", "0"):
    _impl = _pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
julia_bounded = _impl.julia_bounded
mandelbrot_bounded = _impl.mandelbrot_bounded
march_volume = _impl.march_volume


def backend_name() -> str:
    return BACKEND
