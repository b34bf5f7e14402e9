"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
fallback produces bit-identical results (a test asserts this), only slower.
Set CRGLIMITS_BACKEND=pure or =compiled to force one; forcing the compiled
backend raises if the extension is missing.
"""

import os

from . import _pykernels

_forced = os.environ.get("CRGLIMITS_BACKEND", "").strip().lower()

if _forced == "pure":
    impl = _pykernels
elif _forced == "compiled":
    from . import _speedups as impl
elif _forced == "":
    try:
        from . import _speedups as impl
    except ImportError:
        impl = _pykernels
else:
    raise RuntimeError(f"unknown CRGLIMITS_BACKEND value: {_forced!r}")


def active_name() -> str:
    """'compiled' or 'pure'."""
    return impl.name
