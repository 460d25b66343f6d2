"""Hot-kernel backend selection.

The compiled extension `_core` (Cython) is preferred when importable; the
numpy fallback `_fallback` implements the identical contract.  Set
EULERALPHA_FORCE_FALLBACK=1 to skip the extension (used by the benchmark and
by tests that compare the two).
"""

import os

if os.environ.get("EULERALPHA_FORCE_FALLBACK"):
    from . import _fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND_NAME

k0 = _impl.k0
k1 = _impl.k1
k0_plus_log = _impl.k0_plus_log
k1_minus_inv = _impl.k1_minus_inv
self_velocity_log = _impl.self_velocity_log
self_velocity_alpha = _impl.self_velocity_alpha
point_velocity_log = _impl.point_velocity_log
point_velocity_alpha = _impl.point_velocity_alpha
