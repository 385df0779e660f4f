"""Hot-kernel backend selection.

Prefers the compiled extension when it imported cleanly, otherwise falls
back to the numpy implementation. Set ASSORT_KERNEL=numpy or
ASSORT_KERNEL=compiled to force a backend (forcing "compiled" raises if the
extension is unavailable).
"""

import os

_requested = os.environ.get("ASSORT_KERNEL", "").strip().lower()

if _requested not in ("", "compiled", "numpy"):
    raise RuntimeError(f"ASSORT_KERNEL must be 'compiled' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    from assort.kernels import numpy_backend as _impl

    BACKEND = "numpy"
else:
    try:
        from assort.kernels import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from assort.kernels import numpy_backend as _impl

        BACKEND = "numpy"

forward = _impl.forward
batch_gradients = _impl.batch_gradients
adam_step = _impl.adam_step
