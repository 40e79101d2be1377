"""Select the compiled kernel module when available, else the pure-Python one.

Set ``VDPKIT_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("VDPKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from vdpkit._ckernels import mul_terms, reduce_int  # noqa: F401

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from vdpkit._pykernels import mul_terms, reduce_int  # noqa: F401

__all__ = ["BACKEND", "mul_terms", "reduce_int"]
