"""Pick the compiled kernels when importable, else the numpy fallback.

Set ``SPECMATCH_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
ecf = _kernels_py.ecf
ecf_grad = _kernels_py.ecf_grad
trig = _kernels_py.trig

if os.environ.get("SPECMATCH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        ecf = _ckernels.ecf
        ecf_grad = _ckernels.ecf_grad
        trig = _ckernels.trig
