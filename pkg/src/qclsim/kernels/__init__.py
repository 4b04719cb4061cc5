"""Kernel backend selection.

The compiled Cython kernels are used when the extension built; the
pure-Python reference kernels are the fallback.  Set QCLSIM_PURE_PYTHON=1
to force the fallback (used by the cross-backend tests and benchmark).
"""

import os

from . import _pykernels

BATH_HAMILTONIAN = _pykernels.BATH_HAMILTONIAN
BATH_LANGEVIN = _pykernels.BATH_LANGEVIN
BATH_NOSE = _pykernels.BATH_NOSE
BATH_NHC = _pykernels.BATH_NHC
FRUSTRATED_REJECT = _pykernels.FRUSTRATED_REJECT
FRUSTRATED_REVERSE = _pykernels.FRUSTRATED_REVERSE

if os.environ.get("QCLSIM_PURE_PYTHON", "0") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _cykernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

run_quartic_chunk = _impl.run_quartic_chunk
run_spin_chunk = _impl.run_spin_chunk

# always importable by name for benchmarks and backend cross-checks
python_impl = _pykernels
try:
    from . import _cykernels as compiled_impl
except ImportError:
    compiled_impl = None
