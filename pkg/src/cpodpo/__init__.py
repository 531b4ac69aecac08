"""Critical points of dispersion relations for periodic graph operators."""
import os

__version__ = "0.1.0"

_threads = os.environ.get("CPODPO_THREADS")
if _threads:
    # BLAS pools are sized when numpy loads, so this has to run first
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)
