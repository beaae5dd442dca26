"""Split-search kernel, compiled when available.

Set BUILDTIME_PURE_KERNELS=1 to force the numpy fallback (used by the
equivalence tests and the kernel benchmark).
"""

import os

from . import split_py

if os.environ.get("BUILDTIME_PURE_KERNELS") == "1":
    scan_sorted = split_py.scan_sorted
    KERNEL_BACKEND = "python"
else:
    try:
        from ._split import scan_sorted  # noqa: F401

        KERNEL_BACKEND = "compiled"
    except ImportError:
        scan_sorted = split_py.scan_sorted
        KERNEL_BACKEND = "python"
