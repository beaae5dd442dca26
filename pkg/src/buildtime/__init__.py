"""Build-duration prediction toolkit for TravisTorrent-schema CI data."""

from ._kernels import KERNEL_BACKEND  # noqa: F401

__version__ = "0.1.0"
