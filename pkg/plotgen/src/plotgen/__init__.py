"""Figure rendering for wvdeflect CSV datasets."""

from .figures import (ChecksumMismatchError, FIGURE_KINDS, FigureSpec,
                      FigureSpecError, load_spec, render, verify_checksum)

__version__ = "0.1.0"
__all__ = ["ChecksumMismatchError", "FIGURE_KINDS", "FigureSpec",
           "FigureSpecError", "load_spec", "render", "verify_checksum",
           "__version__"]
