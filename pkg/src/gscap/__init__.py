"""Computer-assisted proofs of D4-symmetric localized patterns in the 2D Gray-Scott system."""
from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__", "D4Seq", "Grid", "PairSeq", "GSParams"]

_LAZY = {"D4Seq": "d4seq", "Grid": "d4seq", "PairSeq": "d4seq", "GSParams": "model"}


def __getattr__(name):
    # deferred so that the command line can set BLAS thread counts before numpy loads
    if name in _LAZY:
        from importlib import import_module

        return getattr(import_module(f".{_LAZY[name]}", __name__), name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
