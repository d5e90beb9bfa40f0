"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used. Set ``D2DCACHE_BACKEND=python`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("D2DCACHE_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

lex_trees = _impl.lex_trees
dijkstra_all = _impl.dijkstra_all
cover_sums = _impl.cover_sums
spread_one_attempt = _impl.spread_one_attempt
spread_cascade = _impl.spread_cascade


def backends():
    """Map of available backend name -> kernel module."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
