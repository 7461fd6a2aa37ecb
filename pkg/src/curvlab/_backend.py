"""Kernel backend selection.

The compiled ``_jetcore`` extension is used when it imports; otherwise the
numpy kernels in ``_jetcore_py`` take over. Set ``CURVLAB_BACKEND=python`` to
force the fallback.
"""
import os

from . import _jetcore_py

kernels = _jetcore_py

if os.environ.get("CURVLAB_BACKEND", "").lower() != "python":
    try:
        from . import _jetcore as kernels  # noqa: F811
    except ImportError:  # extension not built
        kernels = _jetcore_py

BACKEND = kernels.NAME
