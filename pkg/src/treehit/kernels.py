"""Kernel backend selection.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
pure-Python twin ``_pykernels`` is used.  Setting ``TREEHIT_PURE_PYTHON=1``
forces the fallback (the benchmark and the equivalence tests use this).
"""
import os

from . import _pykernels as python_backend

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("TREEHIT_PURE_PYTHON", "") not in ("1", "true"):
    backend = compiled_backend
    BACKEND_NAME = "compiled"
else:
    backend = python_backend
    BACKEND_NAME = "python"

tree_index = backend.tree_index
chain_pass = backend.chain_pass
complement_pass = backend.complement_pass
subtree_sum = backend.subtree_sum
path_cumsum = backend.path_cumsum
path_logcumsum = backend.path_logcumsum
walk = backend.walk
stream_state = backend.stream_state
uniforms = backend.uniforms
