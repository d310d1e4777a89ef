"""Hot numerical kernels with a compiled core and a pure numpy fallback.

The compiled extension ``_core`` is used when it has been built; otherwise
the numpy implementations in ``_fallback`` are selected.  Set the environment
variable ``CAVITYRQI_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("CAVITYRQI_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl  # noqa: F811
        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _fallback

dirac_roots = _impl.dirac_roots
scalar_beta_antidiagonals = _impl.scalar_beta_antidiagonals
dirac_beta_antidiagonals = _impl.dirac_beta_antidiagonals

__all__ = ["BACKEND", "dirac_roots", "scalar_beta_antidiagonals",
           "dirac_beta_antidiagonals"]
