"""Kernel backend selection.

The subset scans dominate runtime, so they exist twice: a numba-jitted
implementation and a pure-numpy fallback. The environment variable
``SPARSECERT_BACKEND`` picks one:

* ``auto`` (default): numba if it imports, numpy otherwise
* ``numba``: require the jitted kernels, fail if numba is missing
* ``numpy``: force the batched-numpy fallback

Both backends agree within floating-point tolerance; ``benchmarks/``
contains a script comparing their throughput.
"""

from __future__ import annotations

import os

from .errors import InvalidInputError

BACKEND_ENV_VAR = "SPARSECERT_BACKEND"


def _select():
    choice = os.environ.get(BACKEND_ENV_VAR, "auto").strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise InvalidInputError(
            f"{BACKEND_ENV_VAR}={choice!r}: expected 'auto', 'numba' or 'numpy'"
        )
    if choice in ("auto", "numba"):
        try:
            from . import kernels_numba as mod

            return mod, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import kernels_numpy as mod

    return mod, "numpy"


kernels, ACTIVE_BACKEND = _select()

scan_sigma_min = kernels.scan_sigma_min
scan_eta = kernels.scan_eta
scan_g = kernels.scan_g
scan_noisy_tight = kernels.scan_noisy_tight
