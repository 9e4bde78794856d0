"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when it is importable; otherwise
(or when ``PRIMEINEQ_PURE_PYTHON`` is set to a non-empty value) the
pure-Python ``_pykernels`` module is used. Both return identical results.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("PRIMEINEQ_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.BACKEND

MANDL = _pykernels.MANDL
HASSANI = _pykernels.HASSANI
SUN_HARMONIC = _pykernels.SUN_HARMONIC
SUN_WEIGHTED = _pykernels.SUN_WEIGHTED
SUN_HALF = _pykernels.SUN_HALF
ABSTRACT_WEIGHTED = _pykernels.ABSTRACT_WEIGHTED

sieve_segment = _impl.sieve_segment
logsum_bounds = _impl.logsum_bounds
dusart_bounds = _impl.dusart_bounds
dusart_scan = _impl.dusart_scan
block_sums = _impl.block_sums
block_scan = _impl.block_scan


def available_backends() -> dict:
    """Map backend name to module for every backend importable here."""
    backends = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        backends["cython"] = _ckernels
    return backends
