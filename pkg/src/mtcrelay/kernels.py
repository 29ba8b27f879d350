"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback is loaded. Set ``MTCRELAY_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("MTCRELAY_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"


def nearest_site(points, sites, L, backend=None):
    """Index of (and squared torus distance to) the nearest site for each point.

    Ties go to the lowest site index.
    """
    impl = _select(backend)
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    sites = np.ascontiguousarray(sites, dtype=np.float64).reshape(-1, 2)
    if len(sites) == 0:
        raise ValueError("nearest_site needs at least one site")
    return impl.nearest_site(points, sites, float(L))


def cochannel_sir(devices, channel, owner, gateways, fades, L, alpha, backend=None):
    """SIR of each device at its serving gateway under co-channel interference.

    ``fades[j, g]`` is the power gain of the link from device ``j`` to
    gateway ``g``.
    """
    impl = _select(backend)
    devices = np.ascontiguousarray(devices, dtype=np.float64).reshape(-1, 2)
    channel = np.asarray(channel, dtype=np.int64)
    order = np.argsort(channel, kind="stable").astype(np.int64)
    n_ch = int(channel.max()) + 1 if len(channel) else 0
    bounds = np.searchsorted(channel[order], np.arange(n_ch + 1)).astype(np.int64)
    return impl.cochannel_sir(
        devices,
        order,
        bounds,
        np.ascontiguousarray(owner, dtype=np.int64),
        np.ascontiguousarray(gateways, dtype=np.float64).reshape(-1, 2),
        np.ascontiguousarray(fades, dtype=np.float64),
        float(L),
        float(alpha),
    )


def available_backends():
    out = ["python"]
    if BACKEND == "cython" or _has_extension():
        out.insert(0, "cython")
    return out


def _has_extension():
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {backend!r}")
