"""Numpy implementations of the hot kernels, used when the extension is absent."""

import numpy as np

# grid points processed per block in nearest_site; bounds peak memory
_BLOCK = 4096


def _wrap(d, L):
    d = np.abs(d)
    return np.minimum(d, L - d)


def nearest_site(points, sites, L):
    points = np.ascontiguousarray(points, dtype=np.float64)
    sites = np.ascontiguousarray(sites, dtype=np.float64)
    n = points.shape[0]
    idx = np.empty(n, dtype=np.int64)
    dist2 = np.empty(n, dtype=np.float64)
    for s in range(0, n, _BLOCK):
        p = points[s:s + _BLOCK]
        dx = _wrap(p[:, None, 0] - sites[None, :, 0], L)
        dy = _wrap(p[:, None, 1] - sites[None, :, 1], L)
        d2 = dx * dx + dy * dy
        # argmin returns the first minimum, i.e. the lowest site index on ties
        k = d2.argmin(axis=1)
        idx[s:s + _BLOCK] = k
        dist2[s:s + _BLOCK] = d2[np.arange(len(p)), k]
    return idx, dist2


def cochannel_sir(devices, order, bounds, owner, gateways, fades, L, alpha):
    n = devices.shape[0]
    out = np.empty(n, dtype=np.float64)
    for c in range(len(bounds) - 1):
        m = order[bounds[c]:bounds[c + 1]]
        if len(m) == 0:
            continue
        g = owner[m]
        dx = _wrap(devices[m, None, 0] - gateways[None, g, 0], L)
        dy = _wrap(devices[m, None, 1] - gateways[None, g, 1], L)
        # rows: transmitter j, columns: receiver of device i
        with np.errstate(divide="ignore"):
            power = fades[m[:, None], g[None, :]] * np.power(dx * dx + dy * dy, -0.5 * alpha)
        sig = power.diagonal().copy()
        np.fill_diagonal(power, 0.0)
        interf = power.sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[m] = np.where(interf == 0.0, np.inf, sig / np.where(interf == 0.0, 1.0, interf))
    return out
