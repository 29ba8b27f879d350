"""Point-process sampling and association geometry on a square torus."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels

DEFAULT_RESOLUTION = 128
MIN_RESOLUTION = 64


@dataclass(frozen=True, eq=False)
class NetworkSnapshot:
    """One realization of the device and gateway processes on ``[0, L)^2``."""

    devices: np.ndarray
    gateways: np.ndarray
    window: float
    torus: bool = True

    def __post_init__(self):
        d = np.ascontiguousarray(self.devices, dtype=np.float64).reshape(-1, 2)
        g = np.ascontiguousarray(self.gateways, dtype=np.float64).reshape(-1, 2)
        object.__setattr__(self, "devices", d)
        object.__setattr__(self, "gateways", g)
        object.__setattr__(self, "window", float(self.window))
        if not self.torus:
            raise ValueError("only torus windows are supported")
        for pts in (d, g):
            if pts.size and (pts.min() < 0.0 or pts.max() >= self.window):
                raise ValueError("coordinates must lie in [0, L)")
        if len(g) < 2:
            raise ValueError(f"need at least 2 gateways, got {len(g)}")

    @property
    def n_devices(self) -> int:
        return len(self.devices)

    @property
    def n_gateways(self) -> int:
        return len(self.gateways)


@dataclass(frozen=True, eq=False)
class Grouping:
    """Device-to-gateway ownership plus per-gateway counts and spectrum shares."""

    owner: np.ndarray
    counts: np.ndarray
    gamma: np.ndarray
    areas: np.ndarray


def sample_ppp(density, window, stream):
    """Homogeneous Poisson points on ``[0, L)^2`` drawn from ``stream``.

    Returns an ``(n, 2)`` float array.
    """
    if density < 0 or window <= 0:
        raise ValueError("density must be >= 0 and window > 0")
    n = stream.poisson(density * window * window)
    pts = stream.uniform(0.0, window, size=(n, 2))
    # uniform() may round up to exactly L for large L
    pts[pts >= window] = 0.0
    return pts


def torus_distance(a, b, window):
    """Euclidean distance with per-axis wraparound. Broadcasts over leading axes."""
    d = np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))
    d = np.minimum(d, window - d)
    return np.sqrt((d * d).sum(axis=-1))


def pairwise_torus_distance(a, b, window):
    a = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 2)
    return torus_distance(a[:, None, :], b[None, :, :], window)


def cell_areas(snapshot, resolution=DEFAULT_RESOLUTION):
    """Voronoi cell areas on the torus, estimated on a regular grid.

    Each of the ``resolution**2`` cell centers is assigned to its nearest
    gateway; a gateway's area is its hit count times the cell area.

    Returns
    -------
    areas : ndarray of float
    hits : ndarray of int
        Grid cells owned by each gateway; sums to ``resolution**2``.
    """
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")
    L = snapshot.window
    c = (np.arange(resolution) + 0.5) * (L / resolution)
    xx, yy = np.meshgrid(c, c, indexing="xy")
    grid = np.column_stack([xx.ravel(), yy.ravel()])
    idx, _ = kernels.nearest_site(grid, snapshot.gateways, L)
    hits = np.bincount(idx, minlength=snapshot.n_gateways).astype(np.int64)
    areas = hits * (L * L / (resolution * resolution))
    return areas, hits


def assign_nearest(snapshot, resolution=DEFAULT_RESOLUTION):
    """Group every device with its nearest gateway (ties to the lowest index)."""
    G = snapshot.n_gateways
    if snapshot.n_devices:
        owner, _ = kernels.nearest_site(snapshot.devices, snapshot.gateways, snapshot.window)
    else:
        owner = np.zeros(0, dtype=np.int64)
    counts = np.bincount(owner, minlength=G).astype(np.int64)
    areas, hits = cell_areas(snapshot, resolution)
    gamma = hits / float(resolution * resolution)
    return Grouping(owner=owner, counts=counts, gamma=gamma, areas=areas)


def nearest_gateway_pairs(snapshot):
    """Disjoint pairs of mutually close gateways, in ascending pair distance.

    Each gateway nominates its nearest other gateway (lowest index on ties).
    The nominated pairs are deduplicated, sorted by distance (then by index)
    and accepted greedily so that no gateway appears twice.

    Returns
    -------
    list of (int, int, float)
        ``(i, j, distance)`` with ``i < j``.
    """
    G = snapshot.n_gateways
    if G < 2:
        raise ValueError("pairing needs at least 2 gateways")
    dist = pairwise_torus_distance(snapshot.gateways, snapshot.gateways, snapshot.window)
    np.fill_diagonal(dist, np.inf)
    nn = dist.argmin(axis=1)
    cand = {(min(i, int(j)), max(i, int(j))) for i, j in enumerate(nn)}
    cand = sorted(cand, key=lambda p: (dist[p], p[0], p[1]))
    used = set()
    pairs = []
    for i, j in cand:
        if i in used or j in used:
            continue
        used.update((i, j))
        pairs.append((i, j, float(dist[i, j])))
    return pairs


def write_snapshot_csv(snapshot, dest):
    """Dump a snapshot as ``kind,x,y`` rows (gateways first) to a path or open file."""
    if hasattr(dest, "write"):
        _write_snapshot(snapshot, dest)
        return
    with open(dest, "w", newline="") as fh:
        _write_snapshot(snapshot, fh)


def _write_snapshot(snapshot, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["kind", "x", "y"])
    for kind, pts in (("gateway", snapshot.gateways), ("device", snapshot.devices)):
        for x, y in pts:
            w.writerow([kind, repr(float(x)), repr(float(y))])


def read_snapshot_csv(path, window):
    devices, gateways = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            target = gateways if row["kind"] == "gateway" else devices
            target.append((float(row["x"]), float(row["y"])))
    return NetworkSnapshot(np.array(devices).reshape(-1, 2), np.array(gateways).reshape(-1, 2), window)
