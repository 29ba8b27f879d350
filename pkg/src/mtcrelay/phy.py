"""Physical layer of one snapshot: channels, fading, capture and relaying."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import torus_distance


@dataclass(frozen=True, eq=False)
class ChannelAssignment:
    channel: np.ndarray
    u1: int


@dataclass(frozen=True, eq=False)
class TrialResult:
    """Per-trial success accounting.

    ``per_gateway`` is an ``(G, 4)`` integer array with columns
    ``k_i, captured_i, budget_i, relayed_i``.
    """

    n_devices: int
    n_captured: int
    n_relayed: int
    success: np.ndarray
    per_gateway: np.ndarray
    resample_count: int = 0

    @property
    def outage(self) -> float:
        if self.n_devices == 0:
            return float("nan")
        return 1.0 - self.n_relayed / self.n_devices

    def __eq__(self, other):
        if not isinstance(other, TrialResult):
            return NotImplemented
        return (
            self.n_devices == other.n_devices
            and self.n_captured == other.n_captured
            and self.n_relayed == other.n_relayed
            and self.resample_count == other.resample_count
            and np.array_equal(self.success, other.success)
            and np.array_equal(self.per_gateway, other.per_gateway)
        )


def assign_channels(n_devices, u1, stream):
    """Pick a channel in ``[0, u1)`` uniformly and independently per device."""
    if u1 < 1:
        raise ValueError("need at least one channel")
    return ChannelAssignment(channel=stream.integers(0, u1, size=n_devices, dtype=np.int64), u1=int(u1))


def draw_fades(n_devices, n_gateways, stream):
    """Unit-mean exponential power gains for every device-to-gateway link."""
    return stream.exponential(1.0, size=(n_devices, n_gateways))


def sir(device, gateway, assignment, snapshot, fades, alpha):
    """SIR of one device's packet at ``gateway``; ``inf`` without interferers.

    Reference implementation; trials use the vectorized kernel.
    """
    ch = assignment.channel
    co = np.flatnonzero(ch == ch[device])
    L = snapshot.window
    gw = snapshot.gateways[gateway]
    with np.errstate(divide="ignore"):
        power = fades[co, gateway] * torus_distance(snapshot.devices[co], gw, L) ** (-alpha)
    mine = co == device
    interf = power[~mine].sum()
    if interf == 0.0:
        return float("inf")
    return float(power[mine][0] / interf)


def resolve_captures(grouping, assignment, snapshot, radio, stream=None, fades=None):
    """Captured flag per device: SIR at its serving gateway exceeds ``radio.eta``.

    Fades are drawn from ``stream`` unless supplied.
    """
    n = snapshot.n_devices
    if n == 0:
        return np.zeros(0, dtype=bool)
    if fades is None:
        fades = draw_fades(n, snapshot.n_gateways, stream)
    s = kernels.cochannel_sir(
        snapshot.devices, assignment.channel, grouping.owner, snapshot.gateways,
        fades, snapshot.window, radio.alpha,
    )
    return s > radio.eta


def relay_select(captured_by_gateway, budgets, stream):
    """Choose the packets each gateway forwards.

    A gateway whose captures fit its budget forwards all of them; otherwise a
    uniformly random subset of exactly ``budget`` packets.

    Parameters
    ----------
    captured_by_gateway : sequence of int arrays
        Captured device indices per gateway.
    budgets : sequence of int
    stream : numpy.random.Generator

    Returns
    -------
    ndarray of int
        Sorted indices of relayed devices.
    """
    out = []
    for devs, budget in zip(captured_by_gateway, budgets):
        devs = np.asarray(devs, dtype=np.int64)
        budget = int(budget)
        if len(devs) <= budget:
            out.append(devs)
        elif budget > 0:
            out.append(stream.choice(devs, size=budget, replace=False))
    if not out:
        return np.zeros(0, dtype=np.int64)
    return np.sort(np.concatenate(out))
