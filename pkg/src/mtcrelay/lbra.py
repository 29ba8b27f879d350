"""Grouping policies: nearest association (NPRA) and load balancing (LBRA)."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import nearest_gateway_pairs, torus_distance


class Policy(str, enum.Enum):
    NPRA = "npra"
    LBRA = "lbra"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown policy {value!r}; expected one of npra, lbra") from None


@dataclass(frozen=True, eq=False)
class Move:
    donor: int
    receiver: int
    k_change: int
    devices: np.ndarray


@dataclass(eq=False)
class TransferPlan:
    moves: list = field(default_factory=list)

    @property
    def total_moved(self) -> int:
        return sum(m.k_change for m in self.moves)

    def to_csv(self, dest):
        """Write ``donor,receiver,k_change`` rows to a path or open file."""
        if not hasattr(dest, "write"):
            with open(dest, "w", newline="") as fh:
                return self.to_csv(fh)
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(["donor", "receiver", "k_change"])
        for m in self.moves:
            w.writerow([m.donor, m.receiver, m.k_change])


def k_change(k_i: int, k_0: int) -> int:
    """Devices moved between two paired groups: half the count gap, floored."""
    if k_i < 0 or k_0 < 0:
        raise ValueError("group sizes must be non-negative")
    return abs(int(k_i) - int(k_0)) // 2


def balance_pair(grouping, snapshot, pair):
    """Move devices from the larger to the smaller group of ``pair``.

    The donor's ``k_change`` devices closest to the receiving gateway are
    re-owned (ties by device index). ``grouping.owner`` and
    ``grouping.counts`` are updated in place; shares are left alone.

    Returns
    -------
    Move or None
        None when the groups are already balanced.
    """
    a, b = int(pair[0]), int(pair[1])
    ka, kb = int(grouping.counts[a]), int(grouping.counts[b])
    n = k_change(ka, kb)
    if n == 0:
        return None
    donor, receiver = (a, b) if ka > kb else (b, a)
    members = np.flatnonzero(grouping.owner == donor)
    d = torus_distance(snapshot.devices[members], snapshot.gateways[receiver], snapshot.window)
    moved = members[np.lexsort((members, d))[:n]]
    grouping.owner[moved] = receiver
    grouping.counts[donor] -= n
    grouping.counts[receiver] += n
    return Move(donor=donor, receiver=receiver, k_change=n, devices=moved)


def regroup(grouping, snapshot, policy):
    """Apply a grouping policy to a nearest-association grouping.

    NPRA returns the input unchanged. LBRA balances every nearest-gateway
    pair once, in ascending pair distance, and returns a new grouping.

    Returns
    -------
    (Grouping, TransferPlan)
    """
    policy = Policy.parse(policy)
    if policy is Policy.NPRA:
        return grouping, TransferPlan()
    out = type(grouping)(
        owner=grouping.owner.copy(),
        counts=grouping.counts.copy(),
        gamma=grouping.gamma,
        areas=grouping.areas,
    )
    plan = TransferPlan()
    for i, j, _ in nearest_gateway_pairs(snapshot):
        move = balance_pair(out, snapshot, (i, j))
        if move is not None:
            plan.moves.append(move)
    return out, plan
