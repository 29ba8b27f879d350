"""Model parameters and the scalar constants derived from them.

Densities are per unit area of a dimensionless length scale: only the
products ``lambda_d * L**2``, ``lambda_g * L**2`` and the ratio
``lambda_d / lambda_g`` affect any result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import integrate


class ParameterError(ValueError):
    """Raised when a model parameter violates its domain."""


def db_to_linear(x_db: float) -> float:
    """Convert a power ratio in dB to a linear ratio."""
    x_db = float(x_db)
    if not math.isfinite(x_db):
        raise ParameterError(f"dB value must be finite, got {x_db!r}")
    return 10.0 ** (x_db / 10.0)


def compute_k_alpha(alpha: float) -> float:
    """Propagation constant ``K = int_0^inf dt / (1 + t**(alpha/2))``.

    The half-line is mapped onto [0, 1) with ``t = u / (1 - u)``, which turns
    the integrand into ``(1-u)**(a-2) / ((1-u)**a + u**a)`` with ``a = alpha/2``.
    The algebraic end-point factor is handed to QUADPACK's QAWS rule, so the
    weak singularity at ``u = 1`` for ``2 < alpha < 4`` is integrated exactly.

    Parameters
    ----------
    alpha : float
        Path-loss exponent, must exceed 2.

    Returns
    -------
    float
    """
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 2.0:
        raise ParameterError(
            f"path-loss exponent must be > 2 for K_alpha to converge (divergent integral), got {alpha}"
        )
    a = alpha / 2.0
    value, _ = integrate.quad(
        lambda u: 1.0 / ((1.0 - u) ** a + u**a),
        0.0,
        1.0,
        weight="alg",
        wvar=(0.0, a - 2.0),
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    return value


@dataclass(frozen=True)
class RadioParams:
    """SIR threshold and path-loss exponent; ``eta`` is linear."""

    eta_db: float = 3.0
    alpha: float = 5.0
    eta: float = field(init=False)
    k_alpha: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eta", db_to_linear(self.eta_db))
        object.__setattr__(self, "k_alpha", compute_k_alpha(self.alpha))

    @property
    def eta_2_alpha(self) -> float:
        """``eta ** (2/alpha)``, the threshold factor in the capture exponent."""
        return self.eta ** (2.0 / self.alpha)


def _positive_int(name, value):
    if isinstance(value, bool) or int(value) != value or value <= 0:
        raise ParameterError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class SpectrumPlan:
    """Resource-block budgets for the two hops and the per-packet costs."""

    r1: int = 1800
    r2: int = 1800
    omega1: int = 30
    omega2: int = 5

    def __post_init__(self):
        for name in ("r1", "r2", "omega1", "omega2"):
            object.__setattr__(self, name, _positive_int(name, getattr(self, name)))
        if self.r1 // self.omega1 < 1:
            raise ParameterError(
                f"r1={self.r1} < omega1={self.omega1}: no device-to-gateway channel fits"
            )

    @property
    def u1(self) -> int:
        return channel_count(self)


def channel_count(plan: SpectrumPlan) -> int:
    """Number of device-to-gateway data channels, ``floor(r1 / omega1)``."""
    return plan.r1 // plan.omega1


# absorbs representation error in gamma (e.g. 0.1 * 1800 / 5) before flooring
_FLOOR_SLACK = 1e-9


def relay_budget(gamma_i: float, plan: SpectrumPlan) -> int:
    """Packets a gateway with spectrum share ``gamma_i`` can forward to the DAC."""
    gamma_i = float(gamma_i)
    if not (0.0 <= gamma_i <= 1.0):
        raise ParameterError(f"spectrum-division coefficient must lie in [0, 1], got {gamma_i}")
    return int(math.floor(gamma_i * plan.r2 / plan.omega2 + _FLOOR_SLACK))


# expected gateways per window below which nearest-pair balancing is meaningless
MIN_EXPECTED_GATEWAYS = 4.0


@dataclass(frozen=True)
class DeploymentParams:
    lambda_d: float = 2e-3
    lambda_g: float = 1e-4
    window: float = 1000.0
    base_seed: int = 1

    def __post_init__(self):
        for name in ("lambda_d", "lambda_g", "window"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0:
                raise ParameterError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)
        if isinstance(self.base_seed, bool) or int(self.base_seed) != self.base_seed or self.base_seed < 0:
            raise ParameterError(f"base_seed must be a non-negative integer, got {self.base_seed!r}")
        object.__setattr__(self, "base_seed", int(self.base_seed))
        expected = self.lambda_g * self.window**2
        if expected < MIN_EXPECTED_GATEWAYS:
            raise ParameterError(
                f"lambda_g * window**2 = {expected:.3g} expected gateways; need >= {MIN_EXPECTED_GATEWAYS:g}"
            )

    @property
    def area(self) -> float:
        return self.window**2
