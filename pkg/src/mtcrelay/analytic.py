"""Closed-form capture/relay probabilities and the approximate outage pipeline.

The end-to-end outage is an expectation over random geometry. It is
evaluated by sampling, for the typical device's gateway ``Y0`` and its
nearest neighbour ``Yi``:

* the pair distance from the planar nearest-neighbour law,
* both cell areas from the Gamma(3.5) Voronoi-area approximation,
* both group sizes from Poisson counts on those areas,

and combining the per-path success probabilities. Pair outcomes are
averaged with weight equal to the number of devices involved, which makes
the estimate a per-device rate like the simulator's ratio-of-sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .domain import RadioParams, SpectrumPlan
from .lbra import Policy
from .streams import Purpose, substream

VORONOI_SHAPE = 3.5
MIN_SAMPLES = 1000
# samples per substream; fixed so results do not depend on how work is split
CHUNK = 4096


def prob_transfer_in(lambda_d, area_i, k0):
    """``Pr{k_i >= k0}`` for ``k_i ~ Poisson(lambda_d * area_i)``."""
    if area_i <= 0 or k0 < 0:
        raise ValueError("area must be positive and k0 non-negative")
    if k0 == 0:
        return 1.0
    # regularized lower incomplete gamma P(k0, mu) is the upper Poisson tail
    return float(special.gammainc(k0, lambda_d * area_i))


def prob_transfer_out(lambda_d, area_i, k0):
    """``Pr{k_i < k0}``, the complement of :func:`prob_transfer_in`."""
    if area_i <= 0 or k0 < 0:
        raise ValueError("area must be positive and k0 non-negative")
    if k0 == 0:
        return 0.0
    return float(special.gammaincc(k0, lambda_d * area_i))


def _interference_coeff(lambda_d, u1, radio):
    return lambda_d / u1 * radio.eta_2_alpha * radio.k_alpha


def capture_conditional(r, lambda_d, u1, radio):
    """Capture probability of a device at distance ``r`` from its gateway."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    out = np.exp(-math.pi * _interference_coeff(lambda_d, u1, radio) * r * r)
    return float(out) if out.ndim == 0 else out


def p_c_in_v(lambda_d, u1, lambda_g, radio):
    """Capture probability averaged over the nearest-gateway distance."""
    if lambda_g <= 0 or lambda_d < 0:
        raise ValueError("densities must be positive")
    return 1.0 / (_interference_coeff(lambda_d, u1, radio) / lambda_g + 1.0)


def p_c_in_t(lambda_d, u1, lambda_g, radio, d):
    """Average capture probability of a device transferred across a pair at distance ``d``.

    Same average as :func:`p_c_in_v` with the radial integral starting at
    ``d/2`` instead of 0.
    """
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise ValueError("pair distance must be non-negative")
    w = _interference_coeff(lambda_d, u1, radio) + lambda_g
    out = p_c_in_v(lambda_d, u1, lambda_g, radio) * np.exp(-math.pi * w * d * d / 4.0)
    return float(out) if out.ndim == 0 else out


def p_c_in_t_quadrature(lambda_d, u1, lambda_g, radio, d):
    """:func:`p_c_in_t` by direct integration over ``[d/2, inf)``; test oracle."""
    c = _interference_coeff(lambda_d, u1, radio)

    def integrand(r):
        return math.exp(-math.pi * c * r * r) * 2.0 * math.pi * r * lambda_g * math.exp(-lambda_g * math.pi * r * r)

    # split at the mean nearest-neighbour scale so QUADPACK sees the bulk
    scale = 1.0 / math.sqrt(math.pi * (c + lambda_g))
    lo = d / 2.0
    a, _ = integrate.quad(integrand, lo, lo + 4 * scale, epsabs=0.0, epsrel=1e-12, limit=200)
    b, _ = integrate.quad(integrand, lo + 4 * scale, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return a + b


def p_c_out(lambda_d, u1, lambda_g, radio, k0, k_change):
    """Capture probability of a donor-group device that is not transferred away."""
    if k0 <= 0:
        raise ValueError("p_c_out is undefined for an empty group (k0 = 0)")
    if not 0 <= k_change <= k0:
        raise ValueError("need 0 <= k_change <= k0")
    return p_c_in_v(lambda_d, u1, lambda_g, radio) * (k0 - k_change) / k0


def relay_success(u2, k_c, p_c):
    """Probability a captured packet fits the gateway's relay budget: ``min(1, u2 / (k_c p_c))``."""
    load = k_c * p_c
    if load <= u2 or load == 0:
        return 1.0
    return u2 / load


def _relay_success_vec(u2, k_c, p_c):
    load = k_c * p_c
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(load > u2, u2 / np.where(load > 0, load, 1.0), 1.0)
    return r


@dataclass(frozen=True)
class AnalyticPoint:
    radio: RadioParams
    plan: SpectrumPlan
    lambda_d: float
    lambda_g: float
    window: float = 1000.0
    samples: int = 20000
    seed: int = 1
    min_samples: int = MIN_SAMPLES

    def __post_init__(self):
        if self.samples < self.min_samples:
            raise ValueError(f"samples={self.samples} below the floor of {self.min_samples}")
        if self.lambda_d <= 0 or self.lambda_g <= 0 or self.window <= 0:
            raise ValueError("densities and window must be positive")


@dataclass(frozen=True)
class AnalyticResult:
    epsilon: float
    capacity: float
    p1: float
    p2: float
    p3: float
    epsilon_ci: float = float("nan")
    diagnostics: dict = field(default_factory=dict)


def _sample_chunk(point, rng, n):
    lg = point.lambda_g
    dist = np.sqrt(rng.exponential(1.0, n) / (math.pi * lg))
    s0 = rng.gamma(VORONOI_SHAPE, 1.0 / (VORONOI_SHAPE * lg), n)
    si = rng.gamma(VORONOI_SHAPE, 1.0 / (VORONOI_SHAPE * lg), n)
    k0 = rng.poisson(point.lambda_d * s0)
    ki = rng.poisson(point.lambda_d * si)
    return dist, s0, si, k0, ki


def _paths(point, policy, dist, s0, si, k0, ki):
    """Per-sample path probabilities and the device weight of each sample."""
    radio, plan = point.radio, point.plan
    u1 = plan.u1
    lam_d, lam_g = point.lambda_d, point.lambda_g
    per_area = plan.r2 / (plan.omega2 * point.window**2)
    u2_0 = np.floor(s0 * per_area + 1e-9)
    u2_i = np.floor(si * per_area + 1e-9)
    pv = p_c_in_v(lam_d, u1, lam_g, radio)

    if policy is Policy.NPRA:
        weight = k0.astype(np.float64)
        p1 = np.where(k0 > 0, _relay_success_vec(u2_0, k0, pv) * pv, 0.0)
        zero = np.zeros_like(p1)
        return p1, zero, zero, weight

    kc = np.abs(ki - k0) // 2
    receiver_is_0 = ki >= k0
    k_r = np.where(receiver_is_0, k0, ki)
    k_d = np.where(receiver_is_0, ki, k0)
    u2_r = np.where(receiver_is_0, u2_0, u2_i)
    u2_d = np.where(receiver_is_0, u2_i, u2_0)
    total = (k0 + ki).astype(np.float64)
    safe_total = np.where(total > 0, total, 1.0)
    pt = p_c_in_t(lam_d, u1, lam_g, radio, dist)
    with np.errstate(divide="ignore", invalid="ignore"):
        pout = np.where(k_d > 0, pv * (k_d - kc) / np.where(k_d > 0, k_d, 1), 0.0)
    k_recv = k_r + kc
    # original receiver members that stay
    p1 = _relay_success_vec(u2_r, k_recv, pv) * pv * k_r / safe_total
    # devices transferred into the receiver
    p2 = _relay_success_vec(u2_r, k_recv, pt) * pt * kc / safe_total
    # donor members: capture includes the chance of not being moved out
    p3 = _relay_success_vec(u2_d, k_d - kc, pout) * pout * k_d / safe_total
    return p1, p2, p3, total


def end_to_end_success(point, policy):
    """Device-weighted mean path probabilities ``(p1, p2, p3)`` plus per-sample arrays.

    Returns
    -------
    means : tuple of float
    detail : dict
        Per-sample ``p1, p2, p3, weight`` and the geometry draws.
    """
    policy = Policy.parse(policy)
    parts = []
    remaining = point.samples
    chunk = 0
    while remaining > 0:
        n = min(CHUNK, remaining)
        rng = substream(point.seed, int(Purpose.ANALYTIC), chunk)
        draws = _sample_chunk(point, rng, n)
        parts.append((draws, _paths(point, policy, *draws)))
        remaining -= n
        chunk += 1
    cat = lambda k, i: np.concatenate([p[k][i] for p in parts])  # noqa: E731
    dist, s0, si, k0, ki = (cat(0, i) for i in range(5))
    p1, p2, p3, w = (cat(1, i) for i in range(4))
    wsum = w.sum()
    means = tuple(float((p * w).sum() / wsum) if wsum > 0 else 0.0 for p in (p1, p2, p3))
    detail = dict(p1=p1, p2=p2, p3=p3, weight=w, dist=dist, s0=s0, si=si, k0=k0, ki=ki)
    return means, detail


def outage(point, policy):
    """End-to-end outage and transmission capacity at one parameter point."""
    policy = Policy.parse(policy)
    (m1, m2, m3), d = end_to_end_success(point, policy)
    total = d["p1"] + d["p2"] + d["p3"]
    clamped = np.clip(total, 0.0, 1.0)
    n_clamped = int(np.count_nonzero(clamped != total))
    w = d["weight"]
    wsum = w.sum()
    if wsum == 0:
        eps, ci = 0.0, float("nan")
    else:
        success = float((clamped * w).sum() / wsum)
        eps = min(1.0, max(0.0, 1.0 - success))
        # delta-method standard error of the ratio estimator
        z = w * (clamped - success) / w.mean()
        ci = float(1.96 * z.std(ddof=1) / math.sqrt(len(w)))
    kc = np.abs(d["ki"] - d["k0"]) // 2 if policy is Policy.LBRA else np.zeros_like(d["k0"])
    pr_a1 = np.array([
        prob_transfer_in(point.lambda_d, a, int(k)) for a, k in zip(d["si"][:MIN_SAMPLES], d["k0"][:MIN_SAMPLES])
    ])
    diagnostics = {
        "clamped": n_clamped,
        "mean_pr_a1": float(pr_a1.mean()),
        "mean_k_change": float(kc.mean()),
        "samples": int(len(w)),
    }
    return AnalyticResult(
        epsilon=eps,
        capacity=point.lambda_d * (1.0 - eps),
        p1=m1, p2=m2, p3=m3,
        epsilon_ci=ci,
        diagnostics=diagnostics,
    )


def analytic_sweep(axis, values, point, policies=(Policy.NPRA, Policy.LBRA)):
    """Analytic outage over a density axis, as sweep rows (``trials`` holds the sample count)."""
    from dataclasses import replace

    from .montecarlo import AXES, SweepRow

    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}")
    rows = []
    for v in values:
        pt = replace(point, **{axis: float(v)})
        for pol in policies:
            res = outage(pt, pol)
            rows.append(SweepRow(
                axis=axis, value=float(v), policy=Policy.parse(pol).value, lambda_d=pt.lambda_d,
                epsilon_hat=res.epsilon, epsilon_ci=res.epsilon_ci, capacity_hat=res.capacity,
                n_trials=pt.samples, mean_load=pt.lambda_d / pt.lambda_g,
                capture_rate=p_c_in_v(pt.lambda_d, pt.plan.u1, pt.lambda_g, pt.radio), seed=pt.seed,
            ))
    return rows
