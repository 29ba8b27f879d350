"""End-to-end Monte Carlo trials and sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .domain import DeploymentParams, RadioParams, SpectrumPlan, relay_budget
from .geometry import DEFAULT_RESOLUTION, MIN_RESOLUTION, NetworkSnapshot, assign_nearest, sample_ppp
from .lbra import Policy, regroup
from .phy import TrialResult, assign_channels, draw_fades, relay_select, resolve_captures
from .streams import Purpose, trial_stream

# cap on resampling a degenerate (G < 2) gateway draw
MAX_RESAMPLES = 1000


class DegenerateExperimentError(RuntimeError):
    """No trial produced any device, so the outage ratio is undefined."""


@dataclass(frozen=True)
class ExperimentSpec:
    deployment: DeploymentParams = DeploymentParams()
    radio: RadioParams = RadioParams()
    plan: SpectrumPlan = SpectrumPlan()
    policy: Policy = Policy.LBRA
    trials: int = 200
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy.parse(self.policy))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.resolution < MIN_RESOLUTION:
            raise ValueError(f"resolution must be >= {MIN_RESOLUTION}")


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float
    policy: str
    lambda_d: float
    epsilon_hat: float
    epsilon_ci: float
    capacity_hat: float
    n_trials: int
    mean_load: float
    capture_rate: float
    seed: int

    @property
    def no_outage_capacity(self) -> float:
        return self.lambda_d


def sample_snapshot(deployment, trial_index):
    """Draw the snapshot for a trial, resampling gateway draws with fewer than two points.

    Returns
    -------
    (NetworkSnapshot, int)
        The snapshot and the number of rejected gateway draws.
    """
    L = deployment.window
    seed = deployment.base_seed
    for attempt in range(MAX_RESAMPLES):
        gw = sample_ppp(deployment.lambda_g, L, trial_stream(seed, trial_index, Purpose.GATEWAYS, attempt))
        if len(gw) >= 2:
            break
    else:
        raise DegenerateExperimentError(f"trial {trial_index}: no gateway draw with G >= 2")
    dev = sample_ppp(deployment.lambda_d, L, trial_stream(seed, trial_index, Purpose.DEVICES))
    return NetworkSnapshot(dev, gw, L), attempt


def run_trial(spec, trial_index):
    """Simulate one independent snapshot end to end.

    snapshot -> nearest grouping -> policy regroup -> channels -> capture
    -> relay selection. Each stage draws from its own substream keyed by
    ``(base_seed, trial_index)``, so NPRA and LBRA trials with the same
    index share geometry, channels and fades.
    """
    dep = spec.deployment
    seed = dep.base_seed
    snap, resamples = sample_snapshot(dep, trial_index)
    grouping = assign_nearest(snap, spec.resolution)
    grouping, _ = regroup(grouping, snap, spec.policy)
    G = snap.n_gateways
    n = snap.n_devices
    budgets = np.array([relay_budget(g, spec.plan) for g in grouping.gamma], dtype=np.int64)
    if n == 0:
        per_gw = np.column_stack([grouping.counts, np.zeros(G, np.int64), budgets, np.zeros(G, np.int64)])
        return TrialResult(0, 0, 0, np.zeros(0, dtype=bool), per_gw, resamples)

    chans = assign_channels(n, spec.plan.u1, trial_stream(seed, trial_index, Purpose.CHANNELS))
    fades = draw_fades(n, G, trial_stream(seed, trial_index, Purpose.FADES))
    captured = resolve_captures(grouping, chans, snap, spec.radio, fades=fades)

    cap_idx = np.flatnonzero(captured)
    cap_owner = grouping.owner[cap_idx]
    by_gw = [cap_idx[cap_owner == g] for g in range(G)]
    relayed = relay_select(by_gw, budgets, trial_stream(seed, trial_index, Purpose.RELAY))
    success = np.zeros(n, dtype=bool)
    success[relayed] = True

    cap_counts = np.bincount(cap_owner, minlength=G)
    rel_counts = np.bincount(grouping.owner[relayed], minlength=G)
    per_gw = np.column_stack([grouping.counts, cap_counts, budgets, rel_counts]).astype(np.int64)
    return TrialResult(
        n_devices=n,
        n_captured=int(captured.sum()),
        n_relayed=int(success.sum()),
        success=success,
        per_gateway=per_gw,
        resample_count=resamples,
    )


def _summary(spec, idx):
    r = run_trial(spec, idx)
    return r.n_devices, r.n_captured, r.n_relayed, r.per_gateway.shape[0]


def _summaries(spec, indices, workers):
    if workers is None or workers <= 1:
        return [_summary(spec, i) for i in indices]
    chunk = max(1, len(indices) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_summary, [spec] * len(indices), indices, chunksize=chunk))


@dataclass(frozen=True)
class ExperimentStats:
    """Integer totals and per-trial outages behind a :class:`SweepRow`."""

    n_devices: np.ndarray
    n_captured: np.ndarray
    n_relayed: np.ndarray
    n_gateways: np.ndarray

    @property
    def valid(self):
        return self.n_devices > 0

    @property
    def epsilon(self):
        nd = int(self.n_devices.sum())
        return 1.0 - int(self.n_relayed.sum()) / nd

    @property
    def per_trial_outage(self):
        v = self.valid
        return 1.0 - self.n_relayed[v] / self.n_devices[v]


def collect(spec, workers=1):
    """Run all trials of ``spec`` and return per-trial integer counts in index order."""
    rows = _summaries(spec, list(range(spec.trials)), workers)
    arr = np.array(rows, dtype=np.int64).reshape(-1, 4)
    stats = ExperimentStats(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])
    if not stats.valid.any():
        raise DegenerateExperimentError("every trial produced zero devices")
    return stats


def ci_halfwidth(samples):
    """95% normal half-width of the mean; nan for a single sample."""
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) < 2:
        return float("nan")
    return float(1.96 * samples.std(ddof=1) / math.sqrt(len(samples)))


def summarize(spec, stats, axis="point", value=None):
    eps = stats.epsilon
    lam = spec.deployment.lambda_d
    v = stats.valid
    return SweepRow(
        axis=axis,
        value=float(lam if value is None else value),
        policy=spec.policy.value,
        lambda_d=lam,
        epsilon_hat=eps,
        epsilon_ci=ci_halfwidth(stats.per_trial_outage),
        capacity_hat=lam * (1.0 - eps),
        n_trials=int(v.sum()),
        mean_load=float(stats.n_devices.sum() / stats.n_gateways.sum()),
        capture_rate=float(stats.n_captured.sum() / stats.n_devices.sum()),
        seed=spec.deployment.base_seed,
    )


def run_experiment(spec, workers=1):
    """Ratio-of-sums outage estimate over ``spec.trials`` independent trials."""
    return summarize(spec, collect(spec, workers))


AXES = ("lambda_d", "lambda_g")


def spec_at(template, axis, value, policy=None):
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    dep = replace(template.deployment, **{axis: float(value)})
    kw = {"deployment": dep}
    if policy is not None:
        kw["policy"] = Policy.parse(policy)
    return replace(template, **kw)


def sweep(axis, values, template, policies=(Policy.NPRA, Policy.LBRA), workers=1):
    """One experiment per (value, policy); rows ordered by value then policy."""
    values = [float(v) for v in values]
    if not values:
        raise ValueError("sweep needs at least one value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("sweep values must be strictly increasing")
    rows = []
    for v in values:
        for pol in policies:
            s = spec_at(template, axis, v, pol)
            rows.append(summarize(s, collect(s, workers), axis, v))
    return rows


@dataclass(frozen=True)
class PairedComparison:
    """LBRA vs NPRA on common random numbers at one point."""

    npra: SweepRow
    lbra: SweepRow
    outage_diff: float
    outage_diff_ci: float

    @property
    def capacity_gain_db(self):
        return 10.0 * math.log10(self.lbra.capacity_hat / self.npra.capacity_hat)

    @property
    def outage_gain_db(self):
        return 10.0 * math.log10(self.npra.epsilon_hat / self.lbra.epsilon_hat)

    @property
    def verdict(self):
        """'improvement', 'regression' or 'tie' for LBRA at 95% confidence."""
        if not math.isfinite(self.outage_diff_ci):
            return "tie"
        if self.outage_diff > self.outage_diff_ci:
            return "improvement"
        if self.outage_diff < -self.outage_diff_ci:
            return "regression"
        return "tie"


def compare_policies(template, workers=1, a=Policy.NPRA, b=Policy.LBRA):
    """Paired comparison; ``outage_diff`` is ``eps_a - eps_b`` (positive favours ``b``).

    Trials share every substream across policies, so the per-trial outage
    difference has far lower variance than two independent runs.
    """
    sa = collect(replace(template, policy=a), workers)
    sb = collect(replace(template, policy=b), workers)
    v = sa.valid
    n = sa.n_devices[v]
    gained = (sb.n_relayed[v] - sa.n_relayed[v]).astype(np.float64)
    eps_diff = float(gained.sum() / n.sum())
    # linearized ratio estimator: z_t = (gained_t - D n_t) / mean(n)
    z = (gained - eps_diff * n) / n.mean()
    hw = ci_halfwidth(z)
    return PairedComparison(
        npra=summarize(replace(template, policy=a), sa),
        lbra=summarize(replace(template, policy=b), sb),
        outage_diff=eps_diff,
        outage_diff_ci=hw,
    )
