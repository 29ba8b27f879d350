import math
from dataclasses import replace

import numpy as np
import pytest

from mtcrelay.analytic import AnalyticPoint, outage
from mtcrelay.domain import DeploymentParams, SpectrumPlan
from mtcrelay.lbra import Policy
from mtcrelay.montecarlo import (
    DegenerateExperimentError,
    ExperimentSpec,
    ci_halfwidth,
    collect,
    compare_policies,
    run_experiment,
    run_trial,
    sample_snapshot,
    summarize,
    sweep,
)


@pytest.fixture
def spec(figure_deployment, radio, plan):
    return ExperimentSpec(deployment=figure_deployment, radio=radio, plan=plan, trials=40)


def test_trial_is_deterministic(spec):
    assert run_trial(spec, 5) == run_trial(spec, 5)
    assert run_trial(spec, 5) != run_trial(spec, 6)


def test_trial_accounting(spec):
    r = run_trial(spec, 0)
    pg = r.per_gateway
    assert pg[:, 0].sum() == r.n_devices
    assert pg[:, 1].sum() == r.n_captured
    assert pg[:, 3].sum() == r.n_relayed == r.success.sum()
    assert np.all(pg[:, 3] <= np.minimum(pg[:, 1], pg[:, 2]))
    assert np.all(pg[:, 1] <= pg[:, 0])


def test_policies_share_geometry(spec):
    a = run_trial(replace(spec, policy=Policy.NPRA), 3)
    b = run_trial(replace(spec, policy=Policy.LBRA), 3)
    assert a.n_devices == b.n_devices
    assert np.array_equal(a.per_gateway[:, 2], b.per_gateway[:, 2])


def test_zero_device_trial(radio, plan):
    dep = DeploymentParams(lambda_d=1e-12, lambda_g=1e-4, window=500.0, base_seed=1)
    s = ExperimentSpec(deployment=dep, radio=radio, plan=plan, trials=3)
    r = run_trial(s, 0)
    assert r.n_devices == 0 and math.isnan(r.outage)
    with pytest.raises(DegenerateExperimentError):
        run_experiment(s)


def test_snapshot_has_two_gateways(radio):
    dep = DeploymentParams(lambda_d=1e-3, lambda_g=4e-6, window=1000.0, base_seed=2)
    rejected = 0
    for t in range(30):
        snap, attempts = sample_snapshot(dep, t)
        assert snap.n_gateways >= 2
        rejected += attempts
    assert rejected > 0


def test_unbounded_relay_forwards_every_capture(spec):
    s = replace(spec, plan=SpectrumPlan(r2=10**9), policy=Policy.NPRA)
    for t in range(5):
        r = run_trial(s, t)
        assert r.n_relayed == r.n_captured


def test_single_trial_ci_is_nan(spec):
    row = run_experiment(replace(spec, trials=1))
    assert math.isnan(row.epsilon_ci)
    assert math.isnan(ci_halfwidth([0.3]))


def test_ci_shrinks_with_trials(spec):
    small = run_experiment(replace(spec, trials=100)).epsilon_ci
    large = run_experiment(replace(spec, trials=200)).epsilon_ci
    assert large / small == pytest.approx(1 / math.sqrt(2), rel=0.2)


def test_ratio_of_sums_is_count_weighted_mean(spec):
    stats = collect(spec)
    v = stats.valid
    per = stats.per_trial_outage
    weighted = float((per * stats.n_devices[v]).sum() / stats.n_devices[v].sum())
    assert stats.epsilon == pytest.approx(weighted, abs=1e-12)


def test_npra_matches_analytic(radio, plan):
    dep = DeploymentParams(lambda_d=2e-3, lambda_g=1e-4, window=500.0, base_seed=11)
    row = run_experiment(ExperimentSpec(deployment=dep, radio=radio, plan=plan, policy=Policy.NPRA, trials=200))
    pt = AnalyticPoint(radio, plan, 2e-3, 1e-4, window=500.0)
    assert abs(row.epsilon_hat - outage(pt, Policy.NPRA).epsilon) < 0.05


def test_capacity_bounded_by_density(spec):
    row = run_experiment(spec)
    assert 0.0 <= row.capacity_hat <= row.lambda_d
    assert row.capacity_hat == pytest.approx(row.lambda_d * (1 - row.epsilon_hat))
    assert row.no_outage_capacity == row.lambda_d


def test_sweep_single_value(spec):
    rows = sweep("lambda_d", [2e-3], replace(spec, trials=5))
    assert [r.policy for r in rows] == ["npra", "lbra"]
    assert all(r.value == 2e-3 and r.axis == "lambda_d" for r in rows)


def test_sweep_validation(spec):
    with pytest.raises(ValueError):
        sweep("lambda_d", [], spec)
    with pytest.raises(ValueError):
        sweep("lambda_d", [2e-3, 1e-3], spec)
    with pytest.raises(ValueError):
        sweep("window", [1.0], spec)


def test_sweep_matches_point_runs(spec):
    s = replace(spec, trials=8)
    rows = sweep("lambda_g", [1e-4, 2e-4], s, policies=(Policy.LBRA,))
    for r in rows:
        direct = run_experiment(replace(s, deployment=replace(s.deployment, lambda_g=r.value)))
        assert r.epsilon_hat == direct.epsilon_hat


def test_self_comparison_is_neutral(spec):
    c = compare_policies(spec, a=Policy.NPRA, b=Policy.NPRA)
    assert c.outage_diff == 0.0
    assert c.capacity_gain_db == 0.0
    assert c.verdict == "tie"


def test_summarize_uses_value(spec):
    stats = collect(replace(spec, trials=3))
    assert summarize(spec, stats, "lambda_g", 1e-4).value == 1e-4


def test_spec_validation(figure_deployment):
    with pytest.raises(ValueError):
        ExperimentSpec(deployment=figure_deployment, trials=0)
    with pytest.raises(ValueError):
        ExperimentSpec(deployment=figure_deployment, resolution=32)
