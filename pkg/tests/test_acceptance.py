"""Acceptance criteria, one PASS/FAIL line each (printed in the terminal summary).

Figure-shape criteria run on a 500 x 500 window, where the total relay
budget saturates at the device densities the figures describe. Capture and
balance criteria use the default 1000 x 1000 window.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from conftest import ACCEPTANCE_LINES, random_snapshot
from mtcrelay.analytic import (
    AnalyticPoint,
    capture_conditional,
    outage,
    p_c_in_t,
    p_c_in_t_quadrature,
    p_c_in_v,
    prob_transfer_in,
    prob_transfer_out,
)
from mtcrelay.domain import DeploymentParams, RadioParams, compute_k_alpha
from mtcrelay.geometry import assign_nearest, nearest_gateway_pairs
from mtcrelay.lbra import Policy, regroup
from mtcrelay.montecarlo import ExperimentSpec, compare_policies, run_experiment, sweep
from mtcrelay.output import emit_csv

FIG_WINDOW = 500.0
FIG_SEED = 7
FIG_TRIALS = 1000
pytestmark = pytest.mark.slow

LAMBDA_D_GRID = [0.5e-3, 1e-3, 2e-3, 2.5e-3, 3e-3, 3.5e-3, 4e-3, 5e-3]
LAMBDA_G_GRID = [0.25e-4, 0.4e-4, 0.5e-4, 0.6e-4, 0.75e-4, 1e-4, 1.25e-4, 1.5e-4, 2e-4, 3e-4, 5e-4]


def record(n, ok, text, elapsed=None):
    tail = f" ({elapsed:.1f} s)" if elapsed is not None else ""
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}{tail}")
    assert ok, text


def _fig_template(plan, radio, lambda_d=2e-3, lambda_g=1e-4):
    dep = DeploymentParams(lambda_d=lambda_d, lambda_g=lambda_g, window=FIG_WINDOW, base_seed=FIG_SEED)
    return ExperimentSpec(deployment=dep, radio=radio, plan=plan, trials=FIG_TRIALS)


def _by_policy(rows):
    out = {}
    for r in rows:
        out.setdefault(r.policy, {})[r.value] = r
    return out


@pytest.fixture(scope="module")
def density_sweep(radio, plan):
    t0 = time.perf_counter()
    rows = sweep("lambda_d", LAMBDA_D_GRID, _fig_template(plan, radio, lambda_g=1e-4))
    return _by_policy(rows), time.perf_counter() - t0


@pytest.fixture(scope="module")
def gateway_sweep(radio, plan):
    t0 = time.perf_counter()
    rows = sweep("lambda_g", LAMBDA_G_GRID, _fig_template(plan, radio, lambda_d=2e-3))
    return _by_policy(rows), time.perf_counter() - t0


@pytest.fixture(scope="module")
def paired_at_3e3(radio, plan):
    t0 = time.perf_counter()
    return compare_policies(_fig_template(plan, radio, lambda_d=3e-3)), time.perf_counter() - t0


def test_c01_transferred_capture_closed_form():
    t0 = time.perf_counter()
    worst = 0.0
    for lam_d in (1e-3, 2e-3, 3e-3):
        for alpha in (4.0, 5.0):
            radio = RadioParams(eta_db=3.0, alpha=alpha)
            for d in (0.0, 25.0, 50.0, 100.0):
                closed = p_c_in_t(lam_d, 60, 1e-4, radio, d)
                quad = p_c_in_t_quadrature(lam_d, 60, 1e-4, radio, d)
                worst = max(worst, abs(closed - quad) / abs(quad))
    dt = time.perf_counter() - t0
    record(1, worst <= 1e-9 and dt < 1.0, f"transferred-device capture closed form vs quadrature, "
           f"max rel err {worst:.2e} (tol 1e-9), 24 points", dt)


def test_c02_k_alpha():
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in (3.0, 4.0, 5.0, 6.0, 8.0):
        x = 2 * math.pi / alpha
        worst = max(worst, abs(compute_k_alpha(alpha) - x / math.sin(x)) / (x / math.sin(x)))
    dt = time.perf_counter() - t0
    record(2, worst <= 1e-9 and dt < 1.0, f"K_alpha quadrature vs closed form, max rel err {worst:.2e} (tol 1e-9)", dt)


def test_c03_capture_averaging_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(5):
        lam_d = rng.uniform(5e-4, 5e-3)
        lam_g = rng.uniform(2e-5, 5e-4)
        u1 = int(rng.integers(1, 120))
        radio = RadioParams(eta_db=rng.uniform(-3, 10), alpha=rng.uniform(3, 6))

        def f(r):
            return capture_conditional(r, lam_d, u1, radio) * 2 * math.pi * lam_g * r * math.exp(-lam_g * math.pi * r * r)

        scale = 1 / math.sqrt(math.pi * lam_g)
        val = sum(integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
                  for a, b in ((0.0, 4 * scale), (4 * scale, np.inf)))
        ref = p_c_in_v(lam_d, u1, lam_g, radio)
        worst = max(worst, abs(val - ref) / ref)
    dt = time.perf_counter() - t0
    record(3, worst <= 1e-9 and dt < 1.0, f"capture averaging identity at 5 random points, "
           f"max rel err {worst:.2e} (tol 1e-9)", dt)


def test_c04_simulated_capture_rate(radio, plan):
    t0 = time.perf_counter()
    dep = DeploymentParams(lambda_d=2e-3, lambda_g=1e-4, window=1000.0, base_seed=1)
    row = run_experiment(ExperimentSpec(deployment=dep, radio=radio, plan=plan, policy=Policy.NPRA, trials=200))
    ref = p_c_in_v(2e-3, plan.u1, 1e-4, radio)
    dt = time.perf_counter() - t0
    err = abs(row.capture_rate - ref)
    record(4, err <= 0.02 and dt < 120, f"NPRA capture rate {row.capture_rate:.5f} vs {ref:.5f}, "
           f"|diff| {err:.4f} (tol 0.02), L=1000, 200 trials", dt)


def test_c05_balance_invariants():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    bad = []
    for s in range(1000):
        snap = random_snapshot(rng, int(rng.integers(0, 400)), int(rng.integers(2, 30)), FIG_WINDOW)
        g = assign_nearest(snap, resolution=64)
        npra, plan_n = regroup(g, snap, Policy.NPRA)
        out, _ = regroup(g, snap, Policy.LBRA)
        ok = (npra is g and not plan_n.moves
              and out.counts.sum() == snap.n_devices
              and np.array_equal(np.bincount(out.owner, minlength=snap.n_gateways), out.counts)
              and np.array_equal(out.gamma, g.gamma)
              and all(abs(int(out.counts[i]) - int(out.counts[j])) <= 1 for i, j, _ in nearest_gateway_pairs(snap)))
        if not ok:
            bad.append(s)
    dt = time.perf_counter() - t0
    record(5, not bad and dt < 30, f"balance invariants on 1000 snapshots, {len(bad)} violations", dt)


def test_c06_transfer_partition():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        lam, area, k0 = rng.uniform(1e-4, 1e-2), rng.uniform(50.0, 2e5), int(rng.integers(0, 300))
        worst = max(worst, abs(prob_transfer_in(lam, area, k0) + prob_transfer_out(lam, area, k0) - 1.0))
    dt = time.perf_counter() - t0
    record(6, worst <= 1e-12 and dt < 1.0, f"transfer in + out = 1 over 100 points, max err {worst:.1e} (tol 1e-12)", dt)


def _nondecreasing(xs, cis):
    """Strict and 95%-CI-aware monotonicity of a noisy sequence."""
    strict = all(b >= a for a, b in zip(xs, xs[1:]))
    within_ci = all(b >= a - (ca + cb) for a, b, ca, cb in zip(xs, xs[1:], cis, cis[1:]))
    return strict, within_ci


FIG3_GRID = [0.5e-3, 1e-3, 2e-3, 3e-3, 4e-3, 5e-3]


def test_c07a_capacity_shape(density_sweep):
    rows, dt = density_sweep
    parts, ok = [], True
    for pol in ("npra", "lbra"):
        rs = [rows[pol][v] for v in FIG3_GRID]
        cap = [r.capacity_hat for r in rs]
        strict, within = _nondecreasing(cap, [r.lambda_d * r.epsilon_ci for r in rs])
        ratio = (cap[-1] - cap[-2]) / (cap[1] - cap[0])
        ok &= within and ratio < 0.25
        parts.append(f"{pol}: non-decreasing {within} (strict {strict}), last/first increment {ratio:.3f}")
    record(7, ok and dt < 1800, "capacity shape vs lambda_D (tol last/first < 0.25); " + "; ".join(parts), dt)


def test_c07b_lbra_capacity_not_below_npra(paired_at_3e3):
    cmp_, dt = paired_at_3e3
    # capacity gain lambda_D * (eps_N - eps_L) is significant iff the paired outage gain is
    ok = cmp_.outage_diff - cmp_.outage_diff_ci >= 0.0
    record(7, ok, f"LBRA >= NPRA capacity at lambda_D=3e-3 with 95% confidence: "
           f"eps_N - eps_L = {cmp_.outage_diff:+.4f} +- {cmp_.outage_diff_ci:.4f}", dt)


def test_c07c_capacity_gain_db(paired_at_3e3):
    cmp_, _ = paired_at_3e3
    g = cmp_.capacity_gain_db
    record(7, 0.2 <= g <= 1.2, f"capacity gain at lambda_D=3e-3 = {g:+.3f} dB (accepted [0.2, 1.2] dB)")


def test_c08a_crossover(gateway_sweep):
    rows, dt = gateway_sweep
    gain = {v: rows["lbra"][v].capacity_hat - rows["npra"][v].capacity_hat for v in LAMBDA_G_GRID}
    candidates = sorted(set(LAMBDA_G_GRID) | {(a + b) / 2 for a, b in zip(LAMBDA_G_GRID, LAMBDA_G_GRID[1:])})
    found = [c for c in candidates if 0.4e-4 <= c <= 1.5e-4
             and all(gain[v] <= 0 for v in LAMBDA_G_GRID if v < c)
             and all(gain[v] >= 0 for v in LAMBDA_G_GRID if v > c)]
    signs = " ".join(f"{v:.2g}:{'+' if gain[v] > 0 else '-'}" for v in LAMBDA_G_GRID)
    record(8, bool(found) and dt < 1800, f"crossover lambda_G* in [0.4e-4, 1.5e-4] "
           f"{'at ' + format(found[0], '.3g') if found else 'not found'}; C_L - C_N signs {signs}", dt)


def test_c08b_gain_at_dense_gateways(radio, plan):
    t0 = time.perf_counter()
    cmp_ = compare_policies(_fig_template(plan, radio, lambda_d=2e-3, lambda_g=5e-4))
    g = cmp_.capacity_gain_db
    record(8, 0.1 <= g <= 1.0, f"capacity gain at lambda_G=5e-4 = {g:+.3f} dB (accepted [0.1, 1.0] dB), "
           f"paired verdict {cmp_.verdict}", time.perf_counter() - t0)


def test_c09a_outage_monotone(density_sweep):
    rows, dt = density_sweep
    parts, ok = [], True
    for pol in ("npra", "lbra"):
        rs = [rows[pol][v] for v in LAMBDA_D_GRID]
        strict, within = _nondecreasing([r.epsilon_hat for r in rs], [r.epsilon_ci for r in rs])
        ok &= within
        parts.append(f"{pol} {within} (strict {strict})")
    record(9, ok and dt < 1800, "outage non-decreasing in lambda_D: " + ", ".join(parts), dt)


def test_c09b_lbra_outage_not_above_npra(paired_at_3e3):
    cmp_, _ = paired_at_3e3
    ok = cmp_.outage_diff - cmp_.outage_diff_ci >= 0.0
    record(9, ok, f"LBRA <= NPRA outage at lambda_D=3e-3 with 95% confidence: "
           f"eps_N - eps_L = {cmp_.outage_diff:+.4f} +- {cmp_.outage_diff_ci:.4f}")


def test_c09c_knee(density_sweep):
    rows, _ = density_sweep
    parts, ok = [], True
    for pol in ("npra", "lbra"):
        e = {v: rows[pol][v].epsilon_hat for v in LAMBDA_D_GRID}
        late, early = e[3.5e-3] - e[2.5e-3], e[2e-3] - e[1e-3]
        ok &= late > 2 * early
        parts.append(f"{pol} late {late:.4f} vs 2 x early {2 * early:.4f}")
    record(9, ok, "outage knee near lambda_D=2.75e-3: " + "; ".join(parts))


def test_c10_determinism_across_workers(radio, plan, tmp_path):
    t0 = time.perf_counter()
    template = replace(_fig_template(plan, radio), trials=24)
    blobs = {}
    for w in (1, 4, 8):
        path = tmp_path / f"w{w}.csv"
        emit_csv(sweep("lambda_d", [1e-3, 3e-3], template, workers=w), path, "seed: 7\n")
        blobs[w] = path.read_bytes()
    rerun = tmp_path / "again.csv"
    emit_csv(sweep("lambda_d", [1e-3, 3e-3], template, workers=1), rerun, "seed: 7\n")
    same = len(set(blobs.values())) == 1 and rerun.read_bytes() == blobs[1]
    dt = time.perf_counter() - t0
    record(10, same and dt < 300, "byte-identical sweep CSV for workers 1, 4, 8 and a rerun", dt)


def test_c11_analytic_vs_simulation(density_sweep, radio, plan):
    rows, _ = density_sweep
    t0 = time.perf_counter()
    worst, parts = 0.0, []
    for lam_d in (1e-3, 2e-3, 3e-3):
        pt = AnalyticPoint(radio, plan, lam_d, 1e-4, window=FIG_WINDOW, samples=20000, seed=FIG_SEED)
        for pol in (Policy.NPRA, Policy.LBRA):
            a = outage(pt, pol).epsilon
            s = rows[pol.value][lam_d].epsilon_hat
            worst = max(worst, abs(a - s))
            parts.append(f"{pol.value}@{lam_d:g} {a:.3f}/{s:.3f}")
    dt = time.perf_counter() - t0
    record(11, worst <= 0.08 and dt < 1200, f"analytic vs simulated outage, max |diff| {worst:.4f} (tol 0.08); "
           + ", ".join(parts), dt)
