import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtcrelay import kernels
from mtcrelay.geometry import NetworkSnapshot
from mtcrelay.phy import ChannelAssignment, sir


def test_nearest_site_ties_lowest_index(backend):
    pts = np.array([[5.0, 5.0]])
    sites = np.array([[9.0, 5.0], [1.0, 5.0], [5.0, 9.0]])
    idx, d2 = kernels.nearest_site(pts, sites, 100.0, backend=backend)
    assert idx[0] == 0 and d2[0] == 16.0


def test_nearest_site_wraps(backend):
    idx, d2 = kernels.nearest_site([[0.5, 50.0]], [[60.0, 50.0], [99.5, 50.0]], 100.0, backend=backend)
    assert idx[0] == 1 and d2[0] == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 300), st.integers(1, 40))
def test_backends_agree_on_nearest_site(seed, n, g):
    if "cython" not in kernels.available_backends():
        pytest.skip("extension not built")
    rng = np.random.default_rng(seed)
    # snap to a coarse lattice so exact ties actually occur
    pts = rng.integers(0, 50, (n, 2)).astype(float)
    sites = rng.integers(0, 50, (g, 2)).astype(float)
    a = kernels.nearest_site(pts, sites, 50.0, backend="python")
    b = kernels.nearest_site(pts, sites, 50.0, backend="cython")
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


def _random_case(rng, n=80, g=6, u=4, L=100.0):
    devices = rng.uniform(0, L, (n, 2))
    gateways = rng.uniform(0, L, (g, 2))
    channel = rng.integers(0, u, n)
    owner = kernels.nearest_site(devices, gateways, L)[0]
    fades = rng.exponential(size=(n, g))
    return devices, channel, owner, gateways, fades, L


def test_sir_kernel_matches_reference(backend):
    rng = np.random.default_rng(5)
    devices, channel, owner, gateways, fades, L = _random_case(rng)
    got = kernels.cochannel_sir(devices, channel, owner, gateways, fades, L, 4.0, backend=backend)
    snap = NetworkSnapshot(devices, gateways, L)
    assign = ChannelAssignment(channel=channel, u1=4)
    ref = [sir(i, owner[i], assign, snap, fades, 4.0) for i in range(len(devices))]
    assert np.allclose(got, ref, rtol=1e-12, atol=0)


def test_sir_kernel_lone_device_infinite(backend):
    devices = np.array([[10.0, 10.0], [50.0, 50.0]])
    out = kernels.cochannel_sir(devices, [0, 1], [0, 1], devices + 1.0, np.ones((2, 2)), 100.0, 5.0, backend=backend)
    assert np.all(np.isinf(out))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_backends_agree_on_sir(seed):
    if "cython" not in kernels.available_backends():
        pytest.skip("extension not built")
    args = _random_case(np.random.default_rng(seed), n=120, g=9, u=5)
    a = kernels.cochannel_sir(*args, 5.0, backend="python")
    b = kernels.cochannel_sir(*args, 5.0, backend="cython")
    assert np.allclose(a, b, rtol=1e-12)


def test_env_var_forces_fallback():
    code = "from mtcrelay import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, MTCRELAY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.nearest_site([[0, 0]], [[1, 1]], 10.0, backend="fortran")
