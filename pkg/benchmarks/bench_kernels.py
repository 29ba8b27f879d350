"""Compare the compiled and numpy kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Times the two hot kernels on representative inputs and one full trial at
the default operating point with each backend swapped in.
"""

import argparse
import timeit

import numpy as np

from mtcrelay import kernels
from mtcrelay.domain import DeploymentParams
from mtcrelay.montecarlo import ExperimentSpec, run_trial


def _inputs(rng, n=2000, g=100, u1=60, L=1000.0):
    devices = rng.uniform(0, L, (n, 2))
    gateways = rng.uniform(0, L, (g, 2))
    channel = rng.integers(0, u1, n)
    owner = kernels.nearest_site(devices, gateways, L)[0]
    fades = rng.exponential(size=(n, g))
    grid = (np.stack(np.meshgrid(np.arange(128), np.arange(128)), -1).reshape(-1, 2) + 0.5) * (L / 128)
    return devices, gateways, channel, owner, fades, grid, L


def bench(repeat):
    rng = np.random.default_rng(0)
    devices, gateways, channel, owner, fades, grid, L = _inputs(rng)
    spec = ExperimentSpec(deployment=DeploymentParams(lambda_d=2e-3, lambda_g=1e-4, window=1000.0))
    cases = {
        "nearest_site 16384x100": lambda b: kernels.nearest_site(grid, gateways, L, backend=b),
        "cochannel_sir n=2000": lambda b: kernels.cochannel_sir(devices, channel, owner, gateways, fades, L, 5.0, backend=b),
    }
    backends = kernels.available_backends()
    print(f"{'case':<26}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        times = [min(timeit.repeat(lambda: fn(b), number=1, repeat=repeat)) for b in backends]
        _row(name, times)
    times = []
    original = kernels._impl
    for b in backends:
        kernels._impl = kernels._select(b)
        times.append(min(timeit.repeat(lambda: run_trial(spec, 0), number=1, repeat=repeat)))
    kernels._impl = original
    _row("full trial (L=1000)", times)


def _row(name, times):
    line = f"{name:<26}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
    if len(times) > 1:
        line += f"{times[1] / times[0]:>11.1f}x"
    print(line)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    bench(p.parse_args().repeat)
