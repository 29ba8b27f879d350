"""Load-balanced resource allocation for MTC gateway relaying.

Monte Carlo simulation on a torus plus the closed-form outage pipeline for
the nearest-association baseline (NPRA) and the load-balancing policy (LBRA).
"""

from .domain import DeploymentParams, ParameterError, RadioParams, SpectrumPlan
from .kernels import BACKEND
from .lbra import Policy
from .montecarlo import ExperimentSpec, SweepRow, run_experiment, run_trial, sweep

__all__ = [
    "BACKEND",
    "DeploymentParams",
    "ExperimentSpec",
    "ParameterError",
    "Policy",
    "RadioParams",
    "SpectrumPlan",
    "SweepRow",
    "run_experiment",
    "run_trial",
    "sweep",
]
__version__ = "0.1.0"
