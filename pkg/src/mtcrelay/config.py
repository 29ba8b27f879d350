"""Run configuration: YAML file plus ``section.key=value`` overrides."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from pathlib import Path

import yaml

from .domain import DeploymentParams, ParameterError, RadioParams, SpectrumPlan
from .lbra import Policy
from .montecarlo import AXES, ExperimentSpec

MODES = ("simulate", "analytic", "sweep", "compare", "dump", "explain")

# reference operating point; window, seed and trial count are simulation choices
DEFAULTS = {
    "radio": {"eta_db": 3.0, "alpha": 5.0},
    "spectrum": {"r1": 1800, "r2": 1800, "omega1": 30, "omega2": 5},
    "deployment": {"lambda_d": 2e-3, "lambda_g": 1e-4, "window": 1000.0, "seed": 1},
    "simulation": {"policy": "lbra", "trials": 200, "resolution": 128, "workers": 1},
    "analytic": {"samples": 20000},
    "sweep": {"axis": "lambda_d", "values": []},
    "output": {"csv": None, "plot": None, "log_y": False, "metric": "auto"},
}

# sections that describe the experiment itself, embedded in output files
EXPERIMENT_SECTIONS = ("radio", "spectrum", "deployment", "simulation", "analytic", "sweep")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key path."""


@dataclass(frozen=True)
class RunConfig:
    raw: dict
    mode: str = "simulate"

    def section(self, name):
        return self.raw[name]

    @property
    def radio(self):
        return RadioParams(**self.raw["radio"])

    @property
    def plan(self):
        return SpectrumPlan(**self.raw["spectrum"])

    @property
    def deployment(self):
        d = self.raw["deployment"]
        return DeploymentParams(d["lambda_d"], d["lambda_g"], d["window"], d["seed"])

    @property
    def policy(self):
        return Policy.parse(self.raw["simulation"]["policy"])

    @property
    def workers(self):
        return int(self.raw["simulation"]["workers"])

    @property
    def samples(self):
        return int(self.raw["analytic"]["samples"])

    @property
    def axis(self):
        return self.raw["sweep"]["axis"]

    @property
    def values(self):
        return [float(v) for v in self.raw["sweep"]["values"]]

    def experiment(self, policy=None):
        sim = self.raw["simulation"]
        return ExperimentSpec(
            deployment=self.deployment,
            radio=self.radio,
            plan=self.plan,
            policy=Policy.parse(policy or sim["policy"]),
            trials=int(sim["trials"]),
            resolution=int(sim["resolution"]),
        )

    def experiment_yaml(self):
        """The experiment-defining sections as YAML, reproducible from a file dump."""
        sub = {k: self.raw[k] for k in EXPERIMENT_SECTIONS}
        return yaml.safe_dump(sub, sort_keys=True, default_flow_style=False)


def _merge(base, update, path=""):
    for key, val in update.items():
        kp = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigError(f"unknown configuration key '{kp}'")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"'{kp}' must be a mapping")
            _merge(base[key], val, kp)
        else:
            base[key] = val


def _parse_override(text):
    if "=" not in text:
        raise ConfigError(f"override '{text}' is not of the form section.key=value")
    key, val = text.split("=", 1)
    parts = key.strip().split(".")
    try:
        value = yaml.safe_load(val) if val.strip() else None
    except yaml.YAMLError as exc:
        raise ConfigError(f"override '{key}': cannot parse value {val!r}: {exc}") from None
    nested = value
    for p in reversed(parts):
        nested = {p: nested}
    return nested


def _as_number(v):
    # YAML 1.1 reads exponent forms without a dot (3e-3) as strings
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            return v
    return v


def _check(raw):
    def need(cond, key, msg):
        if not cond:
            raise ConfigError(f"{key}: {msg}")

    def num(key):
        sec, name = key.split(".")
        v = raw[sec][name] = _as_number(raw[sec][name])
        need(isinstance(v, (int, float)) and not isinstance(v, bool), key, f"expected a number, got {v!r}")
        need(math.isfinite(v), key, "must be finite")
        return v

    def integer(key):
        v = num(key)
        need(float(v).is_integer(), key, f"expected an integer, got {v!r}")
        sec, name = key.split(".")
        raw[sec][name] = int(v)
        return int(v)

    num("radio.eta_db")
    alpha = num("radio.alpha")
    need(alpha > 2, "radio.alpha", f"must be > 2, the K_alpha integral diverges for alpha={alpha}")
    for k in ("r1", "r2", "omega1", "omega2"):
        need(integer(f"spectrum.{k}") > 0, f"spectrum.{k}", "must be positive")
    for k in ("lambda_d", "lambda_g", "window"):
        raw["deployment"][k] = float(num(f"deployment.{k}"))
        need(raw["deployment"][k] > 0, f"deployment.{k}", "must be positive")
    need(integer("deployment.seed") >= 0, "deployment.seed", "must be non-negative")
    try:
        Policy.parse(raw["simulation"]["policy"])
    except ValueError as exc:
        raise ConfigError(f"simulation.policy: {exc}") from None
    raw["simulation"]["policy"] = Policy.parse(raw["simulation"]["policy"]).value
    need(integer("simulation.trials") >= 1, "simulation.trials", "must be >= 1")
    need(integer("simulation.resolution") >= 64, "simulation.resolution", "must be >= 64")
    need(integer("simulation.workers") >= 1, "simulation.workers", "must be >= 1")
    need(integer("analytic.samples") >= 1000, "analytic.samples", "must be >= 1000")
    need(raw["sweep"]["axis"] in AXES, "sweep.axis", f"must be one of {AXES}")
    vals = raw["sweep"]["values"]
    if isinstance(vals, (int, float)):
        vals = [vals]
    need(isinstance(vals, list), "sweep.values", "must be a list of numbers")
    try:
        vals = [float(_as_number(v)) for v in vals]
    except (TypeError, ValueError):
        raise ConfigError("sweep.values: must be a list of numbers") from None
    need(all(b > a for a, b in zip(vals, vals[1:])), "sweep.values", "must be strictly increasing")
    need(all(v > 0 for v in vals), "sweep.values", "must be positive")
    raw["sweep"]["values"] = vals
    need(raw["output"]["metric"] in ("auto", "capacity", "outage"), "output.metric",
         "must be auto, capacity or outage")


def parse_config(path=None, overrides=(), mode="simulate"):
    """Load a YAML config (optional), apply overrides, and validate.

    An empty or absent file yields the reference operating point.
    """
    raw = copy.deepcopy(DEFAULTS)
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        try:
            loaded = yaml.safe_load(p.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config {p}: {exc}") from None
        if loaded is not None:
            if not isinstance(loaded, dict):
                raise ConfigError(f"config {p}: top level must be a mapping")
            _merge(raw, loaded)
    for text in overrides:
        _merge(raw, _parse_override(text))
    _check(raw)
    if mode not in MODES:
        raise ConfigError(f"mode: must be one of {MODES}")
    cfg = RunConfig(raw=raw, mode=mode)
    # surface domain-level violations (e.g. too few expected gateways) as config errors
    try:
        cfg.radio, cfg.plan, cfg.deployment
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None
    return cfg
