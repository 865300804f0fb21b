"""JSON config loading and validation for the CLI and runners.

A config is one JSON object.  Example::

    {
      "kind": "degrees",
      "kernel": {"family": "gaussian", "sigma": 1.0, "norm": 1.0, "d": 2},
      "torus": {"d": 2, "measure": "area", "value": 1000.0},
      "lambda": 1.0,
      "mu": 1.0,
      "replicates": 10,
      "seed": 0
    }

The torus size is given either as the d-dimensional volume
(measure "area") or as the side length (measure "side").  Unknown keys
are rejected so typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

import json
import os

from .errors import ConfigError
from .experiments import ExperimentConfig
from .geometry import Torus
from .kernels import kernel_from_json

KINDS = ("sample", "degrees", "phase", "joint_groups", "connection", "visualize", "analytics")

_TOP_KEYS = {
    "kind",
    "kernel",
    "torus",
    "lambda",
    "mu",
    "lambda_values",
    "mu_values",
    "replicates",
    "seed",
    "mode",
    "eps_tail",
    "threads",
    "probe_distances",
    "confidence",
    "dispersion_alpha",
    "profile",
}

_PROFILE_KEYS = {"n_radii", "t_max", "tol", "base_nodes", "max_refinements", "method"}

DEFAULT_TORUS = {"d": 2, "measure": "area", "value": 1000.0}


def default_sweep_values(n: int = 16, upper: float = 4.0) -> tuple:
    """Evenly spaced intensities (upper/n, ..., upper], zero excluded."""
    step = upper / n
    return tuple(step * (k + 1) for k in range(n))


def resolve_torus(payload) -> Torus:
    if not isinstance(payload, dict):
        raise ConfigError(f"torus must be an object, got {type(payload).__name__}")
    extra = set(payload) - {"d", "measure", "value"}
    if extra:
        raise ConfigError(f"unknown torus keys: {sorted(extra)}")
    try:
        d = int(payload["d"])
        measure = payload.get("measure", "area")
        value = float(payload["value"])
    except KeyError as exc:
        raise ConfigError(f"torus is missing required key {exc}") from None
    if measure == "side":
        side = value
    elif measure == "area":
        if value <= 0:
            raise ConfigError(f"torus area must be > 0, got {value}")
        side = value ** (1.0 / d)
    else:
        raise ConfigError(f'torus measure must be "area" or "side", got {measure!r}')
    try:
        return Torus(d, side)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _float_or_none(payload, key):
    if key not in payload or payload[key] is None:
        return None
    try:
        value = float(payload[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {payload[key]!r}") from None
    if value < 0:
        raise ConfigError(f"{key} must be >= 0, got {value}")
    return value


def _unit_interval(payload, key, default):
    try:
        value = float(payload.get(key, default))
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {payload[key]!r}") from None
    if not 0 < value < 1:
        raise ConfigError(f"{key} must lie in (0, 1), got {value}")
    return value


def _float_tuple(payload, key):
    raw = payload.get(key, ())
    if raw is None:
        return ()
    if not isinstance(raw, (list, tuple)):
        raise ConfigError(f"{key} must be an array of numbers")
    try:
        values = tuple(float(v) for v in raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an array of numbers") from None
    if any(v < 0 for v in values):
        raise ConfigError(f"{key} entries must be >= 0")
    return values


def config_from_dict(payload: dict, kind=None) -> ExperimentConfig:
    """Validate a parsed JSON object and resolve it to an ExperimentConfig.

    `kind` (usually the CLI subcommand) takes precedence over the config's
    own "kind" entry; phase sweeps get the standard 16-point grids when
    the value arrays are omitted.
    """
    if not isinstance(payload, dict):
        raise ConfigError(f"config must be a JSON object, got {type(payload).__name__}")
    unknown = set(payload) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    resolved_kind = kind if kind is not None else payload.get("kind")
    if resolved_kind is None:
        raise ConfigError(f"config needs a kind; one of {KINDS}")
    if resolved_kind not in KINDS:
        raise ConfigError(f"unknown kind {resolved_kind!r}; expected one of {KINDS}")

    if "kernel" not in payload:
        raise ConfigError('config is missing the "kernel" object')
    kernel = kernel_from_json(payload["kernel"])
    torus = resolve_torus(payload.get("torus", DEFAULT_TORUS))
    if kernel.d != torus.d:
        raise ConfigError(
            f"kernel dimension {kernel.d} does not match torus dimension {torus.d}"
        )

    replicates = payload.get("replicates", 10)
    if not isinstance(replicates, int) or replicates < 1:
        raise ConfigError(f"replicates must be a positive integer, got {replicates!r}")
    seed = payload.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    mode = payload.get("mode", "auto")
    if mode not in ("auto", "exact", "truncated"):
        raise ConfigError(f'mode must be "auto", "exact" or "truncated", got {mode!r}')
    eps_tail = payload.get("eps_tail", 1e-3)
    try:
        eps_tail = float(eps_tail)
    except (TypeError, ValueError):
        raise ConfigError(f"eps_tail must be a number, got {eps_tail!r}") from None
    if eps_tail < 0:
        raise ConfigError(f"eps_tail must be >= 0, got {eps_tail}")
    threads = payload.get("threads", os.cpu_count() or 1)
    if not isinstance(threads, int) or threads < 1:
        raise ConfigError(f"threads must be a positive integer, got {threads!r}")
    confidence = _unit_interval(payload, "confidence", 0.99)
    dispersion_alpha = _unit_interval(payload, "dispersion_alpha", 0.01)

    profile_options = payload.get("profile", {})
    if not isinstance(profile_options, dict):
        raise ConfigError("profile must be an object")
    bad = set(profile_options) - _PROFILE_KEYS
    if bad:
        raise ConfigError(f"unknown profile keys: {sorted(bad)}")

    lambda_values = _float_tuple(payload, "lambda_values")
    mu_values = _float_tuple(payload, "mu_values")
    if resolved_kind == "phase":
        if not lambda_values:
            lambda_values = default_sweep_values()
        if not mu_values:
            mu_values = default_sweep_values()

    return ExperimentConfig(
        kind=resolved_kind,
        kernel=kernel,
        torus=torus,
        lam=_float_or_none(payload, "lambda"),
        mu=_float_or_none(payload, "mu"),
        lambda_values=lambda_values,
        mu_values=mu_values,
        replicates=replicates,
        seed=seed,
        mode=mode,
        eps_tail=eps_tail,
        threads=threads,
        probe_distances=_float_tuple(payload, "probe_distances"),
        confidence=confidence,
        dispersion_alpha=dispersion_alpha,
        profile_options=dict(profile_options),
    )


def load_config(path, kind=None) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(payload, kind=kind)
