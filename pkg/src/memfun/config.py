"""JSON config parsing and object builders shared by the CLI and the suite."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, InvalidParameter
from .generators import TrajectorySpec, random_trajectory
from .grid import (
    DEFAULT_GRID_N,
    DEFAULT_REL_TOL,
    TimeDomain,
    Trajectory,
    constant_trajectory,
)
from .kernels import (
    Kernel,
    KernelConstants,
    exponential_kernel,
    finite_memory_kernel,
    power_law_kernel,
    sampled_kernel,
)
from .sensitivity import (
    HistoricalSensitivity,
    constant_sensitivity,
    instantaneous_sensitivity,
)

KERNEL_TYPES = ("exponential", "power_law", "finite_memory", "constant", "cosine", "sampled")
SENSITIVITY_KINDS = ("constant", "instantaneous", "historical")


def _require(spec: dict, key: str, context: str):
    if key not in spec:
        raise ConfigError(f"{context}: missing required key '{key}'")
    return spec[key]


def build_kernel(spec: dict, domain: TimeDomain, base_dir: Path | None = None) -> Kernel:
    """Realize a kernel from its JSON spec ``{"type": ..., parameters...}``."""
    if not isinstance(spec, dict):
        raise ConfigError("kernel spec must be an object")
    kind = _require(spec, "type", "kernel spec")
    try:
        if kind == "exponential":
            return exponential_kernel(float(_require(spec, "alpha", "exponential kernel")), domain)
        if kind == "power_law":
            return power_law_kernel(
                float(_require(spec, "gamma", "power-law kernel")),
                float(_require(spec, "epsilon", "power-law kernel")),
                domain,
            )
        if kind == "finite_memory":
            return finite_memory_kernel(float(_require(spec, "window", "finite-memory kernel")), domain)
        if kind == "constant":
            value = float(_require(spec, "value", "constant kernel"))
            if value <= 0.0:
                raise ConfigError("constant kernel value must be positive")
            return Kernel(
                domain,
                lambda taus: np.full_like(np.asarray(taus, dtype=float), value),
                (),
                KernelConstants(
                    lower=value,
                    upper=value,
                    lipschitz=0.0,
                    ess_bound=value,
                    nondegeneracy=value * domain.horizon,
                    total_variation=0.0,
                    integral=value * domain.horizon,
                ),
                kind="constant",
                decay_rate=0.0,
                decay_scale=value,
            )
        if kind == "cosine":
            amplitude = float(spec.get("amplitude", 1.0))
            offset = float(spec.get("offset", 0.25))
            if offset == 0.0:
                raise ConfigError("cosine kernel needs a nonzero offset to be non-degenerate")
            T = domain.horizon

            def evaluate(taus):
                taus = np.asarray(taus, dtype=float)
                return amplitude * np.cos(2.0 * np.pi * taus / T) + offset

            return Kernel(
                domain,
                evaluate,
                (),
                KernelConstants(
                    ess_bound=abs(amplitude) + abs(offset),
                    nondegeneracy=abs(offset) * T,
                    total_variation=4.0 * abs(amplitude),
                    integral=offset * T,
                ),
                kind="cosine",
            )
        if kind == "sampled":
            path = Path(_require(spec, "file", "sampled kernel"))
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            if not path.exists():
                raise ConfigError(f"sampled kernel file does not exist: {path}")
            samples = Trajectory.from_csv(path, grid_points=domain.grid_points)
            if samples.domain.horizon != domain.horizon:
                raise ConfigError("sampled kernel horizon does not match the configured horizon")
            return sampled_kernel(samples)
    except InvalidParameter as exc:
        raise ConfigError(f"invalid kernel parameters: {exc}") from exc
    raise ConfigError(f"unknown kernel type '{kind}' (expected one of {KERNEL_TYPES})")


def build_trajectory(
    source: dict,
    domain: TimeDomain,
    seed: int = 0,
    base_dir: Path | None = None,
) -> Trajectory:
    """Realize a trajectory source: a CSV file, a seeded generator, or a constant."""
    if not isinstance(source, dict):
        raise ConfigError("trajectory source must be an object")
    if "file" in source:
        path = Path(source["file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"trajectory file does not exist: {path}")
        traj = Trajectory.from_csv(path, grid_points=domain.grid_points)
        if traj.domain.horizon != domain.horizon:
            raise ConfigError(
                f"trajectory horizon {traj.domain.horizon:g} does not match configured horizon {domain.horizon:g}"
            )
        return traj
    if "constant" in source:
        return constant_trajectory(domain, float(source["constant"]))
    if "generator" in source:
        gen = dict(source["generator"])
        gen_seed = int(gen.pop("seed", seed))
        try:
            spec = TrajectorySpec(
                kind=gen.pop("kind", "fourier"),
                amplitude=float(gen.pop("amplitude", 1.0)),
                modes=int(gen.pop("modes", 8)),
                degree=int(gen.pop("degree", 5)),
                breakpoints=int(gen.pop("breakpoints", 1)),
                levels=tuple(gen.pop("levels")) if "levels" in gen else None,
                times=tuple(gen.pop("times")) if "times" in gen else None,
            )
        except InvalidParameter as exc:
            raise ConfigError(f"invalid trajectory generator: {exc}") from exc
        if gen:
            raise ConfigError(f"unknown generator keys: {sorted(gen)}")
        return random_trajectory(np.random.default_rng(gen_seed), spec, domain)
    raise ConfigError("trajectory source needs one of 'file', 'generator', 'constant'")


def build_sensitivity(spec: dict, domain: TimeDomain, seed: int = 0, base_dir: Path | None = None):
    """Realize a sensitivity model from its JSON spec ``{"kind": ..., ...}``."""
    if not isinstance(spec, dict):
        raise ConfigError("sensitivity spec must be an object")
    kind = _require(spec, "kind", "sensitivity spec")
    try:
        if kind == "constant":
            return constant_sensitivity(domain, float(_require(spec, "value", "constant sensitivity")))
        if kind not in SENSITIVITY_KINDS:
            raise ConfigError(f"unknown sensitivity kind '{kind}' (expected one of {SENSITIVITY_KINDS})")
        reference = build_trajectory(
            _require(spec, "reference", f"{kind} sensitivity"), domain, seed, base_dir
        )
        lam_min = float(_require(spec, "lambda_min", "sensitivity spec"))
        lam_max = float(_require(spec, "lambda_max", "sensitivity spec"))
        gamma0 = float(_require(spec, "gamma0", "sensitivity spec"))
        if kind == "instantaneous":
            return instantaneous_sensitivity(reference, gamma0, lam_min, lam_max)
        return HistoricalSensitivity(
            reference,
            alpha0=float(_require(spec, "alpha0", "historical sensitivity")),
            gamma0=gamma0,
            beta0=float(spec.get("beta0", 0.0)),
            lambda_min=lam_min,
            lambda_max=lam_max,
        )
    except InvalidParameter as exc:
        raise ConfigError(f"invalid sensitivity parameters: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Validated evaluation config for the CLI."""

    horizon: float
    grid_points: int
    quad_tol: float
    kernel_spec: dict
    sensitivity_spec: dict
    trajectory_source: Optional[dict]
    report_path: Optional[str]
    plot_path: Optional[str]
    base_dir: Path

    @property
    def domain(self) -> TimeDomain:
        return TimeDomain.uniform(self.horizon, self.grid_points)


def load_run_config(
    path,
    grid_override: int | None = None,
    tol_override: float | None = None,
) -> RunConfig:
    """Load, validate, and normalize an evaluation config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")

    known = {"horizon", "grid", "quad_tol", "kernel", "sensitivity", "trajectory", "output"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    horizon = float(raw.get("horizon", 1.0))
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise ConfigError("horizon must be positive and finite")
    grid_points = int(grid_override if grid_override is not None else raw.get("grid", DEFAULT_GRID_N))
    if grid_points < 3 or grid_points % 2 == 0:
        raise ConfigError("grid must be an odd integer >= 3 (composite-rule pairing)")
    quad_tol = float(tol_override if tol_override is not None else raw.get("quad_tol", DEFAULT_REL_TOL))
    if quad_tol <= 0.0:
        raise ConfigError("quad_tol must be positive")

    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output section must be an object")

    config = RunConfig(
        horizon=horizon,
        grid_points=grid_points,
        quad_tol=quad_tol,
        kernel_spec=raw.get("kernel", {"type": "exponential", "alpha": 1.0}),
        sensitivity_spec=raw.get("sensitivity", {"kind": "constant", "value": 1.0}),
        trajectory_source=raw.get("trajectory"),
        report_path=output.get("report"),
        plot_path=output.get("plot_csv"),
        base_dir=path.parent,
    )
    # Fail fast on anything the run would reject later: referenced files are
    # checked at parse time.
    domain = config.domain
    build_kernel(config.kernel_spec, domain, config.base_dir)
    build_sensitivity(config.sensitivity_spec, domain, 0, config.base_dir)
    if config.trajectory_source is not None:
        build_trajectory(config.trajectory_source, domain, 0, config.base_dir)
    return config


def canonical_digest(payload: dict) -> str:
    """Stable digest of a JSON-serializable config for reproducibility stamps."""
    import hashlib

    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()
