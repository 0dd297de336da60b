"""Deterministic, seeded trajectory generators for test and verification runs.

Every generator is a pure function of the supplied RNG state, so the same
seed stream always reproduces the same trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParameter
from .grid import TimeDomain, Trajectory, step_trajectory

KINDS = ("fourier", "polynomial", "piecewise-step")


@dataclass(frozen=True)
class TrajectorySpec:
    """What :func:`random_trajectory` should draw.

    ``fourier`` draws a truncated trigonometric series with at most ``modes``
    modes (continuous), ``polynomial`` a random polynomial of degree at most
    ``degree``, and ``piecewise-step`` a step function with ``breakpoints``
    interior jumps.  Explicit ``levels``/``times`` pin the step layout instead
    of drawing it.
    """

    kind: str
    amplitude: float = 1.0
    modes: int = 8
    degree: int = 5
    breakpoints: int = 1
    levels: Optional[tuple] = None
    times: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"unknown trajectory kind '{self.kind}'")
        if self.amplitude <= 0.0:
            raise InvalidParameter("amplitude must be positive")


def random_trajectory(rng: np.random.Generator, spec: TrajectorySpec, domain: TimeDomain) -> Trajectory:
    """Draw one trajectory according to ``spec`` from the given RNG state."""
    if spec.kind == "fourier":
        return _fourier(rng, spec, domain)
    if spec.kind == "polynomial":
        return _polynomial(rng, spec, domain)
    return _piecewise_step(rng, spec, domain)


def _fourier(rng, spec, domain):
    m = int(rng.integers(1, spec.modes + 1))
    a = rng.uniform(-spec.amplitude, spec.amplitude, m + 1)
    b = rng.uniform(-spec.amplitude, spec.amplitude, m + 1)
    b[0] = 0.0
    T = domain.horizon

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        out = np.full_like(ts, a[0])
        for k in range(1, m + 1):
            w = 2.0 * np.pi * k * ts / T
            out = out + a[k] * np.cos(w) + b[k] * np.sin(w)
        return out

    coeff_sum = float(np.sum(np.abs(a)) + np.sum(np.abs(b)))
    return Trajectory.from_callable(domain, fn, meta={"kind": "fourier", "coeff_abs_sum": coeff_sum})


def _polynomial(rng, spec, domain):
    deg = int(rng.integers(0, spec.degree + 1))
    coeffs = rng.uniform(-spec.amplitude, spec.amplitude, deg + 1)
    T = domain.horizon

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        return np.polynomial.polynomial.polyval(ts / T, coeffs)

    return Trajectory.from_callable(domain, fn, meta={"kind": "polynomial", "coeffs": tuple(coeffs)})


def _piecewise_step(rng, spec, domain):
    T = domain.horizon
    if spec.times is not None:
        times = [float(t) for t in spec.times]
    else:
        count = max(1, int(spec.breakpoints))
        times = sorted(set(np.round(rng.uniform(0.05 * T, 0.95 * T, count), 12).tolist()))
    if spec.levels is not None:
        levels = [float(v) for v in spec.levels]
    else:
        levels = rng.uniform(-spec.amplitude, spec.amplitude, len(times) + 1).tolist()
    traj = step_trajectory(domain, levels, times)
    return Trajectory(
        traj.domain,
        traj.pieces,
        traj.jumps,
        meta={"kind": "piecewise-step", "levels": tuple(levels), "times": tuple(times)},
    )
