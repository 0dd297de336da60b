"""Seeded verification suite: every framework inequality as a numeric check.

Each entry draws fresh inputs from its own random substream, evaluates one
guaranteed inequality with explicit tolerances, and records the worst margin
together with replayable witnesses for any failure.  Reports are bit-stable:
the same seed and config digest always produce identical entries, regardless
of how many worker threads execute them.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .config import build_kernel, build_sensitivity, canonical_digest
from .errors import ConfigError
from .functionals import (
    difference_bound_check,
    memory_functional,
    strict_gain_check,
)
from .generators import TrajectorySpec, random_trajectory
from .grid import TimeDomain, Trajectory, combine, constant_trajectory, regrid, sup_norm, sup_norm_scan
from .kernels import classify, cumulative_weight, weighted_convolution
from .sensitivity import (
    HistoricalSensitivity,
    induce,
    instantaneous_sensitivity,
    lipschitz_constant,
    tanh_deviation,
)

# ---------------------------------------------------------------------------
# Report types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckEntry:
    theorem_id: str
    description: str
    trials: int
    failures: int
    worst_margin: float
    tolerance: float
    witnesses: tuple

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "description": self.description,
            "trials": self.trials,
            "failures": self.failures,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "witnesses": [dict(w) for w in self.witnesses],
        }


@dataclass(frozen=True)
class VerificationReport:
    entries: tuple
    seed: int
    config_digest: str

    @property
    def total_failures(self) -> int:
        return sum(e.failures for e in self.entries)

    @property
    def passed(self) -> bool:
        return self.total_failures == 0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config_digest": self.config_digest,
            "total_failures": self.total_failures,
            "entries": [e.to_dict() for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Suite configuration
# ---------------------------------------------------------------------------

_DEFAULT_REGULAR = (
    {"type": "exponential", "alpha": 0.75},
    {"type": "exponential", "alpha": 2.5},
    {"type": "constant", "value": 1.0},
)
_DEFAULT_GENERALIZED = (
    {"type": "power_law", "gamma": 0.5, "epsilon": 0.25},
    {"type": "finite_memory", "window": 0.5},
    {"type": "cosine", "amplitude": 1.0, "offset": 0.25},
)
_DEFAULT_SENSITIVITIES = (
    {"kind": "constant", "value": 1.0},
    {
        "kind": "instantaneous",
        "lambda_min": 0.5,
        "lambda_max": 1.5,
        "gamma0": 1.0,
        "reference": {"generator": {"kind": "fourier", "amplitude": 0.8, "seed": 101}},
    },
)
_DEFAULT_HISTORICAL = (
    {
        "kind": "historical",
        "lambda_min": 0.5,
        "lambda_max": 1.5,
        "gamma0": 1.0,
        "alpha0": 2.0,
        "beta0": 1.0,
        "reference": {"generator": {"kind": "fourier", "amplitude": 0.8, "seed": 202}},
    },
)


@dataclass(frozen=True)
class SuiteConfig:
    """Inputs and knobs of :func:`run_suite`; serialized into the digest."""

    horizon: float = 1.0
    grid_points: int = 257
    quad_tol: float = 1e-8
    trials: int = 25
    amplitude: float = 1.5
    kernels: tuple = _DEFAULT_REGULAR
    generalized_kernels: tuple = _DEFAULT_GENERALIZED
    sensitivities: tuple = _DEFAULT_SENSITIVITIES
    historical: tuple = _DEFAULT_HISTORICAL
    #: Scales the declared operator Lipschitz constant before the comparison;
    #: values below 1 deliberately falsify the check (sanity hook).
    lipschitz_scale: float = 1.0
    #: Per-entry tolerance as a multiple of the quadrature tolerance
    #: (inequality checks inherit a quadrature error from each side).
    tolerance_factor: float = 10.0

    @classmethod
    def from_dict(cls, raw: dict) -> "SuiteConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown suite config keys: {sorted(unknown)}")
        coerced = dict(raw)
        for key in ("kernels", "generalized_kernels", "sensitivities", "historical"):
            if key in coerced:
                coerced[key] = tuple(coerced[key])
        cfg = cls(**coerced)
        if cfg.horizon <= 0 or cfg.grid_points < 3 or cfg.trials < 1:
            raise ConfigError("suite config has out-of-range values")
        return cfg

    def payload(self) -> dict:
        return {
            "horizon": self.horizon,
            "grid_points": self.grid_points,
            "quad_tol": self.quad_tol,
            "trials": self.trials,
            "amplitude": self.amplitude,
            "kernels": list(self.kernels),
            "generalized_kernels": list(self.generalized_kernels),
            "sensitivities": list(self.sensitivities),
            "historical": list(self.historical),
            "lipschitz_scale": self.lipschitz_scale,
            "tolerance_factor": self.tolerance_factor,
        }


class _Context:
    """Objects shared by all entries, built once per run."""

    def __init__(self, config: SuiteConfig):
        self.config = config
        self.domain = TimeDomain.uniform(config.horizon, config.grid_points)
        self.regular = [build_kernel(spec, self.domain) for spec in config.kernels]
        self.generalized = [build_kernel(spec, self.domain) for spec in config.generalized_kernels]
        self.sensitivities = [build_sensitivity(spec, self.domain) for spec in config.sensitivities]
        self.historical = [build_sensitivity(spec, self.domain) for spec in config.historical]
        for model in self.historical:
            if not isinstance(model, HistoricalSensitivity):
                raise ConfigError("the 'historical' section accepts historical sensitivities only")
        self.tol = config.tolerance_factor * config.quad_tol

    def smooth(self, rng) -> Trajectory:
        kind = "fourier" if rng.uniform() < 0.6 else "polynomial"
        return random_trajectory(rng, TrajectorySpec(kind, amplitude=self.config.amplitude), self.domain)

    def stepped(self, rng) -> Trajectory:
        breaks = int(rng.integers(1, 4))
        return random_trajectory(
            rng,
            TrajectorySpec("piecewise-step", amplitude=self.config.amplitude, breakpoints=breaks),
            self.domain,
        )

    def pick(self, rng, items):
        return items[int(rng.integers(0, len(items)))]


def _witness(note: str, trajectory: Trajectory | None = None) -> dict:
    w = {"note": note}
    if trajectory is not None:
        w["trajectory_csv"] = trajectory.to_csv()
    return w


def _entry(theorem_id, description, trials, margins, tolerance, witnesses) -> CheckEntry:
    margins = [float(m) for m in margins]
    failures = sum(1 for m in margins if m < -tolerance)
    worst = min(margins) if margins else math.inf
    return CheckEntry(
        theorem_id,
        description,
        trials,
        failures,
        worst,
        tolerance,
        tuple(witnesses[:3]),
    )


# ---------------------------------------------------------------------------
# Entry runners
# ---------------------------------------------------------------------------


def _check_cumulative_weight(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses, trials = [], [], 0
    for kernel in ctx.regular:
        for t in np.linspace(0.0, ctx.domain.horizon, 16):
            trials += 1
            m = 1.0 - cumulative_weight(kernel, float(t), ctx.config.quad_tol)
            margins.append(m)
            if m < -ctx.tol:
                witnesses.append(_witness(f"kernel {kernel.kind}: cumulative weight {1 - m:.12g} at t={t:g}"))
    return _entry(
        "kernel.cumulative_weight",
        "accumulated kernel weight over any history never exceeds 1 (regular kernels)",
        trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_weighted_supremum(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        f = ctx.smooth(rng)
        kernel = ctx.pick(rng, ctx.regular)
        t = float(rng.uniform(0.0, ctx.domain.horizon))
        value = weighted_convolution(kernel, f, t, rel_tol=ctx.config.quad_tol)
        m = sup_norm(f) - value
        margins.append(m)
        if m < -ctx.tol:
            witnesses.append(_witness(f"kernel {kernel.kind} at t={t:g}: convolution {value:.12g}", f))
    return _entry(
        "kernel.weighted_supremum",
        "kernel-weighted magnitude of the past is bounded by the sup-norm (regular kernels)",
        ctx.config.trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_difference_control(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        f, g = ctx.smooth(rng), ctx.smooth(rng)
        kernel = ctx.pick(rng, ctx.regular)
        t = float(rng.uniform(0.0, ctx.domain.horizon))
        diff = combine(f, g, 1.0, -1.0)

        def signs(ss, diff=diff):
            return np.sign(diff.values(np.asarray(ss, dtype=float)))

        value = weighted_convolution(kernel, diff, t, weight=signs, rel_tol=ctx.config.quad_tol)
        m = sup_norm(diff) - abs(value)
        margins.append(m)
        if m < -ctx.tol:
            witnesses.append(_witness(f"kernel {kernel.kind} at t={t:g}: signed convolution {value:.12g}", diff))
    return _entry(
        "kernel.difference_control",
        "kernel-weighted difference of two signals is bounded by their sup-distance",
        ctx.config.trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_generalized_bounds(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses, trials = [], [], 0
    for _ in range(ctx.config.trials):
        f = ctx.smooth(rng)
        kernel = ctx.pick(rng, ctx.generalized)
        t = float(rng.uniform(0.0, ctx.domain.horizon))
        measurements = classify(kernel).measurements

        def signs(ss, f=f):
            return np.sign(f.values(np.asarray(ss, dtype=float)))

        signed = weighted_convolution(kernel, f, t, weight=signs, rel_tol=ctx.config.quad_tol)
        trials += 1
        m = sup_norm(f) * measurements.abs_integral - abs(signed)
        margins.append(m)
        if m < -ctx.tol:
            witnesses.append(_witness(f"kernel {kernel.kind} (signed case) at t={t:g}", f))
        if measurements.min_value >= 0.0:
            trials += 1
            plain = weighted_convolution(kernel, f, t, rel_tol=ctx.config.quad_tol)
            m2 = sup_norm(f) * measurements.integral - plain
            margins.append(m2)
            if m2 < -ctx.tol:
                witnesses.append(_witness(f"kernel {kernel.kind} (nonnegative case) at t={t:g}", f))
    return _entry(
        "kernel.generalized_bounds",
        "possibly sign-changing kernels obey the absolute-integral convolution bounds",
        trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_tanh_lipschitz(rng, ctx: _Context) -> CheckEntry:
    n = max(ctx.config.trials * 40, 1000)
    xs = rng.uniform(-8.0, 8.0, n)
    ys = rng.uniform(-8.0, 8.0, n)
    ps = rng.uniform(-4.0, 4.0, n)
    gs = rng.uniform(0.05, 5.0, n)
    lhs = np.abs(tanh_deviation(xs, ps, gs) - tanh_deviation(ys, ps, gs))
    margins = gs * np.abs(xs - ys) - lhs
    witnesses = []
    if np.min(margins) < -1e-12:
        k = int(np.argmin(margins))
        witnesses.append(_witness(f"x={xs[k]!r}, y={ys[k]!r}, p={ps[k]!r}, gain={gs[k]!r}"))
    return _entry(
        "sensitivity.tanh_lipschitz",
        "the saturating deviation score is gain-Lipschitz in the state",
        n,
        margins.tolist(),
        1e-12,
        witnesses,
    )


def _check_sensitivity_bounds(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        model = ctx.pick(rng, ctx.historical)
        f = ctx.smooth(rng)
        ind = induce(model, f)
        m = min(
            float(ind.values.min() - model.lambda_min),
            float(model.lambda_max - ind.values.max()),
        )
        margins.append(m)
        if m < -1e-12:
            witnesses.append(_witness("induced values left the declared band", f))
    return _entry(
        "sensitivity.bounds",
        "induced sensitivity values stay inside [lambda_min, lambda_max]",
        ctx.config.trials,
        margins,
        1e-12,
        witnesses,
    )


def _check_operator_lipschitz(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses, trials = [], [], 0
    scale = ctx.config.lipschitz_scale
    for _ in range(ctx.config.trials):
        model = ctx.pick(rng, ctx.historical)
        bound = scale * lipschitz_constant(model)
        f, g = ctx.smooth(rng), ctx.smooth(rng)
        pairs = [(f, g)]
        # A pair hugging the reference exercises the tight regime where the
        # instantaneous gain dominates; it is what a mis-declared constant
        # would fail on.
        eps = 1e-2
        bump = Trajectory.from_callable(
            ctx.domain,
            lambda ts: np.sin(2.0 * np.pi * np.asarray(ts, dtype=float) / ctx.domain.horizon),
        )
        pairs.append((combine(model.reference, bump, 1.0, eps), model.reference))
        for fa, fb in pairs:
            trials += 1
            gap = sup_norm(combine(fa, fb, 1.0, -1.0))
            lhs = float(np.max(np.abs(induce(model, fa).values - induce(model, fb).values)))
            m = bound * gap - lhs
            margins.append(m)
            if m < -ctx.tol:
                witnesses.append(
                    _witness(f"pair broke the declared constant {bound:.12g} (gap {gap:.12g}, lhs {lhs:.12g})", fa)
                )
    return _entry(
        "sensitivity.operator_lipschitz",
        "induced sensitivities respond to trajectory changes within the closed-form constant",
        trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_time_continuity(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    fine_domain = TimeDomain.uniform(ctx.domain.horizon, 2 * ctx.domain.grid_points - 1)
    for _ in range(min(ctx.config.trials, 6)):
        model = ctx.pick(rng, ctx.historical)
        f = ctx.smooth(rng)
        coarse = float(np.max(np.abs(np.diff(induce(model, f).values))))
        fine_model = HistoricalSensitivity(
            regrid(model.reference, fine_domain),
            model.alpha0,
            model.gamma0,
            model.beta0,
            model.lambda_min,
            model.lambda_max,
        )
        fine = float(np.max(np.abs(np.diff(induce(fine_model, f).values))))
        if coarse < 1e-13:
            margins.append(math.inf)
            continue
        m = 0.75 - fine / coarse
        margins.append(m)
        if m < 0.0:
            witnesses.append(_witness(f"refinement ratio {fine / coarse:.6g} did not shrink", f))
    return _entry(
        "sensitivity.time_continuity",
        "consecutive-node steps of induced values shrink under grid refinement",
        len(margins),
        margins,
        0.0,
        witnesses,
    )


def _check_zero_positivity(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    zero = constant_trajectory(ctx.domain, 0.0)
    for model in ctx.historical:
        ind = induce(model, zero)
        m = float(ind.values.min() - model.lambda_min)
        margins.append(m)
        if m < -1e-12:
            witnesses.append(_witness("zero trajectory dipped below lambda_min"))
    return _entry(
        "sensitivity.zero_positivity",
        "the zero trajectory keeps sensitivity at or above lambda_min",
        len(margins),
        margins,
        1e-12,
        witnesses,
    )


def _check_instantaneous_reduction(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        base = ctx.pick(rng, ctx.historical)
        model = replace(base, beta0=0.0)
        flat = instantaneous_sensitivity(
            model.reference, model.gamma0, model.lambda_min, model.lambda_max
        )
        f = ctx.smooth(rng)
        ind = induce(model, f)
        direct = np.asarray(
            flat.evaluate(ctx.domain.nodes, f.values(ctx.domain.nodes)), dtype=float
        )
        m = -float(np.max(np.abs(ind.values - direct)))
        margins.append(m)
        if m < -1e-12:
            witnesses.append(_witness("zero-feedback reduction mismatch", f))
    return _entry(
        "sensitivity.instantaneous_reduction",
        "zero feedback strength reproduces the instantaneous formula node-wise",
        ctx.config.trials,
        margins,
        1e-12,
        witnesses,
    )


def _check_wellposed(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        f = ctx.smooth(rng)
        kernel = ctx.pick(rng, ctx.regular)
        model = ctx.pick(rng, ctx.sensitivities)
        report = memory_functional(f, kernel, model, ctx.config.quad_tol)
        cap = report.sensitivity_sup * report.kernel_sup * ctx.domain.horizon * report.sup_norm
        m = min(
            float(np.min(report.accumulation)) + 1e-12,
            cap + ctx.tol - float(np.max(report.accumulation)),
        )
        if not np.all(np.isfinite(report.accumulation)):
            m = -math.inf
        margins.append(m)
        if m < -ctx.tol:
            witnesses.append(_witness(f"kernel {kernel.kind}: accumulation profile broke its cap", f))
    return _entry(
        "functional.wellposed",
        "accumulation profiles are finite, nonnegative, and capped by the intrinsic bound",
        ctx.config.trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_positive_definite(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses, trials = [], [], 0
    zero = constant_trajectory(ctx.domain, 0.0)
    for kernel in ctx.regular:
        for model in ctx.sensitivities:
            trials += 1
            s0 = memory_functional(zero, kernel, model, ctx.config.quad_tol).value
            margins.append(-abs(s0))
            if abs(s0) > 1e-12:
                witnesses.append(_witness(f"zero trajectory produced value {s0!r}"))
    for _ in range(ctx.config.trials):
        f = ctx.smooth(rng)
        if sup_norm(f) <= 1e-9:
            continue
        trials += 1
        kernel = ctx.pick(rng, ctx.regular)
        model = ctx.pick(rng, ctx.sensitivities)
        value = memory_functional(f, kernel, model, ctx.config.quad_tol).value
        margins.append(value - 1e-12)
        if value <= 1e-12:
            witnesses.append(_witness("nonzero trajectory scored zero", f))
    return _entry(
        "functional.positive_definite",
        "the functional vanishes exactly on the zero trajectory",
        trials,
        margins,
        1e-12,
        witnesses,
    )


def _check_dominates_sup_norm(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        f = ctx.smooth(rng)
        kernel = ctx.pick(rng, ctx.regular)
        model = ctx.pick(rng, ctx.sensitivities)
        report = memory_functional(f, kernel, model, ctx.config.quad_tol)
        m = report.value - report.sup_norm
        margins.append(m)
        if m < -ctx.tol:
            witnesses.append(_witness(f"value {report.value!r} under sup-norm {report.sup_norm!r}", f))
    return _entry(
        "functional.dominates_sup_norm",
        "the functional never falls below the classical sup-norm",
        ctx.config.trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_strict_gain(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses, trials = [], [], 0
    floor = 1e-6
    for _ in range(ctx.config.trials):
        f = ctx.smooth(rng)
        if sup_norm(f) <= 1e-9:
            continue
        kernel = ctx.pick(rng, ctx.regular)
        model = ctx.pick(rng, ctx.sensitivities)
        result = strict_gain_check(f, kernel, model, ctx.config.quad_tol)
        trials += 1
        if "unmet" in result.note:
            margins.append(math.inf)  # hypothesis gate, not a violation
            continue
        m = result.margin - floor
        margins.append(m)
        if m < 0.0:
            witnesses.append(_witness(f"gain margin {result.margin!r} below {floor:g}", f))
    return _entry(
        "functional.strict_gain",
        "with the magnitude peak inside (0, T], the functional strictly exceeds the sup-norm",
        trials,
        margins,
        0.0,
        witnesses,
    )


def _two_sided_margin(report) -> float:
    return min(
        report.value - report.sup_norm,
        report.upper_bound - report.value,
    )


def _check_embedding(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        f = ctx.smooth(rng)
        kernel = ctx.pick(rng, ctx.regular)
        model = ctx.pick(rng, ctx.sensitivities)
        report = memory_functional(f, kernel, model, ctx.config.quad_tol)
        m = _two_sided_margin(report)
        margins.append(m)
        if m < -ctx.tol:
            witnesses.append(_witness(f"two-sided bound broke: value {report.value!r}", f))
    return _entry(
        "set.embedding_two_sided",
        "continuous trajectories satisfy the two-sided sup-norm comparison",
        ctx.config.trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_embedding_operator_mode(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(min(ctx.config.trials, 10)):
        f = ctx.smooth(rng)
        kernel = ctx.pick(rng, ctx.regular)
        model = ctx.pick(rng, ctx.historical)
        report = memory_functional(f, kernel, model, ctx.config.quad_tol)
        m = _two_sided_margin(report)
        margins.append(m)
        if m < -ctx.tol:
            witnesses.append(_witness("operator-mode two-sided bound broke empirically", f))
    return _entry(
        "set.embedding_operator_mode",
        "history-dependent sensitivities satisfy the two-sided comparison empirically "
        "(observed, not guaranteed)",
        len(margins),
        margins,
        ctx.tol,
        witnesses,
    )


def _check_inclusion_lipschitz(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        f, g = ctx.smooth(rng), ctx.smooth(rng)
        kernel = ctx.pick(rng, ctx.regular)
        model = ctx.pick(rng, ctx.sensitivities)
        result = difference_bound_check(f, g, kernel, model, ctx.config.quad_tol, slack=0.0)
        margins.append(result.margin)
        if result.margin < -ctx.tol:
            witnesses.append(_witness(f"difference bound broke: value {result.value!r} over {result.bound!r}", f))
    return _entry(
        "set.inclusion_lipschitz",
        "the identity embedding is Lipschitz from sup-norm to the functional",
        ctx.config.trials,
        margins,
        ctx.tol,
        witnesses,
    )


def _check_discontinuous_member(rng, ctx: _Context) -> CheckEntry:
    margins, witnesses = [], []
    for _ in range(ctx.config.trials):
        f = ctx.stepped(rng)
        kernel = ctx.pick(rng, ctx.regular)
        model = ctx.pick(rng, ctx.sensitivities)
        report = memory_functional(f, kernel, model, ctx.config.quad_tol)
        m = report.upper_bound + ctx.tol - report.value
        if not report.member:
            m = -math.inf
        margins.append(m)
        if m < -ctx.tol:
            witnesses.append(_witness("step trajectory left the membership bound", f))
    return _entry(
        "set.discontinuous_member",
        "step trajectories have finite functional values within the membership bound",
        ctx.config.trials,
        margins,
        ctx.tol,
        witnesses,
    )


_CHECKS: tuple = (
    _check_cumulative_weight,
    _check_weighted_supremum,
    _check_difference_control,
    _check_generalized_bounds,
    _check_tanh_lipschitz,
    _check_sensitivity_bounds,
    _check_operator_lipschitz,
    _check_time_continuity,
    _check_zero_positivity,
    _check_instantaneous_reduction,
    _check_wellposed,
    _check_positive_definite,
    _check_dominates_sup_norm,
    _check_strict_gain,
    _check_embedding,
    _check_embedding_operator_mode,
    _check_inclusion_lipschitz,
    _check_discontinuous_member,
)

#: Every guaranteed statement must have an entry; the suite self-checks this.
REQUIRED_THEOREM_IDS = frozenset(
    {
        "kernel.cumulative_weight",
        "kernel.weighted_supremum",
        "kernel.difference_control",
        "kernel.generalized_bounds",
        "sensitivity.tanh_lipschitz",
        "sensitivity.bounds",
        "sensitivity.operator_lipschitz",
        "sensitivity.time_continuity",
        "sensitivity.zero_positivity",
        "sensitivity.instantaneous_reduction",
        "functional.wellposed",
        "functional.positive_definite",
        "functional.dominates_sup_norm",
        "functional.strict_gain",
        "set.embedding_two_sided",
        "set.inclusion_lipschitz",
        "set.discontinuous_member",
    }
)


def run_suite(
    config: SuiteConfig | dict | None = None,
    seed: int = 0,
    max_workers: int | None = None,
) -> VerificationReport:
    """Run every check with per-entry random substreams and collect a report.

    Entries never abort the run; failures are counted and witnessed.  The
    seed is split into one independent substream per entry, so the report is
    bit-identical for a given (config, seed) regardless of ``max_workers``.
    """
    if config is None:
        config = SuiteConfig()
    elif isinstance(config, dict):
        config = SuiteConfig.from_dict(config)
    ctx = _Context(config)
    streams = np.random.SeedSequence(seed).spawn(len(_CHECKS))
    jobs = [(check, np.random.default_rng(stream)) for check, stream in zip(_CHECKS, streams)]

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            entries = list(pool.map(lambda job: job[0](job[1], ctx), jobs))
    else:
        entries = [check(rng, ctx) for check, rng in jobs]

    produced = {e.theorem_id for e in entries}
    missing = sorted(REQUIRED_THEOREM_IDS - produced)
    entries.append(
        CheckEntry(
            "suite.coverage",
            "every guaranteed statement has a live entry in this suite",
            len(REQUIRED_THEOREM_IDS),
            len(missing),
            -math.inf if missing else 0.0,
            0.0,
            tuple({"note": f"missing entry: {m}"} for m in missing),
        )
    )
    return VerificationReport(tuple(entries), seed, canonical_digest(config.payload()))
