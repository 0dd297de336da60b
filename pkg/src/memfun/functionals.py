"""The memory functional: weighted accumulation, hybrid response, supremum.

For a trajectory ``f``, a regular kernel, and a sensitivity model, the
*weighted accumulation* at time ``t`` integrates the sensitivity-modulated,
kernel-weighted magnitude of the past:

    accumulation(t) = int_0^t sensitivity(s, f(s)) * kernel(t - s) * |f(s)| ds

The *response* adds the instantaneous magnitude, ``|f(t)| + accumulation(t)``,
and the functional value is the supremum of the response over [0, T].  The
value always dominates ``sup|f|`` and, for admissible inputs, stays below
``(1 + sensitivity_sup * kernel_sup * T) * sup|f|``.

Only kernels classified regular are accepted here; generalized kernels get
the looser convolution estimates in :mod:`memfun.kernels` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DegenerateInput, InvalidParameter, UnsupportedKernelClass
from .grid import (
    DEFAULT_REL_TOL,
    Trajectory,
    combine,
    exp_causal_profile,
    integrate,
    sup_norm_scan,
    supremum_scan,
    zero_crossings,
)
from .kernels import Kernel, classify
from .sensitivity import (
    HistoricalSensitivity,
    InducedSensitivity,
    InstantaneousSensitivity,
    induce,
)

SensitivityInput = Union[InstantaneousSensitivity, HistoricalSensitivity, InducedSensitivity]


def _require_regular(kernel: Kernel) -> None:
    report = classify(kernel)
    if not report.class_regular:
        tags = ", ".join(tag for tag, _ in report.failures if tag.startswith("R"))
        raise UnsupportedKernelClass(
            f"the memory functional is defined for regular kernels only (failed: {tags or 'M conditions'})"
        )


def _resolve_sensitivity(sensitivity: SensitivityInput, f: Trajectory):
    """Reduce any sensitivity input to a time-function along ``f``.

    Returns ``(values_fn, lambda_sup, operator_mode, kink_times)`` where
    ``kink_times`` are quadrature splits contributed by the sensitivity (the
    deviation-driven model kinks where ``f`` crosses its reference).
    Historical models are induced along ``f`` once; their node values are
    interpolated off-grid, and results are flagged as operator mode because
    the comparison bounds are only proven for pointwise admissible
    sensitivities.
    """
    if isinstance(sensitivity, InducedSensitivity):
        return sensitivity.values_at, sensitivity.source.lambda_max, True, ()
    if isinstance(sensitivity, HistoricalSensitivity):
        induced = induce(sensitivity, f)
        return induced.values_at, sensitivity.lambda_max, True, ()
    if isinstance(sensitivity, InstantaneousSensitivity):
        def values_fn(ss):
            ss = np.asarray(ss, dtype=float)
            return np.asarray(sensitivity.evaluate(ss, f.values(ss)), dtype=float)

        kinks: tuple = ()
        if sensitivity.reference is not None:
            diff = combine(f, sensitivity.reference, 1.0, -1.0)
            kinks = zero_crossings(diff.values, f.domain)
        return values_fn, sensitivity.lambda_max, False, kinks
    raise InvalidParameter(f"unsupported sensitivity input {type(sensitivity).__name__}")


def _kernel_sup(kernel: Kernel) -> float:
    if kernel.constants.upper is not None:
        return kernel.constants.upper
    return classify(kernel).measurements.max_value


def _integrand_splits(f: Trajectory, sensitivity_kinks: Sequence[float]) -> tuple:
    """Time splits where the accumulation integrand loses smoothness in s."""
    splits = set(f.breakpoint_times)
    splits.update(zero_crossings(f.values, f.domain))
    splits.update(sensitivity_kinks)
    return tuple(sorted(splits))


def _accumulation_at(
    f: Trajectory,
    kernel: Kernel,
    values_fn: Callable,
    t: float,
    rel_tol: float,
    base_splits: Sequence[float] = (),
) -> float:
    t = float(kernel.domain.clip_inside(np.array([t]))[0])
    if t == 0.0:
        return 0.0
    splits = {b for b in base_splits if 0.0 < b < t}
    splits.update(t - tb for tb in kernel.breakpoints if 0.0 < t - tb < t)

    def integrand(ss):
        ss = np.asarray(ss, dtype=float)
        return values_fn(ss) * kernel.values_near(t - ss) * np.abs(f.values(ss))

    return integrate(integrand, 0.0, t, sorted(splits), rel_tol).value


def weighted_accumulation(
    f: Trajectory,
    kernel: Kernel,
    sensitivity: SensitivityInput,
    t: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """Accumulated, sensitivity-modulated influence of the past on time ``t``."""
    _require_regular(kernel)
    values_fn, _, _, kinks = _resolve_sensitivity(sensitivity, f)
    return _accumulation_at(f, kernel, values_fn, t, rel_tol, _integrand_splits(f, kinks))


def memory_response(
    f: Trajectory,
    kernel: Kernel,
    sensitivity: SensitivityInput,
    t: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """Instantaneous magnitude plus accumulation, ``|f(t)| + accumulation(t)``.

    At a jump time the right value of ``f`` enters; both one-sided responses
    are considered by the supremum search in :func:`memory_functional`.
    """
    return abs(f.value(t)) + weighted_accumulation(f, kernel, sensitivity, t, rel_tol)


@dataclass(frozen=True, eq=False)
class MemoryFunctionalReport:
    """Grid profiles and the supremum of the response for one evaluation."""

    nodes: np.ndarray
    magnitude: np.ndarray       # |f| at the nodes (right value at jumps)
    accumulation: np.ndarray    # weighted accumulation at the nodes
    response: np.ndarray        # magnitude + accumulation
    value: float                # supremum of the response
    peak_time: float
    peak_interior: bool
    sup_norm: float
    upper_bound: float
    sensitivity_sup: float
    kernel_sup: float
    member: bool
    quad_tol: float
    operator_mode: bool
    method: str
    notes: tuple

    def __post_init__(self):
        if float(np.min(self.accumulation)) < -1e-12:
            raise InvalidParameter("accumulation profile must be nonnegative")
        for arr in (self.nodes, self.magnitude, self.accumulation, self.response):
            np.asarray(arr).setflags(write=False)

    def to_dict(self, include_profiles: bool = True) -> dict:
        out = {
            "value": self.value,
            "peak_time": self.peak_time,
            "peak_interior": self.peak_interior,
            "sup_norm": self.sup_norm,
            "upper_bound": self.upper_bound,
            "sensitivity_sup": self.sensitivity_sup,
            "kernel_sup": self.kernel_sup,
            "member": self.member,
            "quad_tol": self.quad_tol,
            "operator_mode": self.operator_mode,
            "method": self.method,
            "notes": list(self.notes),
        }
        if include_profiles:
            out["nodes"] = self.nodes.tolist()
            out["magnitude"] = self.magnitude.tolist()
            out["accumulation"] = self.accumulation.tolist()
            out["response"] = self.response.tolist()
        return out

    def plot_csv(self) -> str:
        """Plot-data CSV with columns ``t, abs_f, J, M`` (17 significant digits)."""
        rows = ["t,abs_f,J,M"]
        for t, a, j, m in zip(self.nodes, self.magnitude, self.accumulation, self.response):
            rows.append(f"{t:.17g},{a:.17g},{j:.17g},{m:.17g}")
        return "\n".join(rows) + "\n"


def memory_functional(
    f: Trajectory,
    kernel: Kernel,
    sensitivity: SensitivityInput,
    rel_tol: float = DEFAULT_REL_TOL,
    method: str = "auto",
) -> MemoryFunctionalReport:
    """Evaluate the functional and return the full report.

    ``method`` selects the grid sweep for the accumulation profile:
    ``'direct'`` uses per-node composite rules over the node samples (the
    O(N^2) baseline), ``'recurrence'`` the O(N) decay sweep available for
    exponential-structure kernels, and ``'auto'`` picks the recurrence when
    it applies.  Inputs with jumps always take a per-node adaptive sweep that
    splits each integral at the jump times.
    """
    _require_regular(kernel)
    domain = f.domain
    values_fn, lambda_sup, operator_mode, kinks = _resolve_sensitivity(sensitivity, f)
    splits = _integrand_splits(f, kinks)

    def g_fn(ss):
        ss = np.asarray(ss, dtype=float)
        return values_fn(ss) * np.abs(f.values(ss))

    if method not in ("auto", "direct", "recurrence"):
        raise InvalidParameter(f"unknown sweep method '{method}'")
    use_recurrence = kernel.decay_rate is not None and not kernel.breakpoints
    if method == "recurrence" and not use_recurrence:
        raise InvalidParameter("the recurrence sweep needs an exponential-structure kernel without jumps")
    if method in ("auto", "recurrence") and use_recurrence:
        chosen = "recurrence"
        accumulation = exp_causal_profile(
            kernel.decay_rate, kernel.decay_scale, g_fn, domain, splits, rel_tol
        )
    else:
        chosen = "direct"
        accumulation = np.array(
            [_accumulation_at(f, kernel, values_fn, t, rel_tol, splits) for t in domain.nodes]
        )

    magnitude = np.abs(f.values(domain.nodes))
    response = magnitude + accumulation

    if chosen == "recurrence":
        # Off-grid probes restart the decay recurrence from the nearest node
        # on the left instead of re-integrating from 0.
        def accumulation_probe(t: float) -> float:
            t = float(domain.clip_inside(np.array([t]))[0])
            k = int(np.searchsorted(domain.nodes, t, side="right") - 1)
            base = float(domain.nodes[k])
            if t == base:
                return float(accumulation[k])
            carried = float(accumulation[k]) * math.exp(-kernel.decay_rate * (t - base))

            def tail(ss):
                ss = np.asarray(ss, dtype=float)
                return values_fn(ss) * kernel.values_near(t - ss) * np.abs(f.values(ss))

            inner = [c for c in splits if base < c < t]
            return carried + integrate(tail, base, t, inner, rel_tol * 1e-3).value
    else:
        def accumulation_probe(t: float) -> float:
            return _accumulation_at(f, kernel, values_fn, t, rel_tol, splits)

    def response_at(ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.array([abs(f.value(t)) + accumulation_probe(t) for t in ts])

    f_scan = sup_norm_scan(f)
    candidates = [(f_scan.first_argmax, f_scan.value + accumulation_probe(f_scan.first_argmax))]
    for j in f.jumps:
        at_jump = accumulation_probe(j.time)
        candidates.append((j.time, abs(j.left) + at_jump))
        candidates.append((j.time, abs(j.right) + at_jump))

    scan = supremum_scan(
        response_at,
        domain,
        breakpoints=f.breakpoint_times,
        candidates=candidates,
        grid_values=response,
    )

    kernel_sup = _kernel_sup(kernel)
    notes = [
        "supremum approximated by grid scan with local refinement",
        "at jump times the larger one-sided response enters the supremum",
    ]
    if operator_mode:
        notes.append(
            "operator-sensitivity mode: comparison bounds are checked empirically, not guaranteed"
        )
    return MemoryFunctionalReport(
        nodes=domain.nodes,
        magnitude=magnitude,
        accumulation=accumulation,
        response=response,
        value=scan.value,
        peak_time=scan.first_argmax,
        peak_interior=scan.first_argmax > 0.0,
        sup_norm=f_scan.value,
        upper_bound=(1.0 + lambda_sup * kernel_sup * domain.horizon) * f_scan.value,
        sensitivity_sup=lambda_sup,
        kernel_sup=kernel_sup,
        member=bool(math.isfinite(scan.value)),
        quad_tol=rel_tol,
        operator_mode=operator_mode,
        method=chosen,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class StrictGainResult:
    strict: bool
    margin: float
    peak_time: float
    note: str


def strict_gain_check(
    f: Trajectory,
    kernel: Kernel,
    sensitivity: SensitivityInput,
    rel_tol: float = DEFAULT_REL_TOL,
) -> StrictGainResult:
    """Check that the functional strictly exceeds ``sup|f|``.

    The strict gain is asserted only when ``|f|`` attains its maximum at some
    time in (0, T]; the reported peak time is the largest such witness.  When
    only t = 0 attains the maximum the hypothesis is unmet and the result
    explains why instead of asserting strictness.
    """
    scan = sup_norm_scan(f)
    if scan.value <= 1e-12:
        raise DegenerateInput("the zero trajectory has no strict gain to check")
    hypothesis_met = scan.last_argmax > 0.0
    report = memory_functional(f, kernel, sensitivity, rel_tol)
    margin = report.value - scan.value
    if not hypothesis_met:
        return StrictGainResult(
            False,
            margin,
            scan.first_argmax,
            "magnitude peaks only at t = 0, so the strict-gain hypothesis is unmet",
        )
    return StrictGainResult(
        margin > rel_tol,
        margin,
        scan.last_argmax,
        f"magnitude peak witnessed at t = {scan.last_argmax:.12g}",
    )


@dataclass(frozen=True)
class DifferenceBoundResult:
    value: float
    bound: float
    margin: float
    passed: bool


def difference_bound_check(
    f: Trajectory,
    g: Trajectory,
    kernel: Kernel,
    sensitivity: SensitivityInput,
    rel_tol: float = DEFAULT_REL_TOL,
    slack: float = 1e-8,
) -> DifferenceBoundResult:
    """Verify the Lipschitz bound of the identity embedding on a pair.

    Evaluates the functional on ``f - g`` and checks it against
    ``(1 + sensitivity_sup * kernel_sup * T) * sup|f - g|``.
    """
    for traj in (f, g):
        if any(j.left != j.right for j in traj.jumps):
            raise InvalidParameter("difference bound requires continuous trajectories")
    diff = combine(f, g, 1.0, -1.0)
    report = memory_functional(diff, kernel, sensitivity, rel_tol)
    bound = (1.0 + report.sensitivity_sup * report.kernel_sup * diff.domain.horizon) * report.sup_norm
    margin = bound + slack - report.value
    return DifferenceBoundResult(report.value, bound, margin, margin >= 0.0)
