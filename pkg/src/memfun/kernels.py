"""Memory kernels: constructors, evaluation, and admissibility classification.

A kernel is a weight on the elapsed time ``tau = t - s`` in [0, T].  Three
nested admissibility classes are checked numerically:

* ``math``:        nonnegative, integrable, measurable (M1-M3);
* ``regular``:     additionally bounded away from 0 and infinity, integrating
                   to exactly 1, and Lipschitz (R1-R3);
* ``generalized``: possibly sign-changing, essentially bounded, integrable
                   with non-vanishing total integral, of bounded variation
                   (G1-G3).

Classification works from grid samples plus quadrature, so positivity and
essential bounds are sampled certificates, not proofs; the report records
this limitation in its notes.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidParameter, NonConvergence
from .grid import (
    DEFAULT_REL_TOL,
    TimeDomain,
    Trajectory,
    _eval_array,
    integrate,
    zero_crossings,
)

#: Nudge used to read one-sided kernel values next to a declared jump.
_SIDE_NUDGE = 1e-12


@dataclass(frozen=True)
class KernelConstants:
    """Closed-form certificates attached to a kernel; any subset may be set.

    ``lower``/``upper`` bound the kernel pointwise, ``lipschitz`` is a global
    Lipschitz constant, ``ess_bound`` bounds |kernel| almost everywhere,
    ``nondegeneracy`` is a lower bound on |integral|, ``total_variation`` an
    upper bound on the variation, and ``integral`` the exact total weight.
    """

    lower: Optional[float] = None
    upper: Optional[float] = None
    lipschitz: Optional[float] = None
    ess_bound: Optional[float] = None
    nondegeneracy: Optional[float] = None
    total_variation: Optional[float] = None
    integral: Optional[float] = None


@dataclass(frozen=True, eq=False)
class Kernel:
    """A time-lag weight on [0, T] with optional declared constants.

    ``evaluate`` must accept an ndarray of lags; point evaluation exactly at
    a breakpoint may return either branch, so classification and quadrature
    always approach breakpoints one-sidedly.  ``decay_rate``/``decay_scale``
    mark kernels of the form ``scale * exp(-rate * tau)`` for which an O(N)
    recurrence sweep is available.
    """

    domain: TimeDomain
    evaluate: Callable
    breakpoints: tuple = ()
    constants: KernelConstants = field(default_factory=KernelConstants)
    kind: str = "custom"
    decay_rate: Optional[float] = None
    decay_scale: Optional[float] = None

    def __post_init__(self):
        for b in self.breakpoints:
            if not 0.0 < b < self.domain.horizon:
                raise InvalidParameter("kernel breakpoints must be interior")
        vals = _eval_array(self.evaluate, self.domain.nodes)
        if not np.all(np.isfinite(vals)):
            raise InvalidParameter("kernel values must be finite on the grid")
        c = self.constants
        slack = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
        if c.lower is not None:
            if c.lower <= 0.0:
                raise InvalidParameter("declared lower bound must be positive")
            if np.any(vals < c.lower - slack):
                raise InvalidParameter("kernel dips below its declared lower bound")
        if c.upper is not None and np.any(vals > c.upper + slack):
            raise InvalidParameter("kernel exceeds its declared upper bound")
        if c.total_variation is not None:
            tv = grid_total_variation(self)
            if tv > c.total_variation + 1e-9:
                raise InvalidParameter("grid variation exceeds the declared total variation")

    def values_near(self, taus: np.ndarray) -> np.ndarray:
        return _eval_array(self.evaluate, self.domain.clip_inside(taus))


def _sided_samples(kernel: Kernel) -> tuple:
    """Grid samples augmented with one-sided values next to each breakpoint.

    Returns ``(segments, jump_sizes)`` where each segment is the value array
    along one smooth stretch, endpoints sampled just inside the stretch.
    """
    T = kernel.domain.horizon
    delta = T * _SIDE_NUDGE
    cuts = [0.0] + sorted(kernel.breakpoints) + [T]
    segments = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        inner = kernel.domain.nodes[(kernel.domain.nodes > lo) & (kernel.domain.nodes < hi)]
        xs = np.concatenate(([lo + delta], inner, [hi - delta]))
        segments.append(_eval_array(kernel.evaluate, xs))
    jumps = []
    for b in sorted(kernel.breakpoints):
        left = float(_eval_array(kernel.evaluate, np.array([b - delta]))[0])
        right = float(_eval_array(kernel.evaluate, np.array([b + delta]))[0])
        jumps.append(abs(right - left))
    return segments, jumps


def grid_total_variation(kernel: Kernel) -> float:
    """Variation over the node partition refined with one-sided jump values."""
    segments, jumps = _sided_samples(kernel)
    tv = sum(float(np.sum(np.abs(np.diff(seg)))) for seg in segments)
    return tv + sum(jumps)


# ---------------------------------------------------------------------------
# Example kernels
# ---------------------------------------------------------------------------


def exponential_kernel(alpha: float, domain: TimeDomain) -> Kernel:
    """Normalized decaying exponential weight; belongs to the regular class."""
    if alpha <= 0.0:
        raise InvalidParameter("alpha must be positive")
    T = domain.horizon
    c = alpha / (1.0 - math.exp(-alpha * T))

    def evaluate(taus):
        return c * np.exp(-alpha * np.asarray(taus, dtype=float))

    constants = KernelConstants(
        lower=c * math.exp(-alpha * T),
        upper=c,
        lipschitz=alpha * c,
        ess_bound=c,
        nondegeneracy=1.0,
        integral=1.0,
    )
    return Kernel(domain, evaluate, (), constants, kind="exponential", decay_rate=alpha, decay_scale=c)


def power_law_kernel(gamma: float, epsilon: float, domain: TimeDomain) -> Kernel:
    """Slowly varying power-law weight; generalized but not regular.

    Its total weight is strictly below 1 for every positive ``epsilon``, so
    normalization fails while boundedness and Lipschitz continuity hold.
    """
    if not 0.0 < gamma < 1.0:
        raise InvalidParameter("gamma must lie in (0, 1)")
    if epsilon <= 0.0:
        raise InvalidParameter("epsilon must be positive")
    T = domain.horizon
    c = (1.0 - gamma) / T ** (1.0 - gamma)

    def evaluate(taus):
        return c * (T - np.asarray(taus, dtype=float) + epsilon) ** (-gamma)

    total = ((T + epsilon) ** (1.0 - gamma) - epsilon ** (1.0 - gamma)) / T ** (1.0 - gamma)
    constants = KernelConstants(
        lower=c * (T + epsilon) ** (-gamma),
        upper=c * epsilon ** (-gamma),
        lipschitz=gamma * c * epsilon ** (-gamma - 1.0),
        ess_bound=c * epsilon ** (-gamma),
        nondegeneracy=total,
        total_variation=c * epsilon ** (-gamma) - c * (T + epsilon) ** (-gamma),
        integral=total,
    )
    return Kernel(domain, evaluate, (), constants, kind="power_law")


def finite_memory_kernel(window: float, domain: TimeDomain) -> Kernel:
    """Uniform weight over the most recent ``window`` time units, zero beyond.

    For ``window < T`` the jump at the window edge rules out Lipschitz
    continuity, leaving the kernel in the generalized class only; the limit
    ``window = T`` is the constant kernel, which is regular.
    """
    T = domain.horizon
    if not 0.0 < window <= T:
        raise InvalidParameter("window must lie in (0, T]")
    level = 1.0 / window

    def evaluate(taus):
        taus = np.asarray(taus, dtype=float)
        return np.where(taus <= window, level, 0.0)

    truncated = window < T
    constants = KernelConstants(
        lower=None if truncated else level,
        upper=level,
        lipschitz=None if truncated else 0.0,
        ess_bound=level,
        nondegeneracy=1.0,
        total_variation=level if truncated else 0.0,
        integral=1.0,
    )
    breakpoints = (window,) if truncated else ()
    return Kernel(domain, evaluate, breakpoints, constants, kind="finite_memory")


def sampled_kernel(samples: Trajectory) -> Kernel:
    """Kernel backed by a sampled trajectory (linear interpolation)."""
    return Kernel(
        samples.domain,
        lambda taus: samples.values(np.asarray(taus, dtype=float)),
        samples.breakpoint_times,
        KernelConstants(),
        kind="sampled",
    )


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifyTolerances:
    zero_tol: float = 1e-12       # slack below 0 tolerated for nonnegativity
    positivity_tol: float = 1e-12 # strictly-positive lower bound threshold
    norm_tol: float = 1e-6        # |integral - 1| allowance for normalization
    nondegeneracy_min: float = 1e-12
    rel_tol: float = DEFAULT_REL_TOL


@dataclass(frozen=True)
class KernelMeasurements:
    integral: float
    abs_integral: float
    min_value: float
    max_value: float
    lipschitz_estimate: float
    total_variation_estimate: float


@dataclass(frozen=True)
class AdmissibilityReport:
    class_math: bool
    class_regular: bool
    class_generalized: bool
    measurements: KernelMeasurements
    failures: tuple          # (condition tag, message) pairs
    notes: tuple

    def to_dict(self) -> dict:
        return {
            "class_math": self.class_math,
            "class_regular": self.class_regular,
            "class_generalized": self.class_generalized,
            "measurements": {
                "integral": self.measurements.integral,
                "abs_integral": self.measurements.abs_integral,
                "min_value": self.measurements.min_value,
                "max_value": self.measurements.max_value,
                "lipschitz_estimate": self.measurements.lipschitz_estimate,
                "total_variation_estimate": self.measurements.total_variation_estimate,
            },
            "failures": [list(f) for f in self.failures],
            "notes": list(self.notes),
        }


_classification_cache: "weakref.WeakKeyDictionary[Kernel, AdmissibilityReport]" = weakref.WeakKeyDictionary()


def classify(kernel: Kernel, tolerances: ClassifyTolerances | None = None) -> AdmissibilityReport:
    """Judge membership of the kernel in the three admissibility classes.

    Failures are reported, never raised.  Grid extrema are sampled
    certificates: excursions between nodes or on null sets are invisible,
    which the report notes rather than guessing around.
    """
    if tolerances is None:
        cached = _classification_cache.get(kernel)
        if cached is not None:
            return cached
    tol = tolerances or ClassifyTolerances()

    segments, jump_sizes = _sided_samples(kernel)
    all_vals = np.concatenate(segments)
    min_value = float(all_vals.min())
    max_value = float(all_vals.max())

    h = kernel.domain.spacing
    slope = max(float(np.max(np.abs(np.diff(seg)))) / h if seg.size > 1 else 0.0 for seg in segments)
    tv = sum(float(np.sum(np.abs(np.diff(seg)))) for seg in segments) + sum(jump_sizes)

    try:
        integral = integrate(kernel.evaluate, 0.0, kernel.domain.horizon, kernel.breakpoints, tol.rel_tol).value
        abs_integral = integrate(
            lambda taus: np.abs(_eval_array(kernel.evaluate, taus)),
            0.0,
            kernel.domain.horizon,
            kernel.breakpoints,
            tol.rel_tol,
        ).value
        quad_ok = True
    except NonConvergence:
        integral = math.nan
        abs_integral = math.nan
        quad_ok = False

    failures = []
    notes = [
        "extrema and variation are sampled certificates over the grid, not proofs",
        "essential bounds ignore null sets, which sampling cannot distinguish",
    ]

    if min_value < -tol.zero_tol:
        failures.append(("M1", f"kernel takes value {min_value:.6g} below 0"))
    if not (quad_ok and math.isfinite(abs_integral)):
        failures.append(("M2", "absolute integral did not converge to a finite value"))
    # M3 holds structurally: every representable kernel is built from
    # measurable pieces, so there is nothing to test at runtime.

    if min_value < tol.positivity_tol:
        failures.append(("R1", f"sampled minimum {min_value:.6g} is not bounded away from 0"))
    if not (quad_ok and abs(integral - 1.0) <= tol.norm_tol):
        failures.append(("R2", f"integral {integral:.10g} is not 1 within {tol.norm_tol:g}"))
    if kernel.breakpoints:
        spots = ", ".join(f"{b:g}" for b in kernel.breakpoints)
        failures.append(("R3", f"jump discontinuity at tau = {spots} rules out a Lipschitz bound"))
    elif kernel.constants.lipschitz is None:
        notes.append(
            f"no declared Lipschitz constant; consecutive-node slope {slope:.6g} "
            "is a lower-bound estimate of the true constant"
        )

    if not math.isfinite(max(abs(min_value), abs(max_value))):
        failures.append(("G1", "sampled values are unbounded"))
    if not (quad_ok and math.isfinite(abs_integral) and abs(integral) >= tol.nondegeneracy_min):
        failures.append(("G2", f"|integral| = {abs(integral):.6g} is degenerate (< {tol.nondegeneracy_min:g})"))
    if not math.isfinite(tv):
        failures.append(("G3", "total variation estimate is not finite"))

    tags = {tag for tag, _ in failures}
    class_math = not {"M1", "M2", "M3"} & tags
    class_regular = class_math and not {"R1", "R2", "R3"} & tags
    class_generalized = not {"G1", "G2", "G3"} & tags

    report = AdmissibilityReport(
        class_math,
        class_regular,
        class_generalized,
        KernelMeasurements(integral, abs_integral, min_value, max_value, slope, tv),
        tuple(failures),
        tuple(notes),
    )
    if tolerances is None:
        _classification_cache[kernel] = report
    return report


def is_regular(kernel: Kernel) -> bool:
    return classify(kernel).class_regular


# ---------------------------------------------------------------------------
# Kernel integrals
# ---------------------------------------------------------------------------


def cumulative_weight(kernel: Kernel, t: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Total kernel weight accumulated over a history of length ``t``."""
    t = float(kernel.domain.clip_inside(np.array([t]))[0])
    return integrate(kernel.evaluate, 0.0, t, kernel.breakpoints, rel_tol).value


def weighted_convolution(
    kernel: Kernel,
    f: Trajectory,
    t: float,
    weight: Callable | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """``int_0^t weight(s) * kernel(t - s) * |f(s)| ds``.

    Integration splits at trajectory jump times and at every ``s = t - tau_b``
    induced by a kernel breakpoint ``tau_b``, preserving the composite rule's
    convergence order for discontinuous inputs.
    """
    t = float(kernel.domain.clip_inside(np.array([t]))[0])
    if t == 0.0:
        return 0.0
    splits = set(f.breakpoint_times)
    splits.update(zero_crossings(f.values, f.domain))  # |f| kinks
    splits.update(t - tb for tb in kernel.breakpoints)

    if weight is None:
        def integrand(ss):
            ss = np.asarray(ss, dtype=float)
            return kernel.values_near(t - ss) * np.abs(f.values(ss))
    else:
        def integrand(ss):
            ss = np.asarray(ss, dtype=float)
            return _eval_array(weight, ss) * kernel.values_near(t - ss) * np.abs(f.values(ss))

    return integrate(integrand, 0.0, t, sorted(splits), rel_tol).value
