"""Time grids, piecewise trajectories, quadrature, and supremum search.

Everything else in the package is built on the primitives in this module:
a uniform grid on [0, T], trajectories represented as contiguous pieces with
explicit one-sided values at interior jump times, an adaptive composite
Simpson integrator that splits at declared jump times, and a supremum search
that combines a grid scan, one-sided jump values, and golden-section
refinement.

All objects are immutable after construction and all functions are pure, so
everything here is safe to use from multiple threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, InvalidParameter, NonConvergence

DEFAULT_GRID_N = 2049
DEFAULT_REL_TOL = 1e-8
MAX_REFINEMENTS = 14
#: Relative width at which golden-section refinement stops.
REFINE_WIDTH_FACTOR = 1e-10
#: Absolute tolerance when deciding argmax ties (smallest t wins).
TIE_TOL = 1e-12

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _eval_array(fn: Callable, xs: np.ndarray) -> np.ndarray:
    """Evaluate ``fn`` on an array, tolerating scalar-only callables."""
    xs = np.asarray(xs, dtype=float)
    try:
        out = np.asarray(fn(xs), dtype=float)
    except (TypeError, ValueError):
        out = np.array([float(fn(x)) for x in xs], dtype=float)
    if out.shape != xs.shape:
        out = np.broadcast_to(np.asarray(out, dtype=float), xs.shape).copy()
    return out


# ---------------------------------------------------------------------------
# Time domain
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TimeDomain:
    """A finite horizon [0, T] with a strictly increasing node grid."""

    horizon: float
    nodes: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise InvalidParameter("horizon must be positive and finite")
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3:
            raise InvalidParameter("grid needs at least 3 nodes")
        if nodes[0] != 0.0 or nodes[-1] != self.horizon:
            raise InvalidParameter("grid must start at 0 and end at the horizon")
        if not np.all(np.diff(nodes) > 0.0):
            raise InvalidParameter("grid nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, horizon: float, grid_points: int = DEFAULT_GRID_N) -> "TimeDomain":
        if grid_points < 3:
            raise InvalidParameter("grid_points must be at least 3")
        nodes = np.linspace(0.0, float(horizon), int(grid_points))
        nodes[0] = 0.0
        nodes[-1] = float(horizon)
        return cls(float(horizon), nodes)

    @property
    def grid_points(self) -> int:
        return int(self.nodes.size)

    @property
    def spacing(self) -> float:
        """Grid spacing; meaningful for uniform grids only."""
        return float(self.nodes[1] - self.nodes[0])

    @property
    def is_uniform(self) -> bool:
        d = np.diff(self.nodes)
        return bool(np.allclose(d, d[0], rtol=1e-12, atol=0.0))

    def clip_inside(self, ts: np.ndarray) -> np.ndarray:
        """Clip values into [0, T], rejecting anything materially outside.

        Evaluation outside the horizon is an error, not an extrapolation; a
        small guard absorbs floating-point round-off from search routines.
        """
        ts = np.asarray(ts, dtype=float)
        guard = 64.0 * np.finfo(float).eps * max(1.0, self.horizon)
        if np.any(ts < -guard) or np.any(ts > self.horizon + guard):
            raise InvalidParameter("evaluation point outside [0, T]")
        return np.clip(ts, 0.0, self.horizon)


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Jump:
    """An interior time where a trajectory carries distinct one-sided values."""

    time: float
    left: float
    right: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A sampled function on [0, T] made of contiguous continuous pieces.

    ``pieces`` is a tuple of ``(start, end, fn)`` triples tiling [0, T]; each
    ``fn`` must be continuous on its closed sub-interval.  Piece boundaries in
    the interior are recorded as :class:`Jump` entries carrying the exact
    one-sided values (the sides may be equal, e.g. at a kink).  Point
    evaluation at a jump time returns the right value.
    """

    domain: TimeDomain
    pieces: tuple
    jumps: tuple
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        starts = [p[0] for p in self.pieces]
        ends = [p[1] for p in self.pieces]
        if not self.pieces or starts[0] != 0.0 or ends[-1] != self.domain.horizon:
            raise InvalidParameter("pieces must tile [0, T]")
        for k in range(1, len(self.pieces)):
            if starts[k] != ends[k - 1]:
                raise InvalidParameter("pieces must be contiguous")
            if not starts[k - 1] < starts[k]:
                raise InvalidParameter("pieces must have positive width")
        for j in self.jumps:
            if not 0.0 < j.time < self.domain.horizon:
                raise InvalidParameter("jump times must be interior")
            if not (math.isfinite(j.left) and math.isfinite(j.right)):
                raise InvalidParameter("jump values must be finite")
        probe = self.values(self.domain.nodes)
        if not np.all(np.isfinite(probe)):
            raise InvalidParameter("trajectory values must be finite on the grid")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_callable(cls, domain: TimeDomain, fn: Callable, meta: dict | None = None) -> "Trajectory":
        """A single continuous piece covering all of [0, T]."""
        return cls(domain, ((0.0, domain.horizon, fn),), (), meta)

    @classmethod
    def from_pieces(cls, domain: TimeDomain, specs: Sequence[tuple], meta: dict | None = None) -> "Trajectory":
        """Build from ``(start, end, fn)`` triples, deriving one-sided values."""
        specs = tuple((float(a), float(b), fn) for a, b, fn in specs)
        jumps = []
        for k in range(1, len(specs)):
            t = specs[k][0]
            left = float(_eval_array(specs[k - 1][2], np.array([t]))[0])
            right = float(_eval_array(specs[k][2], np.array([t]))[0])
            jumps.append(Jump(t, left, right))
        return cls(domain, specs, tuple(jumps), meta)

    @classmethod
    def from_samples(
        cls,
        times: Sequence[float],
        values: Sequence[float],
        grid_points: int = DEFAULT_GRID_N,
        meta: dict | None = None,
    ) -> "Trajectory":
        """Piecewise-linear trajectory through ``(times, values)`` samples.

        A time appearing twice encodes a jump: the first row is the left
        value, the second the right value.
        """
        t = np.asarray(times, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.size < 2:
            raise InvalidParameter("need at least two samples")
        if t[0] != 0.0:
            raise InvalidParameter("samples must start at t = 0")
        if np.any(np.diff(t) < 0.0):
            raise InvalidParameter("sample times must be sorted")
        horizon = float(t[-1])
        domain = TimeDomain.uniform(horizon, grid_points)

        # Split the samples into runs of strictly increasing times.
        segments: list[tuple[np.ndarray, np.ndarray]] = []
        start = 0
        for k in range(1, t.size):
            if t[k] == t[k - 1]:
                if start == k - 1 and k > 1:
                    raise InvalidParameter(f"more than two rows share t = {t[k]}")
                segments.append((t[start:k], v[start:k]))
                start = k
        segments.append((t[start:], v[start:]))
        for seg_t, _ in segments:
            if seg_t.size < 2:
                raise InvalidParameter("each continuous segment needs two samples")

        def make_fn(seg_t, seg_v):
            return lambda xs: np.interp(np.asarray(xs, dtype=float), seg_t, seg_v)

        specs = [(float(seg_t[0]), float(seg_t[-1]), make_fn(seg_t, seg_v)) for seg_t, seg_v in segments]
        return cls.from_pieces(domain, specs, meta)

    @classmethod
    def from_csv(cls, source, grid_points: int = DEFAULT_GRID_N) -> "Trajectory":
        """Read the two-column ``t,value`` CSV format (header row optional)."""
        if isinstance(source, (str, Path)) and "\n" not in str(source):
            text = Path(source).read_text()
        else:
            text = str(source)
        times, values = [], []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != 2:
                raise ConfigError(f"line {lineno}: expected two columns, got {len(cells)}")
            try:
                t = float(cells[0])
                v = float(cells[1])
            except ValueError:
                if lineno == 1 and not times:
                    continue  # header row
                raise ConfigError(f"line {lineno}: could not parse '{line}' as numbers")
            times.append(t)
            values.append(v)
        if len(times) < 2:
            raise ConfigError("CSV contains fewer than two data rows")
        try:
            return cls.from_samples(times, values, grid_points)
        except InvalidParameter as exc:
            raise ConfigError(f"invalid trajectory samples: {exc}") from exc

    # -- evaluation --------------------------------------------------------

    @property
    def breakpoint_times(self) -> tuple:
        return tuple(j.time for j in self.jumps)

    def values(self, ts, side: str = "point") -> np.ndarray:
        """Evaluate at ``ts``; ``side`` picks the branch exactly at jump times.

        ``side='point'`` is the right-continuous convention.
        """
        ts = self.domain.clip_inside(np.asarray(ts, dtype=float))
        scalar = ts.ndim == 0
        ts = np.atleast_1d(ts)
        starts = np.array([p[0] for p in self.pieces])
        idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.empty_like(ts)
        for k, (_, _, fn) in enumerate(self.pieces):
            mask = idx == k
            if mask.any():
                out[mask] = _eval_array(fn, ts[mask])
        for j in self.jumps:
            at = ts == j.time
            if at.any():
                out[at] = j.left if side == "left" else j.right
        return out[0] if scalar else out

    def value(self, t: float, side: str = "point") -> float:
        return float(self.values(np.array([t]), side=side)[0])

    def node_values(self) -> np.ndarray:
        return self.values(self.domain.nodes)

    # -- serialization -----------------------------------------------------

    def to_csv(self, path=None) -> str:
        """Write node samples as ``t,value`` rows; jumps become duplicate rows.

        Floats are written with 17 significant digits so re-ingestion
        reproduces node values bit-exactly.
        """
        rows = ["t,value"]
        jump_at = {j.time: j for j in self.jumps}
        grid = sorted(set(self.domain.nodes.tolist()) | set(jump_at))
        for t in grid:
            if t in jump_at:
                j = jump_at[t]
                rows.append(f"{t:.17g},{j.left:.17g}")
                rows.append(f"{t:.17g},{j.right:.17g}")
            else:
                rows.append(f"{t:.17g},{self.value(t):.17g}")
        text = "\n".join(rows) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def constant_trajectory(domain: TimeDomain, value: float) -> Trajectory:
    return Trajectory.from_callable(domain, lambda ts: np.full_like(np.asarray(ts, dtype=float), float(value)))


def step_trajectory(domain: TimeDomain, levels: Sequence[float], times: Sequence[float]) -> Trajectory:
    """Piecewise-constant trajectory with ``len(times)`` interior jumps."""
    times = [float(t) for t in times]
    levels = [float(v) for v in levels]
    if len(levels) != len(times) + 1:
        raise InvalidParameter("need one more level than jump times")
    if any(not 0.0 < t < domain.horizon for t in times) or sorted(times) != times:
        raise InvalidParameter("jump times must be sorted and interior")
    edges = [0.0] + times + [domain.horizon]

    def make_fn(v):
        return lambda ts: np.full_like(np.asarray(ts, dtype=float), v)

    specs = [(edges[k], edges[k + 1], make_fn(levels[k])) for k in range(len(levels))]
    return Trajectory.from_pieces(domain, specs)


def indicator_trajectory(domain: TimeDomain, t_star: float) -> Trajectory:
    """The unit step that is 1 up to ``t_star`` and 0 afterwards."""
    return step_trajectory(domain, [1.0, 0.0], [t_star])


def combine(f: Trajectory, g: Trajectory, cf: float = 1.0, cg: float = 1.0) -> Trajectory:
    """Pointwise ``cf*f + cg*g`` with exact one-sided values at all jumps."""
    if f.domain.horizon != g.domain.horizon:
        raise InvalidParameter("trajectories must share the horizon")
    domain = f.domain if f.domain.grid_points >= g.domain.grid_points else g.domain
    cuts = sorted(set(f.breakpoint_times) | set(g.breakpoint_times))

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        return cf * f.values(ts) + cg * g.values(ts)

    edges = [0.0] + cuts + [domain.horizon]
    specs = tuple((edges[k], edges[k + 1], fn) for k in range(len(edges) - 1))
    jumps = tuple(
        Jump(
            t,
            cf * f.value(t, "left") + cg * g.value(t, "left"),
            cf * f.value(t, "right") + cg * g.value(t, "right"),
        )
        for t in cuts
    )
    return Trajectory(domain, specs, jumps)


def regrid(f: Trajectory, domain: TimeDomain) -> Trajectory:
    """The same trajectory carried on a different grid over the same horizon."""
    if domain.horizon != f.domain.horizon:
        raise InvalidParameter("regrid cannot change the horizon")
    return Trajectory(domain, f.pieces, f.jumps, f.meta)


def scale(f: Trajectory, c: float) -> Trajectory:
    """Pointwise ``c*f``."""
    def fn(ts):
        return c * f.values(np.asarray(ts, dtype=float))

    jumps = tuple(Jump(j.time, c * j.left, c * j.right) for j in f.jumps)
    specs = tuple((a, b, fn) for a, b, _ in f.pieces)
    return Trajectory(f.domain, specs, jumps)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    refinement_levels: int

    def __post_init__(self):
        if self.error_estimate < 0.0:
            raise InvalidParameter("error estimate must be nonnegative")
        if self.refinement_levels < 1:
            raise InvalidParameter("refinement level count must be at least 1")


def _simpson_segment(fn, lo: float, hi: float, panels: int) -> float:
    """Composite Simpson with ``panels`` (even) panels on [lo, hi].

    Endpoint samples are nudged inward by one ulp so a segment bounded by a
    jump time samples the correct branch; the perturbation is at rounding
    level for continuous integrands.
    """
    xs = np.linspace(lo, hi, panels + 1)
    xs[0] = np.nextafter(lo, hi)
    xs[-1] = np.nextafter(hi, lo)
    ys = _eval_array(fn, xs)
    h = (hi - lo) / panels
    return float(h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum()))


def integrate(
    fn: Callable,
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    rel_tol: float = DEFAULT_REL_TOL,
    max_refinements: int = MAX_REFINEMENTS,
) -> QuadratureResult:
    """Adaptive composite-Simpson integral of ``fn`` over [a, b].

    The interval is split at every declared breakpoint, each sub-interval is
    integrated by composite Simpson, and the panel count is doubled until two
    successive totals differ by at most ``rel_tol * (1 + |value|)``.  The
    error estimate is the Richardson estimate ``|diff| / 15`` from the final
    halving.

    Raises:
        NonConvergence: the refinement cap was reached without meeting the
            tolerance, which signals an integrand too irregular for the
            configured splits.
    """
    if rel_tol <= 0.0:
        raise InvalidParameter("rel_tol must be positive")
    if a > b:
        raise InvalidParameter("integration bounds must satisfy a <= b")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)
    cuts = sorted({float(c) for c in breakpoints if a < c < b})
    edges = [a] + cuts + [b]
    segments = list(zip(edges[:-1], edges[1:]))

    def total(panels: int) -> float:
        return sum(_simpson_segment(fn, lo, hi, panels) for lo, hi in segments)

    panels = 4
    prev = total(panels)
    for level in range(1, max_refinements + 1):
        panels *= 2
        cur = total(panels)
        diff = abs(cur - prev)
        if diff <= rel_tol * (1.0 + abs(cur)):
            return QuadratureResult(cur, diff / 15.0, level)
        prev = cur
    raise NonConvergence(
        f"quadrature did not reach rel_tol={rel_tol:g} after {max_refinements} halvings",
        value=prev,
        error_estimate=abs(diff) / 15.0,
    )


# ---------------------------------------------------------------------------
# Supremum search
# ---------------------------------------------------------------------------


class SupremumResult(NamedTuple):
    value: float
    argmax: float
    is_interior: bool


@dataclass(frozen=True)
class ExtremeScan:
    """Full outcome of a supremum scan, including both tie-break ends."""

    value: float
    first_argmax: float
    last_argmax: float

    @property
    def result(self) -> SupremumResult:
        return SupremumResult(self.value, self.first_argmax, self.first_argmax > 0.0)


def _golden_max(fn, lo: float, hi: float, width_tol: float) -> list:
    """Golden-section maximization on [lo, hi].

    Returns refinement candidates: the midpoint of the final bracket (the
    located maximizer) and any probe that genuinely beats it, so the search
    never under-reports a probed value while flat peaks still resolve to a
    single precise time.
    """
    if hi - lo <= width_tol:
        return []
    probes = []
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = float(_eval_array(fn, np.array([c]))[0])
    fd = float(_eval_array(fn, np.array([d]))[0])
    probes += [(c, fc), (d, fd)]
    while hi - lo > width_tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = float(_eval_array(fn, np.array([c]))[0])
            probes.append((c, fc))
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = float(_eval_array(fn, np.array([d]))[0])
            probes.append((d, fd))
    mid = 0.5 * (lo + hi)
    v_mid = float(_eval_array(fn, np.array([mid]))[0])
    out = [(mid, v_mid)]
    out.extend((t, v) for t, v in probes if v > v_mid + TIE_TOL)
    return out


def supremum_scan(
    fn: Callable,
    domain: TimeDomain,
    breakpoints: Sequence[float] = (),
    candidates: Sequence[tuple] = (),
    grid_values: np.ndarray | None = None,
) -> ExtremeScan:
    """Grid scan plus local golden-section refinement around the grid argmax.

    ``candidates`` carries extra ``(t, value)`` pairs, typically one-sided
    values at jump times that point evaluation of ``fn`` cannot see.
    ``grid_values`` may supply precomputed values of ``fn`` at the grid nodes
    when they are expensive (the refinement pass still calls ``fn``).  The
    reported value never under-reports relative to its own samples; it is a
    documented under-approximation of the true supremum between samples.
    Ties are resolved to the smallest t (``first_argmax``); ``last_argmax``
    reports the largest tied time.
    """
    ts = domain.nodes
    vs = np.asarray(grid_values, dtype=float) if grid_values is not None else _eval_array(fn, ts)
    cand_t = list(ts)
    cand_v = list(vs)
    inner = [float(b) for b in breakpoints if 0.0 < b < domain.horizon]
    for b in inner:
        cand_t.append(b)
        cand_v.append(float(_eval_array(fn, np.array([b]))[0]))
    for t, v in candidates:
        cand_t.append(float(t))
        cand_v.append(float(v))

    # Local refinement around the best grid node, confined to the enclosing
    # cell and never crossing a declared breakpoint.
    k = int(np.argmax(vs))
    lo = ts[k - 1] if k > 0 else ts[0]
    hi = ts[k + 1] if k + 1 < ts.size else ts[-1]
    for b in inner:
        if lo < b <= ts[k]:
            lo = b
        if ts[k] <= b < hi:
            hi = b
    for t, v in _golden_max(fn, lo, hi, domain.horizon * REFINE_WIDTH_FACTOR):
        cand_t.append(t)
        cand_v.append(v)

    cand_t = np.asarray(cand_t)
    cand_v = np.asarray(cand_v)
    vmax = float(cand_v.max())
    tied = cand_t[cand_v >= vmax - TIE_TOL]
    return ExtremeScan(vmax, float(tied.min()), float(tied.max()))


def supremum(
    fn: Callable,
    domain: TimeDomain,
    breakpoints: Sequence[float] = (),
    candidates: Sequence[tuple] = (),
) -> SupremumResult:
    """Approximate ``sup fn`` over [0, T]; see :func:`supremum_scan`."""
    return supremum_scan(fn, domain, breakpoints, candidates).result


def sup_norm_scan(f: Trajectory) -> ExtremeScan:
    def fn(ts):
        return np.abs(f.values(np.asarray(ts, dtype=float)))

    cands = []
    for j in f.jumps:
        cands.append((j.time, abs(j.left)))
        cands.append((j.time, abs(j.right)))
    return supremum_scan(fn, f.domain, f.breakpoint_times, cands)


def sup_norm(f: Trajectory) -> float:
    """Supremum of |f| including one-sided values at jump times."""
    return sup_norm_scan(f).value


# ---------------------------------------------------------------------------
# Zero crossings and causal convolution profiles
# ---------------------------------------------------------------------------


def zero_crossings(fn: Callable, domain: TimeDomain, scan_refine: int = 2) -> tuple:
    """Interior sign-change times of ``fn``, located by vectorized bisection.

    The scan grid is the node grid refined ``scan_refine``-fold; crossings
    between scan points are bisected to an absolute resolution of
    ``T * 1e-13``.  Tangential zeros without a sign change are not reported
    (they do not produce kinks in ``|fn|``).
    """
    ts = np.linspace(0.0, domain.horizon, scan_refine * (domain.grid_points - 1) + 1)
    vs = _eval_array(fn, ts)
    exact = ts[1:-1][vs[1:-1] == 0.0]
    prod = vs[:-1] * vs[1:]
    lo = ts[:-1][prod < 0.0].copy()
    hi = ts[1:][prod < 0.0].copy()
    flo = vs[:-1][prod < 0.0].copy()
    steps = int(math.ceil(math.log2(max(2.0, 1.0 / (domain.horizon * 1e-13) * (ts[1] - ts[0])))))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fmid = _eval_array(fn, mid)
        left = flo * fmid > 0.0
        lo = np.where(left, mid, lo)
        flo = np.where(left, fmid, flo)
        hi = np.where(left, hi, mid)
    roots = 0.5 * (lo + hi)
    found = sorted(set(np.concatenate([exact, roots]).tolist()))
    return tuple(t for t in found if 0.0 < t < domain.horizon)


def exp_causal_profile(
    rate: float,
    scale_factor: float,
    g_fn: Callable,
    domain: TimeDomain,
    splits: Sequence[float] = (),
    rel_tol: float = DEFAULT_REL_TOL,
) -> np.ndarray:
    """``int_0^{t_i} scale * exp(-rate*(t_i - s)) * g(s) ds`` at every node.

    Marches the one-step decay recurrence
    ``P(t+h) = exp(-rate*h) * P(t) + local increment``.  Each panel increment
    is computed by a midpoint Simpson rule and its halved refinement; panels
    whose two estimates disagree beyond their share of the tolerance, or that
    touch a declared split time (a jump or kink of ``g``), are re-integrated
    adaptively with the split honoured.  ``rate`` may be zero (constant
    kernels).
    """
    if not domain.is_uniform:
        raise InvalidParameter("the decay recurrence requires a uniform grid")
    n = domain.grid_points
    h = domain.spacing
    decay = math.exp(-rate * h)
    gv = _eval_array(g_fn, domain.nodes)
    q1 = _eval_array(g_fn, domain.nodes[:-1] + 0.25 * h)
    q2 = _eval_array(g_fn, domain.nodes[:-1] + 0.50 * h)
    q3 = _eval_array(g_fn, domain.nodes[:-1] + 0.75 * h)
    w = [math.exp(-rate * h * k / 4.0) for k in range(5)]  # w[k] = decay over k quarter-steps
    coarse = scale_factor * h / 6.0 * (w[4] * gv[:-1] + 4.0 * w[2] * q2 + w[0] * gv[1:])
    fine = scale_factor * h / 12.0 * (
        (w[4] * gv[:-1] + 4.0 * w[3] * q1 + w[2] * q2)
        + (w[2] * q2 + 4.0 * w[1] * q3 + w[0] * gv[1:])
    )
    inc = fine
    panel_tol = rel_tol * (h / domain.horizon + np.abs(fine))
    needs_work = np.abs(fine - coarse) > panel_tol

    splits = sorted({float(c) for c in splits if 0.0 <= c <= domain.horizon})
    by_panel: dict = {}
    for c in splits:
        first = max(0, int(math.floor(c / h)) - 1)
        for i in range(first, min(n - 2, first + 2) + 1):
            if domain.nodes[i] <= c <= domain.nodes[i + 1]:
                needs_work[i] = True
                by_panel.setdefault(i, []).append(c)
    for i in np.nonzero(needs_work)[0]:
        a = float(domain.nodes[i])
        b = float(domain.nodes[i + 1])

        def integrand(ss, b=b):
            ss = np.asarray(ss, dtype=float)
            return scale_factor * np.exp(-rate * (b - ss)) * _eval_array(g_fn, ss)

        inc[i] = integrate(integrand, a, b, by_panel.get(int(i), ()), rel_tol * 1e-2).value

    out = np.empty(n)
    out[0] = 0.0
    for i in range(n - 1):
        out[i + 1] = decay * out[i] + inc[i]
    return out
