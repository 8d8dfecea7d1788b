"""Skorohod M1 distances between step paths.

For scalar paths the M1 distance equals the Frechet distance between the
completed graphs, viewed as polylines in the (t, z) plane under the
max-norm. ``m1_distance`` brackets it with an exact free-space decision
procedure; ``m1_oracle`` is the independent sampled-DP check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .paths import StepFunction, completed_graph, linear_combination

DEFAULT_TOL = 1e-4


@dataclass(frozen=True)
class MetricResult:
    """A distance together with a certified bracket.

    ``value`` is the reported distance and always equals ``upper_bound``,
    so it is attained by an admissible matching. ``refinement_levels``
    counts calls to the decision procedure.
    """

    value: float
    lower_bound: float
    upper_bound: float
    refinement_levels: int

    @property
    def width(self) -> float:
        return self.upper_bound - self.lower_bound

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "refinement_levels": self.refinement_levels,
        }


def _require_scalar(*paths: StepFunction) -> None:
    for p in paths:
        if p.dim != 1:
            raise ValueError(f"expected a scalar path, got dim={p.dim}")


def _require_same_dim(x: StepFunction, y: StepFunction) -> None:
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")


def _canonical_pair(x: StepFunction, y: StepFunction):
    # run the same computation for (x, y) and (y, x) so symmetry is exact
    kx = (x.n_jumps, x.initial.tobytes(), x.times.tobytes(), x.values.tobytes())
    ky = (y.n_jumps, y.initial.tobytes(), y.times.tobytes(), y.values.tobytes())
    return (x, y) if kx <= ky else (y, x)


def uniform_distance(x: StepFunction, y: StepFunction) -> float:
    """sup_t |x(t) - y(t)| in the max-norm.

    Between jump times both paths are constant, so the supremum is over
    the initial values and the values after each jump in the merged times;
    left limits at a jump time equal the values after the previous one.
    """
    _require_same_dim(x, y)
    return float(_kernels.uniform_gap(x.initial, x.times, x.values, y.initial, y.times, y.values))


def _value_range_bound(x: StepFunction, y: StepFunction) -> float:
    # matched points are within eps in value, so endpoints, maxima and minima are too
    vx, vy = x.all_values()[:, 0], y.all_values()[:, 0]
    return float(max(abs(vx[0] - vy[0]), abs(vx[-1] - vy[-1]),
                     abs(vx.max() - vy.max()), abs(vx.min() - vy.min())))


def m1_distance(x: StepFunction, y: StepFunction, tol: float = DEFAULT_TOL,
                max_cells: int | None = None) -> MetricResult:
    """Scalar M1 distance, bracketed to width ``tol``.

    Starts from the endpoint and range lower bound, gallops upward until
    the decision procedure accepts, then bisects. The uniform distance caps
    the search.

    ``max_cells`` caps the free-space cells visited by any one decision.
    When a decision runs out, the certified bracket reached so far is
    returned and its width may exceed ``tol``. The default has no cap.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    _require_scalar(x, y)
    if x == y:
        return MetricResult(0.0, 0.0, 0.0, 0)
    x, y = _canonical_pair(x, y)
    if x.n_jumps == 0 or y.n_jumps == 0:
        # a constant path has only u == const representations; the time
        # components can be taken equal, leaving the uniform distance
        d = uniform_distance(x, y)
        return MetricResult(d, d, d, 0)
    P = completed_graph(x).points
    Q = completed_graph(y).points
    budget = int(max_cells) if max_cells else 0

    lo = _value_range_bound(x, y)
    hi = uniform_distance(x, y)
    calls = 0
    if hi - lo <= tol:
        return MetricResult(hi, lo, hi, calls)

    calls += 1
    r = _kernels.frechet_decide_banded(P, Q, lo, budget)
    if r == 1:
        return MetricResult(lo, lo, lo, calls)
    if r < 0:
        return MetricResult(hi, lo, hi, calls)

    step = tol
    while lo + step < hi:
        eps = lo + step
        calls += 1
        r = _kernels.frechet_decide_banded(P, Q, eps, budget)
        if r < 0:
            return MetricResult(hi, lo, hi, calls)
        if r == 1:
            hi = eps
            break
        lo = eps
        step *= 2.0

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        calls += 1
        r = _kernels.frechet_decide_banded(P, Q, mid, budget)
        if r < 0:
            break
        if r == 1:
            hi = mid
        else:
            lo = mid
    return MetricResult(hi, lo, hi, calls)


def m1_decide(x: StepFunction, y: StepFunction, eps: float) -> bool:
    """Whether d_M1(x, y) <= eps for scalar paths."""
    _require_scalar(x, y)
    x, y = _canonical_pair(x, y)
    return _kernels.frechet_decide_banded(completed_graph(x).points, completed_graph(y).points, eps) == 1


def m1_oracle(x: StepFunction, y: StepFunction, samples_per_segment: int = 2000) -> float:
    """Brute-force M1 value from a discrete monotone matching of sampled graphs.

    Every segment of both completed graphs is sampled at
    ``samples_per_segment`` points; the result converges to the M1
    distance from above as the density grows.
    """
    _require_scalar(x, y)
    if int(samples_per_segment) < 2:
        raise ValueError("samples_per_segment must be at least 2")
    A = _kernels.sample_polyline(completed_graph(x).points, int(samples_per_segment))
    B = _kernels.sample_polyline(completed_graph(y).points, int(samples_per_segment))
    return float(_kernels.discrete_frechet(A, B))


def oracle_discretization_bound(x: StepFunction, y: StepFunction, samples_per_segment: int) -> float:
    """Largest gap between consecutive samples in either graph.

    The oracle exceeds the true distance by at most this amount.
    """
    worst = 0.0
    for f in (x, y):
        seg = np.diff(completed_graph(f).points, axis=0)
        worst = max(worst, float(np.max(np.abs(seg))) / (samples_per_segment - 1))
    return worst


def weak_m1_distance(x: StepFunction, y: StepFunction, tol: float = DEFAULT_TOL,
                     max_cells: int | None = None) -> MetricResult:
    """Product (weak M1) metric: the largest coordinatewise M1 distance.

    ``max_cells`` is passed to each coordinate's ``m1_distance``.
    """
    _require_same_dim(x, y)
    parts = [
        m1_distance(
            StepFunction(x.initial[j : j + 1], x.times, x.values[:, j : j + 1]),
            StepFunction(y.initial[j : j + 1], y.times, y.values[:, j : j + 1]),
            tol,
            max_cells,
        )
        for j in range(x.dim)
    ]
    return MetricResult(
        value=max(p.value for p in parts),
        lower_bound=max(p.lower_bound for p in parts),
        upper_bound=max(p.upper_bound for p in parts),
        refinement_levels=sum(p.refinement_levels for p in parts),
    )


def strong_m1_lower_bound(x: StepFunction, y: StepFunction, c, tol: float = DEFAULT_TOL,
                          max_cells: int | None = None) -> float:
    """Certified lower bound on the strong M1 distance via a linear functional.

    A joint representation pair within eps maps to representations of
    <c, x> and <c, y> within max(1, |c|_1) * eps, so the scalar M1 lower
    bound of the projected paths divided by that factor bounds d_s(x, y).
    """
    _require_same_dim(x, y)
    c = np.asarray(c, dtype=float).reshape(-1)
    if not np.any(c != 0.0):
        raise ValueError("coefficient vector must be nonzero")
    res = m1_distance(linear_combination(x, c), linear_combination(y, c), tol, max_cells)
    return res.lower_bound / max(1.0, float(np.sum(np.abs(c))))
