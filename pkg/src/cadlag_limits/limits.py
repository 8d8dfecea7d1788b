"""Partial-sum processes, exceedance point processes and tail estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metrics import DEFAULT_TOL, weak_m1_distance
from .models import Sample, make_rng, normalizing_an, pareto_truncated_mean, truncated_mean
from .paths import StepFunction


class EstimationError(ValueError):
    """Raised when an estimator has nothing to work with (no exceedances, no windows)."""

    def __init__(self, message: str, **counts):
        detail = ", ".join(f"{k}={v}" for k, v in counts.items())
        super().__init__(f"{message} ({detail})" if detail else message)
        self.counts = counts


def default_block_length(n: int) -> int:
    return max(1, int(math.floor(n**0.6)))


def sample_an(sample: Sample, a_n: float | None = None) -> float:
    """Normalizing constant for ``sample``.

    Pareto-driven models use n**(1/alpha). For the recursion there is no
    closed form and the empirical (1 - 1/n) quantile of the norms is used.
    """
    if a_n is not None:
        return float(a_n)
    if sample.config.model == "sre":
        return float(np.quantile(sample.norms(), 1.0 - 1.0 / sample.n))
    return normalizing_an(sample.config.alpha, sample.n)


def _centering(sample: Sample, a_n: float, lower: float, upper: float) -> np.ndarray:
    c = truncated_mean(sample.config, a_n, lower, upper)
    if c is not None:
        return c
    scaled = sample.values / a_n
    mask = (np.abs(scaled) > lower) & (np.abs(scaled) <= upper)
    return np.mean(np.where(mask, scaled, 0.0), axis=0)


def _jump_times(n: int) -> np.ndarray:
    return np.arange(1, n + 1) / n


def partial_sum_process(sample: Sample, alpha: float | None = None, *, a_n: float | None = None,
                        center: bool = True) -> StepFunction:
    """V_n: scaled partial sums centred by the truncated mean on {|x| <= 1}.

    ``alpha`` defaults to the sample's own configuration and is accepted
    for call-site symmetry with the other estimators.
    """
    a = sample_an(sample, a_n)
    inc = sample.values / a
    if center:
        inc = inc - _centering(sample, a, 0.0, 1.0)
    return StepFunction.from_increments(_jump_times(sample.n), inc)


def truncated_partial_sum(sample: Sample, alpha: float | None = None, u: float = 0.5, *,
                          a_n: float | None = None) -> StepFunction:
    """V_n^(u): only entries with |X^j| / a_n > u, centred on (u, 1]."""
    if not u > 0:
        raise ValueError("u must be positive")
    a = sample_an(sample, a_n)
    scaled = sample.values / a
    inc = np.where(np.abs(scaled) > u, scaled, 0.0) - _centering(sample, a, u, 1.0)
    return StepFunction.from_increments(_jump_times(sample.n), inc)


def small_jump_path(sample: Sample, u: float, *, a_n: float | None = None) -> StepFunction:
    """Centred partial sums of the entries with |X^j| / a_n <= u."""
    a = sample_an(sample, a_n)
    scaled = sample.values / a
    inc = np.where(np.abs(scaled) <= u, scaled, 0.0) - _centering(sample, a, 0.0, u)
    return StepFunction.from_increments(_jump_times(sample.n), inc)


def small_jump_statistic(sample: Sample, alpha: float | None = None, u: float = 0.1, *,
                         a_n: float | None = None) -> float:
    """max_k of the max-norm of the centred small-jump partial sum."""
    if not 0 < u <= 1:
        raise ValueError("u must lie in (0, 1]")
    a = sample_an(sample, a_n)
    scaled = sample.values / a
    inc = np.where(np.abs(scaled) <= u, scaled, 0.0) - _centering(sample, a, 0.0, u)
    return float(np.max(np.abs(np.cumsum(inc, axis=0))))


# point measures ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PointMeasure:
    """Finite point measure on [0, 1] x {x : |x| > cutoff}."""

    times: np.ndarray
    marks: np.ndarray
    cutoff: float

    def __init__(self, times, marks, cutoff: float, dim: int | None = None):
        t = np.asarray(times, dtype=float).reshape(-1)
        m = np.asarray(marks, dtype=float)
        if m.ndim == 1:
            m = m.reshape(t.size, -1) if t.size else m.reshape(0, dim or 1)
        if m.shape[0] != t.size:
            raise ValueError("need one mark per atom")
        if not cutoff > 0:
            raise ValueError("cutoff must be positive")
        if t.size:
            if np.any((t < 0) | (t > 1)):
                raise ValueError("atom times must lie in [0, 1]")
            if np.any(np.max(np.abs(m), axis=1) <= cutoff):
                raise ValueError("every mark must have norm above the cutoff")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "marks", m)
        object.__setattr__(self, "cutoff", float(cutoff))

    @property
    def dim(self) -> int:
        return self.marks.shape[1]

    def __len__(self) -> int:
        return self.times.size


def summation_functional(eta: PointMeasure, u: float) -> StepFunction:
    """Cumulative sum of mark coordinates with u < |x^j| < inf, jumping at atom times."""
    if u < eta.cutoff:
        raise ValueError(f"u={u} is below the measure's cutoff {eta.cutoff}")
    d = eta.dim
    if len(eta) == 0:
        return StepFunction(np.zeros(d))
    keep = (np.abs(eta.marks) > u) & np.isfinite(eta.marks)
    contrib = np.where(keep, eta.marks, 0.0)
    uniq, inv = np.unique(eta.times, return_inverse=True)
    sums = np.zeros((uniq.size, d))
    np.add.at(sums, inv, contrib)
    initial = np.zeros(d)
    if uniq[0] == 0.0:
        initial = sums[0]
        uniq, sums = uniq[1:], sums[1:]
    return StepFunction(initial, uniq, initial + np.cumsum(sums, axis=0))


@dataclass(frozen=True)
class LambdaReport:
    ok: bool
    violations: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def lambda_membership(eta: PointMeasure, u: float) -> LambdaReport:
    """Check the continuity set of the summation functional.

    Violations: an atom of norm > u at time 0 or 1; a coordinate with
    |x^j| equal to u or infinite; or two open orthants charged at a
    common time (atoms with a zero coordinate lie in no orthant).
    """
    out = []
    norms = np.max(np.abs(eta.marks), axis=1) if len(eta) else np.empty(0)
    for i in np.flatnonzero(((eta.times == 0.0) | (eta.times == 1.0)) & (norms > u)):
        out.append(f"atom {i} at boundary time {eta.times[i]:g} with norm > u")
    bad = np.any((np.abs(eta.marks) == u) | ~np.isfinite(eta.marks), axis=1)
    for i in np.flatnonzero(bad):
        out.append(f"atom {i} has a coordinate of magnitude exactly u or infinite")
    full = np.all(eta.marks != 0.0, axis=1)
    signs = np.sign(eta.marks)
    for t in np.unique(eta.times[full]):
        at = full & (eta.times == t)
        orthants = np.unique(signs[at], axis=0)
        if orthants.shape[0] > 1:
            out.append(f"{orthants.shape[0]} orthants charged at time {t:g}")
    return LambdaReport(not out, tuple(out))


def exceedance_process(sample: Sample, alpha: float | None = None, u: float = 1.0, *,
                       a_n: float | None = None) -> PointMeasure:
    """Atoms (i / n, X_i / a_n) with |X_i| / a_n > u."""
    if not u > 0:
        raise ValueError("u must be positive")
    a = sample_an(sample, a_n)
    scaled = sample.values / a
    idx = np.flatnonzero(np.max(np.abs(scaled), axis=1) > u)
    return PointMeasure((idx + 1) / sample.n, scaled[idx], u, dim=sample.dim)


def psi_continuity_probe(eta: PointMeasure, u: float, jitter: float, seed=0,
                         tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Perturb ``eta`` and measure how far the summed path moves in d_p.

    Atom times move by at most ``jitter``; mark noise is split across the
    atoms so that its total is at most ``jitter``. Returns the realized
    input perturbation size and the weak M1 distance between the paths.
    """
    report = lambda_membership(eta, u)
    if not report:
        raise ValueError("measure is outside the continuity set: " + "; ".join(report.violations))
    if jitter < 0:
        raise ValueError("jitter must be nonnegative")
    k, d = len(eta), eta.dim
    if k == 0 or jitter == 0:
        return 0.0, 0.0
    mags = np.abs(eta.marks)
    if np.any(np.abs(mags - u) <= jitter):
        raise ValueError("atom coordinates must stay farther than jitter from u")
    active = np.any(mags > u, axis=1)
    if np.any(active & ((eta.times <= jitter) | (eta.times >= 1.0 - jitter))):
        raise ValueError("contributing atoms must lie farther than jitter from the boundary")
    rng = make_rng(seed)
    dt = rng.uniform(-1.0, 1.0, k) * jitter
    dm = rng.uniform(-1.0, 1.0, (k, d)) * (jitter / k)
    new_marks = eta.marks + dm
    new_times = np.clip(eta.times + dt, 0.0, 1.0)
    cutoff = min(eta.cutoff, 0.5 * float(np.max(np.abs(new_marks), axis=1).min()))
    moved = PointMeasure(new_times, new_marks, cutoff)
    size = max(float(np.max(np.abs(dt))), float(np.sum(np.max(np.abs(dm), axis=1))))
    dist = weak_m1_distance(summation_functional(moved, u), summation_functional(eta, u), tol)
    return size, dist.value


# clusters and the extremal index -----------------------------------------


@dataclass(frozen=True, eq=False)
class ClusterSample:
    """One block whose maximum norm exceeds a_n u, values scaled by a_n u."""

    block: int
    offset: int
    marks: np.ndarray

    @property
    def norms(self) -> np.ndarray:
        return np.max(np.abs(self.marks), axis=1)

    @property
    def exceedance_count(self) -> int:
        return int(np.count_nonzero(self.norms > 1.0))

    @property
    def first_exceedance(self) -> int:
        """Sample index (0-based) of the first exceedance in the block."""
        return self.offset + int(np.argmax(self.norms > 1.0))


def _check_block(n: int, r_n: int) -> None:
    if not 1 <= r_n <= n:
        raise ValueError(f"block length r_n={r_n} must lie in [1, n={n}]")


def extract_clusters(sample: Sample, alpha: float | None = None, u: float = 1.0,
                     r_n: int | None = None, *, a_n: float | None = None) -> list[ClusterSample]:
    """Blocks of length r_n (k_n = n // r_n of them) whose maximum norm exceeds a_n u."""
    r = default_block_length(sample.n) if r_n is None else int(r_n)
    _check_block(sample.n, r)
    k = sample.n // r
    thr = sample_an(sample, a_n) * u
    norms = sample.norms()[: k * r].reshape(k, r)
    hits = np.flatnonzero(norms.max(axis=1) > thr)
    return [ClusterSample(int(b), int(b * r), sample.values[b * r : (b + 1) * r] / thr) for b in hits]


@dataclass(frozen=True)
class BlockCounts:
    blocks: int
    exceeding_blocks: int
    observations: int
    exceedances: int

    def __add__(self, other: "BlockCounts") -> "BlockCounts":
        return BlockCounts(
            self.blocks + other.blocks,
            self.exceeding_blocks + other.exceeding_blocks,
            self.observations + other.observations,
            self.exceedances + other.exceedances,
        )


def block_counts(sample: Sample, u: float, r_n: int, *, a_n: float | None = None) -> BlockCounts:
    _check_block(sample.n, r_n)
    k = sample.n // r_n
    thr = sample_an(sample, a_n) * u
    over = (sample.norms()[: k * r_n] > thr).reshape(k, r_n)
    return BlockCounts(k, int(over.any(axis=1).sum()), k * r_n, int(over.sum()))


def theta_from_counts(c: BlockCounts, r_n: int) -> float:
    """Block-exceedance frequency over r_n times the marginal exceedance frequency."""
    if c.exceedances == 0 or c.blocks == 0:
        raise EstimationError("no exceedances to estimate theta from", blocks=c.blocks,
                              exceeding_blocks=c.exceeding_blocks, exceedances=c.exceedances)
    return (c.exceeding_blocks / c.blocks) / (r_n * c.exceedances / c.observations)


def estimate_theta_blocks(sample: Sample, alpha: float | None = None, u: float = 1.0,
                          r_n: int | None = None, *, a_n: float | None = None) -> float:
    r = default_block_length(sample.n) if r_n is None else int(r_n)
    return theta_from_counts(block_counts(sample, u, r, a_n=a_n), r)


@dataclass(frozen=True, eq=False)
class TailWindow:
    """Observations X_{t-m}, ..., X_{t+m} divided by the threshold."""

    center: int
    window: np.ndarray

    @property
    def m(self) -> int:
        return (self.window.shape[0] - 1) // 2

    @property
    def norm_at_center(self) -> float:
        return float(np.max(np.abs(self.window[self.m])))


def tail_window_array(sample: Sample, threshold: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Centers and stacked windows, shape (N, 2m + 1, d); boundary windows dropped."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    x = sample.values
    n = x.shape[0]
    centers = np.flatnonzero(np.max(np.abs(x), axis=1) > threshold)
    centers = centers[(centers >= m) & (centers < n - m)]
    idx = centers[:, None] + np.arange(-m, m + 1)[None, :]
    return centers, x[idx] / threshold


def estimate_tail_process(sample: Sample, threshold: float, m: int) -> list[TailWindow]:
    """Windows around every exceedance of ``threshold`` by |X_t|."""
    centers, arr = tail_window_array(sample, threshold, m)
    return [TailWindow(int(c), w) for c, w in zip(centers, arr)]


def _stack(windows) -> np.ndarray:
    if isinstance(windows, np.ndarray):
        return windows
    if len(windows) == 0:
        raise EstimationError("no tail windows", windows=0)
    return np.stack([w.window for w in windows])


def spectral_theta_terms(windows, alpha: float) -> np.ndarray:
    """Per-window sup_{i>=0} |Theta_i|^alpha - sup_{i>=1} |Theta_i|^alpha."""
    W = _stack(windows)
    if W.shape[0] == 0:
        raise EstimationError("no tail windows", windows=0)
    m = (W.shape[1] - 1) // 2
    norms = np.max(np.abs(W), axis=2)
    theta = norms[:, m:] / norms[:, m : m + 1]
    later = theta[:, 1:].max(axis=1) ** alpha if m > 0 else np.zeros(W.shape[0])
    return np.maximum(1.0, later) - later


def theta_from_spectral(windows, alpha: float) -> float:
    """Extremal index as E[sup_{i>=0} |Theta_i|^alpha - sup_{i>=1} |Theta_i|^alpha]."""
    return float(np.mean(spectral_theta_terms(windows, alpha)))


def nu_u_estimate(windows, alpha: float, u: float, x_grid) -> np.ndarray:
    """Monte Carlo nu^(u)((x, inf)) from tail windows used as tail-process draws.

    Each window contributes u * sum_{i>=0} Y_i^j 1{|Y_i^j| > 1} provided
    no earlier entry has norm above 1. Rows of ``x_grid`` are lower
    corners of product boxes; scalars are allowed for d = 1.
    """
    if not u > 0:
        raise ValueError("u must be positive")
    W = _stack(windows)
    m = (W.shape[1] - 1) // 2
    norms = np.max(np.abs(W), axis=2)
    ok = norms[:, :m].max(axis=1) <= 1.0 if m > 0 else np.ones(W.shape[0], dtype=bool)
    if not ok.any():
        raise EstimationError("no window satisfies the conditioning", windows=W.shape[0])
    fwd = W[:, m:, :]
    S = u * np.sum(np.where(np.abs(fwd) > 1.0, fwd, 0.0), axis=1)
    x = np.asarray(x_grid, dtype=float)
    scalar_grid = x.ndim <= 1
    x = x.reshape(-1, 1) if scalar_grid else x
    if x.shape[1] != S.shape[1]:
        raise ValueError("x_grid rows must match the window dimension")
    hit = np.all(S[None, :, :] > x[:, None, :], axis=2) & ok[None, :]
    return u ** (-alpha) * hit.mean(axis=1)


def karamata_ratio(alpha: float, u: float, n: int) -> float:
    """E[|X| 1{|X| <= u a_n}] / (u a_n P(|X| > u a_n)) for Pareto(alpha) noise."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("the truncated-mean ratio is finite only for alpha in (0, 1)")
    if not u > 0:
        raise ValueError("u must be positive")
    x = u * normalizing_an(alpha, n)
    tail = min(1.0, x ** (-alpha))
    return pareto_truncated_mean(alpha, 0.0, x) / (x * tail)


def opposite_sign_check(windows) -> np.ndarray:
    """Per coordinate: True iff no window mixes strictly positive and negative entries."""
    if len(windows) == 0:
        return np.ones(0, dtype=bool)
    W = _stack(windows)
    mixed = np.any(W > 0, axis=1) & np.any(W < 0, axis=1)
    return ~np.any(mixed, axis=0)


def anticluster_statistic(sample: Sample, u: float, m: int, r_n: int, *,
                          a_n: float | None = None) -> float:
    """Fraction of exceedances followed or preceded by another at lag m..r_n."""
    if not 1 <= m <= r_n:
        raise ValueError("need 1 <= m <= r_n")
    thr = sample_an(sample, a_n) * u
    ex = sample.norms() > thr
    idx = np.flatnonzero(ex)
    if idx.size == 0:
        raise EstimationError("no exceedances", exceedances=0)
    n = ex.size
    csum = np.concatenate([[0], np.cumsum(ex)])

    def count(lo, hi):
        lo = np.clip(lo, 0, n)
        hi = np.clip(hi, 0, n)
        return np.where(hi > lo, csum[hi] - csum[lo], 0)

    later = count(idx + m, idx + r_n + 1)
    earlier = count(idx - r_n, idx - m + 1)
    return float(np.mean((later + earlier) > 0))
