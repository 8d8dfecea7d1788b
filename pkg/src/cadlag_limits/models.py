"""Stationary heavy-tailed models driven by exact Pareto noise.

Models
------
iid_pareto            Z_t >= 1 with P(Z > x) = x**-alpha
iid_symmetric_pareto  Z_t times an independent fair sign
lagged                X_t = (Z_t, Z_{t-1}, ..., Z_{t-q}) from one iid_pareto stream
sre                   X_t = A_t X_{t-1} + B_t, diagonal A_t ~ Uniform(0, c), B_t ~ Uniform(0, 1]
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

from .stable import StableLaw, levy_tail_to_stable

MODELS = ("iid_pareto", "iid_symmetric_pareto", "lagged", "sre")
PARETO_MODELS = ("iid_pareto", "iid_symmetric_pareto", "lagged")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def replication_rng(seed: int, k: int) -> np.random.Generator:
    """Private stream for replication ``k``; independent of run order."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(k),)))


@dataclass(frozen=True)
class ModelConfig:
    alpha: float
    model: str = "iid_pareto"
    n: int = 1000
    seed: int = 0
    q: int = 0
    d: int = 1
    burn_in: int = 10_000

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.q < 0 or self.burn_in < 0 or self.d < 1:
            raise ValueError("q and burn_in must be >= 0 and d >= 1")

    @property
    def dim(self) -> int:
        if self.model == "lagged":
            return self.q + 1
        if self.model == "sre":
            return self.d
        return 1

    @property
    def nonnegative(self) -> bool:
        return self.model != "iid_symmetric_pareto"

    def label(self) -> str:
        if self.model == "lagged":
            return f"lagged(q={self.q})"
        if self.model == "sre":
            return f"sre(d={self.d})"
        return self.model

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Sample:
    """``values`` has shape (n, d)."""

    values: np.ndarray
    config: ModelConfig = field(repr=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def norms(self) -> np.ndarray:
        return np.max(np.abs(self.values), axis=1)


def pareto_draws(alpha: float, size, rng: np.random.Generator) -> np.ndarray:
    # 1 - U lies in (0, 1], so no infinite draws
    return (1.0 - rng.random(size)) ** (-1.0 / alpha)


def sample_pareto(alpha: float, n: int, seed=0, symmetric: bool = False) -> Sample:
    """i.i.d. draws with P(|Z| > x) = x**-alpha for x >= 1."""
    _check_alpha(alpha)
    rng = make_rng(seed)
    z = pareto_draws(alpha, n, rng)
    if symmetric:
        z = z * np.where(rng.random(n) < 0.5, -1.0, 1.0)
    model = "iid_symmetric_pareto" if symmetric else "iid_pareto"
    cfg = ModelConfig(alpha, model, n, seed if not isinstance(seed, np.random.Generator) else 0)
    return Sample(z[:, None], cfg)


def normalizing_an(alpha: float, n: int) -> float:
    """a_n solving n * P(|Z| > a_n) = 1 for the Pareto noise: n**(1/alpha)."""
    _check_alpha(alpha)
    if n < 1:
        raise ValueError("n must be at least 1")
    return float(n) ** (1.0 / alpha)


def simulate_lagged(alpha: float, q: int, n: int, seed=0) -> Sample:
    """X_t = (Z_t, ..., Z_{t-q}) for t = 1..n; q extra draws precede Z_1."""
    _check_alpha(alpha)
    if q < 0:
        raise ValueError("q must be nonnegative")
    rng = make_rng(seed)
    z = pareto_draws(alpha, n + q, rng)
    # z[q + t - 1] is Z_t
    cols = [z[q - j : q - j + n] for j in range(q + 1)]
    cfg = ModelConfig(alpha, "lagged", n, seed if not isinstance(seed, np.random.Generator) else 0, q=q)
    return Sample(np.column_stack(cols), cfg)


def sre_coefficient_bound(alpha_target: float) -> float:
    """c with E[A**alpha] = 1 for A ~ Uniform(0, c), i.e. c**alpha / (alpha + 1) = 1."""
    _check_alpha(alpha_target)
    return (alpha_target + 1.0) ** (1.0 / alpha_target)


@njit(cache=True)
def _sre_recursion(A, B, x0):
    T, d = A.shape
    out = np.empty((T, d))
    x = x0.copy()
    for t in range(T):
        for j in range(d):
            x[j] = A[t, j] * x[j] + B[t, j]
            out[t, j] = x[j]
    return out


def simulate_sre(alpha_target: float, d: int, n: int, burn_in: int = 10_000, seed=0) -> Sample:
    """Nonnegative diagonal stochastic recurrence with Kesten index ``alpha_target``."""
    _check_alpha(alpha_target)
    if d < 1 or burn_in < 0:
        raise ValueError("d must be >= 1 and burn_in >= 0")
    rng = make_rng(seed)
    c = sre_coefficient_bound(alpha_target)
    T = n + burn_in
    A = c * rng.random((T, d))
    B = 1.0 - rng.random((T, d))
    path = _sre_recursion(A, B, np.zeros(d))
    if not np.all(np.isfinite(path)):
        bad = int(np.argmin(np.all(np.isfinite(path), axis=1)))
        raise OverflowError(f"recursion diverged at step {bad} (c={c:.6g}, alpha_target={alpha_target})")
    cfg = ModelConfig(alpha_target, "sre", n, seed if not isinstance(seed, np.random.Generator) else 0,
                      d=d, burn_in=burn_in)
    return Sample(path[burn_in:], cfg)


def simulate(config: ModelConfig, rng=None) -> Sample:
    """Draw a sample for ``config``; ``rng`` overrides the config seed."""
    src = config.seed if rng is None else rng
    if config.model == "iid_pareto":
        s = sample_pareto(config.alpha, config.n, src)
    elif config.model == "iid_symmetric_pareto":
        s = sample_pareto(config.alpha, config.n, src, symmetric=True)
    elif config.model == "lagged":
        s = simulate_lagged(config.alpha, config.q, config.n, src)
    else:
        s = simulate_sre(config.alpha, config.d, config.n, config.burn_in, src)
    return Sample(s.values, config)


def pareto_truncated_mean(alpha: float, lower: float, upper: float) -> float:
    """E[Z 1{lower < Z <= upper}] for the nonnegative Pareto(alpha) law."""
    lo = max(1.0, lower)
    if upper <= lo:
        return 0.0
    if alpha == 1.0:
        return math.log(upper) - math.log(lo)
    return alpha / (1.0 - alpha) * (upper ** (1.0 - alpha) - lo ** (1.0 - alpha))


def truncated_mean(config: ModelConfig, a_n: float, lower: float, upper: float):
    """Coordinatewise E[X^j / a_n 1{lower < |X^j| / a_n <= upper}], or None when not closed form."""
    if config.model == "iid_symmetric_pareto":
        return np.zeros(1)
    if config.model in ("iid_pareto", "lagged"):
        m = pareto_truncated_mean(config.alpha, lower * a_n, upper * a_n) / a_n
        return np.full(config.dim, m)
    return None


def marginal_tail_constant(config: ModelConfig) -> float:
    """lim n P(|X_1| > a_n x) x**alpha under the max-norm, for the Pareto models."""
    if config.model == "lagged":
        return float(config.q + 1)
    if config.model in ("iid_pareto", "iid_symmetric_pareto"):
        return 1.0
    raise ValueError("no closed-form tail constant for the sre model")


def stable_limit_params(alpha: float, model: str, q: int = 0) -> StableLaw:
    """Law of V(1) for the Pareto models.

    For ``lagged`` this is the law of the coordinate total of V(1): all
    q + 1 coordinates share one limit path, so the total is (q + 1) times
    a one-sided stable variable.
    """
    _check_alpha(alpha)
    if model == "iid_pareto":
        return levy_tail_to_stable(alpha, 1.0, 0.0)
    if model == "iid_symmetric_pareto":
        return levy_tail_to_stable(alpha, 0.5, 0.5)
    if model == "lagged":
        one = levy_tail_to_stable(alpha, 1.0, 0.0)
        k = q + 1
        if alpha == 1.0:
            loc = k * one.loc - (2 / np.pi) * one.skew * k * one.scale * math.log(k)
            return StableLaw(alpha, one.skew, k * one.scale, loc)
        return StableLaw(alpha, one.skew, k * one.scale, k * one.loc)
    raise ValueError(f"no stable limit parameters for model {model!r}")


def hill_estimator(x, k: int) -> float:
    """Hill estimate of the tail index from the k largest values of |x|."""
    v = np.sort(np.abs(np.asarray(x, dtype=float).ravel()))[::-1]
    if not 1 <= k < v.size:
        raise ValueError("k must satisfy 1 <= k < sample size")
    return 1.0 / np.mean(np.log(v[:k] / v[k]))
