"""Laws of a single risk and of pooled averages.

Three representations share one interface: finite discrete laws, a closed
set of parametric families, and empirical samples. Quantile functions
follow the left-continuous convention q(t) = inf{m : P[X <= m] >= t};
integration of the quantile over a lower tail is exact (up to rounding)
for discrete and empirical laws and closed-form for every parametric
family. All types are immutable and all operations are pure given their
inputs and an :class:`RngSpec`, so concurrent use needs no locking.

Unbounded laws (normal, exponential) are admitted even though the limit
theory is phrased for bounded risks; the only operational consequence is
that the quantile at level 0 is an error for laws unbounded below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .normal import inv_normal_cdf, normal_pdf

_PROB_SUM_TOL = 1e-12
# Slack used when locating a probability level among cumulative atom
# masses, so binary rounding in cumulative sums cannot flip an atom
# boundary (q(0.3) on ten equal atoms must hit the third, not the fourth).
_LEVEL_TOL = 1e-12

# Block size (in draws) for pooled sampling of laws without a pooled
# closed form; bounds peak memory at ~64 MB of float64.
_POOL_CHUNK = 1 << 23


def _check_level(t: float, name: str = "t") -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0 or math.isnan(t):
        raise ValueError(f"{name} must lie in [0, 1], got {t!r}")
    return t


def _check_tail(lam: float) -> float:
    lam = float(lam)
    if not 0.0 < lam <= 1.0 or math.isnan(lam):
        raise ValueError(f"tail level must lie in (0, 1], got {lam!r}")
    return lam


@dataclass(frozen=True)
class RngSpec:
    """Counter-based random stream identified by (master_seed, stream_id).

    Streams are realized as Philox generators keyed by the pair, so
    identical specs yield identical draws regardless of execution order,
    thread count, or how many other streams were consumed in between.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for field in ("master_seed", "stream_id"):
            value = getattr(self, field)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{field} must be a nonnegative integer")

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.master_seed % (1 << 64), self.stream_id % (1 << 64)],
            dtype=np.uint64,
        )
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, stream_id: int) -> "RngSpec":
        return RngSpec(self.master_seed, stream_id)


class Distribution:
    """Interface shared by all supported laws."""

    def quantile(self, t: float) -> float:
        """Left-continuous quantile q(t) = inf{m : P[X <= m] >= t}.

        t = 0 returns the essential infimum; on laws unbounded below this
        is an error rather than a -inf sentinel.
        """
        raise NotImplementedError

    def lower_quantile_integral(self, lam: float) -> float:
        """Integral of the quantile function over (0, lam], lam in (0, 1]."""
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def support_lower_bound(self) -> float:
        raise NotImplementedError

    def translate(self, c: float) -> "Distribution":
        """The law of X + c."""
        raise NotImplementedError

    def _draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: RngSpec, count: int) -> "EmpiricalSample":
        """count i.i.d. draws as an :class:`EmpiricalSample`.

        Discrete and empirical laws use inverse-transform sampling; the
        continuous parametric families use their native samplers. The same
        RngSpec always reproduces the same draws.
        """
        if count < 1:
            raise ValueError("count must be >= 1")
        return EmpiricalSample(self._draw(rng.generator(), count))


@dataclass(frozen=True)
class DiscreteDistribution(Distribution):
    """Finite law given by atoms; duplicates merged, outcomes kept sorted."""

    outcomes: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        out = np.asarray(self.outcomes, dtype=float)
        prob = np.asarray(self.probabilities, dtype=float)
        if out.ndim != 1 or prob.shape != out.shape:
            raise ValueError("outcomes and probabilities must be equal-length 1-d sequences")
        if out.size == 0:
            raise ValueError("at least one atom is required")
        if not np.all(np.isfinite(out)):
            raise ValueError("outcomes must be finite")
        if np.any(prob <= 0.0) or not np.all(np.isfinite(prob)):
            raise ValueError("probabilities must be strictly positive")
        total = float(prob.sum())
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        order = np.argsort(out, kind="stable")
        out, prob = out[order], prob[order]
        if out.size > 1:
            keep = np.empty(out.size, dtype=bool)
            keep[0] = True
            keep[1:] = out[1:] > out[:-1]
            idx = np.flatnonzero(keep)
            prob = np.add.reduceat(prob, idx)
            out = out[idx]
        object.__setattr__(self, "outcomes", tuple(float(x) for x in out))
        object.__setattr__(self, "probabilities", tuple(float(p) for p in prob))

    @cached_property
    def _out_arr(self) -> np.ndarray:
        return np.asarray(self.outcomes)

    @cached_property
    def _prob_arr(self) -> np.ndarray:
        return np.asarray(self.probabilities)

    @cached_property
    def _cum(self) -> np.ndarray:
        return np.cumsum(self._prob_arr)

    def quantile(self, t: float) -> float:
        t = _check_level(t)
        if t <= 0.0:
            return self.outcomes[0]
        idx = int(np.searchsorted(self._cum, t - _LEVEL_TOL, side="left"))
        return self.outcomes[min(idx, len(self.outcomes) - 1)]

    def lower_quantile_integral(self, lam: float) -> float:
        lam = _check_tail(lam)
        j = int(np.searchsorted(self._cum, lam - _LEVEL_TOL, side="left"))
        j = min(j, len(self.outcomes) - 1)
        below = float(self._prob_arr[:j] @ self._out_arr[:j])
        prev = float(self._cum[j - 1]) if j else 0.0
        partial = min(max(lam - prev, 0.0), self.probabilities[j])
        return below + partial * self.outcomes[j]

    def mean(self) -> float:
        return float(self._prob_arr @ self._out_arr)

    def variance(self) -> float:
        m = self.mean()
        return float(self._prob_arr @ np.square(self._out_arr - m))

    def support_lower_bound(self) -> float:
        return self.outcomes[0]

    def translate(self, c: float) -> "DiscreteDistribution":
        return DiscreteDistribution(tuple(x + c for x in self.outcomes), self.probabilities)

    def _draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        u = gen.random(count)
        idx = np.minimum(np.searchsorted(self._cum, u, side="left"), len(self.outcomes) - 1)
        return self._out_arr[idx]


@dataclass(frozen=True)
class EmpiricalSample(Distribution):
    """Equal-weight law of a stored sample; values kept sorted ascending.

    The quantile convention is q(t) = value at index ceil(t*k) (1-based)
    for a sample of size k, i.e. Eq-style left continuity applied to the
    empirical law; the tail integral is computed exactly over the
    resulting step function, never by averaging a sub-sample.
    """

    values: tuple[float, ...]

    def __init__(self, values):
        arr = np.sort(np.asarray(values, dtype=float).ravel())
        if arr.size == 0:
            raise ValueError("at least one value is required")
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", tuple(float(v) for v in arr))

    @property
    def size(self) -> int:
        return len(self.values)

    @cached_property
    def _val_arr(self) -> np.ndarray:
        return np.asarray(self.values)

    @cached_property
    def _cum(self) -> np.ndarray:
        k = len(self.values)
        return np.arange(1, k + 1, dtype=float) / k

    def quantile(self, t: float) -> float:
        t = _check_level(t)
        if t <= 0.0:
            return self.values[0]
        idx = int(np.searchsorted(self._cum, t - _LEVEL_TOL, side="left"))
        return self.values[min(idx, self.size - 1)]

    def lower_quantile_integral(self, lam: float) -> float:
        lam = _check_tail(lam)
        k = self.size
        j = int(np.searchsorted(self._cum, lam - _LEVEL_TOL, side="left"))
        j = min(j, k - 1)
        below = float(self._val_arr[:j].sum()) / k
        prev = float(self._cum[j - 1]) if j else 0.0
        partial = min(max(lam - prev, 0.0), 1.0 / k)
        return below + partial * self.values[j]

    def mean(self) -> float:
        return float(self._val_arr.mean())

    def variance(self) -> float:
        # Variance of the empirical law itself (denominator k, not k-1).
        return float(self._val_arr.var())

    def support_lower_bound(self) -> float:
        return self.values[0]

    def translate(self, c: float) -> "EmpiricalSample":
        return EmpiricalSample(self._val_arr + c)

    def _draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        u = gen.random(count)
        idx = np.minimum(np.searchsorted(self._cum, u, side="left"), self.size - 1)
        return self._val_arr[idx]


@dataclass(frozen=True)
class Normal(Distribution):
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.loc) and math.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError("normal law requires finite loc and scale > 0")

    def quantile(self, t: float) -> float:
        t = _check_level(t)
        if t == 0.0:
            raise ValueError("t = 0: a normal law is unbounded below, essential infimum is -inf")
        if t == 1.0:
            return math.inf
        return self.loc + self.scale * inv_normal_cdf(t)

    def lower_quantile_integral(self, lam: float) -> float:
        lam = _check_tail(lam)
        if lam == 1.0:
            return self.loc
        return lam * self.loc - self.scale * float(normal_pdf(inv_normal_cdf(lam)))

    def mean(self) -> float:
        return self.loc

    def variance(self) -> float:
        return self.scale**2

    def support_lower_bound(self) -> float:
        return -math.inf

    def translate(self, c: float) -> "Normal":
        return Normal(self.loc + c, self.scale)

    def _draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        return self.loc + self.scale * gen.standard_normal(count)


@dataclass(frozen=True)
class Uniform(Distribution):
    low: float
    high: float

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high) and self.high > self.low):
            raise ValueError("uniform law requires finite bounds with high > low")

    def quantile(self, t: float) -> float:
        t = _check_level(t)
        return self.low + (self.high - self.low) * t

    def lower_quantile_integral(self, lam: float) -> float:
        lam = _check_tail(lam)
        return self.low * lam + 0.5 * (self.high - self.low) * lam**2

    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    def variance(self) -> float:
        return (self.high - self.low) ** 2 / 12.0

    def support_lower_bound(self) -> float:
        return self.low

    def translate(self, c: float) -> "Uniform":
        return Uniform(self.low + c, self.high + c)

    def _draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        return self.low + (self.high - self.low) * gen.random(count)


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float
    shift: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0.0 and math.isfinite(self.shift)):
            raise ValueError("exponential law requires rate > 0 and finite shift")

    def quantile(self, t: float) -> float:
        t = _check_level(t)
        if t == 1.0:
            return math.inf
        return self.shift - math.log1p(-t) / self.rate

    def lower_quantile_integral(self, lam: float) -> float:
        lam = _check_tail(lam)
        if lam == 1.0:
            return self.shift + 1.0 / self.rate
        return self.shift * lam + ((1.0 - lam) * math.log1p(-lam) + lam) / self.rate

    def mean(self) -> float:
        return self.shift + 1.0 / self.rate

    def variance(self) -> float:
        return 1.0 / self.rate**2

    def support_lower_bound(self) -> float:
        return self.shift

    def translate(self, c: float) -> "Exponential":
        return Exponential(self.rate, self.shift + c)

    def _draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        return self.shift + gen.standard_exponential(count) / self.rate


class _TwoAtomLaw(Distribution):
    """Shared behavior of the two-outcome parametric families."""

    def as_discrete(self) -> DiscreteDistribution:
        raise NotImplementedError

    def quantile(self, t: float) -> float:
        return self.as_discrete().quantile(t)

    def lower_quantile_integral(self, lam: float) -> float:
        return self.as_discrete().lower_quantile_integral(lam)

    def mean(self) -> float:
        return self.as_discrete().mean()

    def variance(self) -> float:
        return self.as_discrete().variance()

    def support_lower_bound(self) -> float:
        return self.as_discrete().outcomes[0]

    def _draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        return self.as_discrete()._draw(gen, count)


@dataclass(frozen=True)
class TwoPoint(_TwoAtomLaw):
    """Law on {low, high} with P[X = high] = p_high."""

    low: float
    high: float
    p_high: float

    def __post_init__(self):
        ok = (
            math.isfinite(self.low)
            and math.isfinite(self.high)
            and self.high > self.low
            and 0.0 < self.p_high < 1.0
        )
        if not ok:
            raise ValueError("two-point law requires high > low and 0 < p_high < 1")

    @cached_property
    def _discrete(self) -> DiscreteDistribution:
        return DiscreteDistribution((self.low, self.high), (1.0 - self.p_high, self.p_high))

    def as_discrete(self) -> DiscreteDistribution:
        return self._discrete

    def translate(self, c: float) -> "TwoPoint":
        return TwoPoint(self.low + c, self.high + c, self.p_high)


@dataclass(frozen=True)
class Bernoulli(_TwoAtomLaw):
    """loc + scale * B with B a p-coin; equals TwoPoint(loc, loc+scale, p)."""

    p: float
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        ok = (
            0.0 < self.p < 1.0
            and math.isfinite(self.loc)
            and math.isfinite(self.scale)
            and self.scale > 0.0
        )
        if not ok:
            raise ValueError("bernoulli law requires 0 < p < 1 and scale > 0")

    @cached_property
    def _discrete(self) -> DiscreteDistribution:
        return DiscreteDistribution((self.loc, self.loc + self.scale), (1.0 - self.p, self.p))

    def as_discrete(self) -> DiscreteDistribution:
        return self._discrete

    def translate(self, c: float) -> "Bernoulli":
        return Bernoulli(self.p, self.loc + c, self.scale)


def quantile_grid_sample(dist: Distribution, n_points: int) -> EmpiricalSample:
    """Equal-probability discretization on the midpoint grid t_i = (i-1/2)/N.

    The returned sample has exactly these quantile values with weight 1/N
    each; it is the deterministic stand-in used when a law has no closed
    form for a downstream functional.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    t = (np.arange(n_points) + 0.5) / n_points
    if isinstance(dist, Normal):
        values = dist.loc + dist.scale * inv_normal_cdf(t)
    elif isinstance(dist, Uniform):
        values = dist.low + (dist.high - dist.low) * t
    elif isinstance(dist, Exponential):
        values = dist.shift - np.log1p(-t) / dist.rate
    else:
        values = np.array([dist.quantile(float(ti)) for ti in t])
    return EmpiricalSample(values)


def _pool_chunked(dist: Distribution, n: int, count: int, gen: np.random.Generator) -> np.ndarray:
    sums = np.zeros(count)
    rows = max(1, _POOL_CHUNK // n)
    start = 0
    while start < count:
        stop = min(start + rows, count)
        block = dist._draw(gen, (stop - start) * n).reshape(stop - start, n)
        sums[start:stop] = block.sum(axis=1)
        start = stop
    return sums / n


def pool_average_sample(
    dist: Distribution,
    n: int,
    replications: int,
    rng: RngSpec,
    *,
    allow_exact: bool = True,
):
    """Replications of the equally shared pool average of n i.i.d. copies.

    For a normal law the pooled average is again normal, so the exact law
    Normal(loc, scale/sqrt(n)) is returned instead of a sample (callers can
    detect the shortcut by the returned type); pass allow_exact=False to
    force sampling. Two-outcome and finite discrete laws draw pooled sums
    through binomial/multinomial counts, which is distributionally exact;
    other laws sum n draws per replicate.
    """
    if n < 1:
        raise ValueError("pool size n must be >= 1")
    if replications < 2:
        raise ValueError("replications must be >= 2")
    if isinstance(dist, Normal) and allow_exact:
        return Normal(dist.loc, dist.scale / math.sqrt(n))

    gen = rng.generator()
    if isinstance(dist, Normal):
        values = dist.loc + dist.scale / math.sqrt(n) * gen.standard_normal(replications)
    elif isinstance(dist, _TwoAtomLaw):
        law = dist.as_discrete()
        counts = gen.binomial(n, law.probabilities[1], size=replications)
        values = law.outcomes[0] + (law.outcomes[1] - law.outcomes[0]) * counts / n
    elif isinstance(dist, DiscreteDistribution):
        counts = gen.multinomial(n, dist._prob_arr, size=replications)
        values = counts @ dist._out_arr / n
    else:
        values = _pool_chunked(dist, n, replications, gen)
    return EmpiricalSample(values)
