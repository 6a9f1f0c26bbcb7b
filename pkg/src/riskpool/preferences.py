"""Utility functions, certainty equivalents, and pooled risk premiums.

The certainty equivalent of a risk X under utility u and mixture mu is
u^{-1}(U_mu(u(X))): outcomes are pushed through u (which commutes with the
quantile function, u being strictly increasing), the mixture functional is
applied, and the result is pulled back through the inverse. The risk
premium of an equally shared pool adds wealth bookkeeping: wealth plus the
single-risk mean minus the certainty equivalent of wealth plus the pooled
average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    DiscreteDistribution,
    Distribution,
    EmpiricalSample,
    Normal,
    _TwoAtomLaw,
    quantile_grid_sample,
)
from .risk_measures import DELTA_ONE, KusuokaFamily, MixtureMeasure, kusuoka_value, mixture_value

DEFAULT_CE_GRID_POINTS = 2**14


class UtilityDomainError(ValueError):
    """A risk's support leaves the utility's domain (or a value its range)."""


class UtilityFunction:
    """Strictly increasing, continuously differentiable map with an inverse.

    apply/derivative accept scalars or arrays; invert takes a value in the
    range of the function. Arguments outside the domain raise
    :class:`UtilityDomainError` rather than being clamped.
    """

    def apply(self, x):
        raise NotImplementedError

    def derivative(self, x):
        raise NotImplementedError

    def invert(self, y):
        raise NotImplementedError

    @property
    def domain_lower(self) -> float:
        """Open lower endpoint of the domain (-inf when globally defined)."""
        return -math.inf

    @property
    def is_concave(self) -> bool:
        raise NotImplementedError

    def _check_domain(self, x):
        lo = self.domain_lower
        if lo > -math.inf and np.min(x) <= lo:
            raise UtilityDomainError(
                f"argument {float(np.min(x))!r} outside utility domain (x > {lo!r})"
            )


@dataclass(frozen=True)
class LinearUtility(UtilityFunction):
    slope: float = 1.0
    intercept: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.slope) and self.slope > 0.0 and math.isfinite(self.intercept)):
            raise ValueError("linear utility requires slope > 0")

    def apply(self, x):
        out = self.slope * np.asarray(x, dtype=float) + self.intercept
        return out if np.ndim(x) else float(out)

    def derivative(self, x):
        return np.full(np.shape(x), self.slope) if np.ndim(x) else self.slope

    def invert(self, y):
        out = (np.asarray(y, dtype=float) - self.intercept) / self.slope
        return out if np.ndim(y) else float(out)

    @property
    def is_concave(self) -> bool:
        return True


@dataclass(frozen=True)
class CaraUtility(UtilityFunction):
    """Constant absolute risk aversion: u(x) = (1 - exp(-alpha x)) / alpha."""

    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError("cara utility requires alpha > 0")

    def apply(self, x):
        out = -np.expm1(-self.alpha * np.asarray(x, dtype=float)) / self.alpha
        return out if np.ndim(x) else float(out)

    def derivative(self, x):
        out = np.exp(-self.alpha * np.asarray(x, dtype=float))
        return out if np.ndim(x) else float(out)

    def invert(self, y):
        arr = np.asarray(y, dtype=float)
        if np.max(arr) >= 1.0 / self.alpha:
            raise UtilityDomainError(f"value {float(np.max(arr))!r} outside range (y < 1/alpha)")
        out = -np.log1p(-self.alpha * arr) / self.alpha
        return out if np.ndim(y) else float(out)

    @property
    def is_concave(self) -> bool:
        return True


@dataclass(frozen=True)
class LogUtility(UtilityFunction):
    """u(x) = log(x + shift) on x > -shift."""

    shift: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.shift):
            raise ValueError("log utility requires a finite shift")

    def apply(self, x):
        self._check_domain(x)
        out = np.log(np.asarray(x, dtype=float) + self.shift)
        return out if np.ndim(x) else float(out)

    def derivative(self, x):
        self._check_domain(x)
        out = 1.0 / (np.asarray(x, dtype=float) + self.shift)
        return out if np.ndim(x) else float(out)

    def invert(self, y):
        out = np.exp(np.asarray(y, dtype=float)) - self.shift
        return out if np.ndim(y) else float(out)

    @property
    def domain_lower(self) -> float:
        return -self.shift

    @property
    def is_concave(self) -> bool:
        return True


@dataclass(frozen=True)
class CrraUtility(UtilityFunction):
    """u(x) = ((x + shift)^(1-gamma) - 1)/(1-gamma) on x > -shift, gamma != 1.

    Strictly increasing for every admissible gamma; concave only for
    gamma > 0 (callers relying on concavity should check
    :attr:`is_concave`).
    """

    gamma: float
    shift: float = 0.0

    def __post_init__(self):
        ok = math.isfinite(self.gamma) and self.gamma != 1.0 and math.isfinite(self.shift)
        if not ok:
            raise ValueError("crra utility requires finite gamma != 1")

    def apply(self, x):
        self._check_domain(x)
        g = 1.0 - self.gamma
        out = (np.power(np.asarray(x, dtype=float) + self.shift, g) - 1.0) / g
        return out if np.ndim(x) else float(out)

    def derivative(self, x):
        self._check_domain(x)
        out = np.power(np.asarray(x, dtype=float) + self.shift, -self.gamma)
        return out if np.ndim(x) else float(out)

    def invert(self, y):
        g = 1.0 - self.gamma
        base = g * np.asarray(y, dtype=float) + 1.0
        if np.min(base) <= 0.0:
            raise UtilityDomainError("value outside utility range")
        out = np.power(base, 1.0 / g) - self.shift
        return out if np.ndim(y) else float(out)

    @property
    def domain_lower(self) -> float:
        return -self.shift

    @property
    def is_concave(self) -> bool:
        return self.gamma > 0.0


def _check_parametric_support(dist: Distribution, u: UtilityFunction) -> None:
    # Continuous laws put no mass on the support boundary, so equality with
    # the open domain endpoint is admitted; anything below is rejected.
    if u.domain_lower > -math.inf and dist.support_lower_bound() < u.domain_lower:
        raise UtilityDomainError(
            f"support of the law reaches {dist.support_lower_bound()!r}, "
            f"below the utility domain (x > {u.domain_lower!r})"
        )


def _transformed_law(dist, u: UtilityFunction):
    if isinstance(dist, DiscreteDistribution):
        return DiscreteDistribution(u.apply(dist._out_arr), dist.probabilities)
    return EmpiricalSample(u.apply(dist._val_arr))


def _value_functional(transformed, preference):
    if isinstance(preference, KusuokaFamily):
        return kusuoka_value(transformed, preference)[0]
    return mixture_value(transformed, preference)


def _pullback_value(law, preference, u: UtilityFunction) -> float:
    # For cara utility the whole pullback commutes exactly with translation
    # (shifting X by c turns u(X) into an affine image of u(X - c), and the
    # functional is affine-equivariant), so the law is mean-centered first:
    # the exp/log round trip then never runs into its saturation regime.
    if isinstance(u, CaraUtility):
        center = law.mean()
        shifted = law.translate(-center)
        return center + float(
            u.invert(_value_functional(_transformed_law(shifted, u), preference))
        )
    return float(u.invert(_value_functional(_transformed_law(law, u), preference)))


def _certainty_equivalent_any(dist, preference, u, grid_points) -> float:
    if isinstance(dist, (DiscreteDistribution, EmpiricalSample)):
        return _pullback_value(dist, preference, u)
    if isinstance(dist, _TwoAtomLaw):
        return _certainty_equivalent_any(dist.as_discrete(), preference, u, grid_points)
    # Parametric laws: closed forms where they exist, otherwise the
    # deterministic quantile-grid discretization.
    if isinstance(u, LinearUtility):
        return float(_value_functional(dist, preference))
    if (
        isinstance(u, CaraUtility)
        and isinstance(dist, Normal)
        and isinstance(preference, MixtureMeasure)
        and preference == DELTA_ONE
    ):
        return dist.loc - u.alpha * dist.scale**2 / 2.0
    _check_parametric_support(dist, u)
    return _pullback_value(quantile_grid_sample(dist, grid_points), preference, u)


def certainty_equivalent(
    dist: Distribution,
    mu: MixtureMeasure,
    u: UtilityFunction,
    *,
    grid_points: int = DEFAULT_CE_GRID_POINTS,
) -> float:
    """Sure amount with the same distorted expected utility as the risk.

    Discrete and empirical laws are evaluated exactly by transforming their
    outcomes; two-outcome parametric laws reduce to discrete ones. Other
    parametric laws use a closed form when one exists (linear u; cara u on
    a normal law with the point mass at level 1) and the equal-probability
    quantile grid of ``grid_points`` midpoints otherwise.
    """
    return _certainty_equivalent_any(dist, mu, u, grid_points)


def certainty_equivalent_family(
    dist: Distribution,
    family: KusuokaFamily,
    u: UtilityFunction,
    *,
    grid_points: int = DEFAULT_CE_GRID_POINTS,
) -> float:
    """Certainty equivalent with the family minimum replacing the mixture."""
    return _certainty_equivalent_any(dist, family, u, grid_points)


def risk_premium(
    wealth: float,
    pool_dist: Distribution,
    preference,
    u: UtilityFunction,
    *,
    single_risk_mean: float | None = None,
    grid_points: int = DEFAULT_CE_GRID_POINTS,
) -> float:
    """wealth + E[X1] - certainty equivalent of (wealth + pooled average).

    ``preference`` is a MixtureMeasure or a KusuokaFamily. The single-risk
    mean defaults to the pool law's own mean, which is exact for analytic
    pool laws; Monte Carlo callers should pass the true mean so premium
    estimates are not polluted by mean-estimation noise.
    """
    m1 = pool_dist.mean() if single_risk_mean is None else float(single_risk_mean)
    ce = _certainty_equivalent_any(pool_dist.translate(wealth), preference, u, grid_points)
    return wealth + m1 - ce


def equivalent_utility_premium(
    wealth: float,
    pool_dist: Distribution,
    preference,
    u: UtilityFunction,
    *,
    grid_points: int = DEFAULT_CE_GRID_POINTS,
) -> float:
    """Solution of the equivalent-utility equation: wealth - CE(wealth + pool).

    Differs from :func:`risk_premium` by exactly the single-risk mean.
    """
    ce = _certainty_equivalent_any(pool_dist.translate(wealth), preference, u, grid_points)
    return wealth - ce
