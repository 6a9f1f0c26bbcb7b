"""Seeded randomized checks behind the ``verify`` subcommand.

Each suite draws random finite discrete laws and checks identities that
hold by theory, so any violation is an implementation bug. Failures are
shrunk by greedily dropping atoms while the violation persists, and the
smallest failing instance is reported.

The functionals under test can be swapped out (``avar_fn`` /
``mixture_fn``), which the test-suite uses to confirm that an injected
bug is actually caught.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .distributions import DiscreteDistribution, RngSpec
from .preferences import CaraUtility, risk_premium
from .risk_measures import MixtureMeasure, avar, dual_avar_discrete, mixture_value

DUALITY_TOL = 1e-12
PROPERTY_TOL = 1e-10

# Stream ids of the verify suites within a master seed.
_LAW_STREAM = 101
_VERTEX_STREAM = 102


@dataclass(frozen=True)
class PropertyResult:
    name: str
    trials: int
    failures: int
    worst_error: float
    counterexample: dict | None

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _random_law(gen: np.random.Generator, max_atoms: int) -> DiscreteDistribution:
    k = int(gen.integers(1, max_atoms + 1))
    outcomes = np.round(gen.normal(0.0, 5.0, size=k), 6)
    weights = gen.random(k) + 1e-3
    return DiscreteDistribution(tuple(outcomes), tuple(weights / weights.sum()))


def _random_mixture(gen: np.random.Generator, max_atoms: int = 4) -> MixtureMeasure:
    k = int(gen.integers(1, max_atoms + 1))
    levels = gen.random(k) * 0.999 + 0.001
    weights = gen.random(k) + 1e-3
    return MixtureMeasure(tuple(zip(levels, weights / weights.sum())))


def enumerate_dual_vertices(dist: DiscreteDistribution, lam: float) -> float:
    """Smallest E_Q[X] over the vertices of the density polytope.

    A vertex sets every density to 0 or 1/lam except at most one fractional
    coordinate pinned by total Q-mass 1; enumerating all of them is exact
    for small laws and independent of the greedy construction.
    """
    probs = np.asarray(dist.probabilities)
    outs = np.asarray(dist.outcomes)
    k = len(probs)
    best = math.inf
    indices = range(k)
    for r in range(k + 1):
        for full in combinations(indices, r):
            mass_full = sum(probs[i] for i in full) / lam
            if mass_full > 1.0 + 1e-9:
                continue
            value_full = sum(probs[i] * outs[i] for i in full) / lam
            rest = 1.0 - mass_full
            if rest <= 1e-15:
                best = min(best, value_full)
                continue
            for j in indices:
                if j in full:
                    continue
                if rest <= probs[j] / lam + 1e-9:
                    best = min(best, value_full + rest * outs[j])
    return best


def _shrink(law: DiscreteDistribution, still_fails) -> DiscreteDistribution:
    # Greedily drop atoms (renormalizing) while the violation persists.
    current = law
    progress = True
    while progress and len(current.outcomes) > 1:
        progress = False
        for i in range(len(current.outcomes)):
            outs = current.outcomes[:i] + current.outcomes[i + 1 :]
            probs = np.array(current.probabilities[:i] + current.probabilities[i + 1 :])
            candidate = DiscreteDistribution(outs, tuple(probs / probs.sum()))
            if still_fails(candidate):
                current = candidate
                progress = True
                break
    return current


def _law_payload(law: DiscreteDistribution) -> dict:
    return {"outcomes": list(law.outcomes), "probabilities": list(law.probabilities)}


def _run_single_property(name, trials, gen, check, max_atoms=16) -> PropertyResult:
    failures = 0
    worst = 0.0
    counterexample = None
    for _ in range(trials):
        law = _random_law(gen, max_atoms)
        error, context, still_fails = check(law, gen)
        worst = max(worst, error)
        if still_fails is not None:
            failures += 1
            if counterexample is None:
                shrunk = _shrink(law, still_fails)
                counterexample = {**_law_payload(shrunk), **context}
    return PropertyResult(name, trials, failures, worst, counterexample)


def run_duality_suite(
    trials: int,
    seed: int,
    *,
    max_atoms: int = 64,
    tol: float = DUALITY_TOL,
    avar_fn=None,
) -> list[PropertyResult]:
    """Greedy dual vs primal on random laws; vertex enumeration on small ones.

    The primal/dual comparison runs ``trials`` laws with up to ``max_atoms``
    atoms; the enumeration cross-check runs the same number of laws with at
    most 5 atoms, where listing every polytope vertex is cheap.
    """
    fn = avar_fn if avar_fn is not None else avar

    def check_greedy(law, gen):
        lam = float(gen.random() * 0.999 + 0.001)
        scale = max(1.0, max(abs(x) for x in law.outcomes))
        gap = abs(dual_avar_discrete(law, lam).value - fn(law, lam))
        if gap > tol * scale:
            return gap, {"lambda": lam, "gap": gap}, lambda c: abs(
                dual_avar_discrete(c, lam).value - fn(c, lam)
            ) > tol * scale
        return gap, {}, None

    def check_vertices(law, gen):
        lam = float(gen.random() * 0.999 + 0.001)
        scale = max(1.0, max(abs(x) for x in law.outcomes))
        gap = abs(enumerate_dual_vertices(law, lam) - fn(law, lam))
        if gap > 1e-9 * scale:
            return gap, {"lambda": lam, "gap": gap}, lambda c: abs(
                enumerate_dual_vertices(c, lam) - fn(c, lam)
            ) > 1e-9 * scale
        return gap, {}, None

    gen_a = RngSpec(seed, _LAW_STREAM).generator()
    gen_b = RngSpec(seed, _VERTEX_STREAM).generator()
    return [
        _run_single_property("primal_dual_greedy", trials, gen_a, check_greedy, max_atoms),
        _run_single_property("primal_dual_vertex_enumeration", trials, gen_b, check_vertices, 5),
    ]


def _joint_laws(gen: np.random.Generator, max_atoms: int):
    # A shared finite sample space: outcomes for X and Y on common states.
    k = int(gen.integers(1, max_atoms + 1))
    weights = gen.random(k) + 1e-3
    probs = tuple(weights / weights.sum())
    x = np.round(gen.normal(0.0, 5.0, size=k), 6)
    y = np.round(gen.normal(0.0, 5.0, size=k), 6)
    return x, y, probs


def run_property_suite(
    trials: int,
    seed: int,
    *,
    tol: float = PROPERTY_TOL,
    mixture_fn=None,
) -> list[PropertyResult]:
    """Structural identities of the mixture functional on random laws.

    Covers translation invariance, positive homogeneity, superadditivity on
    a shared sample space, additivity on comonotone pairs, the mean bound
    with its premium corollary for concave utilities, and monotonicity of
    the building block in its tail level.
    """
    fn = mixture_fn if mixture_fn is not None else mixture_value
    results = []

    def law_of(values, probs):
        return DiscreteDistribution(tuple(values), probs)

    def check_translation(law, gen):
        mu = _random_mixture(gen)
        c = float(gen.normal(0.0, 5.0))
        gap = abs(fn(law.translate(c), mu) - (fn(law, mu) + c))
        if gap > tol:
            return gap, {"shift": c, "mixture": mu.atoms, "gap": gap}, (
                lambda l: abs(fn(l.translate(c), mu) - (fn(l, mu) + c)) > tol
            )
        return gap, {}, None

    def check_homogeneity(law, gen):
        mu = _random_mixture(gen)
        c = float(gen.random() * 4.0)
        scaled = law_of([c * x for x in law.outcomes], law.probabilities)
        gap = abs(fn(scaled, mu) - c * fn(law, mu))
        if gap > tol:
            return gap, {"factor": c, "mixture": mu.atoms, "gap": gap}, (
                lambda l: abs(
                    fn(law_of([c * x for x in l.outcomes], l.probabilities), mu) - c * fn(l, mu)
                ) > tol
            )
        return gap, {}, None

    def check_monotone_lambda(law, gen):
        lam_lo, lam_hi = sorted(float(v) for v in gen.random(2) * 0.999 + 0.001)
        lo, hi = avar(law, lam_lo), avar(law, lam_hi)
        violation = max(lo - hi, hi - law.mean())
        if violation > tol:
            return violation, {"lambda_low": lam_lo, "lambda_high": lam_hi}, (
                lambda l: max(avar(l, lam_lo) - avar(l, lam_hi), avar(l, lam_hi) - l.mean()) > tol
            )
        return max(violation, 0.0), {}, None

    gen = RngSpec(seed, _LAW_STREAM).generator()
    results.append(_run_single_property("translation_invariance", trials, gen, check_translation))
    results.append(_run_single_property("positive_homogeneity", trials, gen, check_homogeneity))
    results.append(_run_single_property("avar_monotone_in_level", trials, gen, check_monotone_lambda))

    # Two-law properties draw their own joint sample spaces.
    def run_joint(name, violation_fn):
        failures = 0
        worst = 0.0
        counterexample = None
        for _ in range(trials):
            x, y, probs = _joint_laws(gen, 16)
            mu = _random_mixture(gen)
            error, context = violation_fn(x, y, probs, mu)
            worst = max(worst, error)
            if error > tol:
                failures += 1
                if counterexample is None:
                    counterexample = {
                        "x_outcomes": list(x),
                        "y_outcomes": list(y),
                        "probabilities": list(probs),
                        "mixture": mu.atoms,
                        **context,
                    }
        return PropertyResult(name, trials, failures, worst, counterexample)

    def superadditivity(x, y, probs, mu):
        joint = fn(law_of(x + y, probs), mu)
        split = fn(law_of(x, probs), mu) + fn(law_of(y, probs), mu)
        return max(split - joint, 0.0), {"gap": split - joint}

    def comonotone_additivity(x, y, probs, mu):
        x_sorted = np.sort(x)
        f_x = np.minimum(np.maximum(x_sorted, -2.0), 3.0)  # nondecreasing transform
        total = fn(law_of(x_sorted + f_x, probs), mu)
        split = fn(law_of(x_sorted, probs), mu) + fn(law_of(f_x, probs), mu)
        return abs(total - split), {"gap": total - split}

    results.append(run_joint("superadditivity", superadditivity))
    results.append(run_joint("comonotone_additivity", comonotone_additivity))

    def check_jensen(law, gen):
        mu = _random_mixture(gen)
        u = CaraUtility(float(gen.random() * 2.0 + 0.1))
        premium = risk_premium(0.0, law, mu, u)
        if premium < -tol:
            return -premium, {"mixture": mu.atoms, "alpha": u.alpha, "premium": premium}, (
                lambda l: risk_premium(0.0, l, mu, u) < -tol
            )
        return max(-premium, 0.0), {}, None

    results.append(_run_single_property("jensen_premium_nonnegative", trials, gen, check_jensen))
    return results
