"""Equilibrium objects for each disclosure regime.

A regime fixes what the principal observes before the retention vote:

* ``nontransparent``: policy choice only
* ``opaque``: policy choice and reform outcome
* ``transparent``: policy choice, implementation effort, and outcome

plus a no-accountability ``benchmark`` with no retention stage. Each
constructor returns an :class:`Equilibrium` bundling the pure strategy
profile, a pure retention rule, and a belief system over observables.
Retention and beliefs are stored as ordered pattern lists (first match
wins) so that rules over a continuous effort dimension stay serializable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import AssumptionError, DomainError, InformativenessError, UnresolvedObservationError
from .model_core import Params, RentMode, check_assumptions, posteriors

CONGRUENT = "congruent"
NONCONGRUENT = "noncongruent"
TYPES = (CONGRUENT, NONCONGRUENT)
SIGNALS = ("g", "b")

REFORM = "reform"
STATUS_QUO = "status_quo"

SUCCESS = "success"
FAILURE = "failure"
SQ_OUTCOME = "status_quo"

BENCHMARK = "benchmark"
NONTRANSPARENT = "nontransparent"
OPAQUE = "opaque"
TRANSPARENT_SEPARATING = "transparent_separating"
TRANSPARENT_POOLING = "transparent_pooling"
REGIMES = (BENCHMARK, NONTRANSPARENT, OPAQUE, TRANSPARENT_SEPARATING, TRANSPARENT_POOLING)

RETAIN = "retain"
REMOVE = "remove"


@dataclass(frozen=True)
class AgentAction:
    """A policy choice plus implementation effort (zero under the status quo)."""

    policy: str
    effort: float = 0.0

    def __post_init__(self):
        if self.policy not in (REFORM, STATUS_QUO):
            raise DomainError(f"policy must be 'reform' or 'status_quo', got {self.policy!r}")
        if not 0.0 <= self.effort <= 1.0:
            raise DomainError(f"effort must be in [0, 1], got {self.effort}")
        if self.policy == STATUS_QUO and self.effort != 0.0:
            raise DomainError("status quo carries zero effort")

    def to_json(self) -> dict:
        return {"policy": self.policy, "effort": self.effort}


@dataclass(frozen=True)
class StrategyProfile:
    """Pure action for each of the four (type, signal) cells."""

    congruent_g: AgentAction
    congruent_b: AgentAction
    noncongruent_g: AgentAction
    noncongruent_b: AgentAction

    def action(self, agent_type: str, signal: str) -> AgentAction:
        key = f"{'congruent' if agent_type == CONGRUENT else 'noncongruent'}_{signal}"
        if agent_type not in TYPES or signal not in SIGNALS:
            raise DomainError(f"unknown cell ({agent_type!r}, {signal!r})")
        return getattr(self, key)

    def cells(self) -> Iterator[tuple[str, str, AgentAction]]:
        for t in TYPES:
            for s in SIGNALS:
                yield t, s, self.action(t, s)

    def to_json(self) -> list[dict]:
        return [
            {"type": t, "signal": s, **a.to_json()} for t, s, a in self.cells()
        ]


@dataclass(frozen=True)
class Observation:
    """What the principal sees; unobserved coordinates are None."""

    policy: str
    effort: Optional[float] = None
    outcome: Optional[str] = None

    def __post_init__(self):
        if self.policy not in (REFORM, STATUS_QUO):
            raise DomainError(f"bad policy {self.policy!r}")
        if self.outcome is not None:
            if self.outcome not in (SUCCESS, FAILURE, SQ_OUTCOME):
                raise DomainError(f"bad outcome {self.outcome!r}")
            # perfect invertibility: the status-quo outcome identifies the policy
            if (self.outcome == SQ_OUTCOME) != (self.policy == STATUS_QUO):
                raise DomainError(
                    f"outcome {self.outcome!r} inconsistent with policy {self.policy!r}"
                )


def observe(regime: str, action: AgentAction, outcome: str) -> Observation:
    """Project a realized (action, outcome) onto the regime's observables."""
    if regime in (BENCHMARK, NONTRANSPARENT):
        return Observation(policy=action.policy)
    if regime == OPAQUE:
        return Observation(policy=action.policy, outcome=outcome)
    if regime in (TRANSPARENT_SEPARATING, TRANSPARENT_POOLING):
        return Observation(policy=action.policy, effort=action.effort, outcome=outcome)
    raise DomainError(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class ObservationPattern:
    """Matcher for a set of observations.

    ``outcome=None`` matches any outcome. ``effort_op`` is one of
    None (any), "eq", "ge", "gt", "lt"; comparisons are eps-buffered.
    """

    policy: str
    outcome: Optional[str] = None
    effort_op: Optional[str] = None
    effort_value: Optional[float] = None

    def __post_init__(self):
        if self.effort_op not in (None, "eq", "ge", "gt", "lt"):
            raise DomainError(f"bad effort_op {self.effort_op!r}")
        if (self.effort_op is None) != (self.effort_value is None):
            raise DomainError("effort_op and effort_value must come together")

    def matches(self, obs: Observation, eps: float) -> bool:
        if obs.policy != self.policy:
            return False
        if self.outcome is not None and obs.outcome != self.outcome:
            return False
        if self.effort_op is None:
            return True
        if obs.effort is None:
            return False
        return self._effort_test(obs.effort, eps)

    def _effort_test(self, e: float, eps: float) -> bool:
        v = self.effort_value
        if self.effort_op == "eq":
            return abs(e - v) <= eps
        if self.effort_op == "ge":
            return e >= v - eps
        if self.effort_op == "gt":
            return e > v + eps
        return e < v - eps  # "lt"

    def effort_test_batch(self, efforts: np.ndarray, eps: float) -> np.ndarray:
        if self.effort_op is None:
            return np.ones(efforts.shape, dtype=bool)
        v = self.effort_value
        if self.effort_op == "eq":
            return np.abs(efforts - v) <= eps
        if self.effort_op == "ge":
            return efforts >= v - eps
        if self.effort_op == "gt":
            return efforts > v + eps
        return efforts < v - eps

    def to_json(self) -> dict:
        out: dict = {"policy": self.policy}
        if self.outcome is not None:
            out["outcome"] = self.outcome
        if self.effort_op is not None:
            out["effort"] = {"op": self.effort_op, "value": self.effort_value}
        return out


@dataclass(frozen=True)
class Equilibrium:
    """A strategy profile, a pure retention rule, and a belief system.

    ``retention`` and ``beliefs`` are ordered (pattern, value) lists; lookups
    take the first matching pattern. An empty retention list means there is
    no retention stage (benchmark): the agent keeps office regardless of
    play, so the office term is constant across actions.
    """

    regime: str
    profile: StrategyProfile
    retention: tuple[tuple[ObservationPattern, str], ...]
    beliefs: tuple[tuple[ObservationPattern, float], ...]
    pooling_effort: Optional[float] = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise DomainError(f"unknown regime {self.regime!r}")
        for _, decision in self.retention:
            if decision not in (RETAIN, REMOVE):
                raise DomainError(f"bad retention decision {decision!r}")

    def decide(self, obs: Observation, eps: float = 1e-12) -> bool:
        """True iff the agent is retained after ``obs``."""
        if not self.retention:
            return True  # no retention stage
        for pattern, decision in self.retention:
            if pattern.matches(obs, eps):
                return decision == RETAIN
        raise UnresolvedObservationError(f"no retention rule matches {obs}")

    def belief(self, obs: Observation, eps: float = 1e-12) -> float:
        """Posterior probability the agent is congruent after ``obs``."""
        for pattern, value in self.beliefs:
            if pattern.matches(obs, eps):
                return value
        raise UnresolvedObservationError(f"no belief entry matches {obs}")

    def decide_over_efforts(
        self, policy: str, efforts: np.ndarray, outcome: Optional[str],
        eps: float = 1e-12,
    ) -> np.ndarray:
        """Vectorized retention decisions for reform deviations over an
        effort grid (used by the brute-force deviation oracle)."""
        if not self.retention:
            return np.ones(efforts.shape, dtype=bool)
        out = np.zeros(efforts.shape, dtype=bool)
        unset = np.ones(efforts.shape, dtype=bool)
        for pattern, decision in self.retention:
            if pattern.policy != policy:
                continue
            if pattern.outcome is not None and pattern.outcome != outcome:
                continue
            hit = unset & pattern.effort_test_batch(efforts, eps)
            if decision == RETAIN:
                out |= hit
            unset &= ~hit
            if not unset.any():
                return out
        if unset.any():
            raise UnresolvedObservationError(
                f"retention rule does not cover ({policy}, e, {outcome})"
            )
        return out

    def to_json(self) -> dict:
        return {
            "regime": self.regime,
            "profile": self.profile.to_json(),
            "retention": [
                {"observation": pat.to_json(), "decision": dec}
                for pat, dec in self.retention
            ],
            "beliefs": [
                {"observation": pat.to_json(), "p_congruent": val}
                for pat, val in self.beliefs
            ],
            "pooling_effort": self.pooling_effort,
        }


def interior_effort(mu: float, reward_weight: float, params: Params) -> float:
    """Maximizer of mu*e*reward_weight - e^2/(2 lambda) on [0, 1].

    ``reward_weight`` is the agent's stake in a success: 1 with no retention
    incentive, 1+R when success also secures office for a congruent type,
    R for a noncongruent type.
    """
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must be in [0, 1], got {mu}")
    if reward_weight < 0.0:
        raise DomainError(f"reward_weight must be >= 0, got {reward_weight}")
    return min(1.0, max(0.0, params.lam * reward_weight * mu))


def separation_effort(params: Params) -> float:
    """Effort cost bar sqrt(2 lambda (R-d)) that makes mimicry unprofitable
    for a noncongruent type; zero when office is worth less than the status
    quo (separation is free)."""
    return math.sqrt(max(0.0, 2.0 * params.lam * (params.R - params.d)))


def _require(params: Params, rent_mode: RentMode, names: tuple[str, ...]) -> None:
    report = check_assumptions(params)
    for name in names:
        result = report.rent(rent_mode) if name == "moderate_rent" else report.check(name)
        if not result.passed:
            label = f"moderate_rent_{rent_mode}" if name == "moderate_rent" else name
            raise AssumptionError(label)


_CORE_GATES = ("signal_informative", "moderate_rent", "effort_bound")


def benchmark_profile(
    params: Params, *, rent_mode: RentMode = "relaxed", check: bool = True
) -> Equilibrium:
    """No-accountability benchmark: each type plays its policy favorite.

    Only the congruent type reforms, and only on a good signal, with the
    career-blind effort lambda*mu+. There is no retention stage.
    """
    if check:
        _require(params, rent_mode, _CORE_GATES)
    post = posteriors(params)
    profile = StrategyProfile(
        congruent_g=AgentAction(REFORM, interior_effort(post.mu_plus, 1.0, params)),
        congruent_b=AgentAction(STATUS_QUO),
        noncongruent_g=AgentAction(STATUS_QUO),
        noncongruent_b=AgentAction(STATUS_QUO),
    )
    return Equilibrium(regime=BENCHMARK, profile=profile, retention=(), beliefs=())


def nontransparent_equilibrium(
    params: Params, *, rent_mode: RentMode = "relaxed", check: bool = True
) -> Equilibrium:
    """Unique pure equilibrium when only the policy choice is observed.

    Both types pool on reform (neutral news, retained); the congruent type
    implements at the career-blind level, the noncongruent type shirks
    entirely. An off-path status quo reveals noncongruence and removal.
    """
    if check:
        _require(params, rent_mode, _CORE_GATES)
    post = posteriors(params)
    profile = StrategyProfile(
        congruent_g=AgentAction(REFORM, interior_effort(post.mu_plus, 1.0, params)),
        congruent_b=AgentAction(REFORM, interior_effort(post.mu_minus, 1.0, params)),
        noncongruent_g=AgentAction(REFORM, 0.0),
        noncongruent_b=AgentAction(REFORM, 0.0),
    )
    retention = (
        (ObservationPattern(policy=REFORM), RETAIN),
        (ObservationPattern(policy=STATUS_QUO), REMOVE),
    )
    beliefs = (
        (ObservationPattern(policy=REFORM), params.pi),
        (ObservationPattern(policy=STATUS_QUO), 0.0),
    )
    return Equilibrium(NONTRANSPARENT, profile, retention, beliefs)


def _opaque_success_beliefs(params: Params) -> tuple[float, float]:
    """Posterior congruence after a successful / failed reform under the
    outcome-accountable profile, by Bayes from the on-path distribution."""
    post = posteriors(params)
    lam, R, p, phi, pi = params.lam, params.R, params.p, params.phi, params.pi
    succ_c = phi * lam * (1 + R) * (p * post.mu_plus + (1 - p) * post.mu_minus)
    succ_n = phi * p * lam * R * post.mu_plus
    fail_c = 1.0 - succ_c
    fail_n = phi * p * (1 - lam * R * post.mu_plus) + (1 - phi) * (1 - p)
    b_succ = pi * succ_c / (pi * succ_c + (1 - pi) * succ_n)
    b_fail = pi * fail_c / (pi * fail_c + (1 - pi) * fail_n)
    return b_succ, b_fail


def opaque_equilibrium(
    params: Params, *, rent_mode: RentMode = "relaxed", check: bool = True
) -> Equilibrium:
    """Unique pure equilibrium when policy and outcome are observed.

    Retention is pivotal on a successful reform, so reformers internalize
    the office rent: the congruent type reforms on both signals at
    lambda(1+R)mu, the noncongruent type gambles for resurrection only on a
    good signal at lambda*R*mu+. Requires the informativeness condition
    (otherwise a failed reform need not be bad news and the retention rule
    unravels).
    """
    if check:
        _require(params, rent_mode, _CORE_GATES)
        from .model_core import informativeness_condition

        if not informativeness_condition(params)[0]:
            raise InformativenessError()
    post = posteriors(params)
    R = params.R
    profile = StrategyProfile(
        congruent_g=AgentAction(REFORM, interior_effort(post.mu_plus, 1 + R, params)),
        congruent_b=AgentAction(REFORM, interior_effort(post.mu_minus, 1 + R, params)),
        noncongruent_g=AgentAction(REFORM, interior_effort(post.mu_plus, R, params)),
        noncongruent_b=AgentAction(STATUS_QUO),
    )
    b_succ, b_fail = _opaque_success_beliefs(params)
    retention = (
        (ObservationPattern(policy=REFORM, outcome=SUCCESS), RETAIN),
        (ObservationPattern(policy=REFORM, outcome=FAILURE), REMOVE),
        (ObservationPattern(policy=STATUS_QUO), REMOVE),
    )
    beliefs = (
        (ObservationPattern(policy=REFORM, outcome=SUCCESS), b_succ),
        (ObservationPattern(policy=REFORM, outcome=FAILURE), b_fail),
        (ObservationPattern(policy=STATUS_QUO), 0.0),
    )
    return Equilibrium(OPAQUE, profile, retention, beliefs)


def transparent_separating_equilibrium(
    params: Params, *, rent_mode: RentMode = "relaxed", check: bool = True
) -> Equilibrium:
    """Least-cost separating equilibrium when policy, effort, and outcome
    are all observed.

    The congruent type reforms with effort e_H = max{sqrt(2 lambda (R-d)),
    lambda mu+} on a good signal and e_L = max{sqrt(2 lambda (R-d)),
    lambda mu-} on a bad one; the noncongruent type always keeps the status
    quo. Retention rewards reforms at or above the separating bar (or at
    exactly e_L); any other effort is attributed to a noncongruent deviator.
    """
    bar = separation_effort(params)
    if check:
        _require(params, rent_mode, _CORE_GATES)
        if bar > 1.0 + params.eps_tol:
            # mimicry cannot be deterred by any feasible effort
            raise AssumptionError(
                "separation_feasible",
                f"separating effort sqrt(2 lambda (R-d)) = {bar:.6g} exceeds 1",
            )
    post = posteriors(params)
    e_h = min(1.0, max(bar, params.lam * post.mu_plus))
    e_l = min(1.0, max(bar, params.lam * post.mu_minus))
    profile = StrategyProfile(
        congruent_g=AgentAction(REFORM, e_h),
        congruent_b=AgentAction(REFORM, e_l),
        noncongruent_g=AgentAction(STATUS_QUO),
        noncongruent_b=AgentAction(STATUS_QUO),
    )
    retention = (
        (ObservationPattern(policy=STATUS_QUO), REMOVE),
        (ObservationPattern(policy=REFORM, effort_op="eq", effort_value=e_h), RETAIN),
        (ObservationPattern(policy=REFORM, effort_op="eq", effort_value=e_l), RETAIN),
        (ObservationPattern(policy=REFORM, effort_op="gt", effort_value=e_h), RETAIN),
        (ObservationPattern(policy=REFORM), REMOVE),
    )
    beliefs = (
        (ObservationPattern(policy=STATUS_QUO), 0.0),
        (ObservationPattern(policy=REFORM, effort_op="eq", effort_value=e_h), 1.0),
        (ObservationPattern(policy=REFORM, effort_op="eq", effort_value=e_l), 1.0),
        (ObservationPattern(policy=REFORM, effort_op="gt", effort_value=e_h), 1.0),
        (ObservationPattern(policy=REFORM), 0.0),
    )
    return Equilibrium(TRANSPARENT_SEPARATING, profile, retention, beliefs)


def transparent_pooling_family(params: Params) -> Optional[tuple[float, float]]:
    """Effort interval [lambda mu+, sqrt(2 lambda (R-d))] supporting pooling
    on reform in the transparent regime, or None when lambda mu+^2 is not
    strictly below 2(R-d) (no pooling equilibrium survives refinement)."""
    post = posteriors(params)
    if params.lam * post.mu_plus**2 < 2 * (params.R - params.d) - params.eps_tol:
        return (params.lam * post.mu_plus, separation_effort(params))
    return None


def transparent_pooling_equilibrium(
    params: Params, e_star: float, *, rent_mode: RentMode = "relaxed", check: bool = True
) -> Equilibrium:
    """Pooling-on-reform equilibrium of the transparent regime at a pooled
    effort ``e_star`` drawn from :func:`transparent_pooling_family`.

    Everyone reforms at e_star and is retained; efforts below the pool (or
    the status quo) are attributed to the noncongruent type, efforts above
    to a good-signal congruent type.
    """
    if check:
        _require(params, rent_mode, _CORE_GATES)
        family = transparent_pooling_family(params)
        if family is None:
            raise AssumptionError("pooling_family_nonempty", "no pooling equilibrium survives")
        lo, hi = family
        if not (lo - params.eps_tol <= e_star <= hi + params.eps_tol):
            raise DomainError(f"e_star {e_star} outside pooling family [{lo}, {hi}]")
    if not 0.0 <= e_star <= 1.0:
        raise DomainError(f"pooled effort must be feasible, got {e_star}")
    act = AgentAction(REFORM, e_star)
    profile = StrategyProfile(act, act, act, act)
    retention = (
        (ObservationPattern(policy=STATUS_QUO), REMOVE),
        (ObservationPattern(policy=REFORM, effort_op="ge", effort_value=e_star), RETAIN),
        (ObservationPattern(policy=REFORM), REMOVE),
    )
    beliefs = (
        (ObservationPattern(policy=STATUS_QUO), 0.0),
        (ObservationPattern(policy=REFORM, effort_op="eq", effort_value=e_star), params.pi),
        (ObservationPattern(policy=REFORM, effort_op="gt", effort_value=e_star), 1.0),
        (ObservationPattern(policy=REFORM), 0.0),
    )
    return Equilibrium(TRANSPARENT_POOLING, profile, retention, beliefs, pooling_effort=e_star)


def solve(
    params: Params, regime: str, *, rent_mode: RentMode = "relaxed", check: bool = True,
    pooling_effort: Optional[float] = None,
) -> Equilibrium:
    """Construct the named regime's equilibrium."""
    if regime == BENCHMARK:
        return benchmark_profile(params, rent_mode=rent_mode, check=check)
    if regime == NONTRANSPARENT:
        return nontransparent_equilibrium(params, rent_mode=rent_mode, check=check)
    if regime == OPAQUE:
        return opaque_equilibrium(params, rent_mode=rent_mode, check=check)
    if regime == TRANSPARENT_SEPARATING:
        return transparent_separating_equilibrium(params, rent_mode=rent_mode, check=check)
    if regime == TRANSPARENT_POOLING:
        if pooling_effort is None:
            family = transparent_pooling_family(params)
            if family is None:
                raise AssumptionError("pooling_family_nonempty", "no pooling equilibrium survives")
            pooling_effort = family[0]
        return transparent_pooling_equilibrium(
            params, pooling_effort, rent_mode=rent_mode, check=check
        )
    raise DomainError(f"unknown regime {regime!r}")
