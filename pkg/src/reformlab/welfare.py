"""Principal welfare per regime, optimal-regime selection, and the
office-rent thresholds that drive regime switches.

Two welfare surfaces are exposed deliberately:

* :func:`regime_welfare` integrates the principal's policy payoff over an
  actual :class:`~reformlab.equilibrium.Equilibrium` (efforts are feasible
  probabilities). This is the surface the Monte Carlo oracle must match.
* :func:`formula_welfare` evaluates the same closed forms on the raw effort
  expressions (``lambda (1+R) mu`` etc.) without feasibility clamping or
  assumption gating. The rent-threshold analysis lives on this algebraic
  surface: the upper switch point R_high sits where the raw efforts exceed
  one, so gated welfare cannot reach it. Sweeps report this surface next to
  the assumption flags so consumers can see where the model's restrictions
  stop holding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import AssumptionError, DomainError, PreconditionLossError
from .equilibrium import (
    CONGRUENT,
    NONCONGRUENT,
    FAILURE,
    NONTRANSPARENT,
    OPAQUE,
    REFORM,
    SQ_OUTCOME,
    STATUS_QUO,
    SUCCESS,
    TRANSPARENT_SEPARATING,
    Equilibrium,
    observe,
    separation_effort,
    solve,
)
from .model_core import Params, RentMode, posteriors
from .verification import joint_outcome_distribution

WELFARE_REGIMES = (NONTRANSPARENT, OPAQUE, TRANSPARENT_SEPARATING)

_OUTCOME_VALUE = {SUCCESS: 1.0, FAILURE: 0.0}


@dataclass(frozen=True)
class WelfareEntry:
    """Per-regime welfare: expected policy payoff W, selection term Q, and
    the total W + M*Q."""

    regime: str
    W: float
    Q: float
    total: float

    def to_json(self) -> dict:
        return {"regime": self.regime, "W": self.W, "Q": self.Q, "total": self.total}


@dataclass(frozen=True)
class WelfareReport:
    entries: dict[str, WelfareEntry]
    excluded: dict[str, str]  # regime -> failed check
    optimal: Optional[str]
    margin: Optional[float]  # optimal total minus runner-up total

    def to_json(self) -> dict:
        return {
            "entries": {k: v.to_json() for k, v in self.entries.items()},
            "excluded": dict(self.excluded),
            "optimal": self.optimal,
            "margin": self.margin,
        }

    def to_csv_rows(self) -> list[str]:
        rows = ["regime,W,Q,total,optimal_flag"]
        for regime, e in self.entries.items():
            flag = "true" if regime == self.optimal else "false"
            rows.append(f"{regime},{e.W!r},{e.Q!r},{e.total!r},{flag}")
        return rows


def _welfare_and_selection(eq: Equilibrium, params: Params) -> tuple[float, float]:
    """Exact W and Q under ``eq`` from the joint on-path distribution.

    W weighs outcomes 1 / d / 0; Q is the expected congruence of tomorrow's
    office-holder, counting the incumbent's posterior when retained and the
    replacement prior when removed.
    """
    w = 0.0
    q = 0.0
    for t, _s, act, outcome, mass in joint_outcome_distribution(eq.profile, params):
        w += mass * (params.d if outcome == SQ_OUTCOME else _OUTCOME_VALUE[outcome])
        retained = eq.decide(observe(eq.regime, act, outcome), params.eps_tol)
        if retained:
            q += mass if t == CONGRUENT else 0.0
        else:
            q += mass * params.pi
    return w, q


def regime_welfare(params: Params, regime: str, eq: Equilibrium) -> WelfareEntry:
    """Welfare entry for ``regime`` evaluated on its equilibrium object."""
    if eq.regime != regime:
        raise DomainError(f"equilibrium regime {eq.regime!r} does not match {regime!r}")
    w, q = _welfare_and_selection(eq, params)
    return WelfareEntry(regime=regime, W=w, Q=q, total=w + params.M * q)


def _formula_cells(params: Params, regime: str) -> list[tuple[float, str, float, float]]:
    """(cell mass, policy, raw effort, state posterior) per (type, signal)
    under the regime's closed-form profile, efforts left unclamped."""
    post = posteriors(params)
    lam, R, pi = params.lam, params.R, params.pi
    p_g = params.phi * params.p + (1 - params.phi) * (1 - params.p)
    bar = separation_effort(params)
    masses = {
        (CONGRUENT, "g"): pi * p_g, (CONGRUENT, "b"): pi * (1 - p_g),
        (NONCONGRUENT, "g"): (1 - pi) * p_g,
        (NONCONGRUENT, "b"): (1 - pi) * (1 - p_g),
    }
    mus = {"g": post.mu_plus, "b": post.mu_minus}
    if regime == NONTRANSPARENT:
        plan = {
            (CONGRUENT, "g"): (REFORM, lam * post.mu_plus),
            (CONGRUENT, "b"): (REFORM, lam * post.mu_minus),
            (NONCONGRUENT, "g"): (REFORM, 0.0),
            (NONCONGRUENT, "b"): (REFORM, 0.0),
        }
    elif regime == OPAQUE:
        plan = {
            (CONGRUENT, "g"): (REFORM, lam * (1 + R) * post.mu_plus),
            (CONGRUENT, "b"): (REFORM, lam * (1 + R) * post.mu_minus),
            (NONCONGRUENT, "g"): (REFORM, lam * R * post.mu_plus),
            (NONCONGRUENT, "b"): (STATUS_QUO, 0.0),
        }
    elif regime == TRANSPARENT_SEPARATING:
        plan = {
            (CONGRUENT, "g"): (REFORM, max(bar, lam * post.mu_plus)),
            (CONGRUENT, "b"): (REFORM, max(bar, lam * post.mu_minus)),
            (NONCONGRUENT, "g"): (STATUS_QUO, 0.0),
            (NONCONGRUENT, "b"): (STATUS_QUO, 0.0),
        }
    else:
        raise DomainError(f"no closed-form welfare for regime {regime!r}")
    return [
        (masses[key], policy, effort, mus[key[1]])
        for key, (policy, effort) in plan.items()
    ]


def formula_welfare(params: Params, regime: str) -> float:
    """Closed-form W on raw (unclamped) effort expressions; see module note."""
    w = 0.0
    for mass, policy, effort, mu in _formula_cells(params, regime):
        w += mass * (effort * mu if policy == REFORM else params.d)
    return w


def optimal_regime(
    params: Params, *, rent_mode: RentMode = "relaxed", strict: bool = True
) -> WelfareReport:
    """Welfare table over the three retention regimes with the optimum.

    With ``strict=True`` each regime is constructed under its assumption
    gates and excluded (with the failed check noted) when they do not hold.
    With ``strict=False`` all three W values come from the raw closed forms,
    extending the comparison across the whole rent axis.
    """
    entries: dict[str, WelfareEntry] = {}
    excluded: dict[str, str] = {}
    for regime in WELFARE_REGIMES:
        if strict:
            try:
                eq = solve(params, regime, rent_mode=rent_mode, check=True)
            except AssumptionError as exc:
                excluded[regime] = exc.check
                continue
            entries[regime] = regime_welfare(params, regime, eq)
        else:
            w = formula_welfare(params, regime)
            eq = solve(params, regime, rent_mode=rent_mode, check=False)
            _, q = _welfare_and_selection(eq, params)
            entries[regime] = WelfareEntry(regime=regime, W=w, Q=q, total=w + params.M * q)
    if not entries:
        return WelfareReport(entries={}, excluded=excluded, optimal=None, margin=None)
    ranked = sorted(entries.values(), key=lambda e: -e.total)
    margin = ranked[0].total - ranked[1].total if len(ranked) > 1 else None
    return WelfareReport(
        entries=entries, excluded=excluded, optimal=ranked[0].regime, margin=margin
    )


def H(R: float, lambda_hat: float, d: float) -> float:
    """Quadratic whose sign compares outcome-driven vs separation-driven
    effort: nonpositive exactly where the transparent regime elicits more."""
    return lambda_hat * (1 + R) ** 2 - 2 * (R - d)


@dataclass(frozen=True)
class Thresholds:
    """Roots of H: the office-rent band on which transparency dominates."""

    lambda_hat: float
    exists: bool
    R_low: Optional[float]
    R_high: Optional[float]

    def to_json(self) -> dict:
        return {
            "lambda_hat": self.lambda_hat, "exists": self.exists,
            "R_low": self.R_low, "R_high": self.R_high,
        }


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def thresholds_from_lambda_hat(lambda_hat: float, d: float) -> Thresholds:
    """Closed-form roots of H, cross-validated by bisection."""
    if lambda_hat <= 0:
        raise DomainError(f"lambda_hat must be > 0, got {lambda_hat}")
    disc = 1.0 - 2.0 * (1.0 + d) * lambda_hat
    if disc < 0:
        return Thresholds(lambda_hat=lambda_hat, exists=False, R_low=None, R_high=None)
    s = math.sqrt(disc)
    r_low = (1.0 - lambda_hat - s) / lambda_hat
    r_high = (1.0 - lambda_hat + s) / lambda_hat
    if disc > 0:
        vertex = (1.0 - lambda_hat) / lambda_hat
        hi = max(2.0 * vertex + 1.0, 2.0)
        while H(hi, lambda_hat, d) <= 0:
            hi *= 2.0
        r_low_b = _bisect(lambda r: H(r, lambda_hat, d), 0.0, vertex)
        r_high_b = _bisect(lambda r: -H(r, lambda_hat, d), vertex, hi)
        if abs(r_low_b - r_low) > 1e-9 or abs(r_high_b - r_high) > 1e-9:
            raise DomainError(
                "threshold cross-check failed: closed form and bisection disagree"
            )
    return Thresholds(lambda_hat=lambda_hat, exists=True, R_low=r_low, R_high=r_high)


def thresholds(params: Params) -> Thresholds:
    """Thresholds at lambda_hat = lambda * mu_plus^2 for the given params."""
    post = posteriors(params)
    return thresholds_from_lambda_hat(params.lam * post.mu_plus**2, params.d)


_BUMP_ATTR = {"phi": "phi", "lambda": "lam", "p": "p", "R": "R"}


@dataclass(frozen=True)
class ComparativeStaticsReport:
    which: str
    delta: float
    baseline: WelfareReport
    bumped: WelfareReport
    welfare_deltas: dict[str, float]
    persisted: bool  # did the optimal regime survive the bump

    def to_json(self) -> dict:
        return {
            "which": self.which,
            "delta": self.delta,
            "baseline": self.baseline.to_json(),
            "bumped": self.bumped.to_json(),
            "welfare_deltas": dict(self.welfare_deltas),
            "persisted": self.persisted,
        }


def comparative_statics(
    params: Params, which: str, delta: float, *,
    rent_mode: RentMode = "relaxed", strict: bool = True,
) -> ComparativeStaticsReport:
    """Recompute the welfare table after bumping one parameter.

    Raises :class:`PreconditionLossError` when the bump leaves the parameter
    domain or (in strict mode) knocks out a regime present at baseline.
    """
    if which not in _BUMP_ATTR:
        raise DomainError(f"which must be one of {sorted(_BUMP_ATTR)}, got {which!r}")
    attr = _BUMP_ATTR[which]
    try:
        bumped_params = params.replace(**{attr: getattr(params, attr) + delta})
    except DomainError as exc:
        raise PreconditionLossError(f"params.{which}", str(exc)) from exc
    baseline = optimal_regime(params, rent_mode=rent_mode, strict=strict)
    bumped = optimal_regime(bumped_params, rent_mode=rent_mode, strict=strict)
    lost = set(baseline.entries) - set(bumped.entries)
    if lost:
        regime = sorted(lost)[0]
        raise PreconditionLossError(
            bumped.excluded.get(regime, regime),
            f"regime {regime} no longer constructible after bumping {which} "
            f"by {delta} (failed check: {bumped.excluded.get(regime)})",
        )
    deltas = {
        regime: bumped.entries[regime].W - baseline.entries[regime].W
        for regime in baseline.entries
    }
    return ComparativeStaticsReport(
        which=which, delta=delta, baseline=baseline, bumped=bumped,
        welfare_deltas=deltas, persisted=baseline.optimal == bumped.optimal,
    )
