"""Model primitives: parameters, Bayesian posteriors, and assumption checks.

The game has a principal delegating a reform decision to an agent. Nature
draws a state (good/bad for reform), the agent's congruence type, and a
private signal of accuracy ``p``. All downstream modules consume the
``Params`` vector defined here and the posterior beliefs computed by
:func:`posteriors`.

Every inequality check is eps-buffered: a strict ``a > b`` in the model is
evaluated as ``a > b + eps_tol`` so float-boundary points do not flap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Literal

from .errors import DomainError

RentMode = Literal["strict", "relaxed"]

#: JSON keys for Params, in canonical order. ``lambda`` is a Python keyword,
#: so the attribute is named ``lam``.
PARAM_KEYS = ("p", "phi", "d", "lambda", "R", "pi", "M", "eps_tol")


@dataclass(frozen=True)
class Params:
    """Primitive parameter vector.

    p:    signal accuracy, in [1/2, 1]
    phi:  prior probability the reform is good, in (0, 1)
    d:    status-quo payoff, in (0, 1)
    lam:  cost sensitivity (higher = cheaper effort), in (0, 1]
    R:    office rent, > 0
    pi:   prior probability the agent is congruent, in (0, 1)
    M:    principal's selection weight, >= 0 (0 = pure policy motive)
    eps_tol: buffer for strict-inequality comparisons
    """

    p: float
    phi: float
    d: float
    lam: float
    R: float
    pi: float
    M: float = 0.0
    eps_tol: float = 1e-12

    def __post_init__(self):
        checks = [
            (0.5 <= self.p <= 1.0, f"p must be in [1/2, 1], got {self.p}"),
            (0.0 < self.phi < 1.0, f"phi must be in (0, 1), got {self.phi}"),
            (0.0 < self.d < 1.0, f"d must be in (0, 1), got {self.d}"),
            (0.0 < self.lam <= 1.0, f"lambda must be in (0, 1], got {self.lam}"),
            (self.R > 0.0, f"R must be > 0, got {self.R}"),
            (0.0 < self.pi < 1.0, f"pi must be in (0, 1), got {self.pi}"),
            (self.M >= 0.0, f"M must be >= 0, got {self.M}"),
            (self.eps_tol >= 0.0, f"eps_tol must be >= 0, got {self.eps_tol}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise DomainError(msg)

    def replace(self, **kwargs) -> "Params":
        d = asdict(self)
        d.update(kwargs)
        return Params(**d)

    def to_json(self) -> dict:
        """Flat JSON object with keys exactly ``PARAM_KEYS``."""
        return {
            "p": self.p, "phi": self.phi, "d": self.d, "lambda": self.lam,
            "R": self.R, "pi": self.pi, "M": self.M, "eps_tol": self.eps_tol,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Params":
        """Parse the flat JSON object. Missing M defaults to 0, missing
        eps_tol to 1e-12; unknown keys are rejected."""
        if not isinstance(obj, dict):
            raise DomainError(f"params JSON must be an object, got {type(obj).__name__}")
        unknown = set(obj) - set(PARAM_KEYS)
        if unknown:
            raise DomainError(f"unknown params keys: {sorted(unknown)}")
        missing = {"p", "phi", "d", "lambda", "R", "pi"} - set(obj)
        if missing:
            raise DomainError(f"missing params keys: {sorted(missing)}")
        try:
            vals = {k: float(obj[k]) for k in obj}
        except (TypeError, ValueError) as exc:
            raise DomainError(f"non-numeric params value: {exc}") from exc
        return cls(
            p=vals["p"], phi=vals["phi"], d=vals["d"], lam=vals["lambda"],
            R=vals["R"], pi=vals["pi"], M=vals.get("M", 0.0),
            eps_tol=vals.get("eps_tol", 1e-12),
        )

    @classmethod
    def load(cls, path) -> "Params":
        with open(path) as f:
            return cls.from_json(json.load(f))

    @property
    def effort_root(self) -> float:
        """sqrt(2d/lambda): the reform-payoff indifference threshold for
        posterior beliefs."""
        return math.sqrt(2.0 * self.d / self.lam)


@dataclass(frozen=True)
class Posteriors:
    """State posteriors after each signal, plus the odds reparameterization.

    mu_plus  = P(good | signal g),  mu_minus = P(good | signal b),
    gamma = (1-p)/p, z = (1-phi)/phi. Algebraically
    mu_plus = 1/(1 + gamma z) and mu_minus = gamma/(gamma + z).
    """

    mu_plus: float
    mu_minus: float
    gamma: float
    z: float

    def mu(self, signal: str) -> float:
        if signal == "g":
            return self.mu_plus
        if signal == "b":
            return self.mu_minus
        raise DomainError(f"signal must be 'g' or 'b', got {signal!r}")


def posteriors(params: Params) -> Posteriors:
    """Exact Bayes posteriors that the reform is good, by signal."""
    p, phi = params.p, params.phi
    mu_plus = phi * p / (phi * p + (1 - phi) * (1 - p))
    mu_minus = phi * (1 - p) / (phi * (1 - p) + (1 - phi) * p)
    return Posteriors(
        mu_plus=mu_plus,
        mu_minus=mu_minus,
        gamma=(1 - p) / p,
        z=(1 - phi) / phi,
    )


@dataclass(frozen=True)
class CheckResult:
    """One assumption check: pass/fail plus the signed quantities behind it."""

    passed: bool
    detail: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"passed": self.passed, "detail": dict(self.detail)}


@dataclass(frozen=True)
class AssumptionReport:
    """All parameter-assumption checks, evaluated independently.

    The moderate-rent restriction appears in two forms. The ``strict`` form
    requires min{(1+R)mu-, R mu+} above the effort root; the ``relaxed`` form
    requires only the max. Both are reported; downstream gates pick one via a
    ``rent_mode`` flag (default relaxed).
    """

    signal_informative: CheckResult
    moderate_rent_strict: CheckResult
    moderate_rent_relaxed: CheckResult
    effort_bound: CheckResult
    informativeness: CheckResult
    rent_exceeds_2d: CheckResult

    def check(self, name: str) -> CheckResult:
        try:
            return getattr(self, name)
        except AttributeError:
            raise DomainError(f"unknown assumption check: {name!r}") from None

    def rent(self, mode: RentMode) -> CheckResult:
        if mode not in ("strict", "relaxed"):
            raise DomainError(f"rent_mode must be 'strict' or 'relaxed', got {mode!r}")
        return self.moderate_rent_strict if mode == "strict" else self.moderate_rent_relaxed

    def to_json(self) -> dict:
        return {
            name: self.check(name).to_json()
            for name in (
                "signal_informative", "moderate_rent_strict", "moderate_rent_relaxed",
                "effort_bound", "informativeness", "rent_exceeds_2d",
            )
        }


def check_assumptions(params: Params) -> AssumptionReport:
    """Evaluate every assumption with signed margins; nothing short-circuits."""
    eps = params.eps_tol
    post = posteriors(params)
    root = params.effort_root
    R = params.R

    signal = CheckResult(
        passed=(post.mu_plus > root + eps) and (root > post.mu_minus + eps),
        detail={
            "mu_plus_minus_root": post.mu_plus - root,
            "root_minus_mu_minus": root - post.mu_minus,
        },
    )
    lo_strict = min((1 + R) * post.mu_minus, R * post.mu_plus)
    lo_relaxed = max((1 + R) * post.mu_minus, R * post.mu_plus)
    rent_common = root > R * post.mu_minus + eps
    strict = CheckResult(
        passed=(lo_strict > root + eps) and rent_common,
        detail={"lower_bound": lo_strict, "root": root, "R_mu_minus": R * post.mu_minus},
    )
    relaxed = CheckResult(
        passed=(lo_relaxed > root + eps) and rent_common,
        detail={"lower_bound": lo_relaxed, "root": root, "R_mu_minus": R * post.mu_minus},
    )
    effort = CheckResult(
        passed=params.lam * (1 + R) <= 1.0 + eps,
        detail={"lambda_times_one_plus_R": params.lam * (1 + R)},
    )
    holds, lhs, rhs = informativeness_condition(params)
    info = CheckResult(passed=holds, detail={"lhs": lhs, "rhs": rhs})
    rent2d = CheckResult(
        passed=R > 2 * params.d + eps,
        detail={"R": R, "two_d": 2 * params.d},
    )
    return AssumptionReport(
        signal_informative=signal,
        moderate_rent_strict=strict,
        moderate_rent_relaxed=relaxed,
        effort_bound=effort,
        informativeness=info,
        rent_exceeds_2d=rent2d,
    )


def informativeness_condition(params: Params) -> tuple[bool, float, float]:
    """Inequality guaranteeing a failed reform is bad news about congruence.

    In the odds reparameterization gamma = (1-p)/p, z = (1-phi)/phi the
    condition reads

        z - lambda/(1 + gamma z)  <=  gamma [lambda (1+R) gamma/(gamma+z) - 1]

    Returns (holds, lhs, rhs) with holds = lhs <= rhs + eps_tol.
    """
    post = posteriors(params)
    g, z = post.gamma, post.z
    lhs = z - params.lam / (1 + g * z)
    rhs = g * (params.lam * (1 + params.R) * g / (g + z) - 1)
    return lhs <= rhs + params.eps_tol, lhs, rhs


def find_p_bar(params: Params, tol: float = 1e-9) -> float | None:
    """Smallest signal accuracy from which the informativeness condition
    holds for all sampled larger accuracies, other parameters fixed.

    Returns None when z >= lambda, in which case no such threshold is
    guaranteed to exist (the condition can fail even at p = 1). The result
    is located by a scan for the start of the trailing all-hold run followed
    by bisection on that boundary, then re-verified on a finer grid above
    the returned value; if the re-scan exposes non-monotone behavior (only
    possible when lambda(1+R) > 1), the search repeats on the finer grid.
    """
    post = posteriors(params)
    if post.z >= params.lam:
        return None

    def holds(p: float) -> bool:
        return informativeness_condition(params.replace(p=p))[0]

    def locate(n: int) -> float:
        lo_edge = 0.5
        grid = [lo_edge + (1.0 - lo_edge) * i / (n - 1) for i in range(n)]
        flags = [holds(p) for p in grid]
        first = n - 1
        for i in range(n - 2, -1, -1):
            if flags[i]:
                first = i
            else:
                break
        if first == 0:
            return lo_edge + tol  # holds on the whole open interval
        lo, hi = grid[first - 1], grid[first]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if holds(mid):
                hi = mid
            else:
                lo = mid
        return hi

    p_bar = locate(4097)
    for i in range(257):
        if not holds(min(p_bar + (1.0 - p_bar) * i / 256, 1.0)):
            return locate(65_537)
    return p_bar
