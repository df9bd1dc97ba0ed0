"""Seeded forward simulation of game play under a fixed equilibrium.

This is the statistical oracle for the closed-form welfare and belief
computations. Reproducibility contract:

* ``simulate`` partitions the draws into fixed blocks of ``BLOCK_SIZE``;
  block ``i`` uses the PCG64 generator seeded by
  ``SeedSequence(entropy=seed, spawn_key=(i,))``. Blocks may be evaluated
  in parallel (``REFORMLAB_THREADS``); accumulators merge in block order,
  so identical (seed, config) gives bit-identical statistics regardless of
  scheduling.
* ``convergence_sweep`` consumes one sequential PCG64 stream seeded by
  ``SeedSequence(seed)`` and reports cumulative statistics at each
  checkpoint.

Within a draw the generator is consumed in a fixed order: type, state,
signal, outcome (one uniform each, drawn for every draw even when the
policy is the status quo).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .equilibrium import (
    CONGRUENT,
    FAILURE,
    NONCONGRUENT,
    REFORM,
    SIGNALS,
    SQ_OUTCOME,
    SUCCESS,
    TYPES,
    Equilibrium,
    observe,
)
from .model_core import Params

BLOCK_SIZE = 1 << 18


@dataclass(frozen=True)
class SimConfig:
    n_draws: int
    seed: int
    regime: str
    params: Params

    def __post_init__(self):
        if self.n_draws < 1:
            raise DomainError(f"n_draws must be >= 1, got {self.n_draws}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class SimStats:
    """Accumulated statistics from one simulation run."""

    n_draws: int
    seed: int
    mean_payoff: float
    payoff_se: Optional[float]
    retention_rate_by_type: dict[str, Optional[float]]
    p_congruent_given_retained: Optional[float]
    outcome_freqs: dict[str, float]
    q_hat: float
    counts: dict[str, int]

    def to_json(self) -> dict:
        return {
            "n_draws": self.n_draws,
            "seed": self.seed,
            "mean_payoff": self.mean_payoff,
            "payoff_se": self.payoff_se,
            "retention_rate_by_type": dict(self.retention_rate_by_type),
            "p_congruent_given_retained": self.p_congruent_given_retained,
            "outcome_freqs": dict(self.outcome_freqs),
            "q_hat": self.q_hat,
            "counts": dict(self.counts),
        }

    def format_table(self) -> str:
        fmt = lambda v: "NA" if v is None else f"{v:.6f}"
        lines = [
            f"{'seed':<28} {self.seed}",
            f"{'n_draws':<28} {self.n_draws}",
            f"{'mean_payoff':<28} {fmt(self.mean_payoff)}",
            f"{'payoff_se':<28} {fmt(self.payoff_se)}",
            f"{'q_hat':<28} {fmt(self.q_hat)}",
            f"{'P(congruent | retained)':<28} {fmt(self.p_congruent_given_retained)}",
        ]
        for t in TYPES:
            lines.append(f"{'retention[' + t + ']':<28} {fmt(self.retention_rate_by_type[t])}")
        for o in (SUCCESS, FAILURE, SQ_OUTCOME):
            lines.append(f"{'freq[' + o + ']':<28} {fmt(self.outcome_freqs[o])}")
        return "\n".join(lines)


_OUTCOMES = (SUCCESS, FAILURE, SQ_OUTCOME)


def _cell_tables(eq: Equilibrium, params: Params):
    """Per-cell policy/effort arrays and the 4x3 retention table D[cell, outcome]."""
    reform = np.zeros(4, dtype=bool)
    effort = np.zeros(4)
    retain = np.zeros((4, 3), dtype=bool)
    for i, (t, s) in enumerate([(t, s) for t in TYPES for s in SIGNALS]):
        act = eq.profile.action(t, s)
        reform[i] = act.policy == REFORM
        effort[i] = act.effort
        outcomes = (SUCCESS, FAILURE) if act.policy == REFORM else (SQ_OUTCOME,)
        for outcome in outcomes:
            j = _OUTCOMES.index(outcome)
            retain[i, j] = eq.decide(observe(eq.regime, act, outcome), params.eps_tol)
    return reform, effort, retain


@dataclass
class _Acc:
    n: int = 0
    sum_v: float = 0.0
    sum_v2: float = 0.0
    n_congruent: int = 0
    retained: int = 0
    retained_congruent: int = 0
    retained_noncongruent: int = 0
    n_success: int = 0
    n_failure: int = 0
    n_status_quo: int = 0

    def merge(self, other: "_Acc") -> None:
        for f in self.__dataclass_fields__:
            setattr(self, f, getattr(self, f) + getattr(other, f))


def _run_block(rng: np.random.Generator, n: int, params: Params, tables) -> _Acc:
    reform_tab, effort_tab, retain_tab = tables
    u_type = rng.random(n)
    u_state = rng.random(n)
    u_signal = rng.random(n)
    u_outcome = rng.random(n)

    congruent = u_type < params.pi
    good = u_state < params.phi
    match = u_signal < params.p
    sig_g = good == match  # signal g iff the signal matched a good state or missed a bad one
    cell = (~congruent).astype(np.int8) * 2 + (~sig_g).astype(np.int8)

    reform = reform_tab[cell]
    effort = effort_tab[cell]
    success = reform & good & (u_outcome < effort)
    failure = reform & ~success
    outcome_idx = np.where(success, 0, np.where(failure, 1, 2)).astype(np.int8)

    retained = retain_tab[cell, outcome_idx]
    payoff = np.where(success, 1.0, np.where(failure, 0.0, params.d))

    acc = _Acc()
    acc.n = n
    acc.sum_v = float(np.sum(payoff))
    acc.sum_v2 = float(np.sum(payoff * payoff))
    acc.n_congruent = int(np.count_nonzero(congruent))
    acc.retained = int(np.count_nonzero(retained))
    acc.retained_congruent = int(np.count_nonzero(retained & congruent))
    acc.retained_noncongruent = acc.retained - acc.retained_congruent
    acc.n_success = int(np.count_nonzero(success))
    acc.n_failure = int(np.count_nonzero(failure))
    acc.n_status_quo = n - acc.n_success - acc.n_failure
    return acc


def _stats_from_acc(acc: _Acc, seed: int, params: Params) -> SimStats:
    n = acc.n
    mean = acc.sum_v / n
    if n >= 2:
        var = max(0.0, (acc.sum_v2 - acc.sum_v * acc.sum_v / n) / (n - 1))
        se = math.sqrt(var / n)
    else:
        se = None
    n_noncongruent = n - acc.n_congruent
    rate_c = acc.retained_congruent / acc.n_congruent if acc.n_congruent else None
    rate_n = acc.retained_noncongruent / n_noncongruent if n_noncongruent else None
    p_c_ret = acc.retained_congruent / acc.retained if acc.retained else None
    q_hat = (acc.retained_congruent + (n - acc.retained) * params.pi) / n
    return SimStats(
        n_draws=n,
        seed=seed,
        mean_payoff=mean,
        payoff_se=se,
        retention_rate_by_type={CONGRUENT: rate_c, NONCONGRUENT: rate_n},
        p_congruent_given_retained=p_c_ret,
        outcome_freqs={
            SUCCESS: acc.n_success / n,
            FAILURE: acc.n_failure / n,
            SQ_OUTCOME: acc.n_status_quo / n,
        },
        q_hat=q_hat,
        counts={
            "congruent": acc.n_congruent,
            "retained": acc.retained,
            "retained_congruent": acc.retained_congruent,
            "success": acc.n_success,
            "failure": acc.n_failure,
            "status_quo": acc.n_status_quo,
        },
    )


def _thread_count() -> int:
    raw = os.environ.get("REFORMLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def simulate(config: SimConfig, eq: Equilibrium) -> SimStats:
    """Simulate ``n_draws`` plays of the game under ``eq``.

    Per draw: nature picks (type, state, signal), the profile fixes the
    action, a good reform succeeds with probability equal to the effort,
    and the retention rule is applied to the regime's observables.
    """
    if eq.regime != config.regime:
        raise DomainError(f"equilibrium regime {eq.regime!r} != config regime {config.regime!r}")
    params = config.params
    tables = _cell_tables(eq, params)
    sizes = []
    remaining = config.n_draws
    while remaining > 0:
        take = min(BLOCK_SIZE, remaining)
        sizes.append(take)
        remaining -= take

    def block(i_n):
        i, n = i_n
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=config.seed, spawn_key=(i,)))
        )
        return _run_block(rng, n, params, tables)

    threads = _thread_count()
    jobs = list(enumerate(sizes))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            accs = list(pool.map(block, jobs))
    else:
        accs = [block(j) for j in jobs]
    total = _Acc()
    for acc in accs:  # merge in block order
        total.merge(acc)
    return _stats_from_acc(total, config.seed, params)


def convergence_sweep(
    config: SimConfig, eq: Equilibrium, checkpoints: list[int]
) -> list[SimStats]:
    """Cumulative statistics at each checkpoint along a single stream."""
    if eq.regime != config.regime:
        raise DomainError(f"equilibrium regime {eq.regime!r} != config regime {config.regime!r}")
    if not checkpoints or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise DomainError("checkpoints must be strictly increasing and nonempty")
    if checkpoints[0] < 1:
        raise DomainError("checkpoints must be >= 1")
    params = config.params
    tables = _cell_tables(eq, params)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
    total = _Acc()
    done = 0
    out = []
    for target in checkpoints:
        remaining = target - done
        while remaining > 0:
            take = min(BLOCK_SIZE, remaining)
            total.merge(_run_block(rng, take, params, tables))
            remaining -= take
        done = target
        out.append(_stats_from_acc(total, config.seed, params))
    return out
