"""Command-line front end: parameter I/O, subcommand dispatch, and the
sweep engine.

Subcommands: check | solve | verify | welfare | sweep | simulate.
Exit codes: 0 success, 1 precondition/assumption failure, 2 malformed input.

Floats are emitted with ``repr`` (shortest round-trip form) so CSV and JSON
outputs are bit-stable across runs. Sweep rows where a quantity cannot be
computed carry the sentinel "NA", never a silent omission.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Optional

from .errors import AssumptionError, DomainError, PreconditionLossError, ReformLabError
from .equilibrium import AgentAction, REGIMES, STATUS_QUO, solve
from .model_core import Params, check_assumptions
from .montecarlo import SimConfig, simulate
from .verification import bayes_consistency, deviation_check, divinity_breakeven, news_classification
from .welfare import (
    WELFARE_REGIMES,
    formula_welfare,
    optimal_regime,
    thresholds,
    _welfare_and_selection,
)

FIXTURES = ("sanity", "part3")

_AXIS_DOMAINS = {
    "p": (0.5, 1.0), "phi": (0.0, 1.0), "d": (0.0, 1.0),
    "lambda": (0.0, 1.0), "R": (0.0, math.inf), "pi": (0.0, 1.0),
}


def fixture_path(name: str) -> str:
    """Filesystem path of a bundled fixture parameter file."""
    stem = name.removesuffix(".json")
    if stem not in FIXTURES:
        raise DomainError(f"unknown fixture {name!r}; available: {FIXTURES}")
    return str(resources.files("reformlab").joinpath(f"fixtures/{stem}.json"))


def _load_params(value: str) -> Params:
    """Resolve --params: a filesystem path, or a bundled fixture name."""
    path = value
    if not os.path.exists(path):
        stem = value.removesuffix(".json")
        if stem in FIXTURES:
            path = fixture_path(stem)
        else:
            raise DomainError(f"--params: no such file or fixture: {value!r}")
    try:
        with open(path) as f:
            obj = json.load(f)
    except json.JSONDecodeError as exc:
        raise DomainError(f"--params: invalid JSON in {path}: {exc}") from exc
    return Params.from_json(obj)


def _format_cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "NA"
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class SweepAxis:
    param: str
    min: float
    max: float
    steps: int

    def __post_init__(self):
        if self.param not in _AXIS_DOMAINS:
            raise DomainError(f"invalid sweep axis {self.param!r}")
        if self.steps < 2:
            raise DomainError(f"axis {self.param}: steps must be >= 2, got {self.steps}")
        if not self.min < self.max:
            raise DomainError(f"axis {self.param}: min must be < max")
        lo, hi = _AXIS_DOMAINS[self.param]
        if self.min < lo or self.max > hi:
            raise DomainError(
                f"axis {self.param}: range [{self.min}, {self.max}] outside domain [{lo}, {hi}]"
            )

    def values(self) -> list[float]:
        return [
            self.min + (self.max - self.min) * i / (self.steps - 1)
            for i in range(self.steps)
        ]


@dataclass(frozen=True)
class SweepSpec:
    """Grid sweep over 1-2 parameter axes with selectable output groups."""

    base: Params
    axes: tuple[SweepAxis, ...]
    outputs: tuple[str, ...] = ("welfare", "assumptions", "thresholds")

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise DomainError(f"sweeps take 1 or 2 axes, got {len(self.axes)}")
        if len({a.param for a in self.axes}) != len(self.axes):
            raise DomainError("sweep axes must be distinct parameters")
        bad = set(self.outputs) - {"welfare", "assumptions", "thresholds"}
        if bad:
            raise DomainError(f"unknown sweep outputs: {sorted(bad)}")

    @classmethod
    def from_json(cls, obj: dict) -> "SweepSpec":
        if not isinstance(obj, dict):
            raise DomainError("sweep spec must be a JSON object")
        unknown = set(obj) - {"base", "axes", "outputs"}
        if unknown:
            raise DomainError(f"unknown sweep spec keys: {sorted(unknown)}")
        if "base" not in obj or "axes" not in obj:
            raise DomainError("sweep spec requires 'base' and 'axes'")
        axes = tuple(
            SweepAxis(
                param=a["param"], min=float(a["min"]), max=float(a["max"]),
                steps=int(a["steps"]),
            )
            for a in obj["axes"]
        )
        outputs = tuple(obj.get("outputs", ("welfare", "assumptions", "thresholds")))
        return cls(base=Params.from_json(obj["base"]), axes=axes, outputs=outputs)


_PARAM_COLS = ("p", "phi", "d", "lambda", "R", "pi", "M")
_ASSUMPTION_COLS = (
    "signal_informative", "moderate_rent_strict", "moderate_rent_relaxed",
    "effort_bound", "informativeness", "rent_exceeds_2d",
)


def _sweep_header(spec: SweepSpec) -> list[str]:
    cols = list(_PARAM_COLS)
    if "assumptions" in spec.outputs:
        cols += list(_ASSUMPTION_COLS)
    if "welfare" in spec.outputs:
        for r in WELFARE_REGIMES:
            cols += [f"W_{r}", f"Q_{r}", f"total_{r}"]
        cols += ["optimal_regime", "margin"]
    if "thresholds" in spec.outputs:
        cols += ["lambda_hat", "thresholds_exist", "R_low", "R_high"]
    return cols


def _sweep_row(spec: SweepSpec, point: dict[str, float]) -> list:
    try:
        params = spec.base.replace(
            **{("lam" if k == "lambda" else k): v for k, v in point.items()}
        )
    except DomainError:
        params = None
    row: list = []
    for k in _PARAM_COLS:
        if params is None:
            row.append(point.get(k))
        else:
            row.append(getattr(params, "lam" if k == "lambda" else k))
    if params is None:
        pad = 0
        if "assumptions" in spec.outputs:
            pad += len(_ASSUMPTION_COLS)
        if "welfare" in spec.outputs:
            pad += 3 * len(WELFARE_REGIMES) + 2
        if "thresholds" in spec.outputs:
            pad += 4
        return row + [None] * pad

    if "assumptions" in spec.outputs:
        report = check_assumptions(params)
        row += [report.check(name).passed for name in _ASSUMPTION_COLS]
    if "welfare" in spec.outputs:
        # paper-algebra welfare (unclamped efforts), see welfare module note
        totals: dict[str, float] = {}
        for regime in WELFARE_REGIMES:
            try:
                w = formula_welfare(params, regime)
                eq = solve(params, regime, check=False)
                _, q = _welfare_and_selection(eq, params)
                total = w + params.M * q
                totals[regime] = total
                row += [w, q, total]
            except ReformLabError:
                row += [None, None, None]
        if totals:
            ranked = sorted(totals, key=lambda r: -totals[r])
            row.append(ranked[0])
            row.append(totals[ranked[0]] - totals[ranked[1]] if len(ranked) > 1 else None)
        else:
            row += [None, None]
    if "thresholds" in spec.outputs:
        th = thresholds(params)
        row += [th.lambda_hat, th.exists, th.R_low, th.R_high]
    return row


def run_sweep(spec: SweepSpec) -> Iterator[str]:
    """Yield CSV lines (header first), rows in row-major axis order."""
    yield ",".join(_sweep_header(spec))
    if len(spec.axes) == 1:
        points = [{spec.axes[0].param: v} for v in spec.axes[0].values()]
    else:
        a0, a1 = spec.axes
        points = [
            {a0.param: v0, a1.param: v1} for v0 in a0.values() for v1 in a1.values()
        ]
    threads = max(1, int(os.environ.get("REFORMLAB_THREADS", "1") or "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = pool.map(lambda pt: _sweep_row(spec, pt), points)
            for row in rows:
                yield ",".join(_format_cell(c) for c in row)
    else:
        for pt in points:
            yield ",".join(_format_cell(c) for c in _sweep_row(spec, pt))


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as f:
            f.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reformlab",
        description="Equilibria, verification, and welfare for the reform-delegation game",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, *, regime=False):
        sp.add_argument("--params", required=True,
                        help="parameter JSON file, or bundled fixture 'sanity' / 'part3'")
        if regime:
            sp.add_argument("--regime", required=True, choices=list(REGIMES))
            sp.add_argument("--rent-mode", choices=["strict", "relaxed"], default="relaxed")
            sp.add_argument("--pooling-effort", type=float, default=None)
        sp.add_argument("--out", help="write output to this path instead of stdout")

    add_common(sub.add_parser("check", help="evaluate all parameter assumptions"))
    add_common(sub.add_parser("solve", help="construct a regime's equilibrium"), regime=True)

    sp = sub.add_parser("verify", help="run the numerical checks on an equilibrium")
    add_common(sp, regime=True)
    sp.add_argument("--grid", type=int, default=100_001, help="deviation-scan grid size")

    sp = sub.add_parser("welfare", help="welfare table, optimal regime, thresholds")
    add_common(sp)
    sp.add_argument("--rent-mode", choices=["strict", "relaxed"], default="relaxed")
    sp.add_argument("--no-strict", action="store_true",
                    help="use the ungated closed-form welfare surface")
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("sweep", help="grid sweep to CSV")
    sp.add_argument("--sweep", required=True, help="sweep spec JSON file")
    sp.add_argument("--out", help="write CSV here instead of stdout")

    sp = sub.add_parser("simulate", help="seeded Monte Carlo simulation")
    add_common(sp, regime=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, default=100_000, help="number of draws")
    sp.add_argument("--format", choices=["table", "json"], default="table")
    return parser


def _cmd_check(args) -> int:
    params = _load_params(args.params)
    report = check_assumptions(params)
    _emit(_json_dumps(report.to_json()), args.out)
    return 0


def _cmd_solve(args) -> int:
    params = _load_params(args.params)
    eq = solve(params, args.regime, rent_mode=args.rent_mode,
               pooling_effort=args.pooling_effort)
    _emit(_json_dumps(eq.to_json()), args.out)
    return 0


def _cmd_verify(args) -> int:
    params = _load_params(args.params)
    if args.grid < 2:
        raise DomainError("--grid must be >= 2")
    eq = solve(params, args.regime, rent_mode=args.rent_mode,
               pooling_effort=args.pooling_effort)
    dev = deviation_check(eq, params, grid_size=args.grid)
    sys.stdout.write(dev.format_table() + "\n")
    bayes = bayes_consistency(eq, params)
    news = news_classification(eq.profile, params)
    breakeven = divinity_breakeven(eq, AgentAction(STATUS_QUO), params)
    payload = {
        "deviation": dev.to_json(),
        "bayes": bayes.to_json(),
        "news": news.to_json(),
        "breakeven_status_quo": breakeven.to_json(),
    }
    if args.out:
        _emit(_json_dumps(payload), args.out)
    else:
        sys.stdout.write(_json_dumps(payload) + "\n")
    return 0 if dev.passed and bayes.passed else 1


def _cmd_welfare(args) -> int:
    params = _load_params(args.params)
    report = optimal_regime(params, rent_mode=args.rent_mode, strict=not args.no_strict)
    th = thresholds(params)
    if args.format == "csv":
        _emit("\n".join(report.to_csv_rows()), args.out)
    else:
        _emit(_json_dumps({"welfare": report.to_json(), "thresholds": th.to_json()}), args.out)
    return 0


def _cmd_sweep(args) -> int:
    try:
        with open(args.sweep) as f:
            spec = SweepSpec.from_json(json.load(f))
    except FileNotFoundError:
        raise DomainError(f"--sweep: no such file: {args.sweep!r}")
    except json.JSONDecodeError as exc:
        raise DomainError(f"--sweep: invalid JSON: {exc}")
    lines = run_sweep(spec)
    if args.out:
        with open(args.out, "w", newline="") as f:
            for line in lines:
                f.write(line + "\n")
    else:
        for line in lines:
            sys.stdout.write(line + "\n")
    return 0


def _cmd_simulate(args) -> int:
    params = _load_params(args.params)
    if args.n < 1:
        raise DomainError("--n must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise DomainError("--seed must be an unsigned 64-bit integer")
    eq = solve(params, args.regime, rent_mode=args.rent_mode,
               pooling_effort=args.pooling_effort)
    config = SimConfig(n_draws=args.n, seed=args.seed, regime=args.regime, params=params)
    stats = simulate(config, eq)
    text = _json_dumps(stats.to_json()) if args.format == "json" else stats.format_table()
    _emit(text, args.out)
    return 0


_COMMANDS = {
    "check": _cmd_check,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "welfare": _cmd_welfare,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
}


def run(argv=None) -> int:
    """Entry point returning the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (AssumptionError, PreconditionLossError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ReformLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
