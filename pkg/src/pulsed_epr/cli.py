"""Command-line interface: ``pulsed-epr {sweep,threshold,classify,physical}``.

Exit status is 0 on success, 1 on a usage error and 2 on a numeric failure.
Every subcommand accepts ``--config FILE`` holding ``key = value`` lines whose
keys are the long option names (with ``-`` or ``_``); flags given on the
command line win over the file.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Optional, Sequence

import numpy as np

from . import criteria as C
from . import thresholds as T
from .errors import BracketError, DomainError, SingularityError
from .scenarios import (
    PulseOscillatorParams,
    TwoOscillatorParams,
    pulse_oscillator_state,
    squeeze_param_from_physical,
    two_oscillator_state,
)

EXIT_USAGE = 1
EXIT_NUMERIC = 2

QUANTITIES = ("E_steered", "E_steering", "DeltaEnt", "DGCZ", "gains")
SCENARIOS = ("pulse-osc", "two-osc")
DIRECTIONS = {
    "m-given-c": "m-given-c",
    "m|c": "m-given-c",
    "dgcz": "dgcz",
    "m2-given-m1": "m2-given-m1",
    "m2|m1": "m2-given-m1",
    "m1-given-m2": "m1-given-m2",
    "m1|m2": "m1-given-m2",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: Optional[float]) -> str:
    # + 0.0 folds -0.0 into 0.0
    return "" if x is None else format(float(x) + 0.0, ".16e")


# Argument parsing helpers.


def parse_range(text: str, log: bool = False) -> np.ndarray:
    """``lo:hi:steps`` with inclusive endpoints, or a comma list of values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be lo:hi:steps, got {text!r}")
        try:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"malformed range {text!r}") from None
        if steps < 2 or hi < lo:
            raise UsageError(f"range needs steps >= 2 and hi >= lo, got {text!r}")
        if log:
            if lo <= 0:
                raise UsageError("logarithmic range needs lo > 0")
            return np.geomspace(lo, hi, steps)
        return np.linspace(lo, hi, steps)
    return np.array(parse_list(text))


def parse_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"malformed number list {text!r}") from None
    if not values:
        raise UsageError("empty number list")
    return values


def parse_pair(text: str) -> tuple[float, float]:
    values = parse_list(text)
    if len(values) != 2:
        raise UsageError(f"occupation pair must be a,b; got {text!r}")
    return values[0], values[1]


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    out = {}
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# Row computations. Top-level functions so that they pickle for process pools.


def pulse_row(r: float, n0: float) -> dict[str, float]:
    state = pulse_oscillator_state(PulseOscillatorParams(r, n0))
    steered = C.epr_reid(state, C.PULSE_OSC_M_GIVEN_C)
    steering = C.epr_reid(state, C.PULSE_OSC_C_GIVEN_M)
    ent = C.product_entanglement(state, C.PULSE_OSC_M_GIVEN_C)
    return {
        "E_steered": steered.value,
        "E_steering": steering.value,
        "DeltaEnt": ent.value,
        "DGCZ": C.dgcz(state, C.PULSE_OSC_M_GIVEN_C).value,
        "g_epr": steered.gains[0],
        "g_ent": ent.gains[0],
    }


def two_osc_row(r: float, r_prime: float, n_m1: float, n_m2: float) -> dict[str, float]:
    state = two_oscillator_state(TwoOscillatorParams(r, r_prime, n_m1, n_m2))
    steered = C.epr_reid(state, C.TWO_OSC_M2_GIVEN_M1)
    steering = C.epr_reid(state, C.TWO_OSC_M1_GIVEN_M2)
    ent = C.product_entanglement(state, C.TWO_OSC_M2_GIVEN_M1)
    return {
        "E_steered": steered.value,
        "E_steering": steering.value,
        "DeltaEnt": ent.value,
        "DGCZ": C.dgcz(state, C.TWO_OSC_M2_GIVEN_M1).value,
        "g_epr": steered.gains[0],
        "g_ent": ent.gains[0],
    }


def _pulse_job(args):
    return pulse_row(*args)


def _two_osc_job(args):
    return two_osc_row(*args)


def sweep_columns(scenario: str, quantities: Sequence[str]) -> tuple[list[str], list[str]]:
    """(header, row keys) in output order."""
    if scenario == "pulse-osc":
        index = ["r", "n0"]
        names = {"E_steered": "E_m_given_c", "E_steering": "E_c_given_m"}
    else:
        index = ["r", "n_m1", "n_m2"]
        names = {"E_steered": "E_m2_given_m1", "E_steering": "E_m1_given_m2"}
    names.update(DeltaEnt="delta_ent", DGCZ="dgcz_sum", g_epr="g_epr", g_ent="g_ent")
    keys = []
    for q in QUANTITIES:
        if q in quantities:
            keys.extend(["g_epr", "g_ent"] if q == "gains" else [q])
    return index + [names[k] for k in keys], keys


def run_sweep(
    scenario: str,
    r_grid: Iterable[float],
    occupations: Sequence,
    quantities: Sequence[str] = QUANTITIES,
    r_prime: Optional[float] = None,
    jobs: int = 1,
) -> list[str]:
    """CSV lines (header first) for a sweep, in deterministic (occupation, r) order."""
    header, keys = sweep_columns(scenario, quantities)
    r_grid = [float(r) for r in r_grid]
    if scenario == "pulse-osc":
        tasks = [(r, float(n0)) for n0 in occupations for r in r_grid]
        job = _pulse_job
    else:
        tasks = [
            (r, r if r_prime is None else r_prime, float(a), float(b))
            for a, b in occupations
            for r in r_grid
        ]
        job = _two_osc_job
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(job, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [job(t) for t in tasks]
    lines = [",".join(header)]
    for task, row in zip(tasks, rows):
        index = (task[0], task[1]) if scenario == "pulse-osc" else (task[0], task[2], task[3])
        lines.append(",".join([fmt(v) for v in index] + [fmt(row[k]) for k in keys]))
    return lines


def run_threshold(direction: str, grid: Sequence[float], fixed: Optional[float], sweep_var: str) -> list[str]:
    direction = DIRECTIONS[direction]
    if direction in ("m-given-c", "dgcz"):
        lines = ["n0,r_closed_form,r_bisection,residual"]
        for n0 in grid:
            if direction == "m-given-c":
                closed, curve, bound = T.r_epr_m_given_c(n0), T.e_m_given_c_curve(n0), 1.0
            else:
                closed, curve, bound = T.r_dgcz(n0), T.dgcz_curve(n0), 4.0
            lines.append(_threshold_line([n0], closed, curve, bound))
        return lines
    fixed = 0.0 if fixed is None else fixed
    other = "n_m1" if sweep_var == "n_m2" else "n_m2"
    lines = [f"{sweep_var},{other},r_closed_form,r_bisection,residual"]
    for n in grid:
        n_m1, n_m2 = (fixed, n) if sweep_var == "n_m2" else (n, fixed)
        if direction == "m2-given-m1":
            closed, curve = T.r_epr_m2_given_m1(n_m1, n_m2), T.e_m2_given_m1_curve(n_m1, n_m2)
        else:
            closed, curve = T.r_epr_m1_given_m2(n_m1, n_m2), T.e_m1_given_m2_curve(n_m1, n_m2)
        lines.append(_threshold_line([n, fixed], closed, curve, 1.0))
    return lines


def _threshold_line(index, closed, curve, bound) -> str:
    try:
        res = T.numeric_threshold(curve, bound)
        r_bis, residual = res.r_star, res.residual
    except BracketError as exc:
        print(f"warning: {exc}", file=sys.stderr)
        r_bis = residual = None
    return ",".join([fmt(v) for v in index] + [fmt(closed), fmt(r_bis), fmt(residual)])


def classify_report(scenario: str, r: float, n_a: float, n_b: Optional[float] = None, r_prime=None) -> list[str]:
    if scenario == "pulse-osc":
        state = pulse_oscillator_state(PulseOscillatorParams(r, n_a))
        result = C.classify_steering(state, C.PULSE_OSC_M_GIVEN_C, C.PULSE_OSC_C_GIVEN_M)
        a, b = "pulse", "oscillator"
        names = ("E_m_given_c", "E_c_given_m")
        params = f"r={r!r} n0={n_a!r}"
    else:
        state = two_oscillator_state(TwoOscillatorParams(r, r if r_prime is None else r_prime, n_a, n_b))
        result = C.classify_steering(state, C.TWO_OSC_M2_GIVEN_M1, C.TWO_OSC_M1_GIVEN_M2)
        a, b = "m1", "m2"
        names = ("E_m2_given_m1", "E_m1_given_m2")
        params = f"r={r!r} n_m1={n_a!r} n_m2={n_b!r}"
    v = result.verdict
    if v is C.Verdict.TWO_WAY:
        text, tag = f"two-way steering between {a} and {b}", "two-way"
    elif v is C.Verdict.ONE_WAY_A_TO_B:
        text, tag = f"one-way: {a} steers {b} ({b} steered only)", "one-way"
    elif v is C.Verdict.ONE_WAY_B_TO_A:
        text, tag = f"one-way: {b} steers {a} ({a} steered only)", "one-way"
    else:
        text, tag = "no steering", "no-steering"
    direction = {"one-way A->B": f"{a}->{b}", "one-way B->A": f"{b}->{a}"}.get(v.value, "none" if tag == "no-steering" else "both")
    return [
        f"scenario {scenario}: {params}",
        f"  {names[0]:<14} = {result.e_b_given_a:.10g}",
        f"  {names[1]:<14} = {result.e_a_given_b:.10g}",
        f"  {'delta_ent':<14} = {result.delta_ent:.10g}",
        f"  verdict: {text}",
        f"verdict={tag} direction={direction} {names[0]}={fmt(result.e_b_given_a)}"
        f" {names[1]}={fmt(result.e_a_given_b)} delta_ent={fmt(result.delta_ent)}",
    ]


# Parser.


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="pulsed-epr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = sub.add_parser("sweep", help="criteria versus squeeze parameter, as CSV")
    p.add_argument("--scenario", choices=SCENARIOS, default="pulse-osc")
    p.add_argument("--r", default="0:3:301", help="squeeze grid lo:hi:steps (inclusive) or list")
    p.add_argument("--n0", default="0,5,10,50", help="pulse-osc occupations")
    p.add_argument("--nm1", default=None, help="two-osc n_m1 list (crossed with --nm2)")
    p.add_argument("--nm2", default=None, help="two-osc n_m2 list")
    p.add_argument("--pair", action="append", default=None, help="two-osc occupation pair a,b (repeatable)")
    p.add_argument("--r-prime", type=float, default=None, help="second-cavity squeeze; default equals r")
    p.add_argument("--quantities", default="", help=f"comma subset of {','.join(QUANTITIES)}; empty for all")
    p.add_argument("--jobs", type=int, default=1)
    subs["sweep"] = p

    p = sub.add_parser("threshold", help="threshold squeeze parameter versus occupation, as CSV")
    p.add_argument("--direction", choices=sorted(DIRECTIONS), default="m-given-c")
    p.add_argument("--n", default="0,1,5,10,50,1000", help="occupation grid lo:hi:steps or list")
    p.add_argument("--log", action="store_true", help="geometric spacing for range grids")
    p.add_argument("--fixed", type=float, default=None, help="value of the other occupation (two-osc)")
    p.add_argument("--sweep-var", choices=("n_m1", "n_m2"), default="n_m2")
    subs["threshold"] = p

    p = sub.add_parser("classify", help="steering verdict for one parameter point")
    p.add_argument("--scenario", choices=SCENARIOS, default="pulse-osc")
    p.add_argument("--r", type=float, required=False)
    p.add_argument("--n0", type=float, default=0.0)
    p.add_argument("--nm1", type=float, default=0.0)
    p.add_argument("--nm2", type=float, default=0.0)
    p.add_argument("--r-prime", type=float, default=None)
    subs["classify"] = p

    p = sub.add_parser("physical", help="squeeze parameter from g_R, tau, kappa")
    p.add_argument("--g-r", type=float, required=False)
    p.add_argument("--tau", type=float, required=False)
    p.add_argument("--kappa", type=float, required=False)
    subs["physical"] = p

    for p in subs.values():
        p.add_argument("--config", default=None, help="key = value file of option defaults")
        if p is not subs["classify"] and p is not subs["physical"]:
            p.add_argument("--out", default=None, help="write CSV here instead of stdout")
    return parser, subs


def _apply_config(sub: argparse.ArgumentParser, config: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    defaults = {}
    for key, value in config.items():
        if key not in actions:
            raise UsageError(f"unknown config key {key!r}")
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} expects a boolean")
            defaults[key] = value.lower() in ("true", "1", "yes")
        elif isinstance(action, argparse._AppendAction):
            defaults[key] = [v.strip() for v in value.split(";") if v.strip()]
        else:
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config key {key!r}: {value!r} not in {sorted(action.choices)}")
            try:
                defaults[key] = action.type(value) if action.type else value
            except ValueError:
                raise UsageError(f"config key {key!r}: bad value {value!r}") from None
        action.required = False
    sub.set_defaults(**defaults)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _emit(lines: list[str], out: Optional[str]) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _two_osc_occupations(args) -> list[tuple[float, float]]:
    occ = [parse_pair(p) for p in args.pair] if args.pair else []
    if args.nm1 is not None or args.nm2 is not None:
        n1 = parse_list(args.nm1) if args.nm1 is not None else [0.0]
        n2 = parse_list(args.nm2) if args.nm2 is not None else [0.0]
        occ.extend((a, b) for a in n1 for b in n2)
    if not occ:
        raise UsageError("two-osc sweep needs --nm1/--nm2 or --pair")
    return occ


def _run(args) -> None:
    if args.command == "sweep":
        quantities = [q.strip() for q in args.quantities.split(",") if q.strip()] or list(QUANTITIES)
        unknown = set(quantities) - set(QUANTITIES)
        if unknown:
            raise UsageError(f"unknown quantities {sorted(unknown)}")
        r_grid = parse_range(args.r)
        if np.any(r_grid < 0):
            raise UsageError("squeeze parameters must be nonnegative")
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
        if args.scenario == "pulse-osc":
            occupations = parse_list(args.n0)
        else:
            occupations = _two_osc_occupations(args)
        _emit(run_sweep(args.scenario, r_grid, occupations, quantities, args.r_prime, args.jobs), args.out)
    elif args.command == "threshold":
        grid = parse_range(args.n, log=args.log)
        if np.any(grid < 0):
            raise UsageError("occupations must be nonnegative")
        _emit(run_threshold(args.direction, grid, args.fixed, args.sweep_var), args.out)
    elif args.command == "classify":
        _require(args, "r")
        n_a, n_b = (args.n0, None) if args.scenario == "pulse-osc" else (args.nm1, args.nm2)
        _emit(classify_report(args.scenario, args.r, n_a, n_b, args.r_prime), None)
    elif args.command == "physical":
        _require(args, "g_r", "tau", "kappa")
        r = squeeze_param_from_physical(args.g_r, args.tau, args.kappa)
        _emit([f"r={r!r}"], None)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser, subs = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if args.config:
            _apply_config(subs[args.command], read_config(args.config))
            args = parser.parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            _run(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, DomainError) as exc:
        print(f"pulsed-epr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularityError, ArithmeticError, BracketError, np.linalg.LinAlgError) as exc:
        print(f"pulsed-epr: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
