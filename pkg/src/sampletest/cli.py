"""Command-line workbench: ``sampletest gen | solve | verify | validate | bench``.

Exit codes: 0 found/pass, 1 not found/fail, 2 inconclusive, 3 bad input.

Every subcommand accepts ``--config FILE``, a flat ``key = value`` file
whose keys are the long flag names (dashes or underscores); flags given on
the command line win.  ``SAMPLETEST_SEED`` sets the default seed.  Instance
``i`` of a run with seed ``s`` uses stream ``s ^ i``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import inspect
import json
import logging
import os
import sys
from pathlib import Path

from .analysis import estimate_rates
from .cnf import Assignment, Formula, StructureError, num_clauses_unsat
from .dimacs import load_dimacs, write_dimacs
from .distributions import (
    sample_assignment_uniform,
    sample_formula_fixed_m,
    sample_planted_formula,
    sample_threshold_formula,
    threshold_density,
)
from .rng import RandomStream
from .solver import (
    DEFAULT_K_STAR,
    FOUND,
    INCONCLUSIVE,
    SolverParams,
    alpha_sample_and_test,
    predicted_runtime,
)
from .validation import REFERENCE_REGIME, SUITES, checks_to_csv

log = logging.getLogger("sampletest")

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_STRUCTURE = 0, 1, 2, 3
SEED_ENV = "SAMPLETEST_SEED"
SUBCOMMANDS = ("gen", "solve", "verify", "validate", "bench")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise StructureError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in {"1", "true", "yes", "on"}:
        return True
    if low in {"0", "false", "no", "off"}:
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _int_list(text) -> list[int]:
    out = []
    for part in str(text).replace(",", " ").split():
        if ":" in part:
            lo, hi = part.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


# -- gen ------------------------------------------------------------------------

def planted_instance(n: int, k: int, m: int, rng: RandomStream) -> tuple[Assignment, Formula]:
    a = sample_assignment_uniform(n, rng.child(0))
    return a, sample_planted_formula(a, m, k, rng.child(1))


def _instance_paths(out: Path, count: int) -> list[Path]:
    if count == 1 and out.suffix:
        return [out]
    out.mkdir(parents=True, exist_ok=True)
    return [out / f"instance_{i:04d}.cnf" for i in range(count)]


def cmd_gen(args) -> int:
    if args.mode in {"fixed-m", "planted"} and args.m is None:
        raise StructureError(f"mode {args.mode} needs --m")
    base = RandomStream(args.seed)
    for i, path in enumerate(_instance_paths(Path(args.out), args.count)):
        rng = base.derive(i)
        if args.mode == "fixed-m":
            f = sample_formula_fixed_m(args.n, args.k, args.m, rng)
        elif args.mode == "threshold-poisson":
            f = sample_threshold_formula(args.n, args.k, rng)
        else:
            a, f = planted_instance(args.n, args.k, args.m, rng)
            sol = path.with_suffix(".sol")
            sol.write_text("v " + " ".join(map(str, a.to_dimacs())) + " 0\n")
        header = f"mode={args.mode} n={f.n} k={f.k} m={f.m} seed={args.seed} index={i} stream={rng.stream}"
        path.write_text(write_dimacs(f, [header]))
        print(path)
    return EXIT_OK


# -- solve / verify ---------------------------------------------------------------

def _params(f: Formula, args) -> SolverParams:
    return SolverParams.for_formula(
        f, alpha_n=args.alpha_n, k_star=args.k_star, threshold=args.threshold,
        budget_scale=args.budget_scale, always_positive=args.always_positive)


def cmd_solve(args) -> int:
    f = load_dimacs(args.file, strict=not args.tolerant)
    result = alpha_sample_and_test(f, _params(f, args), RandomStream(args.seed),
                                   workers=args.workers, small_k_restarts=args.restarts)
    payload = json.dumps({"file": str(args.file), "seed": args.seed, **result.to_json()}, indent=2)
    if args.json_out:
        Path(args.json_out).write_text(payload + "\n")
    print(payload)
    if result.status == FOUND:
        return EXIT_OK
    return EXIT_INCONCLUSIVE if result.status == INCONCLUSIVE else EXIT_FAIL


def read_assignment(path, n: int) -> Assignment:
    """Assignment from a ``v``-line file, a solve JSON, or a bare bit string."""
    text = Path(path).read_text()
    stripped = text.strip()
    if stripped.startswith("{"):
        bits = json.loads(stripped).get("assignment")
        if bits is None:
            raise StructureError("JSON carries no assignment")
        a = Assignment.from_string(bits)
    elif stripped.startswith("v") or stripped.startswith("-") or " " in stripped:
        lits = [int(t) for line in stripped.splitlines() for t in line.split() if t not in {"v", "s"}
                and t.lstrip("-").isdigit()]
        values = {abs(x): x > 0 for x in lits if x != 0}
        if set(values) != set(range(1, n + 1)):
            raise StructureError(f"assignment must set each of variables 1..{n} exactly")
        a = Assignment.from_bools(values[i] for i in range(1, n + 1))
    else:
        a = Assignment.from_string(stripped)
    if a.n != n:
        raise StructureError(f"assignment has length {a.n}, formula has n={n}")
    return a


def cmd_verify(args) -> int:
    f = load_dimacs(args.file, strict=not args.tolerant)
    a = read_assignment(args.assignment, f.n)
    unsat = num_clauses_unsat(f, a)
    print(json.dumps({"file": str(args.file), "satisfied": unsat == 0, "unsatisfied_clauses": unsat}))
    return EXIT_OK if unsat == 0 else EXIT_FAIL


# -- validate ---------------------------------------------------------------------

VALIDATE_KEYS = ("n", "k", "m", "samples", "formulas", "alpha_n", "T", "draws")


def cmd_validate(args) -> int:
    fn = SUITES[args.suite]
    accepted = inspect.signature(fn).parameters
    kwargs = {}
    if args.reference_regime and args.suite in {"histogram", "rates"}:
        kwargs.update(REFERENCE_REGIME)
    for key in VALIDATE_KEYS:
        value = getattr(args, key)
        if value is not None and key in accepted:
            kwargs[key] = value
    if "seeds" in accepted and (args.seed is not None or args.seeds is not None):
        default = inspect.signature(fn).parameters["seeds"].default
        start = args.seed or 0
        kwargs["seeds"] = range(start, start + (args.seeds or len(default)))
    elif "seed" in accepted and args.seed is not None:
        kwargs["seed"] = args.seed
    ignored = [k for k in VALIDATE_KEYS if getattr(args, k) is not None and k not in accepted]
    if ignored:
        log.warning("suite %s ignores %s", args.suite, ", ".join(ignored))

    checks = fn(**kwargs)
    for c in checks:
        print(c.line())
    if args.csv:
        Path(args.csv).write_text(checks_to_csv(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


# -- bench ------------------------------------------------------------------------

BENCH_FIELDS = [
    "n", "k", "m", "seed", "alpha_n", "threshold_T", "sample_budget", "cap_S", "k_star", "budget_scale",
    "always_positive", "status", "samples_used", "searches_triggered", "promising", "cap_abort",
    "nodes", "clause_evaluations", "wall_time", "p_TP", "p_FP", "rates_surrogate",
    "predicted_clause_evaluations", "searches_per_1000_samples",
]


def bench_row(n: int, k: int, m: int, seed: int, args) -> dict:
    """Solve one planted instance and price it with the runtime model."""
    a, f = planted_instance(n, k, m, RandomStream(seed))
    params = _params(f, args)
    result = alpha_sample_and_test(f, params, RandomStream(seed).child(2), workers=args.workers,
                                   small_k_restarts=args.restarts)
    if n <= args.exhaustive_limit:
        rates = estimate_rates(f, params.alpha_n, params.threshold_T)
    else:
        rates = estimate_rates(f, params.alpha_n, params.threshold_T, mode="sampled", planted=a,
                               samples=args.rate_samples, rng=RandomStream(seed).child(3))
    pred = predicted_runtime(m, rates, params.alpha_n / n, n, k, node_cost=m)
    return {
        "n": n, "k": k, "m": m, "seed": seed, "alpha_n": params.alpha_n,
        "threshold_T": params.threshold_T, "sample_budget": params.sample_budget, "cap_S": params.cap_S,
        "k_star": params.k_star, "budget_scale": args.budget_scale, "always_positive": args.always_positive,
        "status": result.status, "samples_used": result.samples_used,
        "searches_triggered": result.searches_triggered, "promising": result.promising,
        "cap_abort": result.cap_abort, "nodes": result.nodes,
        "clause_evaluations": result.clause_evaluations, "wall_time": round(result.wall_time, 6),
        "p_TP": rates.p_TP, "p_FP": rates.p_FP, "rates_surrogate": rates.surrogate,
        "predicted_clause_evaluations": pred.total,
        "searches_per_1000_samples": 1000 * result.searches_triggered / max(result.samples_used, 1),
    }


def cmd_bench(args) -> int:
    density = args.density if args.density is not None else threshold_density(args.k)
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=BENCH_FIELDS)
        w.writeheader()
        for n in args.n_values:
            m = args.m if args.m is not None else round(density * n)
            for s in range(args.seeds):
                w.writerow(bench_row(n, args.k, m, args.seed ^ s, args))
                out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def _solver_flags(p):
    p.add_argument("--alpha-n", type=int, help="search radius override")
    p.add_argument("--k-star", type=int, default=DEFAULT_K_STAR,
                   help="widths below this use the small-k path (default %(default)s)")
    p.add_argument("--threshold", type=float, help="clause-count threshold override")
    p.add_argument("--budget-scale", type=float, default=1.0)
    p.add_argument("--always-positive", type=_bool, nargs="?", const=True, default=False,
                   help="every sample passes the test (baseline)")
    p.add_argument("--restarts", type=int, default=100, help="small-k restarts")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sampletest", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file")

    g = sub.add_parser("gen", parents=[common], help="write random DIMACS instances")
    g.add_argument("--mode", choices=["fixed-m", "threshold-poisson", "planted"], default="fixed-m")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", default="instance.cnf", help="file (count 1) or directory")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="run the solver on a DIMACS file")
    s.add_argument("file")
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--json-out")
    s.add_argument("--tolerant", action="store_true", help="accept mixed clause widths")
    _solver_flags(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check an assignment against a formula")
    v.add_argument("file")
    v.add_argument("assignment", help="v-line file, solve JSON, or bit string file")
    v.add_argument("--tolerant", action="store_true")
    v.set_defaults(func=cmd_verify)

    val = sub.add_parser("validate", parents=[common], help="run a named validation suite")
    val.add_argument("suite", choices=sorted(SUITES))
    val.add_argument("--reference-regime", action="store_true", help="16 variables, 163 clauses, k=4, radius 4, T=155.5")
    for key in ("n", "k", "m", "samples", "formulas", "alpha_n", "draws"):
        val.add_argument(f"--{key.replace('_', '-')}", type=int)
    val.add_argument("--T", type=float)
    val.add_argument("--seed", type=int)
    val.add_argument("--seeds", type=int)
    val.add_argument("--csv")
    val.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", parents=[common], help="measured vs predicted cost on planted instances")
    b.add_argument("--n-values", type=_int_list, default=[12, 14, 16], help="e.g. '12,14,16' or '12:16'")
    b.add_argument("--k", type=int, default=4)
    b.add_argument("--m", type=int)
    b.add_argument("--density", type=float, help="m = round(density n); default is the threshold density")
    b.add_argument("--seed", type=int, default=_default_seed())
    b.add_argument("--seeds", type=int, default=3)
    b.add_argument("--exhaustive-limit", type=int, default=20)
    b.add_argument("--rate-samples", type=int, default=100_000)
    b.add_argument("--csv")
    _solver_flags(b)
    b.set_defaults(func=cmd_bench)
    return parser


def _subparser(parser, name):
    return parser._subparsers._group_actions[0].choices[name]


def load_config(path, sub: argparse.ArgumentParser) -> dict:
    """Typed defaults for ``sub`` from a flat ``key = value`` file."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string("[config]\n" + Path(path).read_text())
    except (OSError, configparser.Error) as exc:
        raise StructureError(f"bad config {path}: {exc}") from None
    actions = {a.dest: a for a in sub._actions}
    out = {}
    for key, raw in cp["config"].items():
        dest = key.replace("-", "_")
        if dest not in actions or dest in {"help", "config"}:
            raise StructureError(f"unknown config key {key!r}")
        action = actions[dest]
        if action.const is True and action.type is None:
            value = _bool(raw)
        else:
            try:
                value = action.type(raw) if action.type else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise StructureError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise StructureError(f"config key {key!r}: {value!r} not in {sorted(action.choices)}")
        out[dest] = value
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        first = argparse.ArgumentParser(add_help=False)
        first.add_argument("-v", "--verbose", action="store_true")
        first.add_argument("--config")
        first.add_argument("command", nargs="?")
        pre, _ = first.parse_known_args(argv)
        if pre.config and pre.command in SUBCOMMANDS:
            sub = _subparser(parser, pre.command)
            defaults = load_config(pre.config, sub)
            sub.set_defaults(**defaults)
            for action in sub._actions:
                if action.dest in defaults:
                    action.required = False
        args = parser.parse_args(argv)
    except StructureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except SystemExit as exc:
        return EXIT_STRUCTURE if exc.code else EXIT_OK

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (StructureError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE


if __name__ == "__main__":
    sys.exit(main())
