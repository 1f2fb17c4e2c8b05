"""Command-line interface: ``fmc parse|run|reduce|check|encode|selftest``.

Exit status: 0 success (machine halted, normal form reached, term typed),
2 stuck or not typable, 3 out of fuel or search budget, 1 for errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import checks
from .encodings import ENCODERS, ForeignConstruct, SourceParseError, ThunksDisabled, encode, parse_source
from .machine import (
    FixedList, FuelExhausted as MachineFuel, Halted, Memory, NondetChooser, SeededRandom, Stuck,
    format_stack, memory, order_locations, run,
)
from .reduction import FuelExhausted, Strategy, format_log, reduction_sequence
from .syntax import MAIN, ParseError, locations, parse, print_loc, print_value
from .types import (
    SearchBudgetExceeded, TypeCheckFailure, TypeSyntaxError, check, parse_type, print_type,
    solve_type,
)

EXIT_OK, EXIT_ERROR, EXIT_STUCK, EXIT_FUEL = 0, 1, 2, 3
STREAM_LOCATIONS = ("out", "in", "rnd", "nd")
DEFAULT_SEED = 42


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Inputs


def read_expr(arg: str) -> str:
    """``@path`` reads a file, ``-`` reads standard input, anything else is literal."""
    if arg == "-":
        return sys.stdin.read()
    if arg.startswith("@"):
        return Path(arg[1:]).read_text()
    return arg


def parse_features(text: str | None) -> tuple:
    if not text:
        return ()
    return tuple(f.strip() for f in text.split(",") if f.strip())


def resolve_seed(arg_seed: int | None) -> int:
    if arg_seed is not None:
        return arg_seed
    env = os.environ.get("FMC_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"FMC_SEED must be an integer, got {env!r}")
    return DEFAULT_SEED


def _load_json(text: str):
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"--mem is neither a file nor valid JSON: {e}")


def _supplier(spec: dict, seed: int, features):
    kind = spec.get("kind", "list")
    if kind == "list":
        return FixedList(tuple(parse(i, features) for i in spec.get("items", [])))
    if kind == "random":
        return SeededRandom(spec.get("seed", seed), spec.get("values", "bool"),
                            spec.get("low", 0), spec.get("high", 9))
    if kind == "nondet":
        return NondetChooser(spec.get("policy", "leftmost"), spec.get("seed", seed))
    raise ConfigError(f"unknown supplier kind {kind!r}")


def build_memory(mem_arg: str | None, term, seed: int, features, init_cells: bool = True) -> Memory:
    """Memory from ``--mem`` plus defaults.

    Accepts ``{"loc": [items]}`` or ``{"stacks": {...}, "suppliers": {...}}``.
    Cell locations the term uses but the config leaves out start with one
    ``*``; ``rnd`` and ``nd`` get seeded suppliers unless configured.
    """
    config = _load_json(mem_arg) if mem_arg else {}
    if not isinstance(config, dict):
        raise ConfigError("--mem must be a JSON object")
    if "stacks" in config or "suppliers" in config:
        stacks, sup_specs = config.get("stacks", {}), config.get("suppliers", {})
    else:
        stacks, sup_specs = config, {}
    try:
        mem = memory(stacks, {}, features)
    except ParseError as e:
        raise ConfigError(f"bad stack item in --mem: {e}")
    suppliers = {loc: _supplier(spec, seed, features) for loc, spec in sup_specs.items()}
    used = locations(term)
    stacks = dict(mem.stacks)
    if "rnd" in used and "rnd" not in suppliers and not stacks.get("rnd"):
        suppliers["rnd"] = SeededRandom(seed, "int" if "consts" in features else "bool")
    if "nd" in used and "nd" not in suppliers and not stacks.get("nd"):
        suppliers["nd"] = NondetChooser("leftmost", seed)
    if init_cells:
        for loc in used:
            if loc not in STREAM_LOCATIONS and loc != MAIN and loc not in stacks:
                stacks[loc] = (parse("*"),)
    return Memory(stacks, suppliers)


# ---------------------------------------------------------------------------
# Output helpers


def _memory_json(mem: Memory) -> dict:
    return {print_loc(loc) or "λ": [print_value(v) for v in mem.stack(loc)]
            for loc in order_locations(mem.stacks) if mem.stack(loc)}


def _emit(args, text: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Commands


def cmd_parse(args) -> int:
    features = parse_features(args.features)
    term = parse(read_expr(args.expr), features)
    payload = {
        "term": str(term),
        "size": term.size,
        "free_variables": sorted(term.fv),
        "locations": [print_loc(l) or "λ" for l in order_locations(locations(term))],
    }
    _emit(args, str(term), payload)
    return EXIT_OK


def cmd_run(args) -> int:
    features = parse_features(args.features)
    seed = resolve_seed(args.seed)
    if args.fuel <= 0:
        raise ConfigError("--fuel must be positive")
    term = parse(read_expr(args.expr), features)
    mem = build_memory(args.mem, term, seed, features, not args.no_cell_init)
    trace = run(mem, term, args.fuel, record=not args.quiet)
    out = trace.outcome
    if isinstance(out, Halted):
        status, code = "halted", EXIT_OK
        detail = f"halted with {out.term}" if out.term.actions else "halted"
    elif isinstance(out, Stuck):
        status, code = "stuck", EXIT_STUCK
        detail = f"stuck ({out.reason}: {out.detail})"
    else:
        status, code = "fuel-exhausted", EXIT_FUEL
        detail = f"out of fuel after {trace.length} steps"
    final = trace.final
    lines = []
    if not args.quiet:
        lines.append(trace.format())
    lines.append(f"{detail} after {trace.length} steps")
    lines.append("memory: " + (" ".join(
        f"{print_loc(l) or 'λ'}={format_stack(final.memory.stack(l))}"
        for l in order_locations(final.memory.stacks)) or "(empty)"))
    payload = {
        "outcome": status,
        "steps": trace.length,
        "term": str(final.term),
        "memory": _memory_json(final.memory),
    }
    if isinstance(out, Stuck):
        payload["reason"] = out.reason
    if not args.quiet:
        payload["trace"] = [
            {"label": label, "memory": _memory_json(after.memory), "term": str(after.term)}
            for _, label, after in trace.triples()
        ]
    _emit(args, "\n".join(lines), payload)
    return code


STRATEGIES = {"lo": Strategy.LO, "li": Strategy.LI, "spine": Strategy.SPINE, "full": Strategy.FULL}


def cmd_reduce(args) -> int:
    features = parse_features(args.features)
    term = parse(read_expr(args.expr), features)
    strategy = STRATEGIES[args.strategy]
    try:
        steps = reduction_sequence(term, strategy, args.steps, args.eta)
    except FuelExhausted as e:
        payload = {"outcome": "fuel-exhausted", "steps": e.steps, "term": str(e.term), "looping": e.looping}
        _emit(args, f"{e}\nlast term: {e.term}", payload)
        return EXIT_FUEL
    final = steps[-1].after if steps else term
    text = format_log(term, steps) + f"\n{len(steps)} step{'s' if len(steps) != 1 else ''}, normal form: {final}"
    payload = {
        "outcome": "normal-form",
        "steps": len(steps),
        "log": [str(term)] + [str(s.after) for s in steps],
        "normal_form": str(final),
    }
    _emit(args, text, payload)
    return EXIT_OK


def _parse_context(text: str | None) -> dict:
    if not text:
        return {}
    ctx = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        name, sep, ty = part.partition(":")
        if not sep:
            raise ConfigError(f"context entries look like 'x: T', got {part.strip()!r}")
        ctx[name.strip()] = parse_type(ty)
    return ctx


def cmd_check(args) -> int:
    features = parse_features(args.features)
    term = parse(read_expr(args.expr), features)
    ctx = _parse_context(args.context)
    try:
        if args.type is None:
            found = solve_type(term, ctx, args.budget)
            if found is None:
                _emit(args, f"{term} has no type", {"typed": False, "term": str(term)})
                return EXIT_STUCK
            _emit(args, f"{term} : {print_type(found)}",
                  {"typed": True, "term": str(term), "type": print_type(found)})
            return EXIT_OK
        goal = parse_type(args.type)
        derivation = check(ctx, term, goal, args.budget)
    except SearchBudgetExceeded as e:
        _emit(args, f"undecided: {e}", {"typed": None, "term": str(term), "error": str(e)})
        return EXIT_FUEL
    except TypeCheckFailure as e:
        _emit(args, f"type error: {e}", {"typed": False, "term": str(term), "error": str(e)})
        return EXIT_STUCK
    _emit(args, str(derivation),
          {"typed": True, "term": str(term), "type": print_type(goal), "derivation": derivation.lines()})
    return EXIT_OK


def cmd_encode(args) -> int:
    features = parse_features(args.features) or ("thunks",)
    source = parse_source(read_expr(args.expr))
    term = encode(source, args.mode, features)
    _emit(args, str(term), {"mode": args.mode, "term": str(term)})
    return EXIT_OK


SELFTEST_QUICK = [
    ("state laws", checks.state_law_report, {}),
    ("confluence", checks.confluence_report, {"max_size": 6}),
    ("spine", checks.spine_report, {"max_size": 7}),
    ("parallel", checks.parallel_report, {"instances": 500}),
    ("termination", checks.termination_report, {"max_size": 6}),
    ("subject reduction", checks.subject_reduction_report, {"instances": 200}),
    ("run composition", checks.run_composition_report, {"terms": 100}),
    ("cbn adequacy", checks.adequacy_report, {"mode": "cbn", "max_size": 5}),
    ("cbv adequacy", checks.adequacy_report, {"mode": "cbv", "max_size": 5}),
    ("monad laws", checks.law_report, {"kind": "monad", "instances": 100}),
    ("arrow laws", checks.law_report, {"kind": "arrow", "instances": 100}),
]

SELFTEST_FULL = [
    ("state laws", checks.state_law_report, {}),
    ("confluence", checks.confluence_report, {"max_size": 6}),
    ("spine", checks.spine_report, {"max_size": 8}),
    ("parallel", checks.parallel_report, {"instances": 10_000}),
    ("bottom", checks.bottom_report, {}),
    ("termination", checks.termination_report, {"max_size": 8}),
    ("subject reduction", checks.subject_reduction_report, {"instances": 5_000}),
    ("run composition", checks.run_composition_report, {"terms": 1_000}),
    ("cbn adequacy", checks.adequacy_report, {"mode": "cbn", "max_size": 6}),
    ("cbv adequacy", checks.adequacy_report, {"mode": "cbv", "max_size": 6}),
    ("monad laws", checks.law_report, {"kind": "monad", "instances": 1_000}),
    ("arrow laws", checks.law_report, {"kind": "arrow", "instances": 1_000}),
]


def cmd_selftest(args) -> int:
    suite = SELFTEST_FULL if args.full else SELFTEST_QUICK
    results = []
    for name, fn, kwargs in suite:
        start = time.perf_counter()
        rep = fn(**kwargs)
        results.append((rep, time.perf_counter() - start))
        if not args.json:
            print(rep.summary(), flush=True)
    ok = all(rep.ok for rep, _ in results)
    if args.json:
        print(json.dumps({
            "ok": ok,
            "checks": [{"name": rep.name, "ok": rep.ok, "checked": rep.checked, "skipped": rep.skipped,
                        "failures": rep.failures[:5]} for rep, _ in results],
        }, ensure_ascii=False, sort_keys=True))
    return EXIT_OK if ok else EXIT_ERROR


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--features", help="comma-separated: thunks,consts")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="fmc", description="Functional Machine Calculus toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and pretty-print a term")
    p.add_argument("expr", help="term, @file or -")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("run", parents=[common], help="run a term on the abstract machine")
    p.add_argument("expr")
    p.add_argument("--mem", help="initial memory: inline JSON or a JSON file")
    p.add_argument("--fuel", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None, help="seed for random streams (default 42, or FMC_SEED)")
    p.add_argument("--quiet", action="store_true", help="print only the outcome")
    p.add_argument("--no-cell-init", action="store_true", help="do not pre-load cells with *")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reduce", parents=[common], help="normalize a term, printing each step")
    p.add_argument("expr")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="li")
    p.add_argument("--steps", type=int, default=10_000, help="maximum number of steps")
    p.add_argument("--eta", action="store_true", help="also contract eta redexes")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("check", parents=[common], help="type-check a term")
    p.add_argument("expr")
    p.add_argument("--type", help="goal type, e.g. 'a(Z) > Z'; omitted: search for one")
    p.add_argument("--context", help="free variable types, e.g. 'f: Z > Z; x: o'")
    p.add_argument("--budget", type=int, default=200_000)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("encode", parents=[common], help="translate a source program into the FMC")
    p.add_argument("expr")
    p.add_argument("--mode", choices=sorted(ENCODERS), default="cbn")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("selftest", parents=[common], help="run the property checks")
    p.add_argument("--full", action="store_true", help="acceptance-sized instead of quick")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SourceParseError, TypeSyntaxError) as e:
        print(f"parse error: {e}", file=sys.stderr)
    except (ConfigError, ForeignConstruct, ThunksDisabled, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
