"""CLI entry point: python -m unrolling <command> ...

Exit status: 0 on success, 1 on a usage or input error, 2 when a command
finds a problem (law counterexample, unrolling mismatch, failing test run).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from dotenv import load_dotenv

from .config import Settings, configure_logging, load_settings
from .testgen import CertificateError
from .types import Domain, InstrumentMode, MutationOperator, SearchOrder, UnrollForm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROBLEM = 2


def _domain(args: argparse.Namespace) -> Domain:
    return Domain.parse(args.int_range, args.array_max)


def _add_domain(p: argparse.ArgumentParser, default_range: str = "0..3") -> None:
    p.add_argument("--int-range", default=default_range, help="Integer range A..B for inputs and array elements")
    p.add_argument("--array-max", type=int, default=3, help="Maximum array length")


def _parse_value(text: str):
    lowered = text.strip().lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        raise ValueError(f"Cannot read input value '{text}'") from None
    if isinstance(value, bool) or isinstance(value, int):
        return value
    if isinstance(value, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        return value
    raise ValueError(f"Input values must be integers, booleans or integer lists, got '{text}'")


def parse_inputs(pairs: list[str]) -> dict:
    """``["x=3", "a=[1,2]", "b=true"]`` -> input mapping."""
    inputs = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name.strip():
            raise ValueError(f"Inputs must look like name=value, got '{pair}'")
        inputs[name.strip()] = _parse_value(value)
    return inputs


# --- Commands ---


def cmd_parse(args: argparse.Namespace, settings: Settings) -> int:
    from .parser import parse_file
    from .pretty import pretty

    print(pretty(parse_file(args.file)), end="")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace, settings: Settings) -> int:
    from .analysis import analyze
    from .parser import parse_file

    info = analyze(parse_file(args.file))
    print(f"Routine:   {info.routine}")
    print(f"Loops:     {info.loop_count}")
    print(f"Nesting:   {info.nesting_depth}")
    for loop in info.loops:
        print(f"  {loop.label:<8} line {loop.line:<4} branches m={loop.m}  depth {loop.depth}")
    return EXIT_OK


def cmd_unroll(args: argparse.Namespace, settings: Settings) -> int:
    from .parser import parse_file
    from .pretty import pretty
    from .unroll import UnrollConfig, semantic_check, unroll_routine

    r = parse_file(args.file)
    cfg = UnrollConfig(args.depth, args.loop, UnrollForm(args.form), settings.max_depth)
    if not args.check:
        print(pretty(unroll_routine(r, cfg)), end="")
        return EXIT_OK
    report = semantic_check(r, cfg, _domain(args), args.fuel or settings.run_fuel)
    print(f"{report.routine} depth {report.depth} ({report.form.value}): {report.checked} input(s), "
          f"{report.accepted} accepted, {report.rejected} needing more iterations, "
          f"{len(report.mismatches)} mismatch(es)")
    for m in report.mismatches[:20]:
        print(f"  {m.inputs}: {m.reason}")
    return EXIT_OK if report.ok else EXIT_PROBLEM


def cmd_instrument(args: argparse.Namespace, settings: Settings) -> int:
    from .instrument import instrument
    from .parser import parse_file
    from .pretty import pretty

    ir = instrument(parse_file(args.file), args.depth, InstrumentMode(args.mode))
    source = pretty(ir.routine)
    manifest = [t.model_dump(mode="json") for t in ir.targets]
    if args.output:
        out = Path(args.output)
        out.write_text(source, encoding="utf-8")
        targets_file = out.with_suffix(".targets.json")
        targets_file.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        print(f"Wrote {out} and {targets_file} ({len(ir.targets)} targets)")
        return EXIT_OK
    print(source, end="")
    print(f"-- {len(ir.targets)} target(s), m={ir.m}, n={ir.n}")
    for t in ir.targets:
        print(f"-- target {t.target_id}: {t.kind.value} level {t.level} branch {t.branch} line {t.line}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, settings: Settings) -> int:
    from .parser import parse_file
    from .testgen import generate, save_suite

    seed = settings.seed if args.seed is None else args.seed
    suite = generate(
        parse_file(args.file), args.depth, _domain(args), seed,
        InstrumentMode(args.mode), SearchOrder(args.order), args.fuel or settings.run_fuel, args.budget,
    )
    print(f"{suite.routine} depth {suite.depth} ({suite.mode.value}, {suite.order.value}, seed {seed}): "
          f"{len(suite.tests)}/{len(suite.targets)} targets covered")
    for tc in suite.tests:
        print(f"  test {tc.test_id}: target {tc.target_id} level{tc.level}_branch{tc.branch} {tc.input}")
    if suite.uncovered:
        print(f"  unreachable within the domain: {suite.uncovered}")
    if suite.unknown:
        print(f"  over the search budget: {suite.unknown}")
    if args.output:
        print(f"Suite saved to {save_suite(suite, args.output)}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    from .interpreter import format_trace, run, satisfies_require
    from .parser import parse_file
    from .testgen import load_suite

    r = parse_file(args.file)
    if args.suite:
        cases = [(f"test {tc.test_id}", tc.input) for tc in load_suite(args.suite).tests]
    elif args.input:
        cases = [("input", parse_inputs(args.input))]
    else:
        raise ValueError("Give either --suite or --input")
    failures = 0
    for name, inputs in cases:
        if not satisfies_require(r, inputs):
            print(f"{name}: {inputs} violates the precondition, skipped")
            continue
        outcome = run(r, inputs, args.fuel or settings.run_fuel, record_trace=args.trace)
        print(f"{name}: {inputs} -> {outcome.describe()}")
        if args.trace:
            print(format_trace(outcome.trace))
        failures += not outcome.ok
    print(f"{len(cases)} run(s), {failures} failing")
    return EXIT_PROBLEM if failures else EXIT_OK


def cmd_denote(args: argparse.Namespace, settings: Settings) -> int:
    from .denotation import denote
    from .parser import parse_file

    d = denote(parse_file(args.file), _domain(args), args.fuel or settings.denote_fuel, args.view)
    print(f"{len(d.traces)} trace(s); {len(d.unresolved)} unresolved, {len(d.faulted)} faulted input(s)")
    if args.show:
        for trace in d.traces.sorted():
            print(f"  {trace}")
    return EXIT_OK


def cmd_mutate(args: argparse.Namespace, settings: Settings) -> int:
    from .mutate import ALL_OPERATORS, mutate, write_mutants
    from .parser import parse_file

    r = parse_file(args.file)
    seed = settings.seed if args.seed is None else args.seed
    ops = [MutationOperator(op) for op in args.ops] if args.ops else ALL_OPERATORS
    mutants = mutate(r, ops, args.count, seed)
    manifest = write_mutants(r, mutants, args.output, seed)
    for m in mutants:
        print(f"  {m.mutant_id:<24} {m.operator.value:<14} {m.description}")
    print(f"{len(mutants)} mutant(s) written, manifest {manifest}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    from .evaluate import evaluate, report
    from .mutate import load_mutants
    from .parser import parse_file

    r = parse_file(args.file)
    _, loaded = load_mutants(args.mutants)
    seed = settings.seed if args.seed is None else args.seed
    rep = evaluate(
        r, [(entry.mutant_id, routine) for entry, routine in loaded], args.max_depth, args.runs,
        _domain(args), seed, args.fuel or settings.run_fuel, InstrumentMode(args.mode), SearchOrder(args.order),
        include_nontermination=not args.no_nontermination,
    )
    print(report(rep, args.output))
    if args.output:
        print(f"Report saved next to {args.output} (.json, .csv)")
    return EXIT_OK


def cmd_laws(args: argparse.Namespace, settings: Settings) -> int:
    from .lawcheck import LawBounds, check_all

    bounds = None
    if args.fuel:
        bounds = LawBounds(fuel=args.fuel) if not args.exhaustive else LawBounds(2, 2, fuel=args.fuel)
    seed = settings.seed if args.seed is None else args.seed
    reports = check_all(args.samples, seed, bounds, args.exhaustive, args.law or None)
    for rep in reports:
        print(f"  {rep.status.value.upper():<8} {rep.law_name:<24} {rep.samples_run:>7} sample(s)  {rep.elapsed:.3f}s")
        if rep.counterexample:
            print(f"           counterexample: {rep.counterexample}")
    failed = [rep for rep in reports if rep.counterexample]
    print(f"{len(reports) - len(failed)}/{len(reports)} laws hold ({reports[0].mode if reports else 'random'})")
    return EXIT_PROBLEM if failed else EXIT_OK


def cmd_corpus(args: argparse.Namespace, settings: Settings) -> int:
    from benchmarks import runner

    return runner.run_action(
        args.action, name=args.routine, max_depth=args.max_depth, runs=args.runs, mutants=args.count,
        depth=args.timing_depth, seed=settings.seed if args.seed is None else args.seed,
    )


# --- Argument parsing ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unrolling",
        description="Loop unrolling, seeded-contradiction test generation and fault-detection experiments",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="Parse, type-check and pretty-print a routine")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("analyze", help="Loops, nesting and branch counts")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("unroll", help="Unroll the routine's loop")
    p.add_argument("file")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--form", choices=[f.value for f in UnrollForm], default="strict")
    p.add_argument("--loop", help="Loop label (loop1, loop2, ...) when the routine has several")
    p.add_argument("--check", action="store_true", help="Compare with the original over the domain")
    p.add_argument("--fuel", type=int)
    _add_domain(p)
    p.set_defaults(func=cmd_unroll)

    p = sub.add_parser("instrument", help="Seed contradictions (sc) or per-level targets (scu)")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--mode", choices=[m.value for m in InstrumentMode], default="scu")
    p.add_argument("-o", "--output", help="Write the .mil here and the targets next to it")
    p.set_defaults(func=cmd_instrument)

    p = sub.add_parser("gen", help="Generate a certified test suite")
    p.add_argument("file")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in InstrumentMode], default="scu")
    p.add_argument("--order", choices=[o.value for o in SearchOrder], default="lex")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, help="Cap on inputs examined")
    p.add_argument("--fuel", type=int)
    p.add_argument("-o", "--output", help="Suite file (JSON)")
    _add_domain(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="Run a suite or one input on a routine")
    p.add_argument("file")
    p.add_argument("--suite")
    p.add_argument("--input", nargs="+", metavar="NAME=VALUE")
    p.add_argument("--trace", action="store_true", help="Print the state trace of each run")
    p.add_argument("--fuel", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("denote", help="Bounded trace-set denotation over a domain")
    p.add_argument("file")
    p.add_argument("--view", choices=["union", "rec"], default="union")
    p.add_argument("--fuel", type=int)
    p.add_argument("--show", action="store_true", help="Print every trace")
    _add_domain(p, "0..2")
    p.set_defaults(func=cmd_denote)

    p = sub.add_parser("mutate", help="Write seeded first-order mutants")
    p.add_argument("file")
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--seed", type=int)
    p.add_argument("--ops", nargs="+", choices=[op.value for op in MutationOperator])
    p.add_argument("-o", "--output", required=True, help="Output directory")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("eval", help="Np/Na over depths 1..N and R runs")
    p.add_argument("file")
    p.add_argument("--mutants", required=True, help="Directory written by 'mutate'")
    p.add_argument("--max-depth", type=int, default=5)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=[m.value for m in InstrumentMode], default="scu")
    p.add_argument("--order", choices=[o.value for o in SearchOrder], default="random")
    p.add_argument("--no-nontermination", action="store_true", help="Do not count fuel exhaustion as a fault")
    p.add_argument("--fuel", type=int)
    p.add_argument("-o", "--output", help="Report path; .json and .csv are written")
    _add_domain(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("laws", help="Check the trace-algebra laws")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--exhaustive", action="store_true", help="Every instance over 2 states, traces up to length 2")
    p.add_argument("--law", nargs="+", help="Only these laws")
    p.add_argument("--fuel", type=int, help="Loop approximation index K")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("corpus", help="The bundled benchmark routines")
    p.add_argument("action", choices=["list", "gen-all", "eval-all", "timing"])
    p.add_argument("--routine", help="Only this routine")
    p.add_argument("--max-depth", type=int)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--count", type=int, default=30, help="Mutants per routine")
    p.add_argument("--timing-depth", type=int, default=15, help="Deep unrolling depth for timing")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        settings = load_settings()
        configure_logging(settings, args.verbose)
        return args.func(args, settings)
    except CertificateError as e:
        print(f"Certification failed: {e}", file=sys.stderr)
        return EXIT_PROBLEM
    except (ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
