"""Corpus runner: generation and fault-detection experiments over the bundled routines.

Usage:
    python -m benchmarks.runner list                   # Routines, branch counts and domains
    python -m benchmarks.runner gen-all                # Certified SCU suites at depths 1..max_depth
    python -m benchmarks.runner eval-all --runs 20     # Np/Na over depths 1..5 with seeded mutants
    python -m benchmarks.runner eval-all --routine gcd # A single routine
    python -m benchmarks.runner timing                 # Depth 1 vs depth 15 generation time, plain bodies

Exit status is 2 when a generated test fails certification, when total Na
does not increase from depth 1 to depth 2, or when a timing ratio is over
the limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Add project root to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from unrolling.analysis import analyze
from unrolling.config import configure_logging, load_settings
from unrolling.evaluate import evaluate, format_report
from unrolling.mutate import mutate
from unrolling.parser import parse_file
from unrolling.syntax import Routine
from unrolling.testgen import CertificateError, generate
from unrolling.types import CorpusEntry, EvalReport

BENCHMARKS_DIR = Path(__file__).resolve().parent
DATA_DIR = BENCHMARKS_DIR / "data"
RESULTS_DIR = DATA_DIR / "results"

TIMING_DEPTH = 15
TIMING_RATIO_LIMIT = 10.0


class GenRecord(BaseModel):
    """Generation outcome of one routine at one depth."""
    routine: str
    depth: int
    targets: int
    tests: int
    uncovered: list[int] = Field(default_factory=list)
    seconds: float = 0.0


class TimingRecord(BaseModel):
    """Generation time of a plain-body routine at depth 1 and at a deep unrolling."""
    routine: str
    depth: int
    shallow_seconds: float
    deep_seconds: float
    ratio: float


class CorpusRun(BaseModel):
    """A complete corpus run, saved under data/results/."""
    run_id: str
    timestamp: str
    kind: str
    seed: int
    generation: list[GenRecord] = Field(default_factory=list)
    reports: list[EvalReport] = Field(default_factory=list)
    timing: list[TimingRecord] = Field(default_factory=list)


def load_corpus(name: str | None = None) -> list[CorpusEntry]:
    """Load the corpus index, optionally a single routine."""
    with open(DATA_DIR / "corpus.json") as f:
        data = json.load(f)
    entries = [CorpusEntry.model_validate(item) for item in data["routines"]]
    if name:
        entries = [e for e in entries if e.name == name]
        if not entries:
            raise ValueError(f"Routine '{name}' not found in corpus")
    return entries


def load_routine(entry: CorpusEntry) -> Routine:
    return parse_file(DATA_DIR / entry.file)


def _new_run(kind: str, seed: int) -> CorpusRun:
    now = datetime.now(timezone.utc)
    return CorpusRun(run_id=now.strftime("%Y%m%d_%H%M%S"), timestamp=now.isoformat(), kind=kind, seed=seed)


def save_run(run: CorpusRun) -> Path:
    RESULTS_DIR.mkdir(parents=True, exist_ok=True)
    results_file = RESULTS_DIR / f"{run.kind}_{run.run_id}.json"
    results_file.write_text(run.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return results_file


def list_corpus(name: str | None = None) -> list[CorpusEntry]:
    entries = load_corpus(name)
    print(f"{'Routine':<22} {'m':>2} {'Table m':>7} {'Max depth':>9}  Domain")
    print("-" * 78)
    for entry in entries:
        info = analyze(load_routine(entry))
        m = info.loops[0].m if info.loops else 0
        flag = "" if m == entry.branches else "  (branch count differs)"
        print(f"{entry.name:<22} {m:>2} {entry.branches:>7} {entry.max_depth:>9}  {entry.domain}{flag}")
    return entries


def gen_all(*, name: str | None = None, max_depth: int | None = None, seed: int = 0) -> CorpusRun:
    """Generate SCU suites at every depth up to each routine's max_depth."""
    run = _new_run("gen", seed)
    for entry in load_corpus(name):
        r = load_routine(entry)
        top = min(max_depth, entry.max_depth) if max_depth else entry.max_depth
        print(f"\n{entry.name} (m={entry.branches}, depths 1..{top})")
        for depth in range(1, top + 1):
            started = time.perf_counter()
            suite = generate(r, depth, entry.domain, seed)
            seconds = time.perf_counter() - started
            run.generation.append(GenRecord(
                routine=entry.name, depth=depth, targets=len(suite.targets), tests=len(suite.tests),
                uncovered=suite.uncovered, seconds=round(seconds, 4),
            ))
            missing = f", unreachable {suite.uncovered}" if suite.uncovered else ""
            print(f"  depth {depth}: {len(suite.tests)}/{len(suite.targets)} targets{missing}  {seconds:.3f}s")

    results_file = save_run(run)
    print(f"\nResults saved to {results_file}")
    return run


def eval_all(
    *,
    name: str | None = None,
    max_depth: int | None = None,
    runs: int = 20,
    mutants: int = 30,
    seed: int = 0,
) -> CorpusRun:
    """Np/Na for every routine over seeded mutants."""
    from benchmarks.evaluator import print_summary

    run = _new_run("eval", seed)
    for i, entry in enumerate(load_corpus(name)):
        r = load_routine(entry)
        depth = max_depth or entry.eval_depth
        variants = mutate(r, k=mutants, seed=seed)
        print(f"\n[{i+1}] {entry.name}: {len(variants)} mutants, depths 1..{depth}, {runs} runs")
        rep = evaluate(r, variants, depth, runs, entry.domain, base_seed=seed)
        run.reports.append(rep)
        print(format_report(rep))

    results_file = save_run(run)
    print(f"\nResults saved to {results_file}")
    print_summary(run)
    return run


def _generation_seconds(r: Routine, depth: int, entry: CorpusEntry, seed: int, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        generate(r, depth, entry.domain, seed)
        best = min(best, time.perf_counter() - started)
    return best


def timing(*, name: str | None = None, depth: int = TIMING_DEPTH, seed: int = 0, repeats: int = 3) -> CorpusRun:
    """Depth-1 against depth-``depth`` generation time for every plain-body routine.

    Each figure is the best of ``repeats`` fresh generations.
    """
    run = _new_run("timing", seed)
    print(f"{'Routine':<22} {'d1 (s)':>9} {'d' + str(depth) + ' (s)':>10} {'ratio':>7}")
    print("-" * 52)
    for entry in load_corpus(name):
        if entry.branches:
            continue
        r = load_routine(entry)
        shallow = _generation_seconds(r, 1, entry, seed, repeats)
        deep = _generation_seconds(r, depth, entry, seed, repeats)
        record = TimingRecord(
            routine=entry.name, depth=depth, shallow_seconds=round(shallow, 6),
            deep_seconds=round(deep, 6), ratio=round(deep / max(shallow, 1e-9), 2),
        )
        run.timing.append(record)
        print(f"{entry.name:<22} {shallow:>9.4f} {deep:>10.4f} {record.ratio:>7.2f}")

    results_file = save_run(run)
    print(f"\nResults saved to {results_file}")
    return run


def run_problems(run: CorpusRun, ratio_limit: float = TIMING_RATIO_LIMIT) -> list[str]:
    """Violations in a finished corpus run, one diagnostic line each."""
    from benchmarks.evaluator import corpus_totals, na_increases

    problems = []
    totals = corpus_totals(run)
    if 1 in totals and 2 in totals and not na_increases(run):
        problems.append(f"total Na does not increase from depth 1 ({totals[1][1]}) to depth 2 ({totals[2][1]})")
    for record in run.timing:
        if record.ratio > ratio_limit:
            problems.append(f"{record.routine}: depth {record.depth} generation takes {record.ratio:.1f}x "
                            f"the depth-1 time (limit {ratio_limit:g}x)")
    return problems


def run_action(action: str, **options) -> int:
    """Run one corpus action; 0 when clean, 2 on a certification failure or a violated trend."""
    name = options.get("name")
    seed = options.get("seed", 0)
    try:
        if action == "list":
            list_corpus(name)
            return 0
        if action == "gen-all":
            run = gen_all(name=name, max_depth=options.get("max_depth"), seed=seed)
        elif action == "eval-all":
            run = eval_all(name=name, max_depth=options.get("max_depth"), runs=options.get("runs", 20),
                           mutants=options.get("mutants", 30), seed=seed)
        elif action == "timing":
            run = timing(name=name, depth=options.get("depth") or TIMING_DEPTH, seed=seed)
        else:
            raise ValueError(f"Unknown corpus action '{action}'")
    except CertificateError as e:
        print(f"Certification failed: {e}", file=sys.stderr)
        return 2
    problems = run_problems(run)
    for problem in problems:
        print(f"Problem: {problem}", file=sys.stderr)
    return 2 if problems else 0


def main() -> int:
    load_dotenv()
    settings = load_settings()
    configure_logging(settings)

    parser = argparse.ArgumentParser(description="Run the benchmark corpus")
    parser.add_argument("action", choices=["list", "gen-all", "eval-all", "timing"])
    parser.add_argument("--routine", help="Only this routine")
    parser.add_argument("--max-depth", type=int, help="Cap on the unrolling depth")
    parser.add_argument("--runs", type=int, default=20, help="Repetition runs for eval-all")
    parser.add_argument("--mutants", type=int, default=30, help="Mutants per routine for eval-all")
    parser.add_argument("--depth", type=int, default=TIMING_DEPTH, help="Deep unrolling depth for timing")
    parser.add_argument("--seed", type=int, default=settings.seed)
    args = parser.parse_args()

    return run_action(
        args.action, name=args.routine, max_depth=args.max_depth, runs=args.runs,
        mutants=args.mutants, depth=args.depth, seed=args.seed,
    )


if __name__ == "__main__":
    sys.exit(main())
