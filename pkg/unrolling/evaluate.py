"""Fault-detection experiment: suites at depths 1..n run against mutants.

A fault is the tuple (variant, tag, line) of a failing run: the tag of the
violated ensure clause, ``check`` for a user check, the runtime error kind,
or ``nontermination`` when the fuel runs out. For depth i and run j,
F(i, j) is the set of faults the suite finds over every mutant;
Np(i) = sum_j |F(i, j)| / R and Na(i) = |union_j F(i, j)|.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import time
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import MutableMapping, Sequence, Union

from .interpreter import Inputs, input_key, run
from .mutate import Mutant
from .syntax import Routine
from .testgen import ProfileCache, generate, ordered_candidates
from .types import (
    Domain,
    EvalCell,
    EvalReport,
    FaultRecord,
    InstrumentMode,
    Origin,
    RunStatus,
    SearchOrder,
    TestSuite,
)

logger = logging.getLogger(__name__)

NONTERMINATION = "nontermination"

Variant = Union[Mutant, tuple[str, Routine]]
FaultCache = MutableMapping[tuple[str, tuple], "FaultRecord | None"]


def derive_seed(base_seed: int, run_index: int) -> int:
    """Per-run seed, shared by every depth of that run."""
    digest = hashlib.sha256(f"{base_seed}:{run_index}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def _variants(mutants: Sequence[Variant]) -> list[tuple[str, Routine]]:
    return [(m.mutant_id, m.mutated) if isinstance(m, Mutant) else (m[0], m[1]) for m in mutants]


def fault_of(variant_id: str, routine: Routine, inputs: Inputs, fuel: int = 64) -> FaultRecord | None:
    outcome = run(routine, inputs, fuel, record_trace=False)
    if outcome.ok:
        return None
    if outcome.status is RunStatus.CHECK_VIOLATION and outcome.origin is not Origin.USER:
        return None
    if outcome.status is RunStatus.FUEL_EXHAUSTED:
        logger.info("%s: nontermination on %s", variant_id, dict(inputs))
    return FaultRecord(variant=variant_id, tag=outcome.tag or outcome.status.value, line=outcome.line or 0)


def run_suite(
    variant_id: str,
    routine: Routine,
    suite: TestSuite,
    fuel: int = 64,
    cache: FaultCache | None = None,
    include_nontermination: bool = True,
) -> set[FaultRecord]:
    """Distinct faults the suite's inputs trigger on one program variant."""
    faults: set[FaultRecord] = set()
    for tc in suite.tests:
        key = (variant_id, input_key(tc.input))
        if cache is not None and key in cache:
            fault = cache[key]
        else:
            fault = fault_of(variant_id, routine, tc.input, fuel)
            if cache is not None:
                cache[key] = fault
        if fault is None or (fault.tag == NONTERMINATION and not include_nontermination):
            continue
        faults.add(fault)
    return faults


def compute_np_na(cells: Sequence[EvalCell]) -> tuple[dict[int, float], dict[int, int]]:
    by_depth: dict[int, list[EvalCell]] = defaultdict(list)
    for cell in cells:
        by_depth[cell.depth].append(cell)
    np: dict[int, float] = {}
    na: dict[int, int] = {}
    for depth in sorted(by_depth):
        group = by_depth[depth]
        runs = len({cell.run for cell in group})
        np[depth] = sum(len(set(cell.faults)) for cell in group) / runs
        na[depth] = len(set().union(*(set(cell.faults) for cell in group)))
    return np, na


def evaluate(
    r: Routine,
    mutants: Sequence[Variant],
    max_depth: int,
    runs: int,
    domain: Domain,
    base_seed: int = 0,
    fuel: int = 64,
    mode: InstrumentMode = InstrumentMode.SCU,
    order: SearchOrder = SearchOrder.RANDOM,
    budget: int | None = None,
    include_nontermination: bool = True,
) -> EvalReport:
    """Generate and run suites for depths 1..max_depth over ``runs`` seeded runs."""
    if max_depth < 1:
        raise ValueError(f"max_depth must be at least 1, got {max_depth}")
    if runs < 1:
        raise ValueError(f"runs must be at least 1, got {runs}")
    variants = _variants(mutants)
    profiles: ProfileCache = {}
    faults_seen: FaultCache = {}
    gen_seconds: dict[int, float] = defaultdict(float)
    exec_seconds: dict[int, float] = defaultdict(float)
    cells: list[EvalCell] = []

    for j in range(1, runs + 1):
        seed = derive_seed(base_seed, j)
        candidates = ordered_candidates(r, domain, order, seed)
        for depth in range(1, max_depth + 1):
            started = time.perf_counter()
            suite = generate(r, depth, domain, seed, mode, order, fuel, budget, candidates, profiles)
            generated = time.perf_counter()
            found: set[FaultRecord] = set()
            for variant_id, routine in variants:
                found |= run_suite(variant_id, routine, suite, fuel, faults_seen, include_nontermination)
            gen_seconds[depth] += generated - started
            exec_seconds[depth] += time.perf_counter() - generated
            cells.append(EvalCell(depth=depth, run=j, seed=seed, tests=len(suite.tests),
                                  faults=sorted(found, key=FaultRecord.sort_key)))
        logger.debug("%s: run %d/%d done", r.name, j, runs)

    cells.sort(key=lambda c: (c.depth, c.run))
    np, na = compute_np_na(cells)
    logger.info("%s: Na by depth %s", r.name, na)
    return EvalReport(
        routine=r.name, depths=list(range(1, max_depth + 1)), runs=runs, base_seed=base_seed,
        mutants=[variant_id for variant_id, _ in variants], cells=cells, np=np, na=na,
        generation_seconds={d: round(s, 4) for d, s in gen_seconds.items()},
        execution_seconds={d: round(s, 4) for d, s in exec_seconds.items()},
    )


# --- Reporting ---


def normalized(values: dict[int, float]) -> dict[int, float]:
    """Values as percentages of their maximum."""
    peak = max(values.values(), default=0)
    return {d: (100.0 * v / peak if peak else 0.0) for d, v in values.items()}


@dataclass
class Curves:
    p_np: dict[int, float]
    p_na: dict[int, float]
    np_delta: float | None  # depth 1 -> 2, in percentage points
    na_delta: float | None


def curves(rep: EvalReport) -> Curves:
    p_np = normalized(rep.np)
    p_na = normalized({d: float(v) for d, v in rep.na.items()})
    if 1 in rep.np and 2 in rep.np:
        return Curves(p_np, p_na, p_np[2] - p_np[1], p_na[2] - p_na[1])
    return Curves(p_np, p_na, None, None)


def format_report(rep: EvalReport) -> str:
    c = curves(rep)
    lines = [
        f"{rep.routine}: {len(rep.mutants)} mutant(s), {rep.runs} run(s), base seed {rep.base_seed}",
        f"{'depth':>5}  {'Np':>7}  {'Na':>4}  {'P(Np)%':>7}  {'P(Na)%':>7}  {'gen s':>8}  {'exec s':>8}",
    ]
    for d in rep.depths:
        lines.append(
            f"{d:>5}  {rep.np.get(d, 0.0):>7.2f}  {rep.na.get(d, 0):>4}  {c.p_np.get(d, 0.0):>7.1f}"
            f"  {c.p_na.get(d, 0.0):>7.1f}  {rep.generation_seconds.get(d, 0.0):>8.3f}"
            f"  {rep.execution_seconds.get(d, 0.0):>8.3f}"
        )
    if c.np_delta is not None:
        lines.append(f"depth 1 -> 2: Np {c.np_delta:+.1f} pts, Na {c.na_delta:+.1f} pts")
    return "\n".join(lines)


def report(rep: EvalReport, path: str | Path | None = None) -> str:
    """The text table; with ``path``, also ``<path>.json`` (full report) and ``<path>.csv`` (curves)."""
    text = format_report(rep)
    if path is None:
        return text
    base = Path(path)
    if base.suffix in (".json", ".csv"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    base.with_suffix(".json").write_text(rep.model_dump_json(indent=2) + "\n", encoding="utf-8")
    c = curves(rep)
    with base.with_suffix(".csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["depth", "p_np", "p_na"])
        for d in rep.depths:
            writer.writerow([d, f"{c.p_np.get(d, 0.0):.2f}", f"{c.p_na.get(d, 0.0):.2f}"])
    return text


def load_report(path: str | Path) -> EvalReport:
    return EvalReport.model_validate_json(Path(path).read_text(encoding="utf-8"))
