"""Test generation by bounded input search over the instrumented routine.

Every candidate input (in lexicographic or seeded random order) is classified
once from a run of the original routine: how many iterations the loop ran,
whether it left through its exit condition, and which leaf branches it took.
That classification names the seeded check the input would violate in the
instrumented routine at any depth, so the per-depth cost of a sweep is one
confirming run of the instrumented routine per covered target. Every found
input is then replayed on the original routine, which must show the loop
running exactly the target's number of iterations and taking the target's
branch.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import MutableMapping, Sequence

from .analysis import leaf_branches
from .instrument import InstrumentedRoutine, instrument
from .interpreter import Inputs, RunOutcome, input_key, run, thaw_inputs, valid_inputs
from .syntax import Routine
from .types import (
    Certificate,
    Domain,
    InstrumentMode,
    Origin,
    RunStatus,
    SearchOrder,
    Target,
    TargetKind,
    TargetOutcome,
    TestCase,
    TestSuite,
)
from .unroll import select_loop

logger = logging.getLogger(__name__)

# (fuel, input key) -> loop profile of the original routine's run
ProfileCache = MutableMapping[tuple, "LoopProfile"]


class CertificateError(RuntimeError):
    """A generated test does not replay to its target: a generator bug."""


@dataclass
class SearchResult:
    target_id: int
    outcome: TargetOutcome
    input: dict | None = None
    examined: int = 0


def ordered_candidates(r: Routine, d: Domain, order: SearchOrder = SearchOrder.LEX, seed: int = 0) -> list[dict]:
    """Inputs of ``d`` satisfying the precondition, in search order.

    The order depends only on the routine's signature, the domain and the
    seed, never on the unrolling depth.
    """
    inputs = valid_inputs(r, d)
    if order is SearchOrder.RANDOM:
        random.Random(seed).shuffle(inputs)
    return inputs


def _hit(outcome: RunOutcome) -> int | None:
    if outcome.status is RunStatus.CHECK_VIOLATION and outcome.origin is Origin.SEEDED:
        return outcome.target_id
    return None


def hit_target(ir: InstrumentedRoutine, inputs: Inputs, fuel: int = 64) -> int | None:
    """The seeded target a run of the instrumented routine on ``inputs`` violates, if any."""
    return _hit(run(ir.routine, inputs, max(fuel, ir.n + 1), record_trace=False))


@dataclass(frozen=True)
class LoopProfile:
    """What one run of the original routine shows about its loop."""
    iterations: int | None  # None when the loop was never reached
    exited: bool
    leaves: tuple[tuple[int, int], ...]  # (iteration, leaf) in execution order


def loop_profile(r: Routine, loop_label: str, inputs: Inputs, fuel: int = 64,
                 cache: ProfileCache | None = None) -> LoopProfile:
    key = (fuel, input_key(inputs))
    if cache is not None and key in cache:
        return cache[key]
    outcome = run(r, inputs, fuel, record_trace=False)
    profile = LoopProfile(
        iterations=outcome.iterations.get(loop_label),
        exited=loop_label in outcome.exited,
        leaves=tuple((k, leaf) for label, k, leaf in outcome.branch_log if label == loop_label),
    )
    if cache is not None:
        cache[key] = profile
    return profile


def predicted_target(ir: InstrumentedRoutine, profile: LoopProfile) -> int | None:
    """The seeded target the instrumented routine violates on an input with this profile.

    SC: the first leaf entered (the body start of the first iteration for a
    plain body). SCU: a loop that exits after k iterations, 1 <= k <= n,
    violates level k's check for the leaf taken last, provided that leaf was
    taken in iteration k; ``bn`` keeps older values otherwise.
    """
    if ir.mode is InstrumentMode.SC:
        if ir.m == 0:
            return 1 if profile.iterations else None
        return profile.leaves[0][1] if profile.leaves else None
    k = profile.iterations
    if not profile.exited or not k or k > ir.n:
        return None
    if ir.m == 0:
        return k
    if not profile.leaves or profile.leaves[-1][0] != k:
        return None
    return ir.m * (k - 1) + profile.leaves[-1][1]


def _exhausted(budget: int | None, candidates: Sequence) -> TargetOutcome:
    if budget is not None and budget < len(candidates):
        return TargetOutcome.UNKNOWN
    return TargetOutcome.UNREACHABLE


def solve_target(
    ir: InstrumentedRoutine,
    t: Target,
    d: Domain,
    order: SearchOrder = SearchOrder.LEX,
    seed: int = 0,
    fuel: int = 64,
    budget: int | None = None,
) -> SearchResult:
    """First input, in search order, whose run violates the seeded check of ``t``."""
    if t not in ir.targets:
        raise ValueError(f"Target {t.target_id} does not belong to routine '{ir.original.name}'")
    candidates = ordered_candidates(ir.original, d, order, seed)
    limit = candidates if budget is None else candidates[:budget]
    for examined, inputs in enumerate(limit, start=1):
        if hit_target(ir, inputs, fuel) == t.target_id:
            return SearchResult(t.target_id, TargetOutcome.COVERED, inputs, examined)
    return SearchResult(t.target_id, _exhausted(budget, candidates), None, len(limit))


# --- Replay ---


def certify(r: Routine, t: Target | TestCase, inputs: Inputs, n: int, fuel: int = 64) -> tuple[Certificate, RunOutcome]:
    """Run the original routine and check that it exercises ``t``'s level and branch."""
    loop = select_loop(r)
    m = len(leaf_branches(loop.body))
    outcome = run(r, inputs, max(fuel, n + 1), record_trace=False)
    iterations = outcome.iterations.get(loop.label)
    if outcome.status is RunStatus.FUEL_EXHAUSTED or iterations is None:
        raise CertificateError(f"{r.name}: target {t.target_id} input {inputs} does not complete the loop: "
                               f"{outcome.describe()}")
    leaves = [(k, leaf) for label, k, leaf in outcome.branch_log if label == loop.label]

    if t.kind is TargetKind.SC_BRANCH:
        if t.branch == 0:
            cert = Certificate(iterations=1 if iterations else 0, branch=0)
            expected = Certificate(iterations=1, branch=0)
        else:
            first_iteration, first_leaf = leaves[0] if leaves else (0, 0)
            cert = Certificate(iterations=first_iteration, branch=first_leaf)
            expected = Certificate(iterations=cert.iterations, branch=t.branch) if leaves else None
    else:
        last = [leaf for k, leaf in leaves if k == iterations]
        branch = m * (iterations - 1) + last[-1] if m and last else 0
        cert = Certificate(iterations=iterations, branch=branch)
        expected = Certificate(iterations=t.level, branch=t.branch)

    if cert != expected:
        raise CertificateError(
            f"{r.name}: target {t.target_id} ({t.kind.value}, level {t.level}, branch {t.branch}) "
            f"replayed as {cert.iterations} iteration(s), branch {cert.branch}"
        )
    return cert, outcome


def replay(r: Routine, tc: TestCase, n: int, fuel: int = 64) -> Certificate:
    """Certificate observed by running ``tc`` on the original routine; raises ``CertificateError`` on mismatch."""
    cert, _ = certify(r, tc, tc.input, n, fuel)
    return cert


def replay_suite(r: Routine, suite: TestSuite, fuel: int = 64) -> list[Certificate]:
    return [replay(r, tc, suite.depth, fuel) for tc in suite.tests]


# --- Generation ---


def generate(
    r: Routine,
    n: int,
    d: Domain,
    seed: int = 0,
    mode: InstrumentMode = InstrumentMode.SCU,
    order: SearchOrder = SearchOrder.LEX,
    fuel: int = 64,
    budget: int | None = None,
    candidates: Sequence[dict] | None = None,
    cache: ProfileCache | None = None,
) -> TestSuite:
    """Instrument ``r``, cover as many targets as the domain allows and certify each test.

    One sweep over the candidates serves every target: each candidate is
    classified once, and covers the target it predicts if that target is
    still open. The chosen input is confirmed on the instrumented routine.
    ``candidates`` overrides the search order (it must come from
    ``ordered_candidates``); ``cache`` shares classifications across depths.
    """
    ir = instrument(r, n, mode)
    if candidates is None:
        candidates = ordered_candidates(r, d, order, seed)
    limit = candidates if budget is None else candidates[:budget]
    run_fuel = max(fuel, n + 1)
    open_ids = {t.target_id for t in ir.targets}
    found: dict[int, dict] = {}
    for inputs in limit:
        hit = predicted_target(ir, loop_profile(r, ir.loop_label, inputs, run_fuel, cache))
        if hit not in open_ids:
            continue
        confirmed = hit_target(ir, inputs, fuel)
        if confirmed != hit:
            raise CertificateError(
                f"{r.name}: input {inputs} was classified as target {hit} "
                f"but the instrumented run hit {confirmed}"
            )
        logger.debug("%s: target %d covered by %s", r.name, hit, inputs)
        found[hit] = inputs
        open_ids.discard(hit)

    tests: list[TestCase] = []
    for t in ir.targets:
        if t.target_id not in found:
            continue
        inputs = found[t.target_id]
        cert, baseline = certify(r, t, inputs, n, fuel)
        tests.append(TestCase(
            test_id=len(tests) + 1, target_id=t.target_id, kind=t.kind, level=t.level, branch=t.branch,
            input=thaw_inputs(inputs), certified=cert, origin_seed=seed, baseline=baseline.status,
        ))

    missing = sorted(open_ids)
    outcome = _exhausted(budget, candidates)
    uncovered = missing if outcome is TargetOutcome.UNREACHABLE else []
    unknown = missing if outcome is TargetOutcome.UNKNOWN else []
    if unknown:
        logger.warning("%s depth %d: %d target(s) over the search budget of %d", r.name, n, len(unknown), budget)
    logger.info("%s depth %d (%s): %d/%d targets covered", r.name, n, mode.value, len(tests), len(ir.targets))
    return TestSuite(
        routine=r.name, depth=n, mode=mode, domain=d, order=order, seed=seed,
        targets=ir.targets, tests=tests, uncovered=uncovered, unknown=unknown,
    )


def target_outcomes(suite: TestSuite) -> dict[int, TargetOutcome]:
    outcomes = {t.target_id: TargetOutcome.COVERED for t in suite.targets}
    outcomes.update({i: TargetOutcome.UNREACHABLE for i in suite.uncovered})
    outcomes.update({i: TargetOutcome.UNKNOWN for i in suite.unknown})
    return outcomes


def save_suite(suite: TestSuite, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(suite.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_suite(path: str | Path) -> TestSuite:
    return TestSuite.model_validate_json(Path(path).read_text(encoding="utf-8"))
