"""Property-based checking of the law registry.

Two instance sources feed every law: a seeded random sampler over a small
universe, and an exhaustive enumeration over a two-state universe with traces
of length at most two (6 traces, 64 trace sets, 4 tests).
"""

from __future__ import annotations

import itertools
import logging
import random
import string
import time
from dataclasses import dataclass
from typing import Iterator

from .laws import LAWS, LawCase, Sample, get_law
from .traces import Predicate, Trace, TraceSet, concat_traces
from .types import LawReport

logger = logging.getLogger(__name__)

CHAIN_PROBABILITY = 0.75


@dataclass(frozen=True)
class LawBounds:
    universe_size: int = 5
    max_trace_len: int = 4
    max_set_size: int = 8
    max_index: int = 6
    fuel: int = 8

    def __post_init__(self) -> None:
        for name in ("universe_size", "max_trace_len", "max_set_size", "max_index", "fuel"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1, got {getattr(self, name)}")

    @classmethod
    def exhaustive(cls) -> LawBounds:
        return cls(universe_size=2, max_trace_len=2)


def make_universe(size: int) -> tuple[str, ...]:
    if size < 1:
        raise ValueError(f"universe_size must be at least 1, got {size}")
    if size <= len(string.ascii_lowercase):
        return tuple(string.ascii_lowercase[:size])
    return tuple(f"s{k}" for k in range(size))


# --- Random instances ---


def _random_trace(rng: random.Random, universe: tuple, max_len: int, start=None) -> Trace:
    length = rng.randint(1, max_len)
    states = [start if start is not None else rng.choice(universe)]
    states.extend(rng.choice(universe) for _ in range(length - 1))
    return Trace(tuple(states))


def _random_set(
    rng: random.Random, universe: tuple, bounds: LawBounds, starts: frozenset = frozenset(),
) -> TraceSet:
    traces = []
    for _ in range(rng.randint(0, bounds.max_set_size)):
        start = None
        if starts and rng.random() < 0.5:
            start = rng.choice(sorted(starts))
        traces.append(_random_trace(rng, universe, bounds.max_trace_len, start))
    return TraceSet(frozenset(traces))


def _extensions_of(rng: random.Random, a: TraceSet, universe: tuple, bounds: LawBounds) -> TraceSet:
    """A set in which every trace of ``a`` has an extension, plus some noise."""
    out = []
    for x in a.sorted():
        tail = _random_trace(rng, universe, bounds.max_trace_len, start=x.last)
        out.append(concat_traces(x, tail))
    noise = _random_set(rng, universe, bounds)
    return TraceSet(frozenset(out)) | noise


def _random_predicate(rng: random.Random, universe: tuple) -> Predicate:
    return Predicate(frozenset(universe), frozenset(s for s in universe if rng.random() < 0.5))


def random_instance(bounds: LawBounds, seed: int | random.Random) -> Sample:
    """Sample traces, trace sets, tests and a loop index; deterministic for a fixed seed.

    Consecutive traces and sets are chained (the next one starts where the
    previous one ends) often enough that concatenation is usually defined.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    universe = make_universe(bounds.universe_size)
    x = _random_trace(rng, universe, bounds.max_trace_len)
    y = _random_trace(rng, universe, bounds.max_trace_len,
                      x.last if rng.random() < CHAIN_PROBABILITY else None)
    z = _random_trace(rng, universe, bounds.max_trace_len,
                      y.last if rng.random() < CHAIN_PROBABILITY else None)
    a = _random_set(rng, universe, bounds)
    if rng.random() < 0.5:
        b = _extensions_of(rng, a, universe, bounds)
    else:
        b = _random_set(rng, universe, bounds, a.last_states())
    c_set = _random_set(rng, universe, bounds, b.last_states())
    return Sample(
        universe=universe,
        x=x, y=y, z=z,
        A=a, B=b, C=c_set,
        c=_random_predicate(rng, universe),
        d=_random_predicate(rng, universe),
        e=_random_predicate(rng, universe),
        i=rng.randint(0, bounds.max_index),
        fuel=bounds.fuel,
    )


# --- Exhaustive instances ---


def all_traces(universe: tuple, max_len: int) -> list[Trace]:
    return [
        Trace(states)
        for length in range(1, max_len + 1)
        for states in itertools.product(universe, repeat=length)
    ]


def all_trace_sets(traces: list[Trace]) -> list[TraceSet]:
    return [
        TraceSet(frozenset(combo))
        for size in range(len(traces) + 1)
        for combo in itertools.combinations(traces, size)
    ]


def all_predicates(universe: tuple) -> list[Predicate]:
    full = frozenset(universe)
    return [
        Predicate(full, frozenset(combo))
        for size in range(len(universe) + 1)
        for combo in itertools.combinations(universe, size)
    ]


def exhaustive_instances(case: LawCase, bounds: LawBounds) -> Iterator[Sample]:
    """Every combination of the components ``case`` reads, over the small universe."""
    if bounds.universe_size > 2 or bounds.max_trace_len > 2:
        raise ValueError("Exhaustive mode supports universe size <= 2 and trace length <= 2")
    universe = make_universe(bounds.universe_size)
    traces = all_traces(universe, bounds.max_trace_len)
    sets = all_trace_sets(traces)
    preds = all_predicates(universe)
    domains = {
        "x": traces, "y": traces, "z": traces,
        "A": sets, "B": sets, "C": sets,
        "c": preds, "d": preds, "e": preds,
        "i": list(range(bounds.max_index + 1)),
    }
    defaults = {
        "x": traces[0], "y": traces[0], "z": traces[0],
        "A": sets[0], "B": sets[0], "C": sets[0],
        "c": preds[0], "d": preds[0], "e": preds[0],
        "i": 0,
    }
    for values in itertools.product(*(domains[name] for name in case.needs)):
        fields = dict(defaults)
        fields.update(zip(case.needs, values))
        yield Sample(universe=universe, fuel=bounds.fuel, **fields)


# --- Checking ---


def check_law(
    law: str | LawCase,
    samples: int = 1000,
    seed: int = 0,
    bounds: LawBounds | None = None,
    exhaustive: bool = False,
) -> LawReport:
    """Run one law on ``samples`` random instances (or on every exhaustive instance).

    Stops at the first counterexample.
    """
    case = law if isinstance(law, LawCase) else get_law(law)
    if samples < 0:
        raise ValueError(f"samples must be non-negative, got {samples}")
    bounds = bounds or (LawBounds.exhaustive() if exhaustive else LawBounds())

    if exhaustive:
        instances: Iterator[Sample] = exhaustive_instances(case, bounds)
    else:
        rng = random.Random(f"{seed}:{case.name}")
        instances = (random_instance(bounds, rng) for _ in range(samples))

    started = time.perf_counter()
    run = 0
    counterexample = None
    for sample in instances:
        run += 1
        if not case.check(sample):
            counterexample = sample.describe(case.needs)
            break
    elapsed = time.perf_counter() - started

    report = LawReport(
        law_name=case.name,
        samples_run=run,
        counterexample=counterexample,
        elapsed=round(elapsed, 6),
        mode="exhaustive" if exhaustive else "random",
    )
    if counterexample is None:
        logger.info("%s: %s after %d samples", case.name, report.status.value, run)
    else:
        logger.warning("%s: counterexample after %d samples: %s", case.name, run, counterexample)
    return report


def check_all(
    samples: int = 1000,
    seed: int = 0,
    bounds: LawBounds | None = None,
    exhaustive: bool = False,
    names: list[str] | None = None,
) -> list[LawReport]:
    """Check every registered law (or the named subset) in registry order."""
    cases = [get_law(name) for name in names] if names else list(LAWS.values())
    return [check_law(case, samples, seed, bounds, exhaustive) for case in cases]
