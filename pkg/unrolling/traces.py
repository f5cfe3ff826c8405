"""Trace and trace-set algebra.

A trace is a finite, non-empty sequence of states; a trace set is a finite set
of traces. States are opaque hashable tokens here: the algebra never looks
inside them. Program states (module ``denotation``) plug in unchanged.

Loops are represented only through their finite approximants: ``loop_union``
and ``loop_rec`` build the i-th approximation, and any statement about the
whole loop is checked at a finite fuel bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Hashable, Iterable, Iterator

State = Hashable


class PrefixKind(str, Enum):
    NOT_PREFIX = "not_prefix"
    PREFIX = "prefix"
    PROPER_PREFIX = "proper_prefix"


@dataclass(frozen=True)
class Trace:
    """A finite, non-empty sequence of states."""
    states: tuple[Any, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.states, tuple):
            object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ValueError("A trace must contain at least one state")

    @classmethod
    def of(cls, *states: State) -> Trace:
        return cls(tuple(states))

    @property
    def first(self) -> Any:
        return self.states[0]

    @property
    def last(self) -> Any:
        return self.states[-1]

    @property
    def stationary(self) -> bool:
        return len(self.states) == 1

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.states)

    def __str__(self) -> str:
        return "<" + ",".join(str(s) for s in self.states) + ">"


def canonical_key(trace: Trace) -> tuple:
    """Length first, then lexicographic on the states."""
    return (len(trace), trace.states)


@dataclass(frozen=True)
class TraceSet:
    """A finite (possibly empty) set of traces."""
    traces: frozenset[Trace] = frozenset()

    def __post_init__(self) -> None:
        if not isinstance(self.traces, frozenset):
            object.__setattr__(self, "traces", frozenset(self.traces))

    @classmethod
    def of(cls, *traces: Trace) -> TraceSet:
        return cls(frozenset(traces))

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.sorted())

    def __contains__(self, trace: object) -> bool:
        return trace in self.traces

    def __or__(self, other: TraceSet) -> TraceSet:
        return TraceSet(self.traces | other.traces)

    def __bool__(self) -> bool:
        return bool(self.traces)

    def issubset(self, other: TraceSet) -> bool:
        return self.traces <= other.traces

    def sorted(self) -> list[Trace]:
        return sorted(self.traces, key=canonical_key)

    def first_states(self) -> frozenset:
        return frozenset(t.first for t in self.traces)

    def last_states(self) -> frozenset:
        return frozenset(t.last for t in self.traces)

    def starting_at(self, state: State) -> TraceSet:
        return TraceSet(frozenset(t for t in self.traces if t.first == state))

    def __str__(self) -> str:
        return format_trace_set(self)


@dataclass(frozen=True)
class Predicate:
    """A test on states, stored extensionally as the subset of its universe where it holds."""
    universe: frozenset
    extension: frozenset

    def __post_init__(self) -> None:
        if not self.extension <= self.universe:
            raise ValueError("Predicate extension must be a subset of its universe")

    @classmethod
    def where(cls, universe: Iterable[State], holds) -> Predicate:
        """Build a predicate by evaluating ``holds`` on every state of the universe."""
        universe = frozenset(universe)
        return cls(universe, frozenset(s for s in universe if holds(s)))

    @classmethod
    def true(cls, universe: Iterable[State]) -> Predicate:
        universe = frozenset(universe)
        return cls(universe, universe)

    @classmethod
    def false(cls, universe: Iterable[State]) -> Predicate:
        return cls(frozenset(universe), frozenset())

    def holds(self, state: State) -> bool:
        return state in self.extension

    def __invert__(self) -> Predicate:
        return Predicate(self.universe, self.universe - self.extension)

    def __and__(self, other: Predicate) -> Predicate:
        universe = self.universe | other.universe
        return Predicate(universe, self.extension & other.extension)

    def __str__(self) -> str:
        return "{" + ",".join(str(s) for s in sorted(self.extension, key=_state_key)) + "}"


def _state_key(state: State) -> tuple:
    return (type(state).__name__, state)


# --- Traces ---


def concat_traces(x: Trace, y: Trace) -> Trace | None:
    """x + y, or None when the traces do not meet (x_L != y_1)."""
    if x.last != y.first:
        return None
    return Trace(x.states + y.states[1:])


def is_prefix(x: Trace, z: Trace) -> PrefixKind:
    """Whether some y satisfies x + y = z, and whether that y is non-stationary."""
    if len(x) > len(z) or z.states[: len(x)] != x.states:
        return PrefixKind.NOT_PREFIX
    return PrefixKind.PROPER_PREFIX if len(z) > len(x) else PrefixKind.PREFIX


def satisfies(x: Trace, v: Predicate) -> bool:
    return any(v.holds(s) for s in x.states)


# --- Trace sets ---


def fail_set() -> TraceSet:
    return TraceSet()


def skip_set(universe: Iterable[State]) -> TraceSet:
    return TraceSet(frozenset(Trace((s,)) for s in universe))


def concat_sets(a: TraceSet, b: TraceSet) -> TraceSet:
    """A ; B: every x + y with x in A, y in B and x_L = y_1."""
    by_first: dict[Any, list[Trace]] = {}
    for y in b.traces:
        by_first.setdefault(y.first, []).append(y)
    out = set()
    for x in a.traces:
        for y in by_first.get(x.last, ()):
            out.add(Trace(x.states + y.states[1:]))
    return TraceSet(frozenset(out))


def restrict(c: Predicate, a: TraceSet) -> TraceSet:
    """c / A: traces of A whose initial state satisfies c."""
    return TraceSet(frozenset(x for x in a.traces if c.holds(x.first)))


def corestrict(a: TraceSet, c: Predicate) -> TraceSet:
    """A \\ c: traces of A whose final state satisfies c."""
    return TraceSet(frozenset(x for x in a.traces if c.holds(x.last)))


def union(*sets: TraceSet) -> TraceSet:
    out: frozenset[Trace] = frozenset()
    for s in sets:
        out |= s.traces
    return TraceSet(out)


def set_tests(a: TraceSet, c: Predicate) -> bool:
    """Whether A contains a trace satisfying c."""
    return any(satisfies(x, c) for x in a.traces)


def set_leq(a: TraceSet, b: TraceSet) -> bool:
    """Every trace of A has an extension in B.

    Not an order on trace sets: it is reflexive and transitive but not
    antisymmetric.
    """
    return all(
        any(is_prefix(x, y) is not PrefixKind.NOT_PREFIX for y in b.traces)
        for x in a.traces
    )


def power(a: TraceSet, i: int, universe: Iterable[State]) -> TraceSet:
    """A^i, with A^0 = skip over the universe and A^(i+1) = A ; A^i."""
    if i < 0:
        raise ValueError(f"power index must be non-negative, got {i}")
    result = skip_set(universe)
    for _ in range(i):
        result = concat_sets(a, result)
    return result


def cond_set(v: Predicate, a: TraceSet) -> TraceSet:
    """if v then A end, i.e. (not v / skip) | (v / A), skip taken over v's universe."""
    return restrict(~v, skip_set(v.universe)) | restrict(v, a)


def loop_union(e: Predicate, b: TraceSet, i: int) -> TraceSet:
    """L_i: executions reaching e with fewer than i executions of the guarded body."""
    if i < 0:
        raise ValueError(f"loop index must be non-negative, got {i}")
    guarded = restrict(~e, b)
    result = fail_set()
    step = skip_set(e.universe)
    for _ in range(i):
        result = result | corestrict(step, e)
        step = concat_sets(guarded, step)
    return result


def loop_rec(e: Predicate, b: TraceSet, i: int) -> TraceSet:
    """The i-unrolling: fail at 0, then ``if not e then B ; previous end``."""
    if i < 0:
        raise ValueError(f"loop index must be non-negative, got {i}")
    result = fail_set()
    for _ in range(i):
        result = cond_set(~e, concat_sets(b, result))
    return result


def format_trace_set(a: TraceSet) -> str:
    return "{" + ",".join(str(t) for t in a.sorted()) + "}"
