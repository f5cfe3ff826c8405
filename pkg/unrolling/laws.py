"""Law registry: every named theorem of the trace-set theory as an executable check.

Each law is a predicate over a ``Sample`` (a bundle of random or enumerated
traces, trace sets, tests and a loop index). A law returns True when the
sample satisfies it; implications return True vacuously when their premise
does not hold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .traces import (
    PrefixKind,
    Predicate,
    Trace,
    TraceSet,
    concat_sets,
    concat_traces,
    corestrict,
    fail_set,
    is_prefix,
    loop_rec,
    loop_union,
    power,
    restrict,
    satisfies,
    set_leq,
    set_tests,
    skip_set,
)


@dataclass(frozen=True)
class Sample:
    """One instance for the law checks, over a fixed universe."""
    universe: tuple
    x: Trace
    y: Trace
    z: Trace
    A: TraceSet
    B: TraceSet
    C: TraceSet
    c: Predicate
    d: Predicate
    e: Predicate
    i: int = 0
    fuel: int = 8

    @property
    def skip(self) -> TraceSet:
        return skip_set(self.universe)

    @property
    def true(self) -> Predicate:
        return Predicate.true(self.universe)

    @property
    def false(self) -> Predicate:
        return Predicate.false(self.universe)

    def describe(self, needs: tuple[str, ...]) -> str:
        return ", ".join(f"{name}={getattr(self, name)}" for name in needs)


@dataclass(frozen=True)
class LawCase:
    """A named law, the sample components it reads, and its decision procedure."""
    name: str
    needs: tuple[str, ...]
    check: Callable[[Sample], bool]
    statement: str = ""
    inclusion: bool = False  # stated as an inclusion rather than an equality


# --- Traces ---


def _concat_assoc(s: Sample) -> bool:
    xy = concat_traces(s.x, s.y)
    yz = concat_traces(s.y, s.z)
    if xy is None or yz is None:
        return True
    return concat_traces(xy, s.z) == concat_traces(s.x, yz) is not None


def _concat_station(s: Sample) -> bool:
    z = concat_traces(s.x, s.y)
    if z is None:
        return True
    if s.x.stationary and s.y != z:
        return False
    if s.y.stationary and s.x != z:
        return False
    return True


def _concat_order(s: Sample) -> bool:
    def leq(a: Trace, b: Trace) -> bool:
        return is_prefix(a, b) is not PrefixKind.NOT_PREFIX

    if is_prefix(s.x, s.x) is not PrefixKind.PREFIX:
        return False
    if leq(s.x, s.z) and leq(s.z, s.x) and s.x != s.z:
        return False
    xy = concat_traces(s.x, s.y)
    if xy is None:
        return True
    expected = PrefixKind.PREFIX if s.y.stationary else PrefixKind.PROPER_PREFIX
    if is_prefix(s.x, xy) is not expected:
        return False
    xyz = concat_traces(xy, s.z)
    if xyz is not None and not (leq(xy, xyz) and leq(s.x, xyz)):
        return False
    return True


def _extension_stable(s: Sample) -> bool:
    z = concat_traces(s.x, s.y)
    if z is None or not satisfies(s.x, s.c):
        return True
    return satisfies(z, s.c)


# --- Trace sets ---


def _union(a: TraceSet, b: TraceSet) -> TraceSet:
    return a | b


def _corestrict_restrict1(s: Sample) -> bool:
    lhs = concat_sets(corestrict(s.A, s.c), restrict(s.d, s.B))
    return lhs == concat_sets(corestrict(s.A, s.c & s.d), s.B)


def _corestrict_restrict2(s: Sample) -> bool:
    lhs = concat_sets(corestrict(s.A, s.c), restrict(s.d, s.B))
    return lhs == concat_sets(s.A, restrict(s.c & s.d, s.B))


def _corestrict_restrict3(s: Sample) -> bool:
    lhs = concat_sets(corestrict(s.A, s.c), restrict(s.d, s.B))
    return lhs.issubset(concat_sets(s.A, s.B))


def _test_leq(s: Sample) -> bool:
    if not (set_tests(s.A, s.c) and set_leq(s.A, s.B)):
        return True
    return set_tests(s.B, s.c)


# --- Loops ---


def _loop3_li(s: Sample) -> bool:
    step = corestrict(power(restrict(~s.e, s.B), s.i, s.universe), s.e)
    return loop_union(s.e, s.B, s.i + 1) == loop_union(s.e, s.B, s.i) | step


def _fixdef2_step(s: Sample) -> bool:
    previous = loop_rec(s.e, s.B, s.i)
    expected = restrict(s.e, s.skip) | restrict(~s.e, concat_sets(s.B, previous))
    return loop_rec(s.e, s.B, s.i + 1) == expected


def _def_equiv(s: Sample) -> bool:
    return all(loop_rec(s.e, s.B, j) == loop_union(s.e, s.B, j) for j in range(s.i + 1))


def _under_approx(s: Sample) -> bool:
    bound = loop_union(s.e, s.B, s.fuel)
    return all(loop_union(s.e, s.B, j).issubset(bound) for j in range(s.fuel + 1))


_CASES = [
    LawCase("Concat_assoc", ("x", "y", "z"), _concat_assoc,
            "(x + y) + z = x + (y + z) where defined"),
    LawCase("Concat_station", ("x", "y"), _concat_station,
            "x stationary and x + y = z => y = z; y stationary => x = z"),
    LawCase("Concat_order", ("x", "y", "z"), _concat_order,
            "prefix is a partial order; x <= x + y, proper iff y not stationary"),
    LawCase("Extension_stable", ("x", "y", "c"), _extension_stable,
            "x satisfies c and x <= z => z satisfies c"),
    LawCase("Concat_fail1", ("A",), lambda s: concat_sets(fail_set(), s.A) == fail_set(),
            "fail = fail ; A"),
    LawCase("Concat_fail2", ("A",), lambda s: concat_sets(s.A, fail_set()) == fail_set(),
            "fail = A ; fail"),
    LawCase("Concat_skip1", ("A",), lambda s: concat_sets(s.A, s.skip) == s.A,
            "A = A ; skip"),
    LawCase("Concat_skip2", ("A",), lambda s: concat_sets(s.skip, s.A) == s.A,
            "A = skip ; A"),
    LawCase("False_restrict", ("A",), lambda s: restrict(s.false, s.A) == fail_set(),
            "False / A = fail"),
    LawCase("True_restrict", ("A",), lambda s: restrict(s.true, s.A) == s.A,
            "True / A = A"),
    LawCase("False_corestrict", ("A",), lambda s: corestrict(s.A, s.false) == fail_set(),
            "A \\ False = fail"),
    LawCase("True_corestrict", ("A",), lambda s: corestrict(s.A, s.true) == s.A,
            "A \\ True = A"),
    LawCase("Two_restrict", ("A", "c", "d"),
            lambda s: restrict(s.c, restrict(s.d, s.A)) == restrict(s.c & s.d, s.A),
            "c / (d / A) = (c and d) / A"),
    LawCase("Two_corestrict", ("A", "c", "d"),
            lambda s: corestrict(corestrict(s.A, s.c), s.d) == corestrict(s.A, s.c & s.d),
            "(A \\ c) \\ d = A \\ (c and d)"),
    LawCase("Corestrict_restrict1", ("A", "B", "c", "d"), _corestrict_restrict1,
            "(A \\ c) ; (d / B) = (A \\ (c and d)) ; B"),
    LawCase("Corestrict_restrict2", ("A", "B", "c", "d"), _corestrict_restrict2,
            "(A \\ c) ; (d / B) = A ; ((c and d) / B)"),
    LawCase("Corestrict_restrict3", ("A", "B", "c", "d"), _corestrict_restrict3,
            "(A \\ c) ; (d / B) <= A ; B", inclusion=True),
    LawCase("Corestrict_restrict4", ("A", "B", "c"),
            lambda s: concat_sets(corestrict(s.A, s.c), restrict(~s.c, s.B)) == fail_set(),
            "(A \\ c) ; (not c / B) = fail"),
    LawCase("Corestrict_restrict5", ("A", "B", "c"),
            lambda s: concat_sets(corestrict(s.A, s.c), s.B) == concat_sets(s.A, restrict(s.c, s.B)),
            "(A \\ c) ; B = A ; (c / B)"),
    LawCase("Restrict_compose", ("A", "B", "c"),
            lambda s: concat_sets(restrict(s.c, s.A), s.B) == restrict(s.c, concat_sets(s.A, s.B)),
            "(v / A) ; B = v / (A ; B)"),
    LawCase("Compose_corestrict", ("A", "B", "c"),
            lambda s: concat_sets(s.A, corestrict(s.B, s.c)) == corestrict(concat_sets(s.A, s.B), s.c),
            "A ; (B \\ v) = (A ; B) \\ v"),
    LawCase("Restrict_union", ("A", "B", "c"),
            lambda s: restrict(s.c, _union(s.A, s.B)) == restrict(s.c, s.A) | restrict(s.c, s.B),
            "v / (A | B) = (v / A) | (v / B)"),
    LawCase("Corestrict_union", ("A", "B", "c"),
            lambda s: corestrict(_union(s.A, s.B), s.c) == corestrict(s.A, s.c) | corestrict(s.B, s.c),
            "(A | B) \\ v = (A \\ v) | (B \\ v)"),
    LawCase("Compose_union1", ("A", "B", "C"),
            lambda s: concat_sets(s.A, _union(s.B, s.C)) == concat_sets(s.A, s.B) | concat_sets(s.A, s.C),
            "A ; (B | C) = (A ; B) | (A ; C)"),
    LawCase("Compose_union2", ("A", "B", "C"),
            lambda s: concat_sets(_union(s.A, s.B), s.C) == concat_sets(s.A, s.C) | concat_sets(s.B, s.C),
            "(A | B) ; C = (A ; C) | (B ; C)"),
    LawCase("Test_leq", ("A", "B", "c"), _test_leq,
            "c tests A and A <= B => c tests B"),
    LawCase("Loop_Skip1", ("B", "e"),
            lambda s: loop_union(s.e, s.B, 1) == corestrict(s.skip, s.e),
            "L_1 = skip \\ e"),
    LawCase("Loop_Skip2", ("B", "e"),
            lambda s: loop_union(s.e, s.B, 1) == restrict(s.e, s.skip),
            "L_1 = e / skip"),
    LawCase("Loop3_L0", ("B", "e"),
            lambda s: loop_union(s.e, s.B, 0) == fail_set(),
            "L_0 = fail"),
    LawCase("Loop3_Li", ("B", "e", "i"), _loop3_li,
            "L_(i+1) = L_i | ((not e / B)^i \\ e)"),
    LawCase("Fixdef2_step", ("B", "e", "i"), _fixdef2_step,
            "if not e then B ; L_i end = (e / skip) | (not e / (B ; L_i))"),
    LawCase("Def_equiv", ("B", "e", "i"), _def_equiv,
            "recursive unrolling and union-of-powers coincide at every index"),
    LawCase("Under_approx", ("B", "e"), _under_approx,
            "L_i <= L_K for i <= K", inclusion=True),
]

LAWS: dict[str, LawCase] = {case.name: case for case in _CASES}


def normalize_law_name(name: str) -> str:
    """Accept the slash-delimited form used when theorems are cited (``/Def_equiv/``)."""
    return name.strip().strip("/").replace("\\", "")


def get_law(name: str) -> LawCase:
    key = normalize_law_name(name)
    if key not in LAWS:
        raise ValueError(f"Law '{name}' not found in registry")
    return LAWS[key]
