"""Tests for the trace and trace-set algebra."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from unrolling.traces import (
    PrefixKind,
    Predicate,
    Trace,
    TraceSet,
    concat_sets,
    concat_traces,
    cond_set,
    corestrict,
    fail_set,
    format_trace_set,
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

U = ("a", "b", "c")

traces = st.lists(st.sampled_from(U), min_size=1, max_size=4).map(lambda s: Trace(tuple(s)))
trace_sets = st.frozensets(traces, max_size=6).map(TraceSet)
predicates = st.frozensets(st.sampled_from(U)).map(lambda ext: Predicate(frozenset(U), ext))


def T(*states):
    return Trace.of(*states)


def S(*ts):
    return TraceSet.of(*ts)


class TestTraces:
    def test_concat_joins_at_shared_state(self):
        assert concat_traces(T("m", "n"), T("n", "o", "p")) == T("m", "n", "o", "p")

    def test_concat_stationary(self):
        assert concat_traces(T("a"), T("a")) == T("a")

    def test_concat_undefined_when_traces_do_not_meet(self):
        assert concat_traces(T("a", "b"), T("c", "d")) is None

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError, match="at least one state"):
            Trace(())

    def test_prefix_kinds(self):
        assert is_prefix(T("a", "b"), T("a", "b", "c")) is PrefixKind.PROPER_PREFIX
        assert is_prefix(T("a"), T("a")) is PrefixKind.PREFIX
        assert is_prefix(T("a", "b"), T("b", "c")) is PrefixKind.NOT_PREFIX

    def test_satisfies(self):
        assert satisfies(T("a", "b"), Predicate(frozenset(U), frozenset({"b"})))
        assert not satisfies(T("a"), Predicate(frozenset(U), frozenset()))

    @given(traces, traces, traces)
    def test_concat_associative_where_defined(self, x, y, z):
        xy = concat_traces(x, y)
        yz = concat_traces(y, z)
        if xy is not None and yz is not None:
            assert concat_traces(xy, z) == concat_traces(x, yz)

    @given(traces, traces)
    def test_concat_extends(self, x, y):
        z = concat_traces(x, y)
        if z is not None:
            expected = PrefixKind.PREFIX if y.stationary else PrefixKind.PROPER_PREFIX
            assert is_prefix(x, z) is expected


class TestTraceSets:
    def test_skip_over_universe(self):
        assert skip_set(("a", "b")) == S(T("a"), T("b"))
        assert len(fail_set()) == 0

    def test_concat_without_junction_is_fail(self):
        assert concat_sets(S(T("a", "b")), S(T("c"))) == fail_set()

    @given(trace_sets)
    def test_fail_and_skip_units(self, a):
        assert concat_sets(fail_set(), a) == fail_set()
        assert concat_sets(a, fail_set()) == fail_set()
        assert concat_sets(a, skip_set(U)) == a
        assert concat_sets(skip_set(U), a) == a

    @given(trace_sets)
    def test_true_and_false_restrictions(self, a):
        true, false = Predicate.true(U), Predicate.false(U)
        assert restrict(true, a) == a
        assert restrict(false, a) == fail_set()
        assert corestrict(a, true) == a
        assert corestrict(a, false) == fail_set()

    @given(trace_sets, predicates, predicates)
    def test_two_restrictions_combine(self, a, c, d):
        assert restrict(c, restrict(d, a)) == restrict(c & d, a)
        assert corestrict(corestrict(a, c), d) == corestrict(a, c & d)

    @given(trace_sets, trace_sets, predicates)
    def test_corestrict_then_negated_restrict_is_fail(self, a, b, c):
        assert concat_sets(corestrict(a, c), restrict(~c, b)) == fail_set()

    def test_set_tests(self):
        b = Predicate(frozenset(U), frozenset({"b"}))
        assert not set_tests(fail_set(), b)
        assert set_tests(S(T("a", "b")), b)

    def test_set_leq(self):
        assert set_leq(fail_set(), S(T("a")))
        assert set_leq(S(T("a")), S(T("a", "b")))
        assert not set_leq(S(T("a", "b")), S(T("a")))

    def test_set_leq_not_antisymmetric(self):
        a = S(T("a"), T("a", "b"))
        b = S(T("a", "b"))
        assert set_leq(a, b) and set_leq(b, a) and a != b

    def test_format_is_canonical(self):
        assert format_trace_set(S(T("b", "a"), T("a"))) == "{<a>,<b,a>}"


class TestPowerAndConditionals:
    def test_power_base_is_skip(self):
        assert power(S(T("a", "b")), 0, U) == skip_set(U)

    def test_power_of_fail(self):
        assert power(fail_set(), 1, U) == fail_set()

    def test_power_chains(self):
        a = S(T("a", "b"), T("b", "c"))
        assert T("a", "b", "c") in power(a, 2, U)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            power(fail_set(), -1, U)

    @given(trace_sets)
    def test_cond_true_and_false(self, a):
        assert cond_set(Predicate.true(U), a) == a
        assert cond_set(Predicate.false(U), a) == skip_set(U)

    @given(predicates)
    def test_cond_of_fail(self, v):
        assert cond_set(v, fail_set()) == restrict(~v, skip_set(U))


class TestLoops:
    @given(predicates, trace_sets)
    def test_base_cases(self, e, b):
        assert loop_union(e, b, 0) == fail_set()
        assert loop_rec(e, b, 0) == fail_set()
        assert loop_union(e, b, 1) == corestrict(skip_set(U), e)
        assert loop_rec(e, b, 1) == restrict(e, skip_set(U))

    @given(predicates, trace_sets, st.integers(min_value=0, max_value=6))
    def test_two_views_coincide(self, e, b, i):
        assert loop_union(e, b, i) == loop_rec(e, b, i)

    @given(predicates, trace_sets, st.integers(min_value=0, max_value=7))
    def test_approximations_grow(self, e, b, i):
        assert loop_union(e, b, i).issubset(loop_union(e, b, i + 1))

    def test_counting_loop(self):
        # states are counter values; the body increments, the loop exits at 2
        universe = (0, 1, 2)
        e = Predicate.where(universe, lambda s: s == 2)
        body = S(T(0, 1), T(1, 2))
        assert loop_union(e, body, 2) == S(T(2), T(1, 2))
        assert T(0, 1, 2) in loop_union(e, body, 3)

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            loop_union(Predicate.true(U), fail_set(), -1)
        with pytest.raises(ValueError):
            loop_rec(Predicate.true(U), fail_set(), -1)
