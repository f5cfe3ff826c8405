"""Tests for the bounded trace-set semantics."""

import pytest

from tests.conftest import CORPUS_NAMES, corpus_entries, corpus_routine
from unrolling.denotation import Denoter, denote, denote_input
from unrolling.interpreter import initial_state, run, valid_inputs
from unrolling.parser import parse
from unrolling.traces import Trace
from unrolling.types import Domain


def small_domain(name: str) -> Domain:
    entry = next(e for e in corpus_entries() if e.name == name)
    return Domain(int_min=entry.domain.int_min, int_max=min(entry.domain.int_max, entry.domain.int_min + 3),
                  array_len_max=min(entry.domain.array_len_max, 2))


def tiny(body: str) -> str:
    return f"routine r(n: INTEGER)\nlocal\n  x: INTEGER\ndo\n{body}\nend\n"


class TestInstructions:
    def test_empty_body_is_skip(self):
        r = parse(tiny(""))
        start = initial_state(r, {"n": 1})
        assert denote_input(r, {"n": 1}) == Denoter(r).block(r.body, frozenset({start}))
        assert set(denote_input(r, {"n": 1})) == {Trace.of(start)}

    def test_failing_check_denotes_nothing(self):
        assert len(denote_input(parse(tiny("  x := 1\n  check false end")), {"n": 0})) == 0

    def test_passing_check_changes_nothing(self):
        with_check = denote_input(parse(tiny("  x := n\n  check x = n end")), {"n": 2})
        without = denote_input(parse(tiny("  x := n")), {"n": 2})
        assert [len(t) for t in with_check] == [len(t) for t in without] == [2]

    def test_conditional_takes_one_side(self):
        r = parse(tiny("  if n > 1 then x := 1 else x := 2 end"))
        (trace,) = denote_input(r, {"n": 0})
        assert trace.last.as_dict()["x"] == 2

    def test_loop_view_validated(self, counter):
        with pytest.raises(ValueError, match="loop_view"):
            Denoter(counter, loop_view="fixpoint")


class TestAgainstInterpreter:
    @pytest.mark.parametrize("name", CORPUS_NAMES)
    def test_single_trace_per_input_matches_run(self, name):
        r = corpus_routine(name)
        for inputs in valid_inputs(r, small_domain(name))[:12]:
            outcome = run(r, inputs)
            if not outcome.ok:
                continue
            traces = denote_input(r, inputs)
            assert set(traces) == {Trace(tuple(outcome.trace))}

    @pytest.mark.parametrize("name", ["factorial", "gcd", "max_in_array"])
    def test_union_and_rec_views_agree(self, name):
        d = small_domain(name)
        r = corpus_routine(name)
        assert denote(r, d, loop_view="union").traces == denote(r, d, loop_view="rec").traces

    def test_trace_from_initial_state(self, factorial):
        d = Domain(int_min=0, int_max=3)
        den = denote(factorial, d)
        start = initial_state(factorial, {"n": 3})
        assert den.trace_from(start) == Trace(tuple(run(factorial, {"n": 3}).trace))

    def test_unresolved_within_fuel(self, counter):
        den = denote(counter, Domain(int_min=0, int_max=5), fuel=3)
        assert [i["n"] for i in den.unresolved] == [4, 5]
        assert len(den.traces) == 4

    @pytest.mark.parametrize("name", ["factorial", "gcd", "linear_search"])
    def test_more_fuel_never_loses_traces(self, name):
        r = corpus_routine(name)
        d = small_domain(name)
        for fuel in range(1, 5):
            assert denote(r, d, fuel=fuel).traces.issubset(denote(r, d, fuel=fuel + 1).traces)

    def test_fuel_resolves_more_inputs(self, counter):
        d = Domain(int_min=0, int_max=5)
        unresolved = [len(denote(counter, d, fuel=k).unresolved) for k in range(1, 7)]
        assert unresolved == sorted(unresolved, reverse=True)
        assert unresolved[-1] == 0

    def test_faulting_inputs_reported(self):
        r = parse(tiny("  x := 6 div n"))
        den = denote(r, Domain(int_min=0, int_max=2))
        assert den.faulted == [{"n": 0}]
        assert len(den.traces) == 2
