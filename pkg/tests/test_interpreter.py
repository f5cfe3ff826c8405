"""Tests for the reference interpreter and input enumeration."""

import pytest

from tests.conftest import COUNTER
from unrolling.interpreter import (
    ENTRY,
    domain_size,
    enumerate_inputs,
    eval_expr,
    format_trace,
    input_key,
    run,
    satisfies_require,
    valid_inputs,
)
from unrolling.parser import parse
from unrolling.syntax import Binary, Var
from unrolling.types import Domain, Origin, RunStatus, RuntimeErrorKind


def body_only(body: str, local: str = "x: INTEGER\n  y: INTEGER", params: str = "", ensure: str = "") -> str:
    ensure_part = f"ensure\n  {ensure}\n" if ensure else ""
    return f"routine r({params})\nlocal\n  {local}\ndo\n{body}\n{ensure_part}end\n"


class TestStraightLine:
    def test_two_assignments(self):
        outcome = run(parse(body_only("  x := 2\n  y := 5")), {})
        assert outcome.ok
        assert eval_expr(outcome.final, Binary("*", Var("x"), Var("y"))) == 10
        assert len(outcome.trace) == 3
        assert outcome.trace[0].location == ENTRY

    def test_array_count_and_update(self):
        r = parse(body_only(
            "  b := a\n  x := b.count\n  b[0] := 9",
            local="x: INTEGER\n  y: INTEGER\n  b: ARRAY",
            params="a: ARRAY",
        ))
        outcome = run(r, {"a": [1, 2, 3]})
        assert outcome.final.as_dict() == {"a": (1, 2, 3), "b": (9, 2, 3), "x": 3, "y": 0}

    def test_index_out_of_range(self):
        r = parse(body_only("  x := 1\n  y := a[3]", params="a: ARRAY"))
        outcome = run(r, {"a": [1, 2, 3]})
        assert outcome.status is RunStatus.RUNTIME_ERROR
        assert outcome.error_kind is RuntimeErrorKind.INDEX_OUT_OF_RANGE
        assert outcome.line == 7
        assert outcome.final.as_dict()["x"] == 1

    def test_division_truncates_toward_zero(self):
        outcome = run(parse(body_only("  x := -7 div 2\n  y := -7 mod 2")), {})
        assert outcome.final.as_dict() == {"x": -3, "y": -1}

    def test_division_by_zero(self):
        outcome = run(parse(body_only("  x := 1 div y")), {})
        assert outcome.error_kind is RuntimeErrorKind.DIV_BY_ZERO
        assert outcome.describe() == "runtime_error(div_by_zero) at line 6"

    def test_overflow(self):
        outcome = run(parse(body_only("  x := 65536 * 65536")), {})
        assert outcome.error_kind is RuntimeErrorKind.OVERFLOW

    def test_local_initializers(self):
        r = parse(body_only("  y := x", local="x: INTEGER := n + 1\n  y: INTEGER", params="n: INTEGER"))
        assert run(r, {"n": 4}).final.as_dict()["y"] == 5

    def test_failed_check(self):
        outcome = run(parse(body_only("  check x = 1 end")), {})
        assert outcome.status is RunStatus.CHECK_VIOLATION
        assert (outcome.tag, outcome.origin) == ("check", Origin.USER)

    def test_seeded_check_tag(self):
        outcome = run(parse(body_only("  check false end -- [target 4]")), {})
        assert (outcome.tag, outcome.target_id) == ("target4", 4)

    def test_contract_violation_tag(self):
        outcome = run(parse(body_only("  x := 1", ensure="is_two: x = 2")), {})
        assert outcome.status is RunStatus.CONTRACT_VIOLATION
        assert outcome.tag == "is_two"


class TestLoops:
    def test_factorial_of_four(self, factorial):
        outcome = run(factorial, {"n": 4})
        assert outcome.ok
        assert outcome.final.as_dict()["f"] == 24
        assert outcome.iterations == {"loop1": 4}
        # entry, two initializations, two assignments per iteration
        assert len(outcome.trace) == 11

    def test_zero_iterations(self, factorial):
        outcome = run(factorial, {"n": 0})
        assert outcome.iterations == {"loop1": 0}
        assert outcome.final.as_dict()["f"] == 1

    def test_fuel_exhausted(self):
        r = parse(body_only("  from x := 0 until false loop x := x + 1 end"))
        outcome = run(r, {}, fuel=5)
        assert outcome.status is RunStatus.FUEL_EXHAUSTED
        assert outcome.tag == "nontermination"
        assert outcome.iterations == {"loop1": 5}

    def test_exit_recorded(self, factorial):
        assert run(factorial, {"n": 2}).exited == {"loop1"}

    def test_exit_not_recorded_without_fuel(self):
        r = parse(body_only("  from x := 0 until false loop x := x + 1 end"))
        assert run(r, {}, fuel=5).exited == set()

    def test_branch_log(self, gcd):
        outcome = run(gcd, {"a": 4, "b": 6})
        assert outcome.branch_log == [("loop1", 1, 2), ("loop1", 2, 1)]
        assert outcome.final.as_dict()["x"] == 2

    def test_branch_log_records_missing_else(self):
        r = parse(
            "routine r(a: ARRAY)\nlocal\n  i: INTEGER\n  best: INTEGER\ndo\n"
            "  from i := 0 until i = a.count loop\n"
            "    if a[i] > best then best := a[i] end\n"
            "    i := i + 1\n"
            "  end\nend\n"
        )
        assert [leaf for _, _, leaf in run(r, {"a": [1, 0]}).branch_log] == [1, 2]

    def test_unrecorded_run_keeps_endpoints(self, factorial):
        full = run(factorial, {"n": 5})
        short = run(factorial, {"n": 5}, record_trace=False)
        assert short.trace == [full.trace[0], full.trace[-1]]
        assert short.iterations == full.iterations

    def test_format_trace(self):
        text = format_trace(run(parse(COUNTER), {"n": 1}).trace)
        assert text.splitlines()[-1].endswith("n=1 i=1")


class TestInputs:
    def test_enumeration_order(self, gcd):
        inputs = list(enumerate_inputs(gcd, Domain(int_min=1, int_max=2)))
        assert inputs == [{"a": 1, "b": 1}, {"a": 1, "b": 2}, {"a": 2, "b": 1}, {"a": 2, "b": 2}]

    def test_array_domain_size(self):
        r = parse(body_only("  x := 0", params="a: ARRAY"))
        d = Domain(int_min=0, int_max=1, array_len_max=2)
        assert domain_size(r, d) == 7
        assert len(list(enumerate_inputs(r, d))) == 7

    def test_precondition_filter(self, gcd):
        assert not satisfies_require(gcd, {"a": 0, "b": 3})
        assert all(i["a"] > 0 and i["b"] > 0 for i in valid_inputs(gcd, Domain(int_min=0, int_max=3)))

    def test_require_fault_is_false(self):
        r = parse("routine r(a: ARRAY)\nrequire\n  a[0] > 0\ndo\nend\n")
        assert not satisfies_require(r, {"a": []})

    def test_input_errors(self, gcd):
        with pytest.raises(ValueError, match="Missing input"):
            run(gcd, {"a": 1})
        with pytest.raises(ValueError, match="Unknown input"):
            run(gcd, {"a": 1, "b": 1, "c": 1})
        with pytest.raises(ValueError, match="not a valid INTEGER"):
            run(gcd, {"a": True, "b": 1})

    def test_input_key_is_order_free(self):
        assert input_key({"a": [1], "b": 2}) == input_key({"b": 2, "a": (1,)})
