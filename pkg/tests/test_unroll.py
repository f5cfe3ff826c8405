"""Tests for syntactic loop unrolling."""

import pytest

from tests.conftest import CORPUS_NAMES, corpus_entries, corpus_routine
from unrolling.interpreter import run
from unrolling.parser import parse
from unrolling.pretty import pretty
from unrolling.syntax import Check, If, Unary, iter_nodes, loops_of
from unrolling.types import Domain, Origin, RunStatus, UnrollForm
from unrolling.unroll import (
    UnrollConfig,
    UnsupportedLoopError,
    count_copies,
    select_loop,
    semantic_check,
    unroll_routine,
)

NESTED = """
routine nested(n: INTEGER)
local
  i: INTEGER
  j: INTEGER
do
  from i := 0 until i >= n loop
    from j := 0 until j >= i loop j := j + 1 end
    i := i + 1
  end
end
"""

TWO_LOOPS = """
routine twice(n: INTEGER)
local
  i: INTEGER
do
  from i := 0 until i >= n loop i := i + 1 end
  from until i <= 0 loop i := i - 1 end
end
"""


def unrolled(r, depth, form=UnrollForm.STRICT):
    return unroll_routine(r, UnrollConfig(depth, form=form))


def bound_checks(r):
    return [n for n in iter_nodes(r) if isinstance(n, Check) and n.origin is Origin.BOUND]


class TestShape:
    def test_depth_zero_is_a_bare_guard(self, counter):
        r = unrolled(counter, 0)
        assert not loops_of(r)
        assert [type(i).__name__ for i in r.body.instrs] == ["Assign", "Check"]
        assert "check False end -- [bound]" in pretty(r)

    def test_depth_one(self, counter):
        r = unrolled(counter, 1)
        init, level = r.body.instrs
        assert isinstance(level, If) and level.orelse is None
        assert isinstance(level.cond, Unary) and level.cond.op == "not"
        step, guard = level.then.instrs
        assert step == counter.body.instrs[0].body.instrs[0]
        assert isinstance(guard, If)
        assert guard.then.instrs[0].origin is Origin.BOUND

    @pytest.mark.parametrize("depth", [0, 1, 2, 5])
    def test_copy_count(self, counter, depth):
        loop = select_loop(counter)
        assert count_copies(unrolled(counter, depth), loop) == depth
        assert count_copies(unrolled(counter, depth, UnrollForm.TRUNCATED), loop) == depth

    def test_exactly_one_guard(self, gcd):
        assert len(bound_checks(unrolled(gcd, 3))) == 1
        assert bound_checks(unrolled(gcd, 3, UnrollForm.TRUNCATED)) == []

    @pytest.mark.parametrize("depth", [0, 1, 4])
    @pytest.mark.parametrize("form", list(UnrollForm))
    def test_node_ids_unique_and_present(self, gcd, depth, form):
        ids = [n.node_id for n in iter_nodes(unrolled(gcd, depth, form))]
        assert "" not in ids
        assert len(ids) == len(set(ids))

    def test_levels_addressable_by_copy_index(self, gcd):
        loop = select_loop(gcd)
        r = unrolled(gcd, 2)
        by_id = {n.node_id: n for n in iter_nodes(r)}
        assert isinstance(by_id[f"{loop.node_id}@1"], If)
        assert by_id[f"{loop.node_id}@1"].then is by_id[f"{loop.node_id}@1.then"]
        assert by_id[f"{loop.node_id}@2"].cond.node_id == f"{loop.until.node_id}@2.not"

    @pytest.mark.parametrize("name", CORPUS_NAMES)
    def test_unrolled_text_reparses(self, name):
        r = unrolled(corpus_routine(name), 2)
        assert parse(pretty(r)) == r


class TestBehaviour:
    def test_within_depth_accepts(self, counter):
        r = unrolled(counter, 3)
        assert run(r, {"n": 3}).ok
        assert run(r, {"n": 3}).final.as_dict()["i"] == 3

    def test_beyond_depth_hits_guard(self, counter):
        outcome = run(unrolled(counter, 3), {"n": 4})
        assert outcome.status is RunStatus.CHECK_VIOLATION
        assert (outcome.origin, outcome.tag) == (Origin.BOUND, "bound")

    def test_truncated_keeps_partial_state(self, counter):
        outcome = run(unrolled(counter, 2, UnrollForm.TRUNCATED), {"n": 5})
        assert outcome.status is RunStatus.CONTRACT_VIOLATION
        assert outcome.final.as_dict()["i"] == 2

    def test_strict_report_counts(self, counter):
        report = semantic_check(counter, UnrollConfig(3), Domain(int_min=0, int_max=5))
        assert report.ok
        assert (report.checked, report.accepted, report.rejected) == (6, 4, 2)

    def test_depth_zero_rejects_everything(self, counter):
        report = semantic_check(counter, UnrollConfig(0), Domain(int_min=0, int_max=2))
        assert report.ok
        assert report.rejected == 3

    @pytest.mark.parametrize("entry", corpus_entries(), ids=lambda e: e.name)
    @pytest.mark.parametrize("depth", [0, 1, 3])
    def test_corpus_agrees_with_interpreter(self, entry, depth):
        d = Domain(int_min=entry.domain.int_min, int_max=min(entry.domain.int_max, entry.domain.int_min + 4),
                   array_len_max=min(entry.domain.array_len_max, 3))
        for form in UnrollForm:
            report = semantic_check(corpus_routine(entry.name), UnrollConfig(depth, form=form), d)
            assert report.mismatches == []


class TestErrors:
    def test_negative_depth(self):
        with pytest.raises(UnsupportedLoopError, match="non-negative"):
            UnrollConfig(-1)

    def test_depth_cap(self):
        with pytest.raises(UnsupportedLoopError, match="exceeds the maximum"):
            UnrollConfig(10, max_depth=8)

    def test_no_loop(self):
        r = parse("routine r(n: INTEGER)\nlocal\n  i: INTEGER\ndo\n  i := n\nend\n")
        with pytest.raises(UnsupportedLoopError, match="has no loop"):
            unrolled(r, 1)

    def test_nested_loop(self):
        with pytest.raises(UnsupportedLoopError, match="contains a nested loop"):
            unroll_routine(parse(NESTED), UnrollConfig(1, loop_label="loop1"))

    def test_several_loops_need_a_label(self):
        r = parse(TWO_LOOPS)
        with pytest.raises(UnsupportedLoopError, match="exactly one loop"):
            unrolled(r, 1)
        second = unroll_routine(r, UnrollConfig(2, loop_label="loop2"))
        assert [loop.label for loop in loops_of(second)] == ["loop1"]
        assert run(second, {"n": 2}).ok

    def test_unknown_label(self, counter):
        with pytest.raises(UnsupportedLoopError, match="Unknown loop label 'loop7'"):
            unroll_routine(counter, UnrollConfig(1, loop_label="loop7"))

    def test_unsupported_is_value_error(self, counter):
        with pytest.raises(ValueError):
            UnrollConfig(-2)
