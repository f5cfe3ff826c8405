"""Tests for the parser, type checker, pretty printer and structure analysis."""

import pytest

from tests.conftest import CORPUS_NAMES, COUNTER, DATA_DIR, corpus_entries, corpus_routine
from unrolling.analysis import analyze, leaf_branches, leaves_exclusive
from unrolling.parser import parse, parse_file
from unrolling.pretty import pretty, pretty_expr
from unrolling.syntax import Binary, Check, If, IntLit, Loop, SourceError, Var, iter_nodes, loops_of
from unrolling.types import Origin, VarType


def routine_with(body: str, *, params: str = "n: INTEGER", local: str = "i: INTEGER", ensure: str = "") -> str:
    ensure_part = f"ensure\n  {ensure}\n" if ensure else ""
    return f"routine r({params})\nlocal\n  {local}\ndo\n{body}\n{ensure_part}end\n"


class TestParse:
    def test_counter_shape(self):
        r = parse(COUNTER)
        assert r.name == "counter"
        assert [(p.name, p.type) for p in r.params] == [("n", VarType.INTEGER)]
        assert [loop.label for loop in loops_of(r)] == ["loop1"]
        assert r.ensure[0].tag == "done"

    def test_max_in_array_has_one_loop(self):
        r = corpus_routine("max_in_array")
        loops = loops_of(r)
        assert len(loops) == 1
        assert loops[0].init is not None
        assert isinstance(loops[0].body.instrs[0], If)

    def test_node_ids_are_unique(self):
        r = corpus_routine("binary_search")
        ids = [node.node_id for node in iter_nodes(r)]
        assert all(ids)
        assert len(ids) == len(set(ids))

    def test_precedence(self):
        r = parse(routine_with("  i := 1 + 2 * n - 3"))
        value = r.body.instrs[0].value
        assert isinstance(value, Binary) and value.op == "-"
        assert value.left == Binary("+", IntLit(1), Binary("*", IntLit(2), Var("n")))

    def test_elseif_nests_in_else(self):
        r = corpus_routine("square_root")
        outer = next(n for n in iter_nodes(r) if isinstance(n, If))
        assert len(outer.orelse.instrs) == 1
        inner = outer.orelse.instrs[0]
        assert isinstance(inner, If) and inner.orelse is not None

    def test_boolean_literals_case_insensitive(self):
        r = parse(routine_with("  b := TRUE", local="b: BOOLEAN"))
        assert pretty_expr(r.body.instrs[0].value) == "True"

    def test_markers_attach_to_checks(self):
        src = routine_with("  check false end -- [target 3]\n  check false end -- [bound]\n  check i = 0 end -- note")
        checks = [n for n in iter_nodes(parse(src)) if isinstance(n, Check)]
        assert [(c.origin, c.target_id) for c in checks] == [
            (Origin.SEEDED, 3), (Origin.BOUND, None), (Origin.USER, None),
        ]


class TestErrors:
    def test_empty_input(self):
        with pytest.raises(SourceError) as err:
            parse("")
        assert str(err.value) == "1:1: syntax error: empty input"

    def test_comparisons_do_not_chain(self):
        with pytest.raises(SourceError, match="comparison operators do not chain"):
            parse(routine_with("  check 0 < i < n end"))

    def test_error_position(self):
        with pytest.raises(SourceError) as err:
            parse(routine_with("  i := := 1"))
        assert err.value.line == 5
        assert "syntax error" in err.value.message

    def test_unexpected_character(self):
        with pytest.raises(SourceError, match="unexpected character '#'"):
            parse(routine_with("  i := #"))

    @pytest.mark.parametrize(
        "source, message",
        [
            (routine_with("  i := x"), "unresolved identifier 'x'"),
            (routine_with("  n := 1"), "cannot assign to parameter 'n'"),
            (routine_with("  i := 1", local="n: INTEGER"), "duplicate declaration 'n'"),
            (routine_with("  i := 1", ensure="t: i = 1\n  t: i = 2"), "duplicate tag 't'"),
            (routine_with("  if i then i := 1 end"), "if condition must be BOOLEAN, got INTEGER"),
            (routine_with("  check across 0 .. n as i all i > 0 end end"), "quantified variable 'i' shadows a declaration"),
        ],
    )
    def test_type_errors(self, source, message):
        with pytest.raises(SourceError, match="type error: " + message):
            parse(source)

    def test_require_sees_parameters_only(self):
        src = "routine r(n: INTEGER)\nrequire\n  i = 0\nlocal\n  i: INTEGER\ndo\nend\n"
        with pytest.raises(SourceError, match="unresolved identifier 'i'"):
            parse(src)

    def test_source_error_is_value_error(self):
        with pytest.raises(ValueError):
            parse("routine")

    def test_quantifier_words_are_reserved(self):
        with pytest.raises(SourceError, match="found 'sum'"):
            parse(routine_with("  i := 1", ensure="sum: i = 1"))


class TestPretty:
    @pytest.mark.parametrize("name", CORPUS_NAMES)
    def test_corpus_reparses_to_same_tree(self, name):
        r = corpus_routine(name)
        assert parse(pretty(r)) == r

    def test_markers_printed(self):
        src = routine_with("  check false end -- [target 2]\n  check false end -- [bound]")
        text = pretty(parse(src))
        assert "check False end -- [target 2]" in text
        assert "check False end -- [bound]" in text

    def test_elseif_printed_flat(self):
        text = pretty(corpus_routine("square_root"))
        assert "elseif mid * mid < n then" in text

    def test_parentheses_kept_where_needed(self):
        r = parse(routine_with("  i := (n + 1) * (n - 1)"))
        assert pretty_expr(r.body.instrs[0].value) == "(n + 1) * (n - 1)"


class TestAnalyze:
    def test_binary_search_branches(self):
        info = analyze(corpus_routine("binary_search"))
        assert info.loop_count == 1
        assert info.loops[0].m == 3

    def test_factorial_has_no_branches(self):
        assert analyze(corpus_routine("factorial")).loops[0].m == 0

    def test_routine_without_loops(self):
        info = analyze(parse(routine_with("  i := n")))
        assert info.loop_count == 0
        assert info.nesting_depth == 0
        assert info.loops == []

    def test_if_without_else_counts_two_leaves(self):
        r = corpus_routine("max_in_array")
        loop = loops_of(r)[0]
        assert [side for _, side in leaf_branches(loop.body)] == ["then", "else"]

    def test_nested_loops(self):
        body = (
            "  from i := 0 until i >= n loop\n"
            "    from j := 0 until j >= i loop j := j + 1 end\n"
            "    i := i + 1\n"
            "  end"
        )
        info = analyze(parse(routine_with(body, local="i: INTEGER\n  j: INTEGER")))
        assert info.nesting_depth == 2
        assert [(l.label, l.depth) for l in info.loops] == [("loop1", 1), ("loop2", 2)]
        with pytest.raises(KeyError):
            info.loop("loop9")

    @pytest.mark.parametrize("entry", corpus_entries(), ids=lambda e: e.name)
    def test_corpus_branch_counts(self, entry):
        assert analyze(corpus_routine(entry.name)).loops[0].m == entry.branches
        assert (DATA_DIR / entry.file).exists()

    @pytest.mark.parametrize("path", sorted((DATA_DIR / "routines").glob("*.mil")), ids=lambda p: p.stem)
    def test_every_routine_file_parses(self, path):
        r = parse_file(path)
        assert r.name == path.stem
        assert len(loops_of(r)) == 1

    def test_routine_files_match_corpus(self):
        files = {p.name for p in (DATA_DIR / "routines").glob("*.mil")}
        assert files == {e.file.split("/")[-1] for e in corpus_entries()}

    def test_loop_node_type(self):
        assert all(isinstance(l, Loop) for l in loops_of(corpus_routine("gcd")))

    @pytest.mark.parametrize("name", CORPUS_NAMES)
    def test_corpus_leaves_are_exclusive(self, name):
        assert leaves_exclusive(loops_of(corpus_routine(name))[0].body)

    def test_sequential_ifs_are_not_exclusive(self):
        body = (
            "  from i := 0 until i >= n loop\n"
            "    if i > 1 then\n"
            "      if i > 2 then i := i + 1 end\n"
            "      if i > 3 then i := i + 1 end\n"
            "    end\n"
            "    i := i + 1\n"
            "  end"
        )
        loop = loops_of(parse(routine_with(body)))[0]
        assert not leaves_exclusive(loop.body)
        assert len(leaf_branches(loop.body)) == 5
