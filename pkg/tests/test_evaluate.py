"""Tests for the fault-detection experiment and its reports."""

import csv

import pytest

from unrolling.evaluate import (
    NONTERMINATION,
    compute_np_na,
    curves,
    derive_seed,
    evaluate,
    fault_of,
    format_report,
    load_report,
    normalized,
    report,
    run_suite,
)
from unrolling.mutate import apply_site, enumerate_sites, mutate
from tests.conftest import corpus_entries, corpus_routine
from unrolling.testgen import generate
from unrolling.types import Domain, EvalCell, FaultRecord, MutationOperator, SearchOrder

GCD_DOMAIN = Domain(int_min=1, int_max=6)
FACT_DOMAIN = Domain(int_min=0, int_max=6)


def fault(variant, tag="post", line=1):
    return FaultRecord(variant=variant, tag=tag, line=line)


@pytest.fixture
def product_mutant(factorial):
    site = next(s for s in enumerate_sites(factorial, [MutationOperator.ARITH_SWAP]) if s.variant == "+")
    mutated, _ = apply_site(factorial, site)
    return ("fact_plus", mutated)


@pytest.fixture
def spinning_gcd(gcd):
    site = enumerate_sites(gcd, [MutationOperator.ASSIGN_DROP])[2]
    mutated, text = apply_site(gcd, site)
    assert text == "line 16: drop x := x - y"
    return mutated


class TestMeasures:
    def test_np_and_na(self):
        cells = [
            EvalCell(depth=1, run=1, seed=0, tests=2, faults=[fault("m1"), fault("m2")]),
            EvalCell(depth=1, run=2, seed=0, tests=2, faults=[fault("m2"), fault("m3")]),
            EvalCell(depth=2, run=1, seed=0, tests=3, faults=[fault("m1")]),
            EvalCell(depth=2, run=2, seed=0, tests=3, faults=[fault("m1")]),
        ]
        np, na = compute_np_na(cells)
        assert np == {1: 2.0, 2: 1.0}
        assert na == {1: 3, 2: 1}

    def test_fault_identity_is_the_tuple(self):
        assert fault("m1", "post", 3) == fault("m1", "post", 3)
        assert len({fault("m1", "post", 3), fault("m1", "post", 4)}) == 2

    def test_derive_seed(self):
        assert derive_seed(0, 1) == derive_seed(0, 1)
        assert derive_seed(0, 1) != derive_seed(0, 2)
        assert derive_seed(0, 1) != derive_seed(1, 1)
        assert 0 <= derive_seed(123, 7) < 2**32

    def test_normalized(self):
        assert normalized({1: 2.0, 2: 4.0}) == {1: 50.0, 2: 100.0}
        assert normalized({1: 0.0, 2: 0.0}) == {1: 0.0, 2: 0.0}
        assert normalized({}) == {}


class TestFaults:
    def test_original_has_no_faults(self, factorial):
        suite = generate(factorial, 4, FACT_DOMAIN)
        assert run_suite("original", factorial, suite) == set()

    def test_contract_fault_collapses_to_one(self, factorial, product_mutant):
        suite = generate(factorial, 3, FACT_DOMAIN)
        found = run_suite(*product_mutant, suite)
        assert found == {FaultRecord(variant="fact_plus", tag="is_product", line=20)}

    def test_nontermination(self, spinning_gcd):
        record = fault_of("spin", spinning_gcd, {"a": 2, "b": 1}, fuel=10)
        assert record == FaultRecord(variant="spin", tag=NONTERMINATION, line=9)

    def test_nontermination_can_be_excluded(self, gcd, spinning_gcd):
        suite = generate(gcd, 2, GCD_DOMAIN)
        assert any(f.tag == NONTERMINATION for f in run_suite("spin", spinning_gcd, suite, fuel=10))
        kept = run_suite("spin", spinning_gcd, suite, fuel=10, include_nontermination=False)
        assert all(f.tag != NONTERMINATION for f in kept)

    def test_cache_reused(self, factorial, product_mutant):
        cache = {}
        suite = generate(factorial, 2, FACT_DOMAIN)
        first = run_suite(*product_mutant, suite, cache=cache)
        assert len(cache) == 2
        assert run_suite(*product_mutant, suite, cache=cache) == first


class TestEvaluate:
    def test_faults_grow_with_depth(self, gcd):
        rep = evaluate(gcd, mutate(gcd, k=10, seed=2), 3, 2, GCD_DOMAIN, base_seed=4)
        for run in (1, 2):
            for depth in (1, 2):
                assert rep.faults(depth, run) <= rep.faults(depth + 1, run)
        assert rep.na[1] <= rep.na[2] <= rep.na[3]
        assert rep.depths == [1, 2, 3]
        assert len(rep.cells) == 6

    def test_original_only(self, factorial):
        rep = evaluate(factorial, [("original", factorial)], 2, 2, FACT_DOMAIN)
        assert rep.na == {1: 0, 2: 0}
        assert rep.np == {1: 0.0, 2: 0.0}

    def test_reproducible(self, gcd):
        mutants = mutate(gcd, k=5, seed=1)
        a = evaluate(gcd, mutants, 2, 2, GCD_DOMAIN, base_seed=11)
        b = evaluate(gcd, mutants, 2, 2, GCD_DOMAIN, base_seed=11)
        assert a.cells == b.cells

    def test_lex_order_runs_agree(self, factorial, product_mutant):
        rep = evaluate(factorial, [product_mutant], 2, 3, FACT_DOMAIN, order=SearchOrder.LEX)
        assert rep.np[1] == 1.0
        assert rep.na == {1: 1, 2: 1}

    @pytest.mark.parametrize("kwargs, message", [
        ({"max_depth": 0, "runs": 1}, "max_depth"),
        ({"max_depth": 1, "runs": 0}, "runs"),
    ])
    def test_arguments_validated(self, factorial, kwargs, message):
        with pytest.raises(ValueError, match=message):
            evaluate(factorial, [], domain=FACT_DOMAIN, **kwargs)


class TestMonotonicity:
    @pytest.mark.slow
    @pytest.mark.parametrize("entry", corpus_entries(), ids=lambda e: e.name)
    def test_faults_never_shrink_with_depth(self, entry):
        r = corpus_routine(entry.name)
        depth = min(entry.max_depth, 4)
        rep = evaluate(r, mutate(r, k=10, seed=3), depth, 3, entry.domain, base_seed=9)
        for run in range(1, 4):
            for i in range(1, depth):
                assert rep.faults(i, run) <= rep.faults(i + 1, run)
        assert all(rep.na[i] <= rep.na[i + 1] for i in range(1, depth))
        assert all(rep.np[i] <= rep.np[i + 1] for i in range(1, depth))


class TestReport:
    @pytest.fixture
    def rep(self, factorial, product_mutant):
        return evaluate(factorial, [product_mutant], 3, 2, FACT_DOMAIN)

    def test_curves(self, rep):
        c = curves(rep)
        assert max(c.p_na.values()) == 100.0
        assert c.na_delta == c.p_na[2] - c.p_na[1]

    def test_text_table(self, rep):
        text = format_report(rep)
        assert text.splitlines()[0] == "factorial: 1 mutant(s), 2 run(s), base seed 0"
        assert "depth 1 -> 2" in text

    def test_files(self, rep, tmp_path):
        report(rep, tmp_path / "factorial.json")
        assert load_report(tmp_path / "factorial.json") == rep
        with open(tmp_path / "factorial.csv", newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["depth", "p_np", "p_na"]
        assert [row[0] for row in rows[1:]] == ["1", "2", "3"]

    def test_no_path_writes_nothing(self, rep, tmp_path):
        assert report(rep) == format_report(rep)
        assert list(tmp_path.iterdir()) == []
