"""Shared enums and serializable records for the unrolling toolkit."""

from __future__ import annotations

from enum import Enum
from typing import Union

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class VarType(str, Enum):
    INTEGER = "INTEGER"
    BOOLEAN = "BOOLEAN"
    ARRAY = "ARRAY"


class Origin(str, Enum):
    USER = "user"
    SEEDED = "seeded"
    BOUND = "bound"  # the guard at the innermost position of a strict unrolling


class RunStatus(str, Enum):
    OK = "ok"
    CHECK_VIOLATION = "check_violation"
    CONTRACT_VIOLATION = "contract_violation"
    RUNTIME_ERROR = "runtime_error"
    FUEL_EXHAUSTED = "fuel_exhausted"


class RuntimeErrorKind(str, Enum):
    INDEX_OUT_OF_RANGE = "index_out_of_range"
    DIV_BY_ZERO = "div_by_zero"
    OVERFLOW = "overflow"


class UnrollForm(str, Enum):
    STRICT = "strict"
    TRUNCATED = "truncated"


class InstrumentMode(str, Enum):
    SC = "sc"
    SCU = "scu"


class TargetKind(str, Enum):
    SC_BRANCH = "sc_branch"
    SCU_PLAIN_LEVEL = "scu_plain_level"
    SCU_BRANCH_LEVEL = "scu_branch_level"


class SearchOrder(str, Enum):
    LEX = "lex"
    RANDOM = "random"


class TargetOutcome(str, Enum):
    COVERED = "covered"
    UNREACHABLE = "unreachable"  # every candidate input examined
    UNKNOWN = "unknown"  # search budget ran out first


class MutationOperator(str, Enum):
    RELOP_SWAP = "relop_swap"
    ARITH_SWAP = "arith_swap"
    CONST_OFFSET = "const_offset"
    BOUND_TWEAK = "bound_tweak"
    ASSIGN_DROP = "assign_drop"
    BRANCH_NEGATE = "branch_negate"


class LawStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    VACUOUS = "vacuous"


InputValue = Union[bool, int, list[int]]


class Domain(BaseModel):
    """Finite input space: integers and array elements in [int_min, int_max]."""
    int_min: int = 0
    int_max: int = 3
    array_len_max: int = 3

    @model_validator(mode="after")
    def _check_bounds(self) -> Domain:
        if self.int_min > self.int_max:
            raise ValueError(f"int_min ({self.int_min}) must not exceed int_max ({self.int_max})")
        if self.array_len_max < 0:
            raise ValueError(f"array_len_max must be non-negative, got {self.array_len_max}")
        return self

    @classmethod
    def parse(cls, int_range: str, array_max: int = 3) -> Domain:
        """Build a domain from the command-line form ``A..B``."""
        low, sep, high = int_range.partition("..")
        if not sep:
            raise ValueError(f"Invalid integer range '{int_range}', expected A..B")
        try:
            return cls(int_min=int(low), int_max=int(high), array_len_max=array_max)
        except ValueError as exc:
            raise ValueError(f"Invalid integer range '{int_range}': {exc}") from None

    def __str__(self) -> str:
        return f"[{self.int_min}..{self.int_max}], arrays up to {self.array_len_max}"


class Target(BaseModel):
    """One seeded contradiction of an instrumented routine."""
    target_id: int
    kind: TargetKind
    level: int
    branch: int
    location: str
    line: int
    seeded_expr: str

    @computed_field  # type: ignore[prop-decorator]
    @property
    def tag(self) -> str:
        return f"level{self.level}_branch{self.branch}"


class Certificate(BaseModel):
    """What a replay of the original routine observed."""
    iterations: int
    branch: int


class TestCase(BaseModel):
    __test__ = False  # keep pytest from collecting the model

    test_id: int
    target_id: int
    kind: TargetKind
    level: int
    branch: int
    input: dict[str, InputValue]
    certified: Certificate
    origin_seed: int = 0
    baseline: RunStatus = RunStatus.OK


class TestSuite(BaseModel):
    __test__ = False

    routine: str
    depth: int
    mode: InstrumentMode
    domain: Domain
    order: SearchOrder = SearchOrder.LEX
    seed: int = 0
    targets: list[Target] = Field(default_factory=list)
    tests: list[TestCase] = Field(default_factory=list)
    uncovered: list[int] = Field(default_factory=list)
    unknown: list[int] = Field(default_factory=list)

    def covered_ids(self) -> set[int]:
        return {tc.target_id for tc in self.tests}


class FaultRecord(BaseModel):
    """A distinct fault: equality is tuple equality on (variant, tag, line)."""
    model_config = ConfigDict(frozen=True)

    variant: str
    tag: str
    line: int

    def sort_key(self) -> tuple[str, str, int]:
        return (self.variant, self.tag, self.line)


class LawReport(BaseModel):
    law_name: str
    samples_run: int
    counterexample: str | None = None
    elapsed: float = 0.0
    mode: str = "random"

    @computed_field  # type: ignore[prop-decorator]
    @property
    def status(self) -> LawStatus:
        if self.counterexample is not None:
            return LawStatus.FAILED
        if self.samples_run == 0:
            return LawStatus.VACUOUS
        return LawStatus.PASSED


class MutantEntry(BaseModel):
    mutant_id: str
    operator: MutationOperator
    node_id: str
    line: int
    description: str
    file: str


class MutantManifest(BaseModel):
    routine: str
    seed: int
    count: int
    mutants: list[MutantEntry] = Field(default_factory=list)


class EvalCell(BaseModel):
    """Faults found by the suite of one (depth, run) pair."""
    depth: int
    run: int
    seed: int
    tests: int
    faults: list[FaultRecord] = Field(default_factory=list)


class EvalReport(BaseModel):
    routine: str
    depths: list[int]
    runs: int
    base_seed: int
    mutants: list[str] = Field(default_factory=list)
    cells: list[EvalCell] = Field(default_factory=list)
    np: dict[int, float] = Field(default_factory=dict)
    na: dict[int, int] = Field(default_factory=dict)
    generation_seconds: dict[int, float] = Field(default_factory=dict)
    execution_seconds: dict[int, float] = Field(default_factory=dict)

    def faults(self, depth: int, run: int) -> set[FaultRecord]:
        for cell in self.cells:
            if cell.depth == depth and cell.run == run:
                return set(cell.faults)
        raise KeyError((depth, run))


class CorpusEntry(BaseModel):
    """One bundled benchmark routine with its default search domain."""
    name: str
    file: str
    domain: Domain
    max_depth: int
    branches: int
    eval_depth: int = 5
