"""Operational semantics: expression evaluation, single runs and input enumeration."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .analysis import ELSE, THEN, leaf_numbers
from .syntax import (
    Across,
    Assign,
    AssignIndex,
    Binary,
    Block,
    BoolLit,
    Check,
    Count,
    Expr,
    If,
    Index,
    IntLit,
    Loop,
    Node,
    Routine,
    Unary,
    Var,
    iter_nodes,
)
from .types import Domain, Origin, RunStatus, RuntimeErrorKind, VarType

logger = logging.getLogger(__name__)

Value = Union[bool, int, tuple[int, ...]]
Inputs = Mapping[str, Union[bool, int, tuple[int, ...], list[int]]]

SAFE_INT = 2**31
ENTRY = "entry"


class RuntimeFault(Exception):
    """An expression or assignment failed at run time."""

    def __init__(self, kind: RuntimeErrorKind, node: Node):
        super().__init__(f"{kind.value} at line {node.line}")
        self.kind = kind
        self.node_id = node.node_id
        self.line = node.line


@dataclass(frozen=True, order=True)
class ProgState:
    """Program location plus the values of every declared variable.

    The location is the node id of the last assignment executed (``entry``
    before any), so instructions that do not change state leave it alone.
    """
    location: str
    env: tuple[tuple[str, Union[bool, int]], ...]
    arrays: tuple[tuple[str, tuple[int, ...]], ...]
    line: int = field(default=0, compare=False)

    def as_dict(self) -> dict[str, Value]:
        return dict(self.env) | dict(self.arrays)

    def values(self) -> tuple:
        """The valuation without the location."""
        return (self.env, self.arrays)

    def __str__(self) -> str:
        return f"{self.location}{{{_format_values(self.as_dict())}}}"


def _format_value(value: Value) -> str:
    if isinstance(value, tuple):
        return "[" + ",".join(str(v) for v in value) + "]"
    return str(value)


def _format_values(values: Mapping[str, Value]) -> str:
    return " ".join(f"{name}={_format_value(v)}" for name, v in values.items())


def format_trace(trace: list[ProgState]) -> str:
    """One line per state: ``@<line>: x=1 y=2 a=[3,1]``."""
    return "\n".join(f"@{s.line}: {_format_values(s.as_dict())}" for s in trace)


def make_state(r: Routine, env: Mapping[str, Value], location: str, line: int) -> ProgState:
    scalars = []
    arrays = []
    for name, var_type in r.declarations():
        if var_type is VarType.ARRAY:
            arrays.append((name, env[name]))
        else:
            scalars.append((name, env[name]))
    return ProgState(location, tuple(scalars), tuple(arrays), line)


# --- Expressions ---


def _checked(value: int, node: Node) -> int:
    if abs(value) > SAFE_INT:
        raise RuntimeFault(RuntimeErrorKind.OVERFLOW, node)
    return value


def _div(a: int, b: int, node: Node) -> int:
    if b == 0:
        raise RuntimeFault(RuntimeErrorKind.DIV_BY_ZERO, node)
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _mod(a: int, b: int, node: Node) -> int:
    return a - b * _div(a, b, node)


def _evaluate(env: Mapping[str, Value], e: Expr) -> Value:
    if isinstance(e, (IntLit, BoolLit)):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Index):
        array = env[e.array]
        i = _evaluate(env, e.index)
        if not 0 <= i < len(array):
            raise RuntimeFault(RuntimeErrorKind.INDEX_OUT_OF_RANGE, e)
        return array[i]
    if isinstance(e, Count):
        return len(env[e.array])
    if isinstance(e, Unary):
        value = _evaluate(env, e.operand)
        return (not value) if e.op == "not" else _checked(-value, e)
    if isinstance(e, Binary):
        return _binary(env, e)
    if isinstance(e, Across):
        return _across(env, e)
    raise TypeError(f"not an expression: {type(e).__name__}")


def _binary(env: Mapping[str, Value], e: Binary) -> Value:
    op = e.op
    left = _evaluate(env, e.left)
    if op == "and":
        return left and _evaluate(env, e.right)
    if op == "or":
        return left or _evaluate(env, e.right)
    right = _evaluate(env, e.right)
    if op == "+":
        return _checked(left + right, e)
    if op == "-":
        return _checked(left - right, e)
    if op == "*":
        return _checked(left * right, e)
    if op == "div":
        return _div(left, right, e)
    if op == "mod":
        return _mod(left, right, e)
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == ">=":
        return left >= right
    if op == "=":
        return left == right
    if op == "/=":
        return left != right
    raise ValueError(f"unknown operator '{op}'")


def _across(env: Mapping[str, Value], e: Across) -> Value:
    low = _evaluate(env, e.low)
    high = _evaluate(env, e.high)
    scope = dict(env)
    if e.quantifier == "all":
        result: Value = True
    elif e.quantifier == "some":
        result = False
    else:
        result = 0 if e.quantifier == "sum" else 1
    for k in range(low, high + 1):
        scope[e.var] = k
        value = _evaluate(scope, e.body)
        if e.quantifier == "all" and not value:
            return False
        if e.quantifier == "some" and value:
            return True
        if e.quantifier == "sum":
            result = _checked(result + value, e)
        elif e.quantifier == "product":
            result = _checked(result * value, e)
    return result


def eval_expr(s: ProgState | Mapping[str, Value], e: Expr) -> Value:
    """Value of ``e`` in state ``s``; raises ``RuntimeFault`` on index, division or overflow errors."""
    env = s.as_dict() if isinstance(s, ProgState) else s
    return _evaluate(env, e)


def assign(env: dict[str, Value], node: Assign | AssignIndex) -> None:
    """Apply one assignment to ``env`` in place."""
    if isinstance(node, Assign):
        env[node.target] = _evaluate(env, node.value)
        return
    array = env[node.array]
    i = _evaluate(env, node.index)
    if not 0 <= i < len(array):
        raise RuntimeFault(RuntimeErrorKind.INDEX_OUT_OF_RANGE, node)
    env[node.array] = array[:i] + (_evaluate(env, node.value),) + array[i + 1:]


# --- Inputs ---


def freeze_inputs(inputs: Inputs) -> dict[str, Value]:
    return {k: tuple(v) if isinstance(v, (list, tuple)) else v for k, v in inputs.items()}


def thaw_inputs(inputs: Mapping[str, Value]) -> dict[str, Union[bool, int, list[int]]]:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in inputs.items()}


def input_key(inputs: Inputs) -> tuple:
    return tuple(sorted(freeze_inputs(inputs).items()))


def _check_input(name: str, var_type: VarType, value: object) -> Value:
    if var_type is VarType.BOOLEAN and isinstance(value, bool):
        return value
    if var_type is VarType.INTEGER and isinstance(value, int) and not isinstance(value, bool):
        return value
    if var_type is VarType.ARRAY and isinstance(value, (list, tuple)) and all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        return tuple(value)
    raise ValueError(f"Input '{name}' is not a valid {var_type.value}: {value!r}")


def param_env(r: Routine, inputs: Inputs) -> dict[str, Value]:
    missing = [p.name for p in r.params if p.name not in inputs]
    if missing:
        raise ValueError(f"Missing input for parameter(s): {', '.join(missing)}")
    unknown = sorted(set(inputs) - {p.name for p in r.params})
    if unknown:
        raise ValueError(f"Unknown input(s): {', '.join(unknown)}")
    return {p.name: _check_input(p.name, p.type, inputs[p.name]) for p in r.params}


_DEFAULTS: dict[VarType, Value] = {VarType.INTEGER: 0, VarType.BOOLEAN: False, VarType.ARRAY: ()}


def initial_env(r: Routine, inputs: Inputs) -> dict[str, Value]:
    """Parameters from ``inputs``, then locals initialized in declaration order."""
    env = param_env(r, inputs)
    for local in r.locals:
        env[local.name] = _DEFAULTS[local.type]
    for local in r.locals:
        if local.init is not None:
            env[local.name] = _evaluate(env, local.init)
    return env


def initial_state(r: Routine, inputs: Inputs) -> ProgState:
    return make_state(r, initial_env(r, inputs), ENTRY, r.line)


def satisfies_require(r: Routine, inputs: Inputs) -> bool:
    """Whether the precondition holds; a runtime fault in it counts as false."""
    if r.require is None:
        return True
    try:
        return bool(_evaluate(param_env(r, inputs), r.require))
    except RuntimeFault:
        return False


def _param_values(var_type: VarType, d: Domain) -> list[Value]:
    ints = range(d.int_min, d.int_max + 1)
    if var_type is VarType.INTEGER:
        return list(ints)
    if var_type is VarType.BOOLEAN:
        return [False, True]
    return [arr for n in range(d.array_len_max + 1) for arr in itertools.product(ints, repeat=n)]


def enumerate_inputs(r: Routine, d: Domain) -> Iterator[dict[str, Value]]:
    """Every input in ``d``: parameters in declaration order, the last one varying fastest."""
    names = [p.name for p in r.params]
    pools = [_param_values(p.type, d) for p in r.params]
    for combo in itertools.product(*pools):
        yield dict(zip(names, combo))


def domain_size(r: Routine, d: Domain) -> int:
    size = 1
    for p in r.params:
        size *= len(_param_values(p.type, d))
    return size


def valid_inputs(r: Routine, d: Domain) -> list[dict[str, Value]]:
    return [inp for inp in enumerate_inputs(r, d) if satisfies_require(r, inp)]


# --- Runs ---


@dataclass
class RunOutcome:
    status: RunStatus
    trace: list[ProgState]
    iterations: dict[str, int] = field(default_factory=dict)
    branch_log: list[tuple[str, int, int]] = field(default_factory=list)  # (loop label, iteration, leaf)
    exited: set[str] = field(default_factory=set)  # loops left through their exit condition
    tag: str | None = None
    origin: Origin | None = None
    target_id: int | None = None
    node_id: str | None = None
    line: int | None = None
    error_kind: RuntimeErrorKind | None = None

    @property
    def ok(self) -> bool:
        return self.status is RunStatus.OK

    @property
    def final(self) -> ProgState:
        return self.trace[-1]

    def describe(self) -> str:
        if self.ok:
            return "ok"
        detail = self.tag or (self.error_kind.value if self.error_kind else "")
        return f"{self.status.value}({detail}) at line {self.line}"


class _Stop(Exception):
    def __init__(self, status: RunStatus, node: Node, **details):
        super().__init__(status.value)
        self.status = status
        self.node = node
        self.details = details


_CHECK_TAGS = {Origin.USER: "check", Origin.BOUND: "bound"}


class Machine:
    """Big-step executor for one run; records the trace as it goes."""

    def __init__(self, r: Routine, fuel: int = 64, record_trace: bool = True):
        self.routine = r
        self.fuel = fuel
        self.record_trace = record_trace
        self.leaves = {
            node.node_id: leaf_numbers(node.body) for node in iter_nodes(r.body) if isinstance(node, Loop)
        }
        self.env: dict[str, Value] = {}
        self.trace: list[ProgState] = []
        self.iterations: dict[str, int] = {}
        self.branch_log: list[tuple[str, int, int]] = []
        self.exited: set[str] = set()
        self._active: list[tuple[Loop, int]] = []

    def _record(self, location: str, line: int) -> None:
        state = make_state(self.routine, self.env, location, line)
        if self.record_trace or len(self.trace) < 2:
            self.trace.append(state)
        else:
            self.trace[-1] = state

    def run(self, inputs: Inputs) -> RunOutcome:
        r = self.routine
        self.env = param_env(r, inputs)
        for local in r.locals:
            self.env[local.name] = _DEFAULTS[local.type]
        try:
            try:
                for local in r.locals:
                    if local.init is not None:
                        self.env[local.name] = _evaluate(self.env, local.init)
            finally:
                self._record(ENTRY, r.line)
            self._block(r.body)
            for clause in r.ensure:
                if not _evaluate(self.env, clause.expr):
                    raise _Stop(RunStatus.CONTRACT_VIOLATION, clause, tag=clause.tag)
        except _Stop as stop:
            return self._outcome(stop.status, stop.node, **stop.details)
        except RuntimeFault as fault:
            return self._outcome(
                RunStatus.RUNTIME_ERROR, None, tag=fault.kind.value, error_kind=fault.kind,
                node_id=fault.node_id, line=fault.line,
            )
        return self._outcome(RunStatus.OK, None)

    def _outcome(self, status: RunStatus, node: Node | None, **details) -> RunOutcome:
        if node is not None:
            details.setdefault("node_id", node.node_id)
            details.setdefault("line", node.line)
        return RunOutcome(status, self.trace, self.iterations, self.branch_log, self.exited, **details)

    def _block(self, block: Block) -> None:
        for instr in block.instrs:
            self._instr(instr)

    def _instr(self, node: Node) -> None:
        if isinstance(node, (Assign, AssignIndex)):
            assign(self.env, node)
            self._record(node.node_id, node.line)
        elif isinstance(node, If):
            taken = bool(_evaluate(self.env, node.cond))
            self._log_branch(node, THEN if taken else ELSE)
            if taken:
                self._block(node.then)
            elif node.orelse is not None:
                self._block(node.orelse)
        elif isinstance(node, Loop):
            self._loop(node)
        elif isinstance(node, Check):
            if not _evaluate(self.env, node.cond):
                tag = f"target{node.target_id}" if node.origin is Origin.SEEDED else _CHECK_TAGS[node.origin]
                raise _Stop(RunStatus.CHECK_VIOLATION, node, tag=tag, origin=node.origin, target_id=node.target_id)
        elif isinstance(node, Block):
            self._block(node)
        else:
            raise TypeError(f"not an instruction: {type(node).__name__}")

    def _log_branch(self, node: If, side: str) -> None:
        if not self._active:
            return
        loop, iteration = self._active[-1]
        leaf = self.leaves[loop.node_id].get((node.node_id, side))
        if leaf is not None:
            self.branch_log.append((loop.label, iteration, leaf))

    def _loop(self, node: Loop) -> None:
        if node.init is not None:
            self._block(node.init)
        count = 0
        self.iterations[node.label] = 0
        while not _evaluate(self.env, node.until):
            if count >= self.fuel:
                logger.debug("fuel exhausted in %s after %d iterations", node.label, count)
                raise _Stop(RunStatus.FUEL_EXHAUSTED, node, tag="nontermination")
            count += 1
            self.iterations[node.label] = count
            self._active.append((node, count))
            try:
                self._block(node.body)
            finally:
                self._active.pop()
        self.exited.add(node.label)


def run(r: Routine, inputs: Inputs, fuel: int = 64, record_trace: bool = True) -> RunOutcome:
    """Execute ``r`` on ``inputs``; failures are reported as statuses, never raised.

    The caller is responsible for checking the precondition. With
    ``record_trace=False`` only the entry and final states are kept.
    """
    return Machine(r, fuel, record_trace).run(inputs)
