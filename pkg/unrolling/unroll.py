"""Syntactic loop unrolling and its validation against the interpreter.

At depth n the loop ``from I until e loop B end`` becomes

    I
    if not e then
      B
      if not e then
        B
        ...
          if not e then check False end -- [bound] end
      end
    end

with exactly n copies of B. The innermost guard rejects every execution that
needs more than n iterations; at depth 0 the whole loop is replaced by the
guard ``check False end``. The truncated form drops the guard.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional

from .analysis import ELSE, THEN, LeafKey
from .interpreter import RunOutcome, run, valid_inputs
from .syntax import (
    Block,
    BoolLit,
    Check,
    If,
    Loop,
    Node,
    Routine,
    iter_nodes,
    loops_of,
    map_children,
    negate,
    replace_node,
)
from .types import Domain, Origin, RunStatus, UnrollForm

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 32


class UnsupportedLoopError(ValueError):
    """The routine's loop structure does not allow the requested transformation."""


@dataclass(frozen=True)
class UnrollConfig:
    depth: int
    loop_label: str | None = None
    form: UnrollForm = UnrollForm.STRICT
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise UnsupportedLoopError(f"Unrolling depth must be non-negative, got {self.depth}")
        if self.depth > self.max_depth:
            raise UnsupportedLoopError(f"Unrolling depth {self.depth} exceeds the maximum of {self.max_depth}")


def select_loop(r: Routine, label: str | None = None) -> Loop:
    """The loop to transform: the one named ``label``, or the routine's only loop."""
    loops = loops_of(r.body)
    if not loops:
        raise UnsupportedLoopError(f"Routine '{r.name}' has no loop")
    if label is not None:
        matches = [loop for loop in loops if loop.label == label]
        if not matches:
            raise UnsupportedLoopError(f"Unknown loop label '{label}' in routine '{r.name}'")
        loop = matches[0]
    elif len(loops) > 1:
        raise UnsupportedLoopError(
            f"Routine '{r.name}' has {len(loops)} loops; exactly one loop is supported"
        )
    else:
        loop = loops[0]
    if loops_of(loop.body) or (loop.init is not None and loops_of(loop.init)):
        raise UnsupportedLoopError(f"Loop '{loop.label}' in routine '{r.name}' contains a nested loop")
    return loop


def copy_tree(node: Node, suffix: str, leaf_tail: Mapping[LeafKey, tuple] | None = None) -> Node:
    """Copy ``node`` with every node id suffixed; ``leaf_tail`` appends instructions to if sides."""

    def visit(n: Node) -> Node:
        new = map_children(n, visit)
        if isinstance(n, If) and leaf_tail:
            then_tail = leaf_tail.get((n.node_id, THEN), ())
            else_tail = leaf_tail.get((n.node_id, ELSE), ())
            if then_tail:
                new = replace(new, then=replace(new.then, instrs=new.then.instrs + then_tail))
            if else_tail:
                orelse = new.orelse or Block((), loc=n.loc, node_id=f"{n.node_id}{suffix}.else")
                new = replace(new, orelse=replace(orelse, instrs=orelse.instrs + else_tail))
        return replace(new, node_id=f"{n.node_id}{suffix}")

    return visit(node)


# (level, copy of the body, the nested levels) -> instructions of the level
Decorate = Callable[[int, tuple, tuple], tuple]


def _guard(loop: Loop) -> Check:
    return Check(BoolLit(False, loc=loop.loc, node_id=f"{loop.node_id}@bound.false"), Origin.BOUND,
                 loc=loop.loc, node_id=f"{loop.node_id}@bound")


def unroll_nest(
    loop: Loop,
    depth: int,
    guard: bool = True,
    decorate: Optional[Decorate] = None,
    leaf_tail: Callable[[int], Mapping[LeafKey, tuple]] | None = None,
) -> Block:
    """The instructions replacing ``loop``: its from-clause followed by the nest."""

    def level(i: int) -> tuple:
        if i > depth:
            if not guard:
                return ()
            if depth == 0:
                return (_guard(loop),)
            cond = negate(copy_tree(loop.until, "@bound"))
            guarded = Block((_guard(loop),), loc=loop.loc, node_id=f"{loop.node_id}@guard.then")
            return (If(cond, guarded, None,
                       loc=loop.loc, node_id=f"{loop.node_id}@guard"),)
        body = copy_tree(loop.body, f"@{i}", leaf_tail(i) if leaf_tail else None)
        inner = level(i + 1)
        instrs = decorate(i, body.instrs, inner) if decorate else body.instrs + inner
        cond = negate(copy_tree(loop.until, f"@{i}"))
        then = Block(instrs, loc=loop.loc, node_id=f"{loop.node_id}@{i}.then")
        return (If(cond, then, None, loc=loop.loc, node_id=f"{loop.node_id}@{i}"),)

    init = loop.init.instrs if loop.init is not None else ()
    return Block(init + level(1), loc=loop.loc, node_id=f"{loop.node_id}@unrolled")


def unroll_routine(r: Routine, cfg: UnrollConfig) -> Routine:
    loop = select_loop(r, cfg.loop_label)
    nest = unroll_nest(loop, cfg.depth, guard=cfg.form is UnrollForm.STRICT)
    logger.debug("unrolled %s.%s to depth %d (%s)", r.name, loop.label, cfg.depth, cfg.form.value)
    return replace_node(r, loop.node_id, nest)  # type: ignore[return-value]


def count_copies(unrolled: Routine, loop: Loop) -> int:
    """Number of unrolled levels of ``loop``, each holding one copy of its body."""
    prefix = f"{loop.node_id}@"
    return sum(
        1 for n in iter_nodes(unrolled)
        if isinstance(n, If) and n.node_id.startswith(prefix) and n.node_id[len(prefix):].isdigit()
    )


# --- Validation ---


@dataclass
class Mismatch:
    inputs: dict
    reason: str


@dataclass
class UnrollReport:
    routine: str
    depth: int
    form: UnrollForm
    checked: int = 0
    accepted: int = 0  # unrolled run finished normally
    rejected: int = 0  # needed more iterations than the depth allows
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _signature(outcome: RunOutcome) -> tuple:
    return (outcome.status, outcome.tag, outcome.line)


def semantic_check(r: Routine, cfg: UnrollConfig, d: Domain, fuel: int = 64) -> UnrollReport:
    """Compare the unrolled routine with the original on every valid input of ``d``.

    An input that fails before reaching the loop must fail the same way. An
    input whose loop needs more than ``depth`` iterations (or diverges) must
    stop at the guard. Every other input must end with the same status and
    the same final valuation.
    """
    loop = select_loop(r, cfg.loop_label)
    unrolled = unroll_routine(r, cfg)
    fuel = max(fuel, cfg.depth + 1)
    report = UnrollReport(r.name, cfg.depth, cfg.form)
    for inputs in valid_inputs(r, d):
        report.checked += 1
        original = run(r, inputs, fuel)
        result = run(unrolled, inputs, fuel)
        iterations = original.iterations.get(loop.label)
        if iterations is None:
            if _signature(original) != _signature(result):
                report.mismatches.append(Mismatch(
                    inputs, f"before the loop: {original.describe()} vs {result.describe()}"))
            continue
        needs_more = (
            original.status is RunStatus.FUEL_EXHAUSTED or iterations > cfg.depth or cfg.depth == 0
        )
        if needs_more:
            report.rejected += 1
            stopped = result.status is RunStatus.CHECK_VIOLATION and result.origin is Origin.BOUND
            if cfg.form is UnrollForm.STRICT and not stopped:
                report.mismatches.append(Mismatch(
                    inputs, f"needs {iterations} iterations but the unrolled run gave {result.describe()}"))
            continue
        if _signature(original) != _signature(result):
            report.mismatches.append(Mismatch(
                inputs, f"after {iterations} iterations: {original.describe()} vs {result.describe()}"))
        elif original.final.values() != result.final.values():
            report.mismatches.append(Mismatch(inputs, "final valuations differ"))
        elif result.ok:
            report.accepted += 1
    if report.mismatches:
        logger.warning("%s depth %d: %d mismatch(es)", r.name, cfg.depth, len(report.mismatches))
    return report
