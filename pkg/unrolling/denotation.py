"""Bounded denotational semantics: a routine over a finite domain as a trace set.

Each instruction denotes a trace set over the program states reachable at
that point, built only from the trace-set algebra: assignments give two-state
traces, ``check c`` is ``c / skip``, conditionals are ``cond_set`` and loops
are the finite approximation ``L_(K+1)`` for a fuel bound ``K``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

from .interpreter import (
    Inputs,
    ProgState,
    RuntimeFault,
    assign,
    enumerate_inputs,
    eval_expr,
    initial_state,
    make_state,
    satisfies_require,
)
from .syntax import Assign, AssignIndex, Block, Check, Expr, If, Loop, Node, Routine
from .traces import (
    Predicate,
    Trace,
    TraceSet,
    concat_sets,
    cond_set,
    fail_set,
    loop_rec,
    loop_union,
    restrict,
    skip_set,
)
from .types import Domain

logger = logging.getLogger(__name__)

LoopView = Literal["union", "rec"]


class Unresolved(Exception):
    """A loop did not exit within the fuel bound."""


@dataclass(frozen=True)
class Denotation:
    traces: TraceSet
    unresolved: list[dict] = field(default_factory=list)
    faulted: list[dict] = field(default_factory=list)

    def trace_from(self, state: ProgState) -> Trace | None:
        """The maximal trace starting at ``state``, if any."""
        candidates = self.traces.starting_at(state).sorted()
        return candidates[-1] if candidates else None


class Denoter:
    def __init__(self, r: Routine, fuel: int = 8, loop_view: LoopView = "union"):
        if loop_view not in ("union", "rec"):
            raise ValueError(f"loop_view must be 'union' or 'rec', got '{loop_view}'")
        self.routine = r
        self.fuel = fuel
        self.loop_view = loop_view

    def _test(self, cond: Expr, states: frozenset) -> Predicate:
        return Predicate.where(states, lambda s: bool(eval_expr(s, cond)))

    def block(self, block: Block, starts: frozenset) -> TraceSet:
        result = skip_set(starts)
        for instr in block.instrs:
            result = concat_sets(result, self.instr(instr, result.last_states()))
        return result

    def instr(self, node: Node, starts: frozenset) -> TraceSet:
        if isinstance(node, (Assign, AssignIndex)):
            return self._assignment(node, starts)
        if isinstance(node, Check):
            return restrict(self._test(node.cond, starts), skip_set(starts))
        if isinstance(node, If):
            v = self._test(node.cond, starts)
            then = self.block(node.then, v.extension)
            if node.orelse is None:
                return cond_set(v, then)
            orelse = self.block(node.orelse, (~v).extension)
            return restrict(~v, orelse) | restrict(v, then)
        if isinstance(node, Loop):
            return self._loop(node, starts)
        if isinstance(node, Block):
            return self.block(node, starts)
        raise TypeError(f"not an instruction: {type(node).__name__}")

    def _assignment(self, node: Assign | AssignIndex, starts: frozenset) -> TraceSet:
        traces = []
        for s in starts:
            env = s.as_dict()
            assign(env, node)
            traces.append(Trace((s, make_state(self.routine, env, node.node_id, node.line))))
        return TraceSet(frozenset(traces))

    def loop_parts(self, node: Loop, heads: frozenset) -> tuple[Predicate, TraceSet]:
        """The exit test and body trace set over every head state reachable within fuel."""
        seen = set(heads)
        frontier = frozenset(heads)
        body = fail_set()
        for _ in range(self.fuel):
            continuing = (~self._test(node.until, frontier)).extension
            if not continuing:
                frontier = frozenset()
                break
            step = self.block(node.body, continuing)
            body = body | step
            frontier = step.last_states()
            seen |= frontier
        if frontier and (~self._test(node.until, frontier)).extension:
            raise Unresolved(node.label)
        return self._test(node.until, frozenset(seen)), body

    def _loop(self, node: Loop, starts: frozenset) -> TraceSet:
        before = self.block(node.init, starts) if node.init is not None else skip_set(starts)
        exit_test, body = self.loop_parts(node, before.last_states())
        build = loop_union if self.loop_view == "union" else loop_rec
        return concat_sets(before, build(exit_test, body, self.fuel + 1))


def denote_input(r: Routine, inputs: Inputs, fuel: int = 8, loop_view: LoopView = "union") -> TraceSet:
    """Trace set of ``r`` from the initial state of one input (raises on fault or divergence)."""
    start = initial_state(r, inputs)
    return Denoter(r, fuel, loop_view).block(r.body, frozenset({start}))


def denote(r: Routine, d: Domain, fuel: int = 8, loop_view: LoopView = "union") -> Denotation:
    """Traces of ``r`` over every input of ``d`` that satisfies the precondition."""
    traces = fail_set()
    unresolved: list[dict] = []
    faulted: list[dict] = []
    for inputs in enumerate_inputs(r, d):
        if not satisfies_require(r, inputs):
            continue
        try:
            traces = traces | denote_input(r, inputs, fuel, loop_view)
        except RuntimeFault:
            faulted.append(inputs)
        except Unresolved:
            unresolved.append(inputs)
    if unresolved:
        logger.warning("%s: %d input(s) unresolved within fuel %d", r.name, len(unresolved), fuel)
    return Denotation(traces, unresolved, faulted)
