"""Seeding contradictions: branch targets (SC) and per-level targets on the unrolled loop (SCU).

SC puts ``check False end`` at the start of the loop body, or at the start of
every leaf branch of the body. SCU unrolls the loop to depth n and, as the
last instruction of each level i, checks ``not e`` (plain body) or
``not (e and bn = j)`` for each branch j of that level, where ``bn`` records
the leaf taken in the current level: ``bn := m * (i - 1) + b`` at the end of
leaf b. A violation means the loop exits after exactly i iterations, with
leaf b taken in the last one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .analysis import ELSE, THEN, LeafKey, leaf_branches, leaves_exclusive
from .parser import check_types
from .pretty import pretty_expr
from .syntax import (
    Assign,
    Binary,
    Block,
    BoolLit,
    Check,
    Expr,
    If,
    IntLit,
    Local,
    Loop,
    Node,
    Routine,
    Var,
    iter_nodes,
    map_children,
    negate,
    replace_node,
)
from .types import InstrumentMode, Origin, Target, TargetKind, VarType
from .unroll import UnsupportedLoopError, copy_tree, select_loop, unroll_nest

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InstrumentedRoutine:
    routine: Routine
    targets: list[Target]
    m: int
    n: int
    mode: InstrumentMode
    loop_label: str
    original: Routine
    bn: str | None = None

    def target(self, target_id: int) -> Target:
        for t in self.targets:
            if t.target_id == target_id:
                return t
        raise KeyError(target_id)


def fresh_name(r: Routine, base: str = "bn") -> str:
    taken = r.names()
    if base not in taken:
        return base
    k = 1
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


def _seeded(cond: Expr, target_id: int, at: Node) -> Check:
    return Check(cond, Origin.SEEDED, target_id, loc=at.loc, node_id=f"target{target_id}")


def _prepend_to_leaves(body: Block, heads: dict[LeafKey, Check]) -> Block:
    def visit(node: Node) -> Node:
        new = map_children(node, visit)
        if not isinstance(node, If):
            return new
        then_head = heads.get((node.node_id, THEN))
        else_head = heads.get((node.node_id, ELSE))
        if then_head is not None:
            new = replace(new, then=replace(new.then, instrs=(then_head,) + new.then.instrs))
        if else_head is not None:
            orelse = new.orelse or Block((), loc=node.loc, node_id=f"{node.node_id}.else")
            new = replace(new, orelse=replace(orelse, instrs=(else_head,) + orelse.instrs))
        return new

    return visit(body)  # type: ignore[return-value]


def _leaves(r: Routine, loop: Loop) -> list[LeafKey]:
    if not leaves_exclusive(loop.body):
        raise UnsupportedLoopError(
            f"Loop '{loop.label}' in routine '{r.name}' has sequential conditionals; "
            "its leaf branches are not mutually exclusive"
        )
    return leaf_branches(loop.body)


def instrument_sc(r: Routine) -> InstrumentedRoutine:
    """One ``check False end`` per leaf branch of the loop body (one at its start for a plain body)."""
    loop = select_loop(r)
    leaves = _leaves(r, loop)
    if not leaves:
        check = _seeded(BoolLit(False, loc=loop.loc, node_id="target1.false"), 1, loop)
        body = replace(loop.body, instrs=(check,) + loop.body.instrs)
        targets = [Target(target_id=1, kind=TargetKind.SC_BRANCH, level=0, branch=0,
                          location=check.node_id, line=loop.line, seeded_expr="False")]
    else:
        ifs = {n.node_id: n for n in _ifs(loop.body)}
        heads: dict[LeafKey, Check] = {}
        targets = []
        for b, key in enumerate(leaves, start=1):
            at = ifs[key[0]]
            heads[key] = _seeded(BoolLit(False, loc=at.loc, node_id=f"target{b}.false"), b, at)
            targets.append(Target(target_id=b, kind=TargetKind.SC_BRANCH, level=0, branch=b,
                                  location=heads[key].node_id, line=at.line, seeded_expr="False"))
        body = _prepend_to_leaves(loop.body, heads)
    routine = replace_node(r, loop.node_id, replace(loop, body=body))
    logger.info("SC: %s has %d target(s)", r.name, len(targets))
    return InstrumentedRoutine(check_types(routine), targets, len(leaves), 1, InstrumentMode.SC,
                               loop.label, r)


def _ifs(block: Block) -> list[If]:
    return [n for n in iter_nodes(block) if isinstance(n, If)]


def instrument_scu(r: Routine, n: int) -> InstrumentedRoutine:
    """Unroll to depth ``n`` and seed the per-level (and per-branch) exit checks."""
    if n < 1:
        raise UnsupportedLoopError(f"SCU depth must be at least 1, got {n}")
    loop = select_loop(r)
    leaves = _leaves(r, loop)
    m = len(leaves)
    bn = fresh_name(r) if m else None
    targets: list[Target] = []

    def branch_number(level: int, b: int) -> int:
        return m * (level - 1) + b

    def leaf_tail(level: int) -> dict[LeafKey, tuple]:
        return {
            key: (Assign(bn, IntLit(branch_number(level, b), loc=loop.loc, node_id=f"{bn}@{level}.{b}.value"),
                         loc=loop.loc, node_id=f"{bn}@{level}.{b}"),)
            for b, key in enumerate(leaves, start=1)
        }

    def decorate(level: int, body: tuple, inner: tuple) -> tuple:
        checks = []
        if m == 0:
            exit_cond = copy_tree(loop.until, f"@{level}.t{level}")
            checks.append((level, 0, TargetKind.SCU_PLAIN_LEVEL, negate(exit_cond)))
        else:
            for b in range(1, m + 1):
                j = branch_number(level, b)
                exit_cond = copy_tree(loop.until, f"@{level}.t{j}")
                taken = Binary(
                    "=", Var(bn, loc=loop.loc, node_id=f"target{j}.bn"), IntLit(j, loc=loop.loc, node_id=f"target{j}.j"),
                    loc=loop.loc, node_id=f"target{j}.taken",
                )
                both = Binary("and", exit_cond, taken, loc=loop.loc, node_id=f"target{j}.and")
                checks.append((j, j, TargetKind.SCU_BRANCH_LEVEL, negate(both)))
        seeded = []
        for target_id, branch, kind, cond in checks:
            check = _seeded(cond, target_id, loop)
            seeded.append(check)
            targets.append(Target(target_id=target_id, kind=kind, level=level, branch=branch,
                                  location=check.node_id, line=loop.line, seeded_expr=pretty_expr(cond)))
        return body + inner + tuple(seeded)

    nest = unroll_nest(loop, n, guard=True, decorate=decorate, leaf_tail=leaf_tail if m else None)
    routine = replace_node(r, loop.node_id, nest)
    if bn is not None:
        routine = replace(routine, locals=routine.locals + (
            Local(bn, VarType.INTEGER, IntLit(0, loc=loop.loc, node_id=f"{bn}@decl.init"),
                  loc=loop.loc, node_id=f"{bn}@decl"),))
    targets.sort(key=lambda t: t.target_id)
    logger.info("SCU: %s depth %d, m=%d, %d target(s)", r.name, n, m, len(targets))
    return InstrumentedRoutine(check_types(routine), targets, m, n, InstrumentMode.SCU, loop.label, r, bn)


def instrument(r: Routine, n: int, mode: InstrumentMode = InstrumentMode.SCU) -> InstrumentedRoutine:
    return instrument_sc(r) if mode is InstrumentMode.SC else instrument_scu(r, n)
