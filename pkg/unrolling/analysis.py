"""Structural facts about a routine: loops, nesting and leaf branches."""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import Block, If, Loop, Node, Routine, children

THEN = "then"
ELSE = "else"

LeafKey = tuple[str, str]  # (node id of the if, side)


def _has_top_level_if(block: Block | None) -> bool:
    return block is not None and any(isinstance(i, If) for i in block.instrs)


def leaf_branches(block: Block) -> list[LeafKey]:
    """Leaf sides of the conditional structure of ``block``, in source order.

    A side whose block holds no top-level ``if`` is a leaf; a missing ``else``
    counts as an (empty) leaf. Nested loops are not entered.
    """
    leaves: list[LeafKey] = []
    for instr in block.instrs:
        if not isinstance(instr, If):
            continue
        for side, sub in ((THEN, instr.then), (ELSE, instr.orelse)):
            if _has_top_level_if(sub):
                leaves.extend(leaf_branches(sub))
            else:
                leaves.append((instr.node_id, side))
    return leaves


def leaf_numbers(block: Block) -> dict[LeafKey, int]:
    """Leaf key -> branch number 1..m."""
    return {key: k for k, key in enumerate(leaf_branches(block), start=1)}


def leaves_exclusive(block: Block) -> bool:
    """True when at most one leaf of ``block`` runs per pass.

    Holds when every block on the conditional structure has at most one
    top-level ``if``. Two ``if`` statements in sequence can both take a leaf
    in the same iteration.
    """
    ifs = [i for i in block.instrs if isinstance(i, If)]
    if len(ifs) > 1:
        return False
    return all(leaves_exclusive(sub) for i in ifs for sub in (i.then, i.orelse) if sub is not None)


@dataclass(frozen=True)
class LoopInfo:
    label: str
    node_id: str
    line: int
    m: int
    depth: int  # 1 for an outermost loop


@dataclass(frozen=True)
class StructureInfo:
    routine: str
    loop_count: int
    nesting_depth: int
    loops: list[LoopInfo] = field(default_factory=list)

    def loop(self, label: str) -> LoopInfo:
        for info in self.loops:
            if info.label == label:
                return info
        raise KeyError(label)


def analyze(r: Routine) -> StructureInfo:
    loops: list[LoopInfo] = []

    def visit(node: Node, depth: int) -> None:
        if isinstance(node, Loop):
            depth += 1
            loops.append(LoopInfo(node.label, node.node_id, node.line, len(leaf_branches(node.body)), depth))
        for child in children(node):
            visit(child, depth)

    visit(r.body, 0)
    nesting = max((info.depth for info in loops), default=0)
    return StructureInfo(r.name, len(loops), nesting, loops)
