"""AST of the mini-language and generic tree utilities.

Nodes are frozen dataclasses. The source location and node id of a node do
not take part in equality, so two parses of equivalent text compare equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Iterator, Optional, Union

from .types import Origin, VarType


class SourceError(ValueError):
    """A syntax or type error at a source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


@dataclass(frozen=True)
class SourceLoc:
    line: int = 0
    column: int = 0


_NOWHERE = SourceLoc()


@dataclass(frozen=True)
class Node:
    loc: SourceLoc = field(default=_NOWHERE, compare=False, repr=False, kw_only=True)
    node_id: str = field(default="", compare=False, repr=False, kw_only=True)

    @property
    def line(self) -> int:
        return self.loc.line


# --- Expressions ---


@dataclass(frozen=True)
class IntLit(Node):
    value: int


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Index(Node):
    array: str
    index: Expr


@dataclass(frozen=True)
class Count(Node):
    array: str


@dataclass(frozen=True)
class Unary(Node):
    op: str  # "not" or "-"
    operand: Expr


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Across(Node):
    """Bounded quantifier over the inclusive range low..high."""
    var: str
    low: Expr
    high: Expr
    quantifier: str  # all, some, sum, product
    body: Expr


Expr = Union[IntLit, BoolLit, Var, Index, Count, Unary, Binary, Across]

ARITH_OPS = ("+", "-", "*", "div", "mod")
ORDER_OPS = ("<", "<=", ">", ">=")
EQUALITY_OPS = ("=", "/=")
RELATIONAL_OPS = ORDER_OPS + EQUALITY_OPS
LOGIC_OPS = ("and", "or")
QUANTIFIERS = ("all", "some", "sum", "product")


# --- Instructions ---


@dataclass(frozen=True)
class Block(Node):
    instrs: tuple[Instr, ...] = ()


@dataclass(frozen=True)
class Assign(Node):
    target: str
    value: Expr


@dataclass(frozen=True)
class AssignIndex(Node):
    array: str
    index: Expr
    value: Expr


@dataclass(frozen=True)
class If(Node):
    cond: Expr
    then: Block
    orelse: Optional[Block] = None


@dataclass(frozen=True)
class Loop(Node):
    init: Optional[Block]
    until: Expr
    body: Block
    label: str = field(default="", compare=False)


@dataclass(frozen=True)
class Check(Node):
    cond: Expr
    origin: Origin = Origin.USER
    target_id: Optional[int] = None


Instr = Union[Assign, AssignIndex, If, Loop, Check, Block]


# --- Declarations ---


@dataclass(frozen=True)
class Param(Node):
    name: str
    type: VarType


@dataclass(frozen=True)
class Local(Node):
    name: str
    type: VarType
    init: Optional[Expr] = None


@dataclass(frozen=True)
class Ensure(Node):
    tag: str
    expr: Expr


@dataclass(frozen=True)
class Routine(Node):
    name: str
    params: tuple[Param, ...]
    require: Optional[Expr]
    locals: tuple[Local, ...]
    body: Block
    ensure: tuple[Ensure, ...] = ()

    def declarations(self) -> list[tuple[str, VarType]]:
        return [(p.name, p.type) for p in self.params] + [(v.name, v.type) for v in self.locals]

    def names(self) -> set[str]:
        return {name for name, _ in self.declarations()}


# --- Tree utilities ---

_META = ("loc", "node_id")


def children(node: Node) -> Iterator[Node]:
    for f in fields(node):
        if f.name in _META:
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, tuple):
            yield from (v for v in value if isinstance(v, Node))


def iter_nodes(node: Node) -> Iterator[Node]:
    """Pre-order traversal."""
    yield node
    for child in children(node):
        yield from iter_nodes(child)


def map_children(node: Node, fn: Callable[[Node], Optional[Node]]) -> Node:
    """Rebuild ``node`` with ``fn`` applied to each direct child.

    Inside tuples a child mapped to None is dropped; a ``Block`` mapped into a
    tuple of instructions is spliced in place.
    """
    changes = {}
    for f in fields(node):
        if f.name in _META:
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            new = fn(value)
            if new is not value:
                changes[f.name] = new
        elif isinstance(value, tuple) and any(isinstance(v, Node) for v in value):
            items: list = []
            for v in value:
                new = fn(v) if isinstance(v, Node) else v
                if new is None:
                    continue
                if isinstance(node, Block) and isinstance(new, Block) and not isinstance(v, Block):
                    items.extend(new.instrs)
                else:
                    items.append(new)
            if len(items) != len(value) or any(a is not b for a, b in zip(items, value)):
                changes[f.name] = tuple(items)
    return replace(node, **changes) if changes else node


def find_node(root: Node, node_id: str) -> Node:
    for node in iter_nodes(root):
        if node.node_id == node_id:
            return node
    raise KeyError(node_id)


def replace_node(root: Node, node_id: str, new: Optional[Node]) -> Node:
    """Replace the node with ``node_id`` by ``new`` (None drops it from its block)."""

    def visit(node: Node) -> Optional[Node]:
        if node.node_id == node_id:
            return new
        return map_children(node, visit)

    result = visit(root)
    if result is None:
        raise ValueError("Cannot drop the root node")
    return result


def renumber(routine: Routine) -> Routine:
    """Assign node ids n1, n2, ... in pre-order and loop labels loop1, loop2, ... in source order."""
    ids = itertools.count(1)
    labels = itertools.count(1)

    def visit(node: Node) -> Node:
        node_id = f"n{next(ids)}"
        extra = {"label": f"loop{next(labels)}"} if isinstance(node, Loop) else {}
        node = map_children(node, visit)
        return replace(node, node_id=node_id, **extra)

    return visit(routine)  # type: ignore[return-value]


def loops_of(node: Node) -> list[Loop]:
    return [n for n in iter_nodes(node) if isinstance(n, Loop)]


def negate(expr: Expr, node_id: str | None = None) -> Expr:
    if node_id is None:
        node_id = f"{expr.node_id}.not" if expr.node_id else ""
    return Unary("not", expr, loc=expr.loc, node_id=node_id)
