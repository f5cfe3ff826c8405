"""Canonical pretty printer: ``parse(pretty(r))`` is structurally equal to ``r``."""

from __future__ import annotations

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
)
from .types import Origin

INDENT = "  "

_PRECEDENCE = {
    "or": 1,
    "and": 2,
    "not": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4, "=": 4, "/=": 4,
    "+": 5, "-": 5,
    "*": 6, "div": 6, "mod": 6,
}
_UNARY_MINUS = 7
_ATOM = 8


def _precedence(expr: Expr) -> int:
    if isinstance(expr, Binary):
        return _PRECEDENCE[expr.op]
    if isinstance(expr, Unary):
        return _PRECEDENCE["not"] if expr.op == "not" else _UNARY_MINUS
    if isinstance(expr, IntLit) and expr.value < 0:
        return _UNARY_MINUS
    return _ATOM


def _wrap(expr: Expr, minimum: int) -> str:
    text = pretty_expr(expr)
    return f"({text})" if _precedence(expr) < minimum else text


def _operand(expr: Expr, minimum: int) -> str:
    if _precedence(expr) == _UNARY_MINUS:
        return f"({pretty_expr(expr)})"
    return _wrap(expr, minimum)


def pretty_expr(expr: Expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BoolLit):
        return "True" if expr.value else "False"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Index):
        return f"{expr.array}[{pretty_expr(expr.index)}]"
    if isinstance(expr, Count):
        return f"{expr.array}.count"
    if isinstance(expr, Unary):
        if expr.op == "not":
            return f"not {_wrap(expr.operand, _PRECEDENCE['not'])}"
        # "--" would start a comment, so a negative operand always gets parentheses
        return f"-{_wrap(expr.operand, _ATOM)}"
    if isinstance(expr, Binary):
        prec = _PRECEDENCE[expr.op]
        # comparisons do not chain, so both sides of one must bind tighter
        left_min = prec + 1 if prec == _PRECEDENCE["<"] else prec
        left = _operand(expr.left, left_min)
        right = _operand(expr.right, prec + 1)
        return f"{left} {expr.op} {right}"
    if isinstance(expr, Across):
        return (
            f"across {_wrap(expr.low, _PRECEDENCE['+'])} .. {_wrap(expr.high, _PRECEDENCE['+'])} "
            f"as {expr.var} {expr.quantifier} {pretty_expr(expr.body)} end"
        )
    raise TypeError(f"not an expression: {type(expr).__name__}")


def _marker(check: Check) -> str:
    if check.origin is Origin.SEEDED:
        return f" -- [target {check.target_id}]"
    if check.origin is Origin.BOUND:
        return " -- [bound]"
    return ""


def _instrs(block: Block | None, depth: int) -> list[str]:
    lines: list[str] = []
    if block is None:
        return lines
    for instr in block.instrs:
        lines.extend(pretty_instr(instr, depth))
    return lines


def pretty_instr(node: Node, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    if isinstance(node, Assign):
        return [f"{pad}{node.target} := {pretty_expr(node.value)}"]
    if isinstance(node, AssignIndex):
        return [f"{pad}{node.array}[{pretty_expr(node.index)}] := {pretty_expr(node.value)}"]
    if isinstance(node, Check):
        return [f"{pad}check {pretty_expr(node.cond)} end{_marker(node)}"]
    if isinstance(node, Block):
        return _instrs(node, depth)
    if isinstance(node, If):
        lines = [f"{pad}if {pretty_expr(node.cond)} then"]
        lines += _instrs(node.then, depth + 1)
        orelse = node.orelse
        while orelse is not None:
            if len(orelse.instrs) == 1 and isinstance(orelse.instrs[0], If):
                nested = orelse.instrs[0]
                lines.append(f"{pad}elseif {pretty_expr(nested.cond)} then")
                lines += _instrs(nested.then, depth + 1)
                orelse = nested.orelse
            else:
                lines.append(f"{pad}else")
                lines += _instrs(orelse, depth + 1)
                orelse = None
        lines.append(f"{pad}end")
        return lines
    if isinstance(node, Loop):
        lines = []
        if node.init is not None:
            lines.append(f"{pad}from")
            lines += _instrs(node.init, depth + 1)
        lines.append(f"{pad}until")
        lines.append(f"{pad}{INDENT}{pretty_expr(node.until)}")
        lines.append(f"{pad}loop")
        lines += _instrs(node.body, depth + 1)
        lines.append(f"{pad}end")
        return lines
    raise TypeError(f"not an instruction: {type(node).__name__}")


def pretty(r: Routine) -> str:
    params = ", ".join(f"{p.name}: {p.type.value}" for p in r.params)
    lines = [f"routine {r.name}({params})"]
    if r.require is not None:
        lines += ["require", f"{INDENT}{pretty_expr(r.require)}"]
    if r.locals:
        lines.append("local")
        for v in r.locals:
            init = f" := {pretty_expr(v.init)}" if v.init is not None else ""
            lines.append(f"{INDENT}{v.name}: {v.type.value}{init}")
    lines.append("do")
    lines += _instrs(r.body, 1)
    if r.ensure:
        lines.append("ensure")
        lines += [f"{INDENT}{clause.tag}: {pretty_expr(clause.expr)}" for clause in r.ensure]
    lines.append("end")
    return "\n".join(lines) + "\n"
