"""Lexer, recursive-descent parser and type checker for ``.mil`` routines."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .syntax import (
    ARITH_OPS,
    EQUALITY_OPS,
    LOGIC_OPS,
    ORDER_OPS,
    QUANTIFIERS,
    RELATIONAL_OPS,
    Across,
    Assign,
    AssignIndex,
    Binary,
    Block,
    BoolLit,
    Check,
    Count,
    Ensure,
    Expr,
    If,
    Index,
    IntLit,
    Local,
    Loop,
    Node,
    Param,
    Routine,
    SourceError,
    SourceLoc,
    Unary,
    Var,
    renumber,
)
from .types import Origin, VarType

KEYWORDS = frozenset({
    "routine", "require", "local", "do", "ensure", "end",
    "if", "then", "else", "elseif", "from", "until", "loop", "check",
    "and", "or", "not", "div", "mod", "across", "as",
    *QUANTIFIERS,
})

TYPE_NAMES = {t.value: t for t in VarType}

_MARKER = re.compile(r"^\[\s*(?:target\s+(\d+)|(bound))\s*\]$")

# Tokens that close a block.
_BLOCK_END = frozenset({"end", "else", "elseif", "until", "loop", "ensure"})


@dataclass
class Token:
    kind: str  # name, int, kw, op, eof
    text: str
    line: int
    column: int
    marker: tuple[Origin, int | None] | None = None  # from a trailing "-- [target k]" comment

    @property
    def loc(self) -> SourceLoc:
        return SourceLoc(self.line, self.column)


# --- Scanner ---


class Scanner:
    _TWO_CHAR = (":=", "<=", ">=", "/=", "..")
    _ONE_CHAR = "+-*<>=()[],;:."

    def __init__(self, src: str):
        self._src = src
        self._pos = 0
        self._line = 1
        self._col = 1

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            token = self._next(out)
            out.append(token)
            if token.kind == "eof":
                return out

    def _peek(self, offset: int = 0) -> str:
        pos = self._pos + offset
        return self._src[pos] if pos < len(self._src) else ""

    def _advance(self, n: int = 1) -> str:
        text = self._src[self._pos:self._pos + n]
        for ch in text:
            if ch == "\n":
                self._line += 1
                self._col = 1
            else:
                self._col += 1
        self._pos += n
        return text

    def _next(self, previous: list[Token]) -> Token:
        while True:
            while self._peek().isspace():
                self._advance()
            if self._peek() == "-" and self._peek(1) == "-":
                self._comment(previous)
                continue
            break

        line, col = self._line, self._col
        ch = self._peek()
        if ch == "":
            return Token("eof", "", line, col)
        if ch.isalpha() or ch == "_":
            start = self._pos
            while self._peek().isalnum() or self._peek() == "_":
                self._advance()
            word = self._src[start:self._pos]
            if word.lower() in ("true", "false"):
                return Token("bool", word.lower(), line, col)
            if word in KEYWORDS:
                return Token("kw", word, line, col)
            return Token("name", word, line, col)
        if ch.isdigit():
            start = self._pos
            while self._peek().isdigit():
                self._advance()
            return Token("int", self._src[start:self._pos], line, col)
        two = ch + self._peek(1)
        if two in self._TWO_CHAR:
            return Token("op", self._advance(2), line, col)
        if ch in self._ONE_CHAR:
            return Token("op", self._advance(), line, col)
        raise SourceError(f"unexpected character '{ch}'", line, col)

    def _comment(self, previous: list[Token]) -> None:
        self._advance(2)
        start = self._pos
        while self._peek() not in ("\n", ""):
            self._advance()
        text = self._src[start:self._pos].strip()
        match = _MARKER.match(text)
        if match and previous and previous[-1].text == "end":
            if match.group(2):
                previous[-1].marker = (Origin.BOUND, None)
            else:
                previous[-1].marker = (Origin.SEEDED, int(match.group(1)))


# --- Parser ---


class Parser:
    def __init__(self, src: str):
        self._tokens = Scanner(src).tokens()
        self._pos = 0

    @property
    def _current(self) -> Token:
        return self._tokens[self._pos]

    def _peek_token(self, offset: int = 1) -> Token:
        return self._tokens[min(self._pos + offset, len(self._tokens) - 1)]

    def _at(self, *texts: str) -> bool:
        token = self._current
        return token.kind in ("kw", "op") and token.text in texts

    def _advance(self) -> Token:
        token = self._current
        if token.kind != "eof":
            self._pos += 1
        return token

    def _error(self, message: str, token: Token | None = None) -> SourceError:
        token = token or self._current
        return SourceError(message, token.line, token.column)

    def _consume(self, text: str) -> Token:
        if not self._at(text):
            found = self._current.text or "end of input"
            raise self._error(f"syntax error: expected '{text}', found '{found}'")
        return self._advance()

    def _name(self) -> Token:
        if self._current.kind != "name":
            found = self._current.text or "end of input"
            raise self._error(f"syntax error: expected identifier, found '{found}'")
        return self._advance()

    def _skip_separators(self) -> None:
        while self._at(";"):
            self._advance()

    # Routine

    def parse(self) -> Routine:
        if self._current.kind == "eof":
            raise self._error("syntax error: empty input")
        start = self._consume("routine")
        name = self._name().text
        self._consume("(")
        params = []
        if not self._at(")"):
            params.append(self._param())
            while self._at(",", ";"):
                self._advance()
                params.append(self._param())
        self._consume(")")

        require = None
        if self._at("require"):
            self._advance()
            require = self._expression()

        locals_ = []
        if self._at("local"):
            self._advance()
            while self._current.kind == "name":
                locals_.append(self._local())
                self._skip_separators()

        self._consume("do")
        body = self._block()

        ensure = []
        if self._at("ensure"):
            self._advance()
            while self._current.kind == "name":
                tag = self._name()
                self._consume(":")
                ensure.append(Ensure(tag.text, self._expression(), loc=tag.loc))
                self._skip_separators()

        self._consume("end")
        if self._current.kind != "eof":
            raise self._error(f"syntax error: unexpected '{self._current.text}' after routine end")
        return Routine(name, tuple(params), require, tuple(locals_), body, tuple(ensure), loc=start.loc)

    def _type(self) -> VarType:
        token = self._advance()
        var_type = TYPE_NAMES.get(token.text.upper())
        if var_type is None:
            raise self._error(f"syntax error: unknown type '{token.text}'", token)
        return var_type

    def _param(self) -> Param:
        name = self._name()
        self._consume(":")
        return Param(name.text, self._type(), loc=name.loc)

    def _local(self) -> Local:
        name = self._name()
        self._consume(":")
        var_type = self._type()
        init = None
        if self._at(":="):
            self._advance()
            init = self._expression()
        return Local(name.text, var_type, init, loc=name.loc)

    # Instructions

    def _block(self) -> Block:
        loc = self._current.loc
        instrs = []
        self._skip_separators()
        while not self._at(*_BLOCK_END) and self._current.kind != "eof":
            instrs.append(self._instruction())
            self._skip_separators()
        return Block(tuple(instrs), loc=loc)

    def _instruction(self) -> Node:
        token = self._current
        if token.kind == "name":
            if self._peek_token().text == "[":
                return self._assign_index()
            return self._assign()
        if self._at("if"):
            self._advance()
            node = self._if_tail(token)
            self._consume("end")
            return node
        if self._at("from", "until"):
            return self._loop()
        if self._at("check"):
            return self._check()
        found = token.text or "end of input"
        raise self._error(f"syntax error: unexpected '{found}'")

    def _assign(self) -> Assign:
        name = self._name()
        self._consume(":=")
        return Assign(name.text, self._expression(), loc=name.loc)

    def _assign_index(self) -> AssignIndex:
        name = self._name()
        self._consume("[")
        index = self._expression()
        self._consume("]")
        self._consume(":=")
        return AssignIndex(name.text, index, self._expression(), loc=name.loc)

    def _if_tail(self, start: Token) -> If:
        cond = self._expression()
        self._consume("then")
        then = self._block()
        orelse = None
        if self._at("elseif"):
            nested_start = self._advance()
            nested = self._if_tail(nested_start)
            orelse = Block((nested,), loc=nested_start.loc)
        elif self._at("else"):
            self._advance()
            orelse = self._block()
        return If(cond, then, orelse, loc=start.loc)

    def _loop(self) -> Loop:
        start = self._current
        init = None
        if self._at("from"):
            self._advance()
            init = self._block()
        self._consume("until")
        until = self._expression()
        self._consume("loop")
        body = self._block()
        self._consume("end")
        return Loop(init, until, body, loc=start.loc)

    def _check(self) -> Check:
        start = self._advance()
        cond = self._expression()
        end = self._consume("end")
        origin, target_id = end.marker or (Origin.USER, None)
        return Check(cond, origin, target_id, loc=start.loc)

    # Expressions, lowest precedence first

    def _expression(self) -> Expr:
        return self._binary_left(("or",), self._conjunction)

    def _conjunction(self) -> Expr:
        return self._binary_left(("and",), self._negation)

    def _binary_left(self, ops, sub_elem) -> Expr:
        left = sub_elem()
        while self._at(*ops):
            op = self._advance()
            left = Binary(op.text, left, sub_elem(), loc=op.loc)
        return left

    def _negation(self) -> Expr:
        if self._at("not"):
            op = self._advance()
            return Unary("not", self._negation(), loc=op.loc)
        return self._relation()

    def _relation(self) -> Expr:
        left = self._additive()
        if self._at(*RELATIONAL_OPS):
            op = self._advance()
            left = Binary(op.text, left, self._additive(), loc=op.loc)
            if self._at(*RELATIONAL_OPS):
                raise self._error("syntax error: comparison operators do not chain")
        return left

    def _additive(self) -> Expr:
        return self._binary_left(("+", "-"), self._multiplicative)

    def _multiplicative(self) -> Expr:
        return self._binary_left(("*", "div", "mod"), self._unary)

    def _unary(self) -> Expr:
        if self._at("-"):
            op = self._advance()
            operand = self._unary()
            if isinstance(operand, IntLit):
                return IntLit(-operand.value, loc=op.loc)
            return Unary("-", operand, loc=op.loc)
        return self._primary()

    def _primary(self) -> Expr:
        token = self._current
        if token.kind == "int":
            self._advance()
            return IntLit(int(token.text), loc=token.loc)
        if token.kind == "bool":
            self._advance()
            return BoolLit(token.text == "true", loc=token.loc)
        if token.kind == "name":
            self._advance()
            if self._at("["):
                self._advance()
                index = self._expression()
                self._consume("]")
                return Index(token.text, index, loc=token.loc)
            if self._at("."):
                self._advance()
                attr = self._name()
                if attr.text != "count":
                    raise self._error(f"syntax error: unknown attribute '{attr.text}'", attr)
                return Count(token.text, loc=token.loc)
            return Var(token.text, loc=token.loc)
        if self._at("("):
            self._advance()
            inner = self._expression()
            self._consume(")")
            return inner
        if self._at("across"):
            return self._across()
        found = token.text or "end of input"
        raise self._error(f"syntax error: unexpected '{found}'")

    def _across(self) -> Across:
        start = self._advance()
        low = self._additive()
        self._consume("..")
        high = self._additive()
        self._consume("as")
        var = self._name().text
        if not self._at(*QUANTIFIERS):
            raise self._error(f"syntax error: expected one of {', '.join(QUANTIFIERS)}")
        quantifier = self._advance().text
        body = self._expression()
        self._consume("end")
        return Across(var, low, high, quantifier, body, loc=start.loc)


# --- Type checking ---


class TypeChecker:
    def __init__(self, routine: Routine):
        self._routine = routine
        self._params = {p.name for p in routine.params}
        self._scope: dict[str, VarType] = {}

    def _error(self, message: str, node: Node) -> SourceError:
        return SourceError(f"type error: {message}", node.loc.line, node.loc.column)

    def check(self) -> None:
        r = self._routine
        for param in r.params:
            self._declare(param)
        # require sees the parameters only
        if r.require is not None:
            self._expect(r.require, VarType.BOOLEAN, "require clause")
        for local in r.locals:
            if local.init is not None:
                self._expect(local.init, local.type, "local initializer")
            self._declare(local)
        self._block(r.body)
        tags = set()
        for clause in r.ensure:
            if clause.tag in tags:
                raise self._error(f"duplicate tag '{clause.tag}'", clause)
            tags.add(clause.tag)
            self._expect(clause.expr, VarType.BOOLEAN, f"ensure clause '{clause.tag}'")

    def _declare(self, decl: Param | Local) -> None:
        if decl.name in self._scope:
            raise self._error(f"duplicate declaration '{decl.name}'", decl)
        self._scope[decl.name] = decl.type

    def _lookup(self, name: str, node: Node) -> VarType:
        if name not in self._scope:
            raise self._error(f"unresolved identifier '{name}'", node)
        return self._scope[name]

    def _assignable(self, name: str, node: Node) -> VarType:
        var_type = self._lookup(name, node)
        if name in self._params:
            raise self._error(f"cannot assign to parameter '{name}'", node)
        return var_type

    def _expect(self, expr: Expr, expected: VarType, what: str) -> None:
        actual = self.expr_type(expr)
        if actual != expected:
            raise self._error(f"{what} must be {expected.value}, got {actual.value}", expr)

    def _block(self, block: Block) -> None:
        for instr in block.instrs:
            self._instr(instr)

    def _instr(self, node: Node) -> None:
        if isinstance(node, Assign):
            target = self._assignable(node.target, node)
            self._expect(node.value, target, f"value assigned to '{node.target}'")
        elif isinstance(node, AssignIndex):
            if self._assignable(node.array, node) != VarType.ARRAY:
                raise self._error(f"'{node.array}' is not an array", node)
            self._expect(node.index, VarType.INTEGER, "array index")
            self._expect(node.value, VarType.INTEGER, "array element")
        elif isinstance(node, If):
            self._expect(node.cond, VarType.BOOLEAN, "if condition")
            self._block(node.then)
            if node.orelse is not None:
                self._block(node.orelse)
        elif isinstance(node, Loop):
            if node.init is not None:
                self._block(node.init)
            self._expect(node.until, VarType.BOOLEAN, "until condition")
            self._block(node.body)
        elif isinstance(node, Check):
            self._expect(node.cond, VarType.BOOLEAN, "check condition")
        elif isinstance(node, Block):
            self._block(node)
        else:
            raise self._error(f"unexpected node {type(node).__name__}", node)

    def expr_type(self, expr: Expr) -> VarType:
        if isinstance(expr, IntLit):
            return VarType.INTEGER
        if isinstance(expr, BoolLit):
            return VarType.BOOLEAN
        if isinstance(expr, Var):
            return self._lookup(expr.name, expr)
        if isinstance(expr, (Index, Count)):
            if self._lookup(expr.array, expr) != VarType.ARRAY:
                raise self._error(f"'{expr.array}' is not an array", expr)
            if isinstance(expr, Index):
                self._expect(expr.index, VarType.INTEGER, "array index")
            return VarType.INTEGER
        if isinstance(expr, Unary):
            operand = VarType.BOOLEAN if expr.op == "not" else VarType.INTEGER
            self._expect(expr.operand, operand, f"operand of '{expr.op}'")
            return operand
        if isinstance(expr, Binary):
            return self._binary_type(expr)
        if isinstance(expr, Across):
            return self._across_type(expr)
        raise self._error(f"unexpected expression {type(expr).__name__}", expr)

    def _binary_type(self, expr: Binary) -> VarType:
        if expr.op in ARITH_OPS or expr.op in ORDER_OPS:
            self._expect(expr.left, VarType.INTEGER, f"left operand of '{expr.op}'")
            self._expect(expr.right, VarType.INTEGER, f"right operand of '{expr.op}'")
            return VarType.INTEGER if expr.op in ARITH_OPS else VarType.BOOLEAN
        if expr.op in LOGIC_OPS:
            self._expect(expr.left, VarType.BOOLEAN, f"left operand of '{expr.op}'")
            self._expect(expr.right, VarType.BOOLEAN, f"right operand of '{expr.op}'")
            return VarType.BOOLEAN
        if expr.op in EQUALITY_OPS:
            left = self.expr_type(expr.left)
            if left == VarType.ARRAY:
                raise self._error(f"arrays cannot be compared with '{expr.op}'", expr)
            self._expect(expr.right, left, f"right operand of '{expr.op}'")
            return VarType.BOOLEAN
        raise self._error(f"unknown operator '{expr.op}'", expr)

    def _across_type(self, expr: Across) -> VarType:
        if expr.var in self._scope:
            raise self._error(f"quantified variable '{expr.var}' shadows a declaration", expr)
        self._expect(expr.low, VarType.INTEGER, "range start")
        self._expect(expr.high, VarType.INTEGER, "range end")
        body = VarType.BOOLEAN if expr.quantifier in ("all", "some") else VarType.INTEGER
        self._scope[expr.var] = VarType.INTEGER
        self._params.add(expr.var)  # read-only inside the body
        try:
            self._expect(expr.body, body, f"body of '{expr.quantifier}'")
        finally:
            del self._scope[expr.var]
            self._params.discard(expr.var)
        return body


def check_types(routine: Routine) -> Routine:
    TypeChecker(routine).check()
    return routine


def parse(source: str) -> Routine:
    """Parse, number and type-check one routine."""
    routine = renumber(Parser(source).parse())
    return check_types(routine)


def parse_file(path: str | Path) -> Routine:
    return parse(Path(path).read_text())
