"""Recursive-descent parser producing the script AST.

Grammar (see docs/grammar.ebnf): a script starts with the two scene
dimension assignments, followed by robot declarations, let bindings,
procedure definitions and statements in source order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from . import lexer


# --- expression nodes -------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float
    line: int
    column: int


@dataclass(frozen=True)
class Str:
    value: str
    line: int
    column: int


@dataclass(frozen=True)
class Name:
    name: str
    line: int
    column: int


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object
    line: int
    column: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    line: int
    column: int


@dataclass(frozen=True)
class FuncCall:
    name: str
    args: tuple
    line: int
    column: int


# --- statement / declaration nodes -----------------------------------------

@dataclass(frozen=True)
class SceneDecl:
    name: str  # 'sceneWidth' | 'sceneDepth'
    expr: object
    line: int


@dataclass(frozen=True)
class RobotDecl:
    var: str
    name_expr: object
    color_expr: object
    line: int


@dataclass(frozen=True)
class LetDecl:
    name: str
    expr: object
    line: int


@dataclass(frozen=True)
class ProcDef:
    name: str
    params: tuple[str, ...]
    body: tuple
    line: int


@dataclass(frozen=True)
class Repeat:
    count: object
    body: tuple
    line: int


@dataclass(frozen=True)
class CallStmt:
    name: str
    args: tuple
    line: int
    column: int


@dataclass(frozen=True)
class ScriptAst:
    items: tuple = ()
    scene_width: object = None  # expr or None
    scene_depth: object = None

    @property
    def statements(self) -> tuple:
        """Executable statements (instruction/procedure calls and repeats)."""
        return tuple(it for it in self.items if isinstance(it, (CallStmt, Repeat)))


class _Parser:
    def __init__(self, tokens):
        self.tokens = list(tokens)
        self.pos = 0

    def peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, lexeme):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {lexeme!r} but reached end of input")
        if tok.lexeme != lexeme:
            raise ParseError(f"expected {lexeme!r}, got {tok.lexeme!r}",
                             tok.line, tok.column)
        self.pos += 1
        return tok

    def expect_kind(self, kind, what):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {what} but reached end of input")
        if tok.kind != kind:
            raise ParseError(f"expected {what}, got {tok.lexeme!r}",
                             tok.line, tok.column)
        self.pos += 1
        return tok

    # --- toplevel ---

    def script(self) -> ScriptAst:
        scene = {}
        items = []
        proc_names = set()
        while self.peek() is not None:
            tok = self.peek()
            is_scene_assign = (tok.kind == lexer.IDENTIFIER
                               and self.peek(1) is not None
                               and self.peek(1).lexeme == "=")
            if is_scene_assign:
                decl = self.scene_decl()
                if items:
                    raise ParseError(
                        f"{decl.name} must be defined before any other statement",
                        decl.line)
                if decl.name in scene:
                    raise ParseError(f"duplicate {decl.name} declaration", decl.line)
                scene[decl.name] = decl.expr
                continue
            item = self.toplevel_item()
            if isinstance(item, ProcDef):
                if item.name in proc_names:
                    raise ParseError(f"procedure {item.name!r} defined twice", item.line)
                proc_names.add(item.name)
            items.append(item)
        return ScriptAst(tuple(items), scene.get("sceneWidth"), scene.get("sceneDepth"))

    def scene_decl(self):
        tok = self.expect_kind(lexer.IDENTIFIER, "scene dimension name")
        if tok.lexeme not in ("sceneWidth", "sceneDepth"):
            raise ParseError(f"cannot assign to {tok.lexeme!r}; only sceneWidth "
                             "and sceneDepth may be assigned", tok.line, tok.column)
        self.expect("=")
        expr = self.expression()
        self.expect(";")
        return SceneDecl(tok.lexeme, expr, tok.line)

    def toplevel_item(self):
        tok = self.peek()
        if tok.lexeme == "robot":
            return self.robot_decl()
        if tok.lexeme == "proc":
            return self.proc_def()
        return self.statement()

    def robot_decl(self):
        kw = self.expect("robot")
        var = self.expect_kind(lexer.IDENTIFIER, "robot variable name").lexeme
        self.expect("=")
        self.expect("robot")
        self.expect("(")
        name_expr = self.expression()
        self.expect(",")
        color_expr = self.expression()
        self.expect(")")
        self.expect(";")
        return RobotDecl(var, name_expr, color_expr, kw.line)

    def proc_def(self):
        kw = self.expect("proc")
        name = self.expect_kind(lexer.IDENTIFIER, "procedure name").lexeme
        self.expect("(")
        params = []
        if self.peek() is not None and self.peek().lexeme != ")":
            params.append(self.expect_kind(lexer.IDENTIFIER, "parameter name").lexeme)
            while self.peek() is not None and self.peek().lexeme == ",":
                self.next()
                params.append(self.expect_kind(lexer.IDENTIFIER, "parameter name").lexeme)
        self.expect(")")
        body = self.block()
        return ProcDef(name, tuple(params), body, kw.line)

    def block(self):
        self.expect("{")
        stmts = []
        while self.peek() is not None and self.peek().lexeme != "}":
            stmts.append(self.statement())
        self.expect("}")
        return tuple(stmts)

    def statement(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("expected a statement but reached end of input")
        if tok.lexeme == "let":
            return self.let_decl()
        if tok.lexeme == "repeat":
            kw = self.next()
            count = self.expression()
            body = self.block()
            return Repeat(count, body, kw.line)
        if tok.kind != lexer.IDENTIFIER:
            raise ParseError(f"expected a statement, got {tok.lexeme!r}",
                             tok.line, tok.column)
        name = self.next()
        self.expect("(")
        args = []
        if self.peek() is not None and self.peek().lexeme != ")":
            args.append(self.expression())
            while self.peek() is not None and self.peek().lexeme == ",":
                self.next()
                args.append(self.expression())
        self.expect(")")
        self.expect(";")
        return CallStmt(name.lexeme, tuple(args), name.line, name.column)

    def let_decl(self):
        kw = self.expect("let")
        name = self.expect_kind(lexer.IDENTIFIER, "variable name").lexeme
        self.expect("=")
        expr = self.expression()
        self.expect(";")
        return LetDecl(name, expr, kw.line)

    # --- expressions ---

    def expression(self):
        node = self.term()
        while self.peek() is not None and self.peek().lexeme in ("+", "-"):
            op = self.next()
            node = BinOp(op.lexeme, node, self.term(), op.line, op.column)
        return node

    def term(self):
        node = self.unary()
        while self.peek() is not None and self.peek().lexeme in ("*", "/"):
            op = self.next()
            node = BinOp(op.lexeme, node, self.unary(), op.line, op.column)
        return node

    def unary(self):
        tok = self.peek()
        if tok is not None and tok.lexeme == "-":
            self.next()
            return Unary("-", self.unary(), tok.line, tok.column)
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("expected an expression but reached end of input")
        if tok.kind == lexer.NUMBER:
            self.next()
            return Num(float(tok.lexeme), tok.line, tok.column)
        if tok.kind == lexer.STRING:
            self.next()
            return Str(tok.lexeme, tok.line, tok.column)
        if tok.lexeme == "(":
            self.next()
            node = self.expression()
            self.expect(")")
            return node
        if tok.kind == lexer.IDENTIFIER:
            self.next()
            if self.peek() is not None and self.peek().lexeme == "(":
                self.next()
                args = []
                if self.peek() is not None and self.peek().lexeme != ")":
                    args.append(self.expression())
                    while self.peek() is not None and self.peek().lexeme == ",":
                        self.next()
                        args.append(self.expression())
                self.expect(")")
                return FuncCall(tok.lexeme, tuple(args), tok.line, tok.column)
            return Name(tok.lexeme, tok.line, tok.column)
        raise ParseError(f"expected an expression, got {tok.lexeme!r}",
                         tok.line, tok.column)


def parse(tokens) -> ScriptAst:
    """Parse a token stream into a ScriptAst preserving source order."""
    return _Parser(tokens).script()


def parse_source(source: str) -> ScriptAst:
    return parse(lexer.tokenize(source))
