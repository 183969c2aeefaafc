"""Tokenizer and recursive-descent parser for the expression grammar.

Shared by polynomial text (`services.poly.parse_poly`) and oracle
expressions (`services.oracle.parse_expression`)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' uint)?
    base   := int | var | '(' expr ')' | 'sqrt' '(' expr ')'
    var    := ('x' | 'y') uint | 't'

A rational literal ``p/q`` is the division of two integer literals. Bare
``x`` and ``y`` are accepted as ``x1`` and ``y1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Union

from core.exceptions import ExpressionSyntaxError, UnknownVariableError

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<sqrt>sqrt\b)|(?P<var>[xy]\d*|t)(?![A-Za-z0-9_])|(?P<op>[-+*/^()]))")


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    """A variable reference; `group` is 'x', 'y' or 't', `index` is 1-based (0 for t)."""

    group: str
    index: int

    @property
    def name(self) -> str:
        return "t" if self.group == "t" else f"{self.group}{self.index}"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprAST"
    right: "ExprAST"


@dataclass(frozen=True)
class Pow:
    base: "ExprAST"
    exponent: int


@dataclass(frozen=True)
class Neg:
    operand: "ExprAST"


@dataclass(frozen=True)
class Sqrt:
    operand: "ExprAST"


ExprAST = Union[Const, Var, BinOp, Pow, Neg, Sqrt]


def tokenize(text: str) -> List[Token]:
    """Split expression text into tokens, each tagged with its character position."""
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character '{text[pos]}'", text, pos)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, num_x: int, num_y: int, allow_t: bool, allow_sqrt: bool):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.num_x = num_x
        self.num_y = num_y
        self.allow_t = allow_t
        self.allow_sqrt = allow_sqrt

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        """Consume the next token, which must be `text`."""
        tok = self.peek
        if tok.text != text or tok.kind not in ("op",):
            found = tok.text or "end of input"
            raise ExpressionSyntaxError(f"expected '{text}', found '{found}'", self.text, tok.pos)
        return self.advance()

    def parse(self) -> ExprAST:
        node = self.expr()
        tok = self.peek
        if tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected '{tok.text}'", self.text, tok.pos)
        return node

    def expr(self) -> ExprAST:
        """expr := term (("+" | "-") term)*"""
        node = self.term()
        while self.peek.kind == "op" and self.peek.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAST:
        """term := unary (("*" | "/") unary)*"""
        node = self.unary()
        while self.peek.kind == "op" and self.peek.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> ExprAST:
        """unary := "-" unary | factor"""
        if self.peek.kind == "op" and self.peek.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> ExprAST:
        """factor := base ("^" integer)?"""
        node = self.base()
        if self.peek.kind == "op" and self.peek.text == "^":
            self.advance()
            tok = self.peek
            if tok.kind != "num":
                raise ExpressionSyntaxError("exponent must be a non-negative integer literal", self.text, tok.pos)
            self.advance()
            node = Pow(node, int(tok.text))
        return node

    def base(self) -> ExprAST:
        tok = self.peek
        if tok.kind == "num":
            self.advance()
            return Const(int(tok.text))
        if tok.kind == "var":
            self.advance()
            return self.variable(tok)
        if tok.kind == "sqrt":
            if not self.allow_sqrt:
                raise ExpressionSyntaxError("sqrt is not allowed here", self.text, tok.pos)
            self.advance()
            self.expect("(")
            node = self.expr()
            self.expect(")")
            return Sqrt(node)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ExpressionSyntaxError(f"unexpected '{found}'", self.text, tok.pos)

    def variable(self, tok: Token) -> Var:
        if tok.text == "t":
            if not self.allow_t:
                raise UnknownVariableError("t", tok.pos)
            return Var("t", 0)
        group = tok.text[0]
        index = int(tok.text[1:]) if len(tok.text) > 1 else 1
        bound = self.num_x if group == "x" else self.num_y
        if not 1 <= index <= bound:
            raise UnknownVariableError(tok.text, tok.pos)
        return Var(group, index)


def parse(
    text: str,
    num_x: int,
    num_y: int = 0,
    allow_t: bool = False,
    allow_sqrt: bool = True,
) -> ExprAST:
    """Parse `text` into an AST with variables bound to the declared arity.

    Args:
        text: Expression text.
        num_x: Number of x variables accepted.
        num_y: Number of y variables accepted.
        allow_t: Whether the graph variable t may appear.
        allow_sqrt: Whether ``sqrt(...)`` may appear.

    Returns:
        The root node.

    Raises:
        ExpressionSyntaxError: Malformed input (carries the character position).
        UnknownVariableError: A variable outside x1..x{num_x}, y1..y{num_y} (and t).
    """
    return _Parser(text, num_x, num_y, allow_t, allow_sqrt).parse()
