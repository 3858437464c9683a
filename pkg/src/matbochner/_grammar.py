"""Recursive-descent parser for the scalar / polynomial entry grammar.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' uint)?
    atom   := uint | uint '/' uint | ident | '(' expr ')'

The parser is generic over the target algebra: callers pass a ``leaf``
callback that turns integers and identifiers into algebra elements, and a
``divide`` callback (division is only defined by invertible elements).
"""
from __future__ import annotations

import re
from typing import Any, Callable


class ParseError(ValueError):
    """Malformed expression. ``offset`` is a 0-based character index."""

    def __init__(self, message: str, text: str, offset: int):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset} in {text!r}")


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, leaf: Callable[[str, str, int], Any],
                 divide: Callable[[Any, Any, int], Any]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.leaf = leaf
        self.divide = divide

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, ch: str):
        kind, val, off = self.take()
        if kind != "op" or val != ch:
            raise ParseError(f"expected {ch!r}", self.text, off)

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", self.text, 0)
        value = self.expr()
        kind, _, off = self.peek()
        if kind != "end":
            raise ParseError("trailing input", self.text, off)
        return value

    def expr(self):
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if val == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.factor()
        while True:
            kind, val, off = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.factor()
                value = value * rhs if val == "*" else self.divide(value, rhs, off)
            else:
                return value

    def factor(self):
        base = self.atom()
        kind, val, off = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, off = self.take()
            if kind != "int":
                raise ParseError("exponent must be an unsigned integer", self.text, off)
            base = base ** int(val)
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "int":
            return self.leaf("int", val, off)
        if kind == "ident":
            return self.leaf("ident", val, off)
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        raise ParseError("expected a number, identifier or '('", self.text, off)


def parse_expression(text: str, leaf, divide):
    return _Parser(text, leaf, divide).parse()
