"""Recursive-descent parser for the formula surface syntax.

    exists x. phi      forall x. phi      (quantifiers reach as far right as possible)
    phi \\/ phi         phi /\\ phi         ~phi        (~ binds tightest, then /\\, then \\/)
    t <= t   t < t   t = t   t >= t   t > t   m | t   true   false
    terms: decimal constants, variables [a-z][a-z0-9]*, t + t, 2*(t), n*(t), (t)

Decimal constants and ``n*(t)`` are sugar; they are expanded into the
binary {1, +, x2} encoding.
"""
from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .formula import (
    FALSE,
    TRUE,
    Dvd,
    Exists,
    Forall,
    Formula,
    Le,
    Not,
    conj,
    disj,
    eq,
    lt,
)
from .terms import Add, Term, Var, const_term, scale_term


class ParseError(ValueError):
    def __init__(self, message: str, pos: int = -1, text: str = ""):
        self.pos = pos
        self.text = text
        where = f" at column {pos + 1}" if pos >= 0 else ""
        super().__init__(f"{message}{where}")


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[a-z][a-z0-9_]*)|(?P<op>/\\|\\/|<=|>=|<|>|=|~|\+|\*|\(|\)|\.|\||,))"
)

KEYWORDS = {"exists", "forall", "true", "false"}


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            # skip pure whitespace at the end
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos:].strip()[0]!r}", pos, text)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        t = self.next()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2], self.text)
        return t

    def error(self, message: str):
        t = self.peek()
        raise ParseError(message, t[2], self.text)

    # formulas
    def formula(self) -> Formula:
        if self.peek()[1] in ("exists", "forall"):
            return self.quantified()
        parts = [self.conjunction()]
        while self.peek()[1] == "\\/":
            self.next()
            parts.append(self.quantified() if self.peek()[1] in ("exists", "forall") else self.conjunction())
        return disj(*parts) if len(parts) > 1 else parts[0]

    def quantified(self) -> Formula:
        q = self.next()[1]
        names = []
        while True:
            kind, val, pos = self.next()
            if kind != "ident" or val in KEYWORDS:
                raise ParseError("expected a variable after quantifier", pos, self.text)
            names.append(val)
            if self.peek()[1] == ",":
                self.next()
                continue
            if self.peek()[0] == "ident" and self.peek()[1] not in KEYWORDS:
                continue
            break
        self.expect(".")
        body = self.formula()
        for n in reversed(names):
            body = Exists(n, body) if q == "exists" else Forall(n, body)
        return body

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.peek()[1] == "/\\":
            self.next()
            parts.append(self.quantified() if self.peek()[1] in ("exists", "forall") else self.unary())
        return conj(*parts) if len(parts) > 1 else parts[0]

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "~":
            self.next()
            return Not(self.unary())
        if val in ("exists", "forall"):
            return self.quantified()
        if val == "true":
            self.next()
            return TRUE
        if val == "false":
            self.next()
            return FALSE
        if val == "(":
            # either a parenthesised formula or an atom starting with a term
            save = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = save
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self) -> Formula:
        # divisibility: NUM | term
        kind, val, pos = self.peek()
        if kind == "num" and self.peek(1)[1] == "|":
            self.next()
            self.next()
            m = int(val)
            if m < 1:
                raise ParseError("modulus must be positive", pos, self.text)
            return Dvd(m, self.term())
        left = self.term()
        kind, op, pos = self.next()
        if op not in ("<=", "<", "=", ">=", ">"):
            raise ParseError(f"expected a comparison, found {op or 'end of input'!r}", pos, self.text)
        right = self.term()
        if op == "<=":
            return Le(left, right)
        if op == "<":
            return lt(left, right)
        if op == ">=":
            return Le(right, left)
        if op == ">":
            return lt(right, left)
        return eq(left, right)

    # terms
    def term(self) -> Term:
        t = self.factor()
        while self.peek()[1] == "+":
            self.next()
            t = Add(t, self.factor())
        return t

    def factor(self) -> Term:
        kind, val, pos = self.next()
        if kind == "num":
            n = int(val)
            if self.peek()[1] == "*":
                self.next()
                self.expect("(")
                inner = self.term()
                self.expect(")")
                return scale_term(inner, n)
            return const_term(n)
        if kind == "ident" and val not in KEYWORDS:
            return Var(val)
        if val == "(":
            t = self.term()
            self.expect(")")
            return t
        raise ParseError(f"expected a term, found {val or 'end of input'!r}", pos, self.text)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "eof":
        p.error(f"unexpected {p.peek()[1]!r}")
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.peek()[0] != "eof":
        p.error(f"unexpected {p.peek()[1]!r}")
    return t
