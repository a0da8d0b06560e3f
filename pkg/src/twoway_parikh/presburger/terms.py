"""Terms over the signature {0, 1, +, x2} and their linear normal form.

Surface terms keep their tree shape so that printed formulas look like what
was written (or what a construction built).  Every term also has a linear
normal form ``sum(a_i * x_i) + c`` which is what evaluation and quantifier
elimination work on.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Tuple


class Term:
    __slots__ = ()

    def __add__(self, other: "Term") -> "Term":
        return Add(self, other)


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class One(Term):
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Dbl(Term):
    """Doubling, written ``2*(t)``."""
    arg: Term


@dataclass(frozen=True)
class Lin(Term):
    """Internal linear combination ``sum(coef * var) + const``.

    ``coeffs`` is a sorted tuple of (variable, nonzero coefficient) pairs.
    """
    coeffs: Tuple[Tuple[str, int], ...] = ()
    const: int = 0

    # construction helpers
    @staticmethod
    def of(coeffs: Mapping[str, int] | Iterable[Tuple[str, int]] = (), const: int = 0) -> "Lin":
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            acc: Dict[str, int] = {}
            for v, a in coeffs:
                acc[v] = acc.get(v, 0) + a
            items = acc.items()
        return Lin(tuple(sorted((v, a) for v, a in items if a != 0)), const)

    @staticmethod
    def var(name: str, coef: int = 1) -> "Lin":
        return Lin(((name, coef),), 0) if coef else Lin((), 0)

    @staticmethod
    def constant(c: int) -> "Lin":
        return Lin((), c)

    def as_dict(self) -> Dict[str, int]:
        return dict(self.coeffs)

    def coef(self, name: str) -> int:
        for v, a in self.coeffs:
            if v == name:
                return a
        return 0

    def variables(self) -> frozenset:
        return frozenset(v for v, _ in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def plus(self, other: "Lin") -> "Lin":
        d = dict(self.coeffs)
        for v, a in other.coeffs:
            d[v] = d.get(v, 0) + a
        return Lin.of(d, self.const + other.const)

    def minus(self, other: "Lin") -> "Lin":
        return self.plus(other.scale(-1))

    def scale(self, k: int) -> "Lin":
        if k == 0:
            return Lin((), 0)
        return Lin(tuple((v, a * k) for v, a in self.coeffs), self.const * k)

    def shift(self, c: int) -> "Lin":
        return Lin(self.coeffs, self.const + c)

    def without(self, name: str) -> "Lin":
        return Lin(tuple((v, a) for v, a in self.coeffs if v != name), self.const)

    def substitute(self, name: str, value: "Lin") -> "Lin":
        a = self.coef(name)
        if a == 0:
            return self
        return self.without(name).plus(value.scale(a))

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = self.const
        for v, a in self.coeffs:
            try:
                total += a * env[v]
            except KeyError:
                raise UnboundVariable(v) from None
        return total


class UnboundVariable(KeyError):
    """Evaluation met a variable the valuation does not cover."""


ZERO = Zero()
ONE = One()


@lru_cache(maxsize=None)
def linear(t: Term) -> Lin:
    """Linear normal form of a term."""
    if isinstance(t, Lin):
        return t
    if isinstance(t, Zero):
        return Lin((), 0)
    if isinstance(t, One):
        return Lin((), 1)
    if isinstance(t, Var):
        return Lin.var(t.name)
    if isinstance(t, Add):
        return linear(t.left).plus(linear(t.right))
    if isinstance(t, Dbl):
        return linear(t.arg).scale(2)
    raise TypeError(f"not a term: {t!r}")


def term_vars(t: Term) -> frozenset:
    return linear(t).variables()


def const_term(n: int) -> Term:
    """Binary encoding of a natural number with 1, + and x2.

    13 = 0b1101 becomes ``2*(2*(2*(1))) + 2*(2*(1)) + 1``.
    """
    if n < 0:
        raise ValueError("const_term expects a natural number")
    if n == 0:
        return ZERO
    parts = []
    for i in reversed(range(n.bit_length())):
        if n >> i & 1:
            t: Term = ONE
            for _ in range(i):
                t = Dbl(t)
            parts.append(t)
    return sum_terms(parts)


def sum_terms(parts) -> Term:
    parts = list(parts)
    if not parts:
        return ZERO
    out = parts[0]
    for p in parts[1:]:
        out = Add(out, p)
    return out


def scale_term(t: Term, k: int) -> Term:
    """``k * t`` for a natural ``k`` using only + and x2."""
    if k < 0:
        raise ValueError("scale_term expects a natural factor")
    if k == 0:
        return ZERO
    parts = []
    for i in reversed(range(k.bit_length())):
        if k >> i & 1:
            s = t
            for _ in range(i):
                s = Dbl(s)
            parts.append(s)
    return sum_terms(parts)


def split_signs(lin: Lin) -> Tuple[Term, Term]:
    """Write ``lin`` as ``pos - neg`` with both sides built from surface syntax."""
    pos, neg = [], []
    for v, a in lin.coeffs:
        (pos if a > 0 else neg).append(scale_term(Var(v), abs(a)))
    if lin.const > 0:
        pos.append(const_term(lin.const))
    elif lin.const < 0:
        neg.append(const_term(-lin.const))
    return sum_terms(pos), sum_terms(neg)


def substitute_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Add):
        return Add(substitute_term(t.left, mapping), substitute_term(t.right, mapping))
    if isinstance(t, Dbl):
        return Dbl(substitute_term(t.arg, mapping))
    if isinstance(t, Lin):
        if not any(v in mapping for v, _ in t.coeffs):
            return t
        out = Lin((), t.const)
        for v, a in t.coeffs:
            if v in mapping:
                out = out.plus(linear(mapping[v]).scale(a))
            else:
                out = out.plus(Lin.var(v, a))
        return out
    return t


def term_str(t: Term) -> str:
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Add):
        return f"{term_str(t.left)} + {term_str(t.right)}"
    if isinstance(t, Dbl):
        return f"2*({term_str(t.arg)})"
    if isinstance(t, Lin):
        return lin_str(t)
    raise TypeError(t)


def lin_str(lin: Lin) -> str:
    """Compact print; coefficients other than 1 use the ``n*(x)`` sugar.

    Negative coefficients have no surface syntax, so atoms move them to the
    other side before printing (see ``split_signs``).  A leftover negative
    coefficient is printed with a minus sign for debugging only.
    """
    parts = []
    for v, a in lin.coeffs:
        if a == 1:
            parts.append(v)
        elif a > 0:
            parts.append(f"{a}*({v})")
        else:
            parts.append(f"-{-a}*({v})")
    if lin.const or not parts:
        parts.append(str(lin.const))
    return " + ".join(parts)


def nonneg_split(lin: Lin) -> Tuple[Lin, Lin]:
    """``lin = pos - neg`` with both sides having nonnegative coefficients."""
    pos = Lin(tuple((v, a) for v, a in lin.coeffs if a > 0), max(lin.const, 0))
    neg = Lin(tuple((v, -a) for v, a in lin.coeffs if a < 0), max(-lin.const, 0))
    return pos, neg
