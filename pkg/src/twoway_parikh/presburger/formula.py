"""Presburger formulas: AST, evaluation, negation normal form, prenexing.

Atoms are ``t1 <= t2`` and divisibility ``m | t``.  Equality and strict
order are sugar handled by the builders.  Formulas are immutable trees.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .terms import (
    ONE,
    ZERO,
    Add,
    Lin,
    Term,
    UnboundVariable,
    Var,
    const_term,
    linear,
    lin_str,
    nonneg_split,
    substitute_term,
    term_str,
)


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return to_str(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True)
class Le(Formula):
    lhs: Term
    rhs: Term

    def lin(self) -> Lin:
        """``lhs - rhs``; the atom says this is <= 0."""
        return _le_lin(self)


@lru_cache(maxsize=None)
def _le_lin(a: "Le") -> Lin:
    return linear(a.lhs).minus(linear(a.rhs))


@dataclass(frozen=True)
class Dvd(Formula):
    """``modulus | term`` with modulus >= 1."""
    modulus: int
    term: Term

    def lin(self) -> Lin:
        return linear(self.term)


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


class FormulaError(ValueError):
    pass


# ---------------------------------------------------------------- builders

def le(a: Term, b: Term) -> Formula:
    return Le(a, b)


def lt(a: Term, b: Term) -> Formula:
    return Le(Add(a, ONE), b)


def eq(a: Term, b: Term) -> Formula:
    return And((Le(a, b), Le(b, a)))


def le0(lin: Lin) -> Formula:
    """Internal atom ``lin <= 0``."""
    return Le(lin, ZERO)


def conj(*args: Formula) -> Formula:
    out: List[Formula] = []
    for a in _flatten(args, And):
        if isinstance(a, FalseF):
            return FALSE
        if isinstance(a, TrueF):
            continue
        if a not in out:
            out.append(a)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*args: Formula) -> Formula:
    out: List[Formula] = []
    for a in _flatten(args, Or):
        if isinstance(a, TrueF):
            return TRUE
        if isinstance(a, FalseF):
            continue
        if a not in out:
            out.append(a)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def _flatten(args, kind):
    for a in args:
        if isinstance(a, (list, tuple)):
            yield from _flatten(a, kind)
        elif isinstance(a, kind):
            yield from a.args
        else:
            yield a


def exists(variables: Iterable[str] | str, body: Formula) -> Formula:
    if isinstance(variables, str):
        variables = [variables]
    for v in reversed(list(variables)):
        body = Exists(v, body)
    return body


def forall(variables: Iterable[str] | str, body: Formula) -> Formula:
    if isinstance(variables, str):
        variables = [variables]
    for v in reversed(list(variables)):
        body = Forall(v, body)
    return body


def implies(a: Formula, b: Formula) -> Formula:
    return disj(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(implies(a, b), implies(b, a))


# ------------------------------------------------------------ inspection

@lru_cache(maxsize=None)
def free_vars(f: Formula) -> frozenset:
    if isinstance(f, (TrueF, FalseF)):
        return frozenset()
    if isinstance(f, (Le, Dvd)):
        return f.lin().variables()
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f)


@lru_cache(maxsize=None)
def all_vars(f: Formula) -> frozenset:
    """Every variable name occurring free or bound."""
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    if isinstance(f, Not):
        return all_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for a in f.args:
            out |= all_vars(a)
        return out
    return free_vars(f)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    return True


def atoms(f: Formula) -> List[Formula]:
    out: List[Formula] = []

    def go(g):
        if isinstance(g, (Le, Dvd)):
            out.append(g)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                go(a)
        elif isinstance(g, (Exists, Forall)):
            go(g.body)
    go(f)
    return out


def size(f: Formula) -> int:
    if isinstance(f, Not):
        return 1 + size(f.arg)
    if isinstance(f, (And, Or)):
        return 1 + sum(size(a) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        return 1 + size(f.body)
    return 1


# ------------------------------------------------------------ evaluation

def eval_ground(f: Formula, env: Mapping[str, int]) -> bool:
    """Truth value of a quantifier-free formula under ``env``."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Le):
        return f.lin().evaluate(env) <= 0
    if isinstance(f, Dvd):
        return f.lin().evaluate(env) % f.modulus == 0
    if isinstance(f, Not):
        return not eval_ground(f.arg, env)
    if isinstance(f, And):
        return all(eval_ground(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(eval_ground(a, env) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        raise FormulaError("eval_ground needs a quantifier-free formula")
    raise TypeError(f)


def eval_bounded(f: Formula, env: Mapping[str, int], bound: int) -> bool:
    """Evaluate with every quantifier ranging over [-bound, bound].

    Only a test helper: this is the real semantics exactly when the
    quantified variables are known to have witnesses in that range.
    """
    if isinstance(f, Exists):
        e = dict(env)
        for v in range(-bound, bound + 1):
            e[f.var] = v
            if eval_bounded(f.body, e, bound):
                return True
        return False
    if isinstance(f, Forall):
        e = dict(env)
        for v in range(-bound, bound + 1):
            e[f.var] = v
            if not eval_bounded(f.body, e, bound):
                return False
        return True
    if isinstance(f, Not):
        return not eval_bounded(f.arg, env, bound)
    if isinstance(f, And):
        return all(eval_bounded(a, env, bound) for a in f.args)
    if isinstance(f, Or):
        return any(eval_bounded(a, env, bound) for a in f.args)
    return eval_ground(f, env)


# ------------------------------------------------------------ fresh names

_counter = itertools.count()


def fresh_name(avoid: Iterable[str] = (), prefix: str = "v") -> str:
    avoid = set(avoid)
    while True:
        name = f"{prefix}{next(_counter)}"
        if name not in avoid:
            return name


# ------------------------------------------------------------ substitution

def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Capture-avoiding replacement of free variables by terms."""
    mapping = {k: v for k, v in mapping.items() if k in free_vars(f)}
    if not mapping:
        return f
    incoming = frozenset()
    for t in mapping.values():
        incoming |= linear(t).variables()
    return _subst(f, mapping, incoming)


def _subst(f, mapping, incoming):
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Le):
        return Le(substitute_term(f.lhs, mapping), substitute_term(f.rhs, mapping))
    if isinstance(f, Dvd):
        return Dvd(f.modulus, substitute_term(f.term, mapping))
    if isinstance(f, Not):
        return Not(_subst(f.arg, mapping, incoming))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_subst(a, mapping, incoming) for a in f.args))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        if not inner:
            return f
        var, body = f.var, f.body
        if var in incoming:
            new = fresh_name(incoming | all_vars(body) | set(inner))
            body = _subst(body, {var: Var(new)}, frozenset({new}))
            var = new
        return type(f)(var, _subst(body, inner, incoming))
    raise TypeError(f)


def rename_free(f: Formula, mapping: Mapping[str, str]) -> Formula:
    return substitute(f, {k: Var(v) for k, v in mapping.items()})


# ------------------------------------------------------------ normal forms

def nnf(f: Formula) -> Formula:
    """Negation normal form: negation only in front of divisibility atoms."""
    return _nnf(f, False)


def _nnf(f, neg):
    if isinstance(f, TrueF):
        return FALSE if neg else TRUE
    if isinstance(f, FalseF):
        return TRUE if neg else FALSE
    if isinstance(f, Le):
        if not neg:
            return f
        return Le(Add(f.rhs, ONE), f.lhs)
    if isinstance(f, Dvd):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, And):
        parts = [_nnf(a, neg) for a in f.args]
        return disj(*parts) if neg else conj(*parts)
    if isinstance(f, Or):
        parts = [_nnf(a, neg) for a in f.args]
        return conj(*parts) if neg else disj(*parts)
    if isinstance(f, Exists):
        return Forall(f.var, _nnf(f.body, True)) if neg else Exists(f.var, _nnf(f.body, False))
    if isinstance(f, Forall):
        return Exists(f.var, _nnf(f.body, True)) if neg else Forall(f.var, _nnf(f.body, False))
    raise TypeError(f)


def negate(f: Formula) -> Formula:
    """An NNF formula equivalent to the negation of ``f``."""
    return _nnf(f, True)


def rename_bound_apart(f: Formula, avoid: Iterable[str] = ()) -> Formula:
    """Alpha-rename so every binder uses a distinct name, distinct from free names."""
    used = set(avoid) | set(free_vars(f))
    return _apart(f, {}, used)


def _apart(f, ren, used):
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, (Le, Dvd)):
        if not ren:
            return f
        return substitute(f, {k: Var(v) for k, v in ren.items()})
    if isinstance(f, Not):
        return Not(_apart(f.arg, ren, used))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_apart(a, ren, used) for a in f.args))
    if isinstance(f, (Exists, Forall)):
        var = f.var
        if var in used:
            var = fresh_name(used | all_vars(f.body))
        used.add(var)
        inner = dict(ren)
        if var != f.var:
            inner[f.var] = var
        else:
            inner.pop(f.var, None)
        return type(f)(var, _apart(f.body, inner, used))
    raise TypeError(f)


Prefix = List[Tuple[str, str]]  # ("E" | "A", variable)


def prenex(f: Formula) -> Tuple[Prefix, Formula]:
    """Prenex form of ``f`` (after NNF and renaming apart).

    Prefixes of conjuncts and disjuncts are interleaved so that the number of
    quantifier blocks is minimal; ties put an existential block first.
    """
    g = rename_bound_apart(nnf(f))
    return _prenex(g)


def _prenex(f):
    if isinstance(f, (Exists, Forall)):
        pre, mat = _prenex(f.body)
        q = "E" if isinstance(f, Exists) else "A"
        return [(q, f.var)] + pre, mat
    if isinstance(f, (And, Or)):
        prefixes, mats = [], []
        for a in f.args:
            p, m = _prenex(a)
            prefixes.append(p)
            mats.append(m)
        merged: Prefix = []
        for p in prefixes:
            merged = _merge_prefixes(merged, p)
        return merged, (conj(*mats) if isinstance(f, And) else disj(*mats))
    return [], f


def blocks(prefix: Prefix) -> List[Tuple[str, List[str]]]:
    out: List[Tuple[str, List[str]]] = []
    for q, v in prefix:
        if out and out[-1][0] == q:
            out[-1][1].append(v)
        else:
            out.append((q, [v]))
    return out


def _merge_prefixes(p1: Prefix, p2: Prefix) -> Prefix:
    b1, b2 = blocks(p1), blocks(p2)
    if not b1:
        return list(p2)
    if not b2:
        return list(p1)

    @lru_cache(maxsize=None)
    def best(i, j, last):
        # returns (number of blocks, existential-first penalty, plan)
        if i == len(b1) and j == len(b2):
            return (0, ())
        options = []
        for q in ("E", "A"):
            take1 = i < len(b1) and b1[i][0] == q
            take2 = j < len(b2) and b2[j][0] == q
            if not (take1 or take2):
                continue
            ni, nj = i + take1, j + take2
            cost, plan = best(ni, nj, q)
            cost += 0 if q == last else 1
            options.append((cost, 0 if q == "E" else 1, ((q, take1, take2),) + plan))
        options.sort(key=lambda o: (o[0], o[1]))
        return options[0][0], options[0][2]

    _, plan = best(0, 0, None)
    out: Prefix = []
    i = j = 0
    for q, t1, t2 in plan:
        if t1:
            out.extend((q, v) for v in b1[i][1])
            i += 1
        if t2:
            out.extend((q, v) for v in b2[j][1])
            j += 1
    return out


def from_prenex(prefix: Prefix, matrix: Formula) -> Formula:
    f = matrix
    for q, v in reversed(prefix):
        f = Exists(v, f) if q == "E" else Forall(v, f)
    return f


def classify(f: Formula) -> Tuple[int, str]:
    """(number of quantifier blocks, "Sigma" or "Pi") of a prenex form.

    Quantifier-free formulas are reported as (0, "Sigma").
    """
    prefix, _ = prenex(f)
    bl = blocks(prefix)
    if not bl:
        return 0, "Sigma"
    return len(bl), "Sigma" if bl[0][0] == "E" else "Pi"


# ------------------------------------------------------------ printing

_PREC = {"or": 1, "and": 2, "not": 3}


def to_str(f: Formula) -> str:
    return _str(f, 0)


def _str(f, ctx):
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Le):
        return _le_str(f)
    if isinstance(f, Dvd):
        m = f.modulus
        lin = linear(f.term)
        if not isinstance(f.term, Lin) and not _has_neg(lin):
            return f"{m} | ({term_str(f.term)})"
        # reduce coefficients into [0, m) so the printed term has no minus
        red = Lin.of({v: a % m for v, a in lin.coeffs}, lin.const % m)
        return f"{m} | ({lin_str(red)})"
    if isinstance(f, Not):
        s = "~" + _str(f.arg, _PREC["not"])
        return s
    if isinstance(f, And):
        s = " /\\ ".join(_str(a, _PREC["and"]) for a in f.args)
        return f"({s})" if ctx > _PREC["and"] else s
    if isinstance(f, Or):
        s = " \\/ ".join(_str(a, _PREC["or"]) for a in f.args)
        return f"({s})" if ctx > _PREC["or"] else s
    if isinstance(f, (Exists, Forall)):
        q = "exists" if isinstance(f, Exists) else "forall"
        s = f"{q} {f.var}. {_str(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f)


def _has_neg(lin: Lin) -> bool:
    return lin.const < 0 or any(a < 0 for _, a in lin.coeffs)


def _le_str(f: Le) -> str:
    if isinstance(f.lhs, Lin) or isinstance(f.rhs, Lin):
        pos, neg = nonneg_split(f.lin())
        return f"{lin_str(pos)} <= {lin_str(neg)}"
    return f"{term_str(f.lhs)} <= {term_str(f.rhs)}"
