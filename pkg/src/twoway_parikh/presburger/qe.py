"""Cooper's quantifier elimination.

All work happens on quantifier-free formulas in negation normal form whose
atoms are ``lin <= 0``, ``m | lin`` and ``~(m | lin)`` with ``lin`` a
:class:`Lin`.  The simplifier only folds constants, normalises atoms and keeps
the tightest (resp. loosest) bound per coefficient vector in conjunctions
(resp. disjunctions); it never changes the meaning of a formula.
"""
from __future__ import annotations

from functools import lru_cache
from math import gcd
from typing import Dict, List, Mapping, Tuple

from .formula import (
    FALSE,
    TRUE,
    And,
    Dvd,
    Exists,
    FalseF,
    Forall,
    Formula,
    Le,
    Not,
    Or,
    TrueF,
    conj,
    disj,
    free_vars,
    is_quantifier_free,
    negate,
    nnf,
)
from .terms import ZERO, Lin


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


# ------------------------------------------------------------ atoms

def norm_le(lin: Lin) -> Formula:
    if not lin.coeffs:
        return TRUE if lin.const <= 0 else FALSE
    g = 0
    for _, a in lin.coeffs:
        g = gcd(g, a)
    g = abs(g)
    if g > 1:
        # sum(a/g x) <= -c/g  <=>  sum(a/g x) + ceil(c/g) <= 0
        lin = Lin(tuple((v, a // g) for v, a in lin.coeffs), -((-lin.const) // g))
    return Le(lin, ZERO)


def norm_dvd(m: int, lin: Lin, positive: bool = True) -> Formula:
    m = abs(m)
    if m == 0:
        raise ValueError("modulus must be nonzero")
    lin = Lin.of({v: a % m for v, a in lin.coeffs}, lin.const % m)
    g = m
    for _, a in lin.coeffs:
        g = gcd(g, a)
    g = gcd(g, lin.const)
    if g > 1:
        m //= g
        lin = Lin(tuple((v, a // g) for v, a in lin.coeffs), lin.const // g)
    if m == 1:
        res: Formula = TRUE
    elif not lin.coeffs:
        res = TRUE if lin.const % m == 0 else FALSE
    else:
        res = Dvd(m, lin)
    if positive:
        return res
    if isinstance(res, TrueF):
        return FALSE
    if isinstance(res, FalseF):
        return TRUE
    return Not(res)


def normalize(f: Formula) -> Formula:
    """Canonical quantifier-free NNF with normalised atoms and light simplification."""
    return _simp(nnf(f))


def _simp(f: Formula) -> Formula:
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Le):
        return norm_le(f.lin())
    if isinstance(f, Dvd):
        return norm_dvd(f.modulus, f.lin())
    if isinstance(f, Not):
        a = f.arg
        if isinstance(a, Dvd):
            return norm_dvd(a.modulus, a.lin(), positive=False)
        return _simp(negate(a))
    if isinstance(f, And):
        return _tighten(conj(*[_simp(a) for a in f.args]), True)
    if isinstance(f, Or):
        return _tighten(disj(*[_simp(a) for a in f.args]), False)
    if isinstance(f, Exists):
        return Exists(f.var, _simp(f.body))
    if isinstance(f, Forall):
        return Forall(f.var, _simp(f.body))
    raise TypeError(f)


def _tighten(f: Formula, is_and: bool = True) -> Formula:
    # the connective is read off the node; disj/conj may collapse to one argument
    if not isinstance(f, (And, Or)):
        return f
    is_and = isinstance(f, And)
    best: Dict[tuple, int] = {}
    rest: List[Formula] = []
    for a in f.args:
        if isinstance(a, Le) and isinstance(a.lhs, Lin):
            key = a.lhs.coeffs
            c = a.lhs.const
            if key in best:
                best[key] = max(best[key], c) if is_and else min(best[key], c)
            else:
                best[key] = c
        else:
            rest.append(a)
    if not best:
        return f
    # contradiction / tautology between opposite bounds  a <= -c1 and -a <= -c2
    for key, c in best.items():
        neg = tuple((v, -a) for v, a in key)
        if neg in best:
            c2 = best[neg]
            # key.x + c <= 0 and -key.x + c2 <= 0  => c2 <= key.x <= -c
            if is_and and c2 > -c:
                return FALSE
            # key.x + c <= 0 or -key.x + c2 <= 0 always true when c2 <= -c + 1... i.e. the gap is empty
            if not is_and and c2 <= -c + 1:
                return TRUE
    atoms = [Le(Lin(k, c), ZERO) for k, c in best.items()]
    return (conj if is_and else disj)(*(atoms + rest))


# ------------------------------------------------------------ substitution

def subst(f: Formula, x: str, value: Lin) -> Formula:
    """Replace ``x`` by a linear term in a normalised quantifier-free formula."""
    if isinstance(f, Le):
        lin = f.lin()
        if lin.coef(x) == 0:
            return f
        return norm_le(lin.substitute(x, value))
    if isinstance(f, Dvd):
        lin = f.lin()
        if lin.coef(x) == 0:
            return f
        return norm_dvd(f.modulus, lin.substitute(x, value))
    if isinstance(f, Not):
        a = f.arg
        lin = a.lin()
        if lin.coef(x) == 0:
            return f
        return norm_dvd(a.modulus, lin.substitute(x, value), positive=False)
    if isinstance(f, And):
        parts = []
        for a in f.args:
            s = subst(a, x, value)
            if isinstance(s, FalseF):
                return FALSE
            parts.append(s)
        return conj(*parts)
    if isinstance(f, Or):
        parts = []
        for a in f.args:
            s = subst(a, x, value)
            if isinstance(s, TrueF):
                return TRUE
            parts.append(s)
        return disj(*parts)
    return f


def _literal_lin(f: Formula):
    if isinstance(f, Le):
        return f.lin()
    if isinstance(f, Dvd):
        return f.lin()
    if isinstance(f, Not):
        return f.arg.lin()
    return None


def _literals(f: Formula, out: List[Formula]):
    if isinstance(f, (And, Or)):
        for a in f.args:
            _literals(a, out)
    elif isinstance(f, (Le, Dvd, Not)):
        out.append(f)


def _map_literals(f: Formula, fn) -> Formula:
    if isinstance(f, And):
        return conj(*[_map_literals(a, fn) for a in f.args])
    if isinstance(f, Or):
        return disj(*[_map_literals(a, fn) for a in f.args])
    if isinstance(f, (Le, Dvd, Not)):
        return fn(f)
    return f


# ------------------------------------------------------------ Cooper

def cooper_eliminate_one(f: Formula) -> Formula:
    """Eliminate the outermost existential of ``exists x. qf``."""
    if not isinstance(f, Exists):
        raise ValueError("expected an existential formula")
    if not is_quantifier_free(f.body):
        raise ValueError("body must be quantifier-free")
    return exists_qf(f.var, normalize(f.body))


def exists_qf(x: str, f: Formula) -> Formula:
    """Quantifier-free equivalent of ``exists x. f`` for normalised qf ``f``."""
    if x not in free_vars(f):
        return f
    if isinstance(f, Or):
        return _tighten(disj(*[exists_qf(x, a) for a in f.args]), False)
    if isinstance(f, And):
        inside = [a for a in f.args if x in free_vars(a)]
        outside = [a for a in f.args if x not in free_vars(a)]
        if outside:
            return _tighten(conj(*outside, exists_qf(x, conj(*inside))), True)
        shortcut = _equality_shortcut(x, inside)
        if shortcut is not None:
            return shortcut
    return _cooper(x, f)


def _equality_shortcut(x: str, parts: List[Formula]):
    """Use an equation with a unit coefficient of ``x`` to substitute it away."""
    les = {}
    for a in parts:
        if isinstance(a, Le):
            les[a.lin()] = a
    for lin in les:
        c = lin.coef(x)
        if abs(c) != 1:
            continue
        if lin.scale(-1) in les:
            # c*x + r = 0  =>  x = -c*r
            r = lin.without(x)
            value = r.scale(-c)
            return normalize(conj(*[subst(a, x, value) for a in parts]))
    return None


def _cooper(x: str, f: Formula) -> Formula:
    lits: List[Formula] = []
    _literals(f, lits)
    coefs = [abs(_literal_lin(l).coef(x)) for l in lits if _literal_lin(l).coef(x) != 0]
    if not coefs:
        return f
    big = 1
    for c in coefs:
        big = _lcm(big, c)

    def unit(l: Formula) -> Formula:
        lin = _literal_lin(l)
        a = lin.coef(x)
        if a == 0:
            return l
        k = big // abs(a)
        scaled = lin.without(x).scale(k).plus(Lin.var(x, 1 if a > 0 else -1))
        if isinstance(l, Le):
            return Le(scaled, ZERO)
        if isinstance(l, Dvd):
            return Dvd(l.modulus * k, scaled)
        return Not(Dvd(l.arg.modulus * k, scaled))

    g = _map_literals(f, unit)
    if big > 1:
        g = conj(g, Dvd(big, Lin.var(x)))

    lits = []
    _literals(g, lits)
    lower, upper = [], []
    delta = 1
    for l in lits:
        lin = _literal_lin(l)
        a = lin.coef(x)
        if a == 0:
            continue
        if isinstance(l, Le):
            rest = lin.without(x)
            if a < 0:
                lower.append(rest)            # x >= rest
            else:
                upper.append(rest.scale(-1))  # x <= -rest
        else:
            m = l.modulus if isinstance(l, Dvd) else l.arg.modulus
            delta = _lcm(delta, m)
    lower = list(dict.fromkeys(lower))
    upper = list(dict.fromkeys(upper))

    use_lower = len(lower) <= len(upper)

    def infinite(l: Formula) -> Formula:
        if isinstance(l, Le):
            a = l.lin().coef(x)
            if a == 0:
                return l
            if use_lower:
                # x -> -infinity: lower bounds fail, upper bounds hold
                return FALSE if a < 0 else TRUE
            return TRUE if a < 0 else FALSE
        return l

    inf = _map_literals(g, infinite)
    out: List[Formula] = []
    for j in range(delta):
        point = Lin.constant(j if use_lower else -j)
        s = subst(inf, x, point)
        if isinstance(s, TrueF):
            return TRUE
        out.append(s)
    for b in (lower if use_lower else upper):
        for j in range(delta):
            point = b.shift(j if use_lower else -j)
            s = subst(g, x, point)
            if isinstance(s, TrueF):
                return TRUE
            out.append(s)
    return _tighten(disj(*out), False)


# ------------------------------------------------------------ full elimination

def eliminate_all(f: Formula) -> Formula:
    """Quantifier-free formula equivalent to ``f``.

    Quantifiers are removed innermost first; a universal ``forall x. g`` is
    treated as ``~exists x. ~g``.  Existentials are pushed through
    disjunctions and past conjuncts that do not mention the variable before
    Cooper's step is applied.
    """
    return _elim(normalize(f))


@lru_cache(maxsize=4096)
def _elim(f: Formula) -> Formula:
    if isinstance(f, (And, Or)):
        parts = [_elim(a) for a in f.args]
        return _tighten((conj if isinstance(f, And) else disj)(*parts), isinstance(f, And))
    if isinstance(f, Exists):
        return exists_qf(f.var, _elim(f.body))
    if isinstance(f, Forall):
        body = _elim(f.body)
        return normalize(negate(exists_qf(f.var, normalize(negate(body)))))
    return f


def is_satisfied_ground(f: Formula, env: Mapping[str, int]) -> bool:
    """Truth of ``f`` (quantifiers allowed) under a valuation of its free variables."""
    from .formula import eval_ground
    if is_quantifier_free(f):
        return eval_ground(f, env)
    return eval_ground(_qf_cached(f), env)


@lru_cache(maxsize=1024)
def _qf_cached(f: Formula) -> Formula:
    return eliminate_all(f)
