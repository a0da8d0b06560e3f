"""Exact satisfiability (with models) for existential Presburger formulas.

Two layers:

* :func:`solve_system` decides a conjunction of linear equations and
  inequalities over the integers and returns a model.  Equations are
  eliminated by substitution (with the symmetric-residue trick when no
  coefficient is a unit), inequalities by exact Fourier-Motzkin steps when a
  unit coefficient makes the real shadow exact, and otherwise by splitting on
  the value of the least feasible solution.  Every step is an equivalence, so
  "no model" is a proof of unsatisfiability.

* :func:`find_model` handles arbitrary and/or structure by a model-guided
  case split: solve the literals collected so far, and only branch on a
  disjunction that the current model falsifies.
"""
from __future__ import annotations

import itertools
from math import gcd
from typing import Dict, List, Optional, Tuple

from .formula import (
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
    eval_ground,
    free_vars,
    nnf,
    rename_bound_apart,
)

Coeffs = Dict[str, int]
Cons = Tuple[Coeffs, int]  # sum(coeffs) + const (= 0 or <= 0)

_fresh = itertools.count()


def _new_var(tag: str) -> str:
    return f"_{tag}{next(_fresh)}"


class SolverLimit(RuntimeError):
    """Raised when the search exceeds its node budget."""


# ------------------------------------------------------------ linear algebra helpers

def _subst(c: Cons, x: str, expr: Cons) -> Cons:
    coeffs, const = c
    a = coeffs.get(x, 0)
    if a == 0:
        return c
    out = dict(coeffs)
    del out[x]
    for v, b in expr[0].items():
        nb = out.get(v, 0) + a * b
        if nb:
            out[v] = nb
        else:
            out.pop(v, None)
    return out, const + a * expr[1]


def _eval(c: Cons, model: Dict[str, int]) -> int:
    total = c[1]
    for v, a in c[0].items():
        total += a * model.setdefault(v, 0)
    return total


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def _modhat(a: int, m: int) -> int:
    # symmetric residue in (-m/2, m/2]
    return a - m * ((2 * a + m) // (2 * m))


# ------------------------------------------------------------ conjunction solver

def solve_system(eqs: List[Cons], les: List[Cons]) -> Optional[Dict[str, int]]:
    """Integer model of ``eqs (= 0)`` and ``les (<= 0)`` or ``None``."""
    return _solve([(dict(c), k) for c, k in eqs], [(dict(c), k) for c, k in les])


def _solve(eqs: List[Cons], les: List[Cons]) -> Optional[Dict[str, int]]:
    trail: list = []
    while True:
        # equations
        neweqs = []
        for coeffs, const in eqs:
            coeffs = {v: a for v, a in coeffs.items() if a}
            if not coeffs:
                if const != 0:
                    return None
                continue
            g = 0
            for a in coeffs.values():
                g = gcd(g, a)
            if const % g:
                return None
            if g > 1:
                coeffs = {v: a // g for v, a in coeffs.items()}
                const //= g
            neweqs.append((coeffs, const))
        eqs = neweqs
        if eqs:
            pick = None
            for i, (coeffs, const) in enumerate(eqs):
                for v, a in coeffs.items():
                    if a in (1, -1):
                        pick = (i, v, a)
                        break
                if pick:
                    break
            if pick:
                i, x, a = pick
                coeffs, const = eqs[i]
                # a*x + rest = 0  =>  x = -a * rest
                expr = ({v: -a * b for v, b in coeffs.items() if v != x}, -a * const)
                eqs = [_subst(c, x, expr) for j, c in enumerate(eqs) if j != i]
                les = [_subst(c, x, expr) for c in les]
                trail.append(("def", x, expr))
                continue
            # no unit coefficient: symmetric-residue substitution
            i, (coeffs, const) = min(enumerate(eqs), key=lambda e: min(abs(a) for a in e[1][0].values()))
            x, a = min(coeffs.items(), key=lambda kv: abs(kv[1]))
            m = abs(a) + 1
            sigma = _new_var("s")
            sgn = 1 if a > 0 else -1
            # m*sigma = sum(modhat(a_i) x_i) + modhat(c), modhat(a) = -sgn
            ex = {v: sgn * _modhat(b, m) for v, b in coeffs.items() if v != x}
            ex[sigma] = -sgn * m
            expr = (ex, sgn * _modhat(const, m))
            eqs = [_subst(c, x, expr) for c in eqs]
            les = [_subst(c, x, expr) for c in les]
            trail.append(("def", x, expr))
            continue

        # inequalities: normalise, merge, detect equalities
        best: Dict[tuple, Tuple[Coeffs, int]] = {}
        for coeffs, const in les:
            coeffs = {v: a for v, a in coeffs.items() if a}
            if not coeffs:
                if const > 0:
                    return None
                continue
            g = 0
            for a in coeffs.values():
                g = gcd(g, a)
            g = abs(g)
            if g > 1:
                coeffs = {v: a // g for v, a in coeffs.items()}
                const = _ceil_div(const, g)
            key = tuple(sorted(coeffs.items()))
            old = best.get(key)
            if old is None or const > old[1]:
                best[key] = (coeffs, const)
        found_eq = None
        for key, (coeffs, const) in best.items():
            nkey = tuple((v, -a) for v, a in key)
            other = best.get(nkey)
            if other is not None:
                c2 = other[1]
                # key.x <= -const and key.x >= c2
                if c2 > -const:
                    return None
                if c2 == -const:
                    found_eq = (key, nkey, (coeffs, const))
                    break
        if found_eq:
            key, nkey, cons = found_eq
            del best[key]
            del best[nkey]
            eqs = [cons]
            les = list(best.values())
            continue
        les = list(best.values())
        if not les:
            break

        lower: Dict[str, List[Cons]] = {}
        upper: Dict[str, List[Cons]] = {}
        for c in les:
            for v, a in c[0].items():
                (lower if a < 0 else upper).setdefault(v, []).append(c)
        variables = set(lower) | set(upper)
        one_sided = [v for v in variables if v not in lower or v not in upper]
        if one_sided:
            x = min(one_sided)
            involved = lower.get(x, []) + upper.get(x, [])
            ids = {id(c) for c in involved}
            les = [c for c in les if id(c) not in ids]
            trail.append(("bound", x, involved))
            continue
        best_var = None
        best_cost = None
        for v in sorted(variables):
            lo, up = lower[v], upper[v]
            exact = all(c[0][v] == -1 for c in lo) or all(c[0][v] == 1 for c in up)
            if not exact:
                continue
            cost = len(lo) * len(up) - len(lo) - len(up)
            if best_cost is None or cost < best_cost:
                best_var, best_cost = v, cost
        if best_var is not None:
            x = best_var
            lo, up = lower[x], upper[x]
            ids = {id(c) for c in lo + up}
            rest = [c for c in les if id(c) not in ids]
            for cl in lo:
                al = -cl[0][x]
                for cu in up:
                    au = cu[0][x]
                    # au*(cl) + al*(cu) eliminates x
                    coeffs: Coeffs = {}
                    for v, b in cl[0].items():
                        if v != x:
                            coeffs[v] = coeffs.get(v, 0) + au * b
                    for v, b in cu[0].items():
                        if v != x:
                            coeffs[v] = coeffs.get(v, 0) + al * b
                    rest.append((coeffs, au * cl[1] + al * cu[1]))
            les = rest
            trail.append(("bound", x, lo + up))
            continue
        # no exact elimination: split on the least solution of one variable
        x = min(variables, key=lambda v: sum(-c[0][v] for c in lower[v]))
        for cl in lower[x]:
            alpha = -cl[0][x]
            rest = {v: b for v, b in cl[0].items() if v != x}
            for r in range(alpha):
                # alpha*x = rest + const + r  (x is the least value meeting this bound)
                eq = (dict({x: -alpha}, **rest), cl[1] + r)
                sub = _solve([eq], [(dict(c[0]), c[1]) for c in les])
                if sub is not None:
                    return _unwind(trail, sub)
        return None
    return _unwind(trail, {})


def _unwind(trail, model: Dict[str, int]) -> Dict[str, int]:
    for entry in reversed(trail):
        if entry[0] == "def":
            _, x, expr = entry
            model[x] = _eval(expr, model)
        else:
            _, x, cons = entry
            lo, hi = None, None
            for coeffs, const in cons:
                a = coeffs[x]
                t = const
                for v, b in coeffs.items():
                    if v != x:
                        t += b * model.setdefault(v, 0)
                if a < 0:
                    val = _ceil_div(t, -a)
                    lo = val if lo is None else max(lo, val)
                else:
                    val = (-t) // a
                    hi = val if hi is None else min(hi, val)
            if lo is not None:
                if hi is not None and lo > hi:
                    raise AssertionError("inexact elimination step")
                model[x] = lo
            elif hi is not None:
                model[x] = hi
            else:
                model[x] = 0
    return model


# ------------------------------------------------------------ formulas

def _strip_existentials(f: Formula) -> Formula:
    """Drop positive existential binders (names are already distinct)."""
    if isinstance(f, Exists):
        return _strip_existentials(f.body)
    if isinstance(f, And):
        return And(tuple(_strip_existentials(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_strip_existentials(a) for a in f.args))
    if isinstance(f, Forall):
        from .qe import eliminate_all
        return eliminate_all(f)
    return f


def prepare(f: Formula) -> Formula:
    """Quantifier-free formula equisatisfiable with ``f`` over the same free variables.

    Universal subformulas are eliminated by Cooper's method; existential
    binders in positive position become fresh free variables.
    """
    from .qe import normalize
    g = rename_bound_apart(nnf(f))
    g = _strip_existentials(g)
    return normalize(g)


def _literal_constraints(lit: Formula, eqs: List[Cons], les: List[Cons]) -> bool:
    """Append the constraints of a literal; False if it is trivially false."""
    if isinstance(lit, TrueF):
        return True
    if isinstance(lit, FalseF):
        return False
    if isinstance(lit, Le):
        lin = lit.lin()
        les.append((dict(lin.coeffs), lin.const))
        return True
    if isinstance(lit, Dvd):
        lin = lit.lin()
        y = _new_var("q")
        c = dict(lin.coeffs)
        c[y] = c.get(y, 0) - lit.modulus
        eqs.append((c, lin.const))
        return True
    if isinstance(lit, Not) and isinstance(lit.arg, Dvd):
        m = lit.arg.modulus
        lin = lit.arg.lin()
        y, r = _new_var("q"), _new_var("r")
        c = dict(lin.coeffs)
        c[y] = -m
        c[r] = -1
        eqs.append((c, lin.const))
        les.append(({r: -1}, 1))
        les.append(({r: 1}, -(m - 1)))
        return True
    raise TypeError(f"not a literal: {lit!r}")


class _Budget:
    def __init__(self, limit):
        self.left = limit

    def tick(self):
        if self.left is not None:
            self.left -= 1
            if self.left < 0:
                raise SolverLimit("case-split budget exhausted")


def find_model(f: Formula, limit: Optional[int] = None) -> Optional[Dict[str, int]]:
    """A valuation of the free variables (and of existential witnesses) satisfying ``f``.

    Returns ``None`` exactly when ``f`` is unsatisfiable.  Names of existential
    variables are kept when they do not clash, so callers can read witnesses.
    """
    g = prepare(f)
    if isinstance(g, FalseF):
        return None
    model = _search([], [], [g], _Budget(limit))
    if model is None:
        return None
    for v in free_vars(g):
        model.setdefault(v, 0)
    if not eval_ground(g, model):
        raise AssertionError("solver produced a non-model")
    return model


def _search(eqs, les, pending, budget):
    budget.tick()
    eqs, les = list(eqs), list(les)
    todo = list(pending)
    rest: List[Formula] = []
    while todo:
        p = todo.pop()
        if isinstance(p, And):
            todo.extend(p.args)
        elif isinstance(p, Or):
            rest.append(p)
        else:
            if not _literal_constraints(p, eqs, les):
                return None
    model = solve_system(eqs, les)
    if model is None:
        return None
    violated = []
    for p in rest:
        for v in free_vars(p):
            model.setdefault(v, 0)
        if not eval_ground(p, model):
            violated.append(p)
    if not violated:
        return model
    choice = min(violated, key=lambda p: len(p.args))
    others = [p for p in rest if p is not choice]
    for option in choice.args:
        sub = _search(eqs, les, others + [option], budget)
        if sub is not None:
            return sub
    return None


def is_satisfiable(f: Formula) -> bool:
    """Whether some integer valuation of the free variables satisfies ``f``."""
    return find_model(f) is not None


def is_valid(f: Formula) -> bool:
    """Whether every integer valuation of the free variables satisfies ``f``."""
    from .formula import negate
    return find_model(negate(f)) is None
