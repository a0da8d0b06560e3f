"""Semi-linear sets and hard-coding constant vectors into formulas."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .formula import (
    FALSE,
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
    eq,
    exists,
    fresh_name,
    free_vars,
    rename_bound_apart,
)
from .intsolve import is_satisfiable
from .terms import ZERO, Add, Lin, Term, Var, const_term, linear, scale_term, substitute_term, sum_terms

Vector = Tuple[int, ...]


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class LinearSet:
    """``{ base + sum n_j * periods[j] : n_j >= 0 }``."""
    base: Vector
    periods: Tuple[Vector, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.base)


@dataclass(frozen=True)
class SemiLinearSet:
    dim: int
    components: Tuple[LinearSet, ...] = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple(
            LinearSet(tuple(c.base), tuple(tuple(p) for p in c.periods)) for c in self.components
        )
        for c in comps:
            if len(c.base) != self.dim or any(len(p) != self.dim for p in c.periods):
                raise DimensionError(f"component {c} does not have dimension {self.dim}")
        object.__setattr__(self, "components", comps)

    @staticmethod
    def single(base: Sequence[int], periods: Sequence[Sequence[int]] = ()) -> "SemiLinearSet":
        return SemiLinearSet(len(base), (LinearSet(tuple(base), tuple(tuple(p) for p in periods)),))


def default_names(d: int) -> List[str]:
    return [f"x{i + 1}" for i in range(d)]


def _signed_sum(items: Sequence[Tuple[int, Term]]) -> Tuple[Term, Term]:
    """Split ``sum(c * t)`` into (positive part, negative part) surface terms."""
    pos, neg = [], []
    for c, t in items:
        if c > 0:
            pos.append(scale_term(t, c))
        elif c < 0:
            neg.append(scale_term(t, -c))
    return sum_terms(pos), sum_terms(neg)


def semilinear_to_formula(S: SemiLinearSet, names: Optional[Sequence[str]] = None) -> Formula:
    """Existential formula whose models over ``names`` are the members of ``S``."""
    names = list(names) if names is not None else default_names(S.dim)
    if len(names) != S.dim:
        raise DimensionError(f"expected {S.dim} variable names, got {len(names)}")
    avoid = set(names)
    parts = []
    for comp in S.components:
        mult = []
        for _ in comp.periods:
            m = fresh_name(avoid, "n")
            avoid.add(m)
            mult.append(m)
        body = []
        for k, tau in enumerate(names):
            # tau_k = base_k + sum_j m_j * p_j[k]; negatives go to the left side
            items = [(comp.base[k], const_term(1))] + [(p[k], Var(m)) for p, m in zip(comp.periods, mult)]
            pos, neg = _signed_sum(items)
            body.append(eq(Add(Var(tau), neg) if neg != ZERO else Var(tau), pos))
        body.extend(Le(ZERO, Var(m)) for m in mult)
        parts.append(exists(mult, conj(*body)))
    if not parts:
        return FALSE
    return disj(*parts)


def member_semilinear(S: SemiLinearSet, v: Sequence[int]) -> bool:
    if len(v) != S.dim:
        raise DimensionError(f"vector {tuple(v)} does not have dimension {S.dim}")
    names = default_names(S.dim)
    return is_satisfiable(substitute_constants(semilinear_to_formula(S, names), v, names))


def member_bruteforce(S: SemiLinearSet, v: Sequence[int], max_mult: int) -> bool:
    """Membership with period multipliers limited to ``[0, max_mult]`` (test oracle)."""
    import itertools
    v = tuple(v)
    for comp in S.components:
        for ns in itertools.product(range(max_mult + 1), repeat=len(comp.periods)):
            point = tuple(
                comp.base[k] + sum(n * p[k] for n, p in zip(ns, comp.periods)) for k in range(S.dim)
            )
            if point == v:
                return True
    return False


# ------------------------------------------------------------ constants

def substitute_constants(psi: Formula, v: Sequence[int], names: Optional[Sequence[str]] = None) -> Formula:
    """Replace the free variables ``names`` (default x1..xd) by the constants ``v``.

    Each constant is written with 1, + and doubling.  A variable mapped to a
    negative value is removed from its side of the comparison and the absolute
    value is added to the other side, so no negative literal is ever needed.
    """
    names = list(names) if names is not None else default_names(len(v))
    if len(names) != len(v):
        raise DimensionError(f"{len(v)} values for {len(names)} variables")
    extra = free_vars(psi) - set(names)
    if extra:
        raise DimensionError(f"formula has free variables outside {names}: {sorted(extra)}")
    values = dict(zip(names, (int(a) for a in v)))
    return _hardcode(rename_bound_apart(psi, names), values)


def _hardcode(f: Formula, values) -> Formula:
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Le):
        return _hardcode_le(f, values)
    if isinstance(f, Dvd):
        lin = linear(f.term)
        for x, c in values.items():
            lin = lin.substitute(x, Lin.constant(c))
        return Dvd(f.modulus, lin)
    if isinstance(f, Not):
        return Not(_hardcode(f.arg, values))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_hardcode(a, values) for a in f.args))
    if isinstance(f, (Exists, Forall)):
        inner = {k: c for k, c in values.items() if k != f.var}
        return type(f)(f.var, _hardcode(f.body, inner))
    raise TypeError(f)


def _hardcode_le(f: Le, values) -> Formula:
    lhs, rhs = f.lhs, f.rhs
    if isinstance(lhs, Lin) or isinstance(rhs, Lin):
        # internal atoms: go through the linear form and print back via signs
        lin = f.lin()
        for x, c in values.items():
            lin = lin.substitute(x, Lin.constant(c))
        return Le(lin, ZERO)
    lcoef, rcoef = linear(lhs), linear(rhs)
    pos_map = {}
    neg_vals = {}
    for x, c in values.items():
        if lcoef.coef(x) == 0 and rcoef.coef(x) == 0:
            continue
        if c >= 0:
            pos_map[x] = const_term(c)
        else:
            pos_map[x] = ZERO
            neg_vals[x] = -c
    if not pos_map:
        return f
    new_l = substitute_term(lhs, pos_map)
    new_r = substitute_term(rhs, pos_map)
    for x, n in neg_vals.items():
        t = const_term(n)
        # cl*x on the left becomes cl*n on the right, and vice versa
        if rcoef.coef(x):
            new_l = Add(new_l, scale_term(t, rcoef.coef(x)))
        if lcoef.coef(x):
            new_r = Add(new_r, scale_term(t, lcoef.coef(x)))
    return Le(_drop_zero(new_l), _drop_zero(new_r))


def _drop_zero(t: Term) -> Term:
    if isinstance(t, Add):
        a, b = _drop_zero(t.left), _drop_zero(t.right)
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        return Add(a, b)
    return t
