"""Presburger arithmetic: formulas, parsing, quantifier elimination, satisfiability."""
from .terms import Add, Dbl, Lin, One, Term, Var, Zero, ONE, ZERO, const_term, linear, scale_term, term_str
from .formula import (
    FALSE,
    TRUE,
    And,
    Dvd,
    Exists,
    FalseF,
    Forall,
    Formula,
    FormulaError,
    Le,
    Not,
    Or,
    TrueF,
    atoms,
    classify,
    conj,
    disj,
    eq,
    eval_ground,
    exists,
    forall,
    free_vars,
    iff,
    implies,
    is_quantifier_free,
    le,
    lt,
    negate,
    nnf,
    prenex,
    substitute,
    to_str,
)
from .parser import ParseError, parse_formula, parse_term
from .qe import cooper_eliminate_one, eliminate_all, is_satisfied_ground, normalize
from .intsolve import SolverLimit, find_model, is_satisfiable, is_valid, solve_system
from .semilinear import (
    DimensionError,
    LinearSet,
    SemiLinearSet,
    member_semilinear,
    semilinear_to_formula,
    substitute_constants,
)
