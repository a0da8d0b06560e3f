"""Parikh images of one-way automata as existential Presburger formulas.

The image of an NFA is described by its edge flows: a variable per edge
counts how often a run uses it, every node is balanced (in = out, except
one unit entering at an initial node and leaving at a final one), and the
used part must be connected to the start, which distance variables ``z``
enforce.  Counting the flow per label gives the Parikh vector.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .core import TwoWayParikhAutomaton, WordError, var_names
from .nfa import NFA, TooLarge, from_one_way, letters_of
from .presburger import (
    ONE,
    TRUE,
    ZERO,
    Formula,
    Var,
    conj,
    disj,
    eq,
    exists,
    le,
    scale_term,
    substitute,
)
from .presburger.terms import sum_terms

# subset construction is a heuristic size reduction; give up on it past this size
DETERMINIZE_CAP = 400


def parikh_vector(w: Sequence[str], alphabet: Sequence[str]) -> Tuple[int, ...]:
    counts = Counter(w)
    extra = set(counts) - set(alphabet)
    if extra:
        raise WordError(f"symbol {sorted(extra)[0]!r} is not in the alphabet")
    return tuple(counts[a] for a in alphabet)


@dataclass
class FlowEncoding:
    """The flow formula together with its variable naming (used to read models back)."""
    formula: Formula
    nfa: NFA
    edge_vars: List[str]          # parallel to nfa.edges
    start_vars: Dict[Hashable, str]
    final_vars: Dict[Hashable, str]


def _sum(names: Sequence[str]):
    return sum_terms([Var(n) for n in names]) if names else ZERO


def flow_formula(nfa: NFA, counters: Dict[Hashable, str], prefix: str = "f",
                 connected: bool = True) -> FlowEncoding:
    """Existential formula over the counter names whose models are the label counts of accepted words.

    ``counters`` maps a label to the free variable counting it; labels not in
    the map (and ``None``) are not counted.  Several labels may share a counter.
    With ``connected=False`` the connectivity part is left out, which gives a
    weaker formula (a superset of the image) that is cheaper to refute.
    """
    nfa = nfa.trim()
    node_id = {q: i for i, q in enumerate(nfa.states)}
    y = [f"{prefix}y{i}" for i in range(len(nfa.edges))]
    s = {q: f"{prefix}s{node_id[q]}" for q in nfa.initial}
    f = {q: f"{prefix}e{node_id[q]}" for q in nfa.final}
    z = {q: f"{prefix}z{node_id[q]}" for q in nfa.states}
    parts: List[Formula] = []
    for v in y + list(s.values()) + list(f.values()):
        parts.append(le(ZERO, Var(v)))
    parts.append(eq(_sum(list(s.values())), ONE))
    parts.append(eq(_sum(list(f.values())), ONE))
    ins: Dict[Hashable, List[int]] = {q: [] for q in nfa.states}
    outs: Dict[Hashable, List[int]] = {q: [] for q in nfa.states}
    for i, (u, _, v) in enumerate(nfa.edges):
        outs[u].append(i)
        ins[v].append(i)
    for q in nfa.states:
        lhs = [y[i] for i in ins[q]] + ([s[q]] if q in s else [])
        rhs = [y[i] for i in outs[q]] + ([f[q]] if q in f else [])
        parts.append(eq(_sum(lhs), _sum(rhs)))
        if not connected:
            continue
        # connectivity: unused, or a start node, or fed by a used edge from a closer node
        options = [eq(_sum(lhs), ZERO)]
        if q in s:
            options.append(le(ONE, Var(s[q])))
        for i in ins[q]:
            u = nfa.edges[i][0]
            if u != q:
                options.append(conj(le(ONE, Var(y[i])), le(Var(z[u]) + ONE, Var(z[q]))))
        parts.append(disj(*options))
    by_counter: Dict[str, List[str]] = {}
    for name in dict.fromkeys(counters.values()):
        by_counter[name] = []
    for i, (_, a, _) in enumerate(nfa.edges):
        if a is not None and a in counters:
            by_counter[counters[a]].append(y[i])
    for name, ys in by_counter.items():
        parts.append(eq(Var(name), _sum(ys)))
    bound = y + list(s.values()) + list(f.values()) + (list(z.values()) if connected else [])
    return FlowEncoding(exists(bound, conj(*parts)), nfa, y, s, f)


def _shrink(nfa: NFA) -> NFA:
    """Determinize and minimize when that stays small; otherwise just trim."""
    nfa = nfa.trim()
    try:
        d = nfa.determinize(cap=DETERMINIZE_CAP)
    except TooLarge:
        return nfa
    m = d.trim().minimize().trim()
    return m if len(m.states) <= len(nfa.states) or not nfa.states else nfa


def parikh_image_formula(N: TwoWayParikhAutomaton, names: Optional[Sequence[str]] = None,
                         letters: Optional[Sequence[str]] = None) -> Formula:
    """Formula over ``t1..tγ`` (or ``names``) defining the Parikh image of ``L(N)``.

    ``letters`` fixes the order of the counted alphabet (default ``N.alphabet``).
    The constraint of ``N`` is ignored: this is the image of the underlying automaton.
    """
    if not N.is_one_way:
        raise ValueError("parikh_image_formula needs a one-way automaton")
    letters = list(N.alphabet if letters is None else letters)
    names = list(names) if names is not None else [f"t{j + 1}" for j in range(len(letters))]
    if len(names) != len(letters):
        raise ValueError("one counter name per letter is required")
    nfa = letters_of(N)
    return flow_formula(nfa, dict(zip(letters, names))).formula


# ------------------------------------------------------------ weight-vector view

@dataclass
class VectorAlphabetView:
    """Transitions of a one-way PA relabeled by their weight vector.

    ``vectors`` is the ordered list of distinct weights; label ``j`` of
    ``nfa`` stands for ``vectors[j]``.  Endmarker moves carry labels too,
    so every accepted label word has two more letters than the input.
    """
    vectors: List[Tuple[int, ...]]
    nfa: NFA
    automaton: TwoWayParikhAutomaton

    @property
    def gamma(self) -> int:
        return len(self.vectors)

    @staticmethod
    def of(P: TwoWayParikhAutomaton, key=None) -> "VectorAlphabetView":
        """``key(t)`` may refine labels beyond the vector (used for witness search)."""
        if not P.is_one_way:
            raise ValueError("expected a one-way automaton")
        key = key or (lambda t: t.vector)
        labels: Dict[Hashable, int] = {}
        for t in P.transitions:
            labels.setdefault(key(t), len(labels))
        nfa = from_one_way(P, lambda t: labels[key(t)])
        return VectorAlphabetView(list(labels), nfa, P)


def _weight_parts(view: VectorAlphabetView, taus: List[str], cs: List[str], vector_of) -> List[Formula]:
    out = []
    d = len(cs)
    for k in range(d):
        pos, neg = [], []
        for j, lab in enumerate(view.vectors):
            a = vector_of(lab)[k]
            if a > 0:
                pos.append(scale_term(Var(taus[j]), a))
            elif a < 0:
                neg.append(scale_term(Var(taus[j]), -a))
        out.append(eq(sum_terms([Var(cs[k])] + neg), sum_terms(pos) if pos else ZERO))
    return out


def _glue(P: TwoWayParikhAutomaton, view: VectorAlphabetView, length_labels, length_offset: int,
          length_var: str, vector_of, connected: bool = True) -> Tuple[Formula, FlowEncoding]:
    """``∃τ ∃c [ξ(τ) ∧ ψ(c) ∧ ℓ + offset = Σ τ_j (j counted) ∧ c = Σ τ_j a_j]``."""
    gamma = view.gamma
    taus = [f"t{j + 1}" for j in range(gamma)]
    cs = [f"c{k + 1}" for k in range(P.dimension)]
    enc = flow_formula(_shrink(view.nfa), {j: taus[j] for j in range(gamma)}, connected=connected)
    psi = substitute(P.constraint, {x: Var(c) for x, c in zip(var_names(P.dimension), cs)})
    counted = [taus[j] for j in range(gamma) if length_labels(view.vectors[j])]
    length_eq = eq(sum_terms([Var(length_var)] + [ONE] * length_offset) if length_offset else Var(length_var),
                   _sum(counted))
    body = conj(
        enc.formula,
        *[le(ZERO, Var(t)) for t in taus],
        psi,
        length_eq,
        *_weight_parts(view, taus, cs, vector_of),
    )
    return exists(taus + cs, body), enc


def length_formula(P: TwoWayParikhAutomaton, var: str = "l", connected: bool = True) -> Formula:
    """φ(ℓ): some word of length ℓ is accepted by the one-way PA ``P`` (constraint included).

    Every run of a one-way automaton on ``⊢w⊣`` has ``|w| + 2`` transitions,
    so the glue equation is ``ℓ + 2 = Σ τ_j``.
    """
    if not P.is_one_way:
        raise ValueError("length_formula needs a one-way automaton")
    view = VectorAlphabetView.of(P)
    f, _ = _glue(P, view, lambda lab: True, 2, var, lambda lab: lab, connected)
    return f


def semilinear_image(N: TwoWayParikhAutomaton, max_len: int) -> set:
    """Parikh vectors of accepted words up to ``max_len`` (bounded enumeration, for cross-checks)."""
    from .core import language_sample
    return {parikh_vector(w, N.alphabet) for w in language_sample(N.replace(constraint=TRUE), max_len)}
