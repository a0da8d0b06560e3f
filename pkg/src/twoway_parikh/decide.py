"""Decision procedures: emptiness, membership, Boolean closures, comparisons.

Emptiness of a k-visit automaton goes through the padded crossing-section
automaton, its length formula and the Presburger solver.  Everything else
is reduced to emptiness.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .core import (
    BEGIN,
    END,
    Run,
    Transition,
    TwoWayParikhAutomaton,
    as_word,
    is_accepting_run,
    is_deterministic,
    tape,
    validate,
    var_names,
)
from .crossing import CrossingSection, erase, merge, pad_symbol, to_one_way, to_one_way_emptiness
from .nfa import NFA, from_one_way, letters_of
from .parikh import VectorAlphabetView, _glue, _shrink, length_formula
from .presburger import (
    TRUE,
    Formula,
    Var,
    classify,
    conj,
    disj,
    eq,
    exists,
    find_model,
    negate,
    parse_formula,
    substitute,
)
from .presburger.qe import is_satisfied_ground
from .presburger.semilinear import substitute_constants
from .presburger.terms import ONE


class NotDeterministic(ValueError):
    pass


class AlphabetMismatch(ValueError):
    pass


@dataclass
class Witness:
    word: Tuple[str, ...]
    run: Run
    value: Tuple[int, ...]


@dataclass
class EmptinessVerdict:
    empty: bool
    witness: Optional[Witness] = None
    k: int = 0
    constraint_class: Tuple[int, str] = (0, "Sigma")

    def __bool__(self):
        # truthiness follows the question "is it empty?"
        return self.empty


def default_k(P: TwoWayParikhAutomaton, k: Optional[int]) -> int:
    if k is None:
        if not is_deterministic(P):
            raise ValueError("a visit bound k is required for nondeterministic automata")
        k = max(1, len(P.states))
    if k < 1:
        raise ValueError("k must be at least 1")
    return k


def value_satisfies(P: TwoWayParikhAutomaton, value: Sequence[int]) -> bool:
    """ψ(value) decided through constant hardcoding and quantifier elimination."""
    sentence = substitute_constants(P.constraint, value, var_names(P.dimension))
    return is_satisfied_ground(sentence, {})


# ------------------------------------------------------------ emptiness

def is_empty(P: TwoWayParikhAutomaton, k: Optional[int] = None, witness: bool = False,
             max_witness_len: Optional[int] = None) -> EmptinessVerdict:
    """Decide ``L(P) = ∅`` for a k-visit automaton (``k`` defaults to ``|Q|`` when deterministic).

    With ``witness=True`` a shortest accepted word is searched by increasing
    length (capped by ``max_witness_len`` if given) and returned with its run.
    """
    validate(P)
    k = default_k(P, k)
    N = to_one_way_emptiness(P, k)
    # refuting the formula without connectivity is cheaper and already proves emptiness
    if find_model(exists("l", length_formula(N, "l", connected=False))) is None:
        model = None
    else:
        model = find_model(exists("l", length_formula(N, "l")))
    verdict = EmptinessVerdict(model is None, None, k, classify(P.constraint))
    if model is not None and witness:
        verdict.witness = find_witness(P, N, max_witness_len)
    return verdict


def is_empty_generalized(P: TwoWayParikhAutomaton, k: Optional[int] = None, witness: bool = False,
                         max_witness_len: Optional[int] = None) -> EmptinessVerdict:
    """Emptiness for constraints with quantifier alternation.

    The pipeline is the same; quantifier elimination inside the solver
    handles universal blocks, so the class only affects cost.
    """
    return is_empty(P, k, witness, max_witness_len)


def _kind(P: TwoWayParikhAutomaton, t: Transition) -> bool:
    return t.symbol in P.alphabet


def find_witness(P: TwoWayParikhAutomaton, N: TwoWayParikhAutomaton,
                 max_len: Optional[int] = None) -> Optional[Witness]:
    """Shortest word of ``L(P)`` realized from models of the length formula of ``N``."""
    view = VectorAlphabetView.of(N, key=lambda t: (t.vector, _kind(P, t)))
    phi, enc = _glue(N, view, lambda lab: lab[1], 0, "l", lambda lab: lab[0])
    model = find_model(phi)
    if model is None:
        return None
    top = model["l"]
    if max_len is not None:
        top = min(top, max_len)
    for n in range(top + 1):
        if n == model["l"]:
            m = model
        else:
            m = find_model(substitute_constants(phi, (n,), ["l"]))
        if m is None:
            continue
        w = _realize(P, N, view, enc, m)
        if w is not None:
            return w
    return None


def _euler_path(enc, model) -> List[int]:
    """Edge indices of a path using every edge ``model[y_e]`` times (Hierholzer)."""
    nfa = enc.nfa
    start = [q for q, v in enc.start_vars.items() if model.get(v, 0) == 1]
    if len(start) != 1:
        raise AssertionError("flow model without a unique start")
    adj: Dict[Hashable, List[int]] = {q: [] for q in nfa.states}
    for i, (u, _, _) in enumerate(nfa.edges):
        adj[u].extend([i] * model.get(enc.edge_vars[i], 0))
    for q in adj:
        adj[q].reverse()
    stack = [(start[0], None)]
    path: List[int] = []
    while stack:
        q, e = stack[-1]
        if adj[q]:
            i = adj[q].pop()
            stack.append((nfa.edges[i][2], i))
        else:
            stack.pop()
            if e is not None:
                path.append(e)
    path.reverse()
    return path


def _realize(P, N, view, enc, model) -> Optional[Witness]:
    labels = [enc.nfa.edges[i][1] for i in _euler_path(enc, model)]
    keys = [view.vectors[j] for j in labels]
    # layered search for a run of N whose transitions carry exactly these keys
    nfa = from_one_way(N, lambda t: t)
    out = nfa.out()
    layers = [{q: None for q in nfa.initial}]
    for key in keys:
        nxt: Dict = {}
        for q in layers[-1]:
            for t, v in out.get(q, ()):
                if (t.vector, _kind(P, t)) == key and v not in nxt:
                    nxt[v] = (q, t)
        if not nxt:
            return None
        layers.append(nxt)
    ends = [q for q in layers[-1] if q in nfa.final]
    if not ends:
        return None
    q = ends[0]
    trans: List[Transition] = []
    for layer in reversed(layers[1:]):
        prev, t = layer[q]
        trans.append(t)
        q = prev
    trans.reverse()
    pad = pad_symbol(P.alphabet)
    letters = [t.symbol for t in trans if t.symbol not in (BEGIN, END)]
    word = erase(letters, pad)
    sections = [t.source for t in trans if isinstance(t.source, CrossingSection)]
    run = merge(sections, word, P)
    if not is_accepting_run(P, run) or not value_satisfies(P, run.value):
        raise AssertionError("extracted witness does not replay")
    return Witness(tuple(word), run, tuple(run.value))


# ------------------------------------------------------------ membership

def _fresh(alphabet, base):
    name = base
    i = 1
    while name in alphabet:
        name = f"{base}{i}"
        i += 1
    return name


def configuration_automaton(P: TwoWayParikhAutomaton, w) -> TwoWayParikhAutomaton:
    """The one-way automaton ``P_w`` whose states are the configurations of ``P`` on ``w``.

    It reads the sequence of symbols ``P`` reads; the endmarkers read by
    ``P`` become two fresh letters so that ``P_w`` stays one-way.
    """
    word = as_word(P, w)
    tp = tape(word)
    last = len(tp)
    lb = _fresh(P.alphabet, "|-")
    rb = _fresh(set(P.alphabet) | {lb}, "-|")
    rename = {BEGIN: lb, END: rb}
    start, top = ("start",), ("top",)
    zero = P.zero()
    states = [start]
    seen = set()
    transitions = [Transition(start, BEGIN, (0, q), zero) for q in P.initial]
    todo = [(0, q) for q in P.initial]
    seen.update(todo)
    while todo:
        pos, q = todo.pop()
        states.append((pos, q))
        if q in P.left:
            if pos == 0:
                continue
            sym, npos = tp[pos - 1], pos - 1
        else:
            if pos >= last:
                continue
            sym, npos = tp[pos], pos + 1
        for t in P.successors(q, sym):
            c = (npos, t.target)
            transitions.append(Transition((pos, q), rename.get(sym, sym), c, t.vector))
            if c not in seen:
                seen.add(c)
                todo.append(c)
    for q in P.accepting:
        if (last, q) in seen:
            transitions.append(Transition((last, q), END, top, zero))
    states.append(top)
    return TwoWayParikhAutomaton(
        alphabet=tuple(P.alphabet) + (lb, rb),
        dimension=P.dimension,
        states=tuple(states),
        left=frozenset(),
        initial=frozenset({start}),
        halting=frozenset({top}),
        accepting=frozenset({top}),
        transitions=tuple(transitions),
        constraint=P.constraint,
    )


def membership(P: TwoWayParikhAutomaton, w) -> bool:
    validate(P)
    return not is_empty(configuration_automaton(P, w), 1).empty


# ------------------------------------------------------------ closures

def _require_det(*Ps):
    for P in Ps:
        validate(P)
        if not is_deterministic(P):
            raise NotDeterministic("expected a deterministic automaton")


def _require_same_alphabet(P1, P2):
    if tuple(P1.alphabet) != tuple(P2.alphabet):
        raise AlphabetMismatch(f"alphabets differ: {P1.alphabet} vs {P2.alphabet}")


def shift_constraint(psi: Formula, offset: int, d: int) -> Formula:
    """Rename x1..xd to x(offset+1)..x(offset+d)."""
    if offset == 0:
        return psi
    return substitute(psi, {f"x{j}": Var(f"x{j + offset}") for j in range(1, d + 1)})


class _Assembly:
    """States and transitions of a composed automaton, with tagged copies."""

    def __init__(self, P0: TwoWayParikhAutomaton, dim: int):
        self.alphabet = tuple(P0.alphabet)
        self.dim = dim
        self.states: List = []
        self.left = set()
        self.initial = set()
        self.halting = set()
        self.accepting = set()
        self.transitions: List[Transition] = []

    def vec(self, offset=0, v=(), extra: Optional[Dict[int, int]] = None):
        out = [0] * self.dim
        for i, x in enumerate(v):
            out[offset + i] = x
        for i, x in (extra or {}).items():
            out[i] = x
        return tuple(out)

    def state(self, q, left=False, halting=False, accepting=False):
        if q not in self.states:
            self.states.append(q)
        if left:
            self.left.add(q)
        if halting:
            self.halting.add(q)
        if accepting:
            self.accepting.add(q)
        return q

    def embed(self, P: TwoWayParikhAutomaton, tag, offset: int, on_accept, on_reject) -> List:
        """Copy ``P`` with vectors at ``offset``; moves into its halting states are redirected.

        ``on_reject`` must be L-reading: a ⊣-move between R-reading states may
        only enter an accepting state.
        """
        for q in P.states:
            if q not in P.halting:
                self.state((tag, q), left=q in P.left)
        for t in P.transitions:
            if t.target in P.accepting:
                tgt = on_accept
            elif t.target in P.halting:
                tgt = on_reject
            else:
                tgt = (tag, t.target)
            self.add((tag, t.source), t.symbol, tgt, self.vec(offset, t.vector))
        return [(tag, q) for q in P.initial]

    def rewind(self, name, target):
        """L-reading state sweeping back to ⊢, then handing over to ``target`` at position 0."""
        self.state(name, left=True)
        self.add(name, list(self.alphabet) + [END], name)
        if target is not None:
            self.add(name, BEGIN, target)
        return name

    def add(self, src, sym, tgt, vector=None):
        """``sym`` may be a list of symbols."""
        syms = sym if isinstance(sym, list) else [sym]
        for a in syms:
            self.transitions.append(Transition(src, a, tgt, vector if vector is not None else self.vec()))

    def build(self, constraint: Formula, initial) -> TwoWayParikhAutomaton:
        A = TwoWayParikhAutomaton(
            alphabet=self.alphabet,
            dimension=self.dim,
            states=tuple(self.states),
            left=frozenset(self.left),
            initial=frozenset(initial),
            halting=frozenset(self.halting),
            accepting=frozenset(self.accepting),
            transitions=tuple(self.transitions),
            constraint=constraint,
        )
        validate(A)
        return A


def intersect(P1: TwoWayParikhAutomaton, P2: TwoWayParikhAutomaton) -> TwoWayParikhAutomaton:
    """Run ``P1``; if it accepts, rewind and run ``P2`` on fresh dimensions."""
    _require_det(P1, P2)
    _require_same_alphabet(P1, P2)
    d1, d2 = P1.dimension, P2.dimension
    B = _Assembly(P1, d1 + d2)
    acc = B.state("acc", halting=True, accepting=True)
    rej = B.state("rej", left=True, halting=True)
    starts2 = B.embed(P2, 2, d1, acc, rej)
    rw = B.rewind("rw", starts2[0] if starts2 else None)
    starts1 = B.embed(P1, 1, 0, rw, rej)
    psi = conj(P1.constraint, shift_constraint(P2.constraint, d1, d2))
    return B.build(psi, starts1)


def underlying_dfa(P: TwoWayParikhAutomaton) -> NFA:
    """Complete minimal DFA for the language of the deterministic ``P`` with its constraint dropped.

    After a prefix ``u`` of ``⊢w`` the DFA remembers the behaviour of ``P``
    on ``u``: the state in which the run started at ``⊢`` first leaves ``u``
    to the right, and for every L-reading state entering ``u`` from the
    right, the state in which it leaves again (``None``: stuck or looping).
    """
    lefts = sorted(P.left, key=repr)

    def move(q, a):
        ts = P.successors(q, a)
        return ts[0].target if ts else None

    def exit_from(p, a, table):
        # p sits on the old boundary; returns the exit state on the new one
        seen = set()
        while True:
            if p in P.left:
                p = table[p]
                if p is None:
                    return None
                continue
            if p in seen or p in P.halting:
                return None
            seen.add(p)
            p = move(p, a)
            if p is None or p not in P.left or p in P.halting:
                return p
            p = move(p, a)
            if p is None:
                return None

    def extend(beh, a):
        init, row = beh
        table = dict(zip(lefts, row))
        new_init = exit_from(init, a, table) if init is not None else None
        new_row = []
        for q in lefts:
            r = move(q, a)
            new_row.append(exit_from(r, a, table) if r is not None else None)
        return new_init, tuple(new_row)

    (q0,) = P.initial or (None,)
    empty = (q0, tuple(None for _ in lefts))
    start = extend(empty, BEGIN)
    states = [start]
    index = {start: 0}
    edges = []
    i = 0
    while i < len(states):
        beh = states[i]
        i += 1
        for a in P.alphabet:
            nxt = extend(beh, a)
            if nxt not in index:
                index[nxt] = len(states)
                states.append(nxt)
            edges.append((index[beh], a, index[nxt]))
    final = {index[b] for b in states if extend(b, END)[0] in P.accepting}
    dfa = NFA(list(range(len(states))), {0}, final, edges)
    return dfa.complete(P.alphabet).minimize()


def _guard(B: _Assembly, P: TwoWayParikhAutomaton, tag, offset: int, flag: Optional[int], done, done_unset=None):
    """Decide membership in the underlying language first, then maybe run ``P``.

    Returns the start state of the gadget (an R-reading state at position 0).
    A one-way DFA pass decides whether the constraint-free run of ``P`` accepts.
    If it does, ``flag`` (when given) is raised, the head rewinds and ``P`` runs
    to its accepting halt, which continues to ``done``.  Otherwise control goes to
    ``done_unset`` (default ``done``) right after ⊣.
    """
    dfa = underlying_dfa(P)
    done_unset = done if done_unset is None else done_unset
    start = B.state((tag, "start"))
    rej = B.state("rej", left=True, halting=True)
    starts = B.embed(P, (tag, "run"), offset, done, rej)
    rw = B.rewind((tag, "rw"), starts[0] if starts else None)
    (d0,) = dfa.initial
    B.add(start, BEGIN, (tag, "dfa", d0))
    for q in dfa.states:
        B.state((tag, "dfa", q))
    for u, a, v in dfa.edges:
        B.add((tag, "dfa", u), a, (tag, "dfa", v))
    for q in dfa.states:
        if q in dfa.final:
            B.add((tag, "dfa", q), END, rw, B.vec(extra={flag: 1} if flag is not None else None))
        else:
            B.add((tag, "dfa", q), END, done_unset)
    return start


def complement(P: TwoWayParikhAutomaton) -> TwoWayParikhAutomaton:
    """Deterministic automaton for ``Σ* \\ L(P)``.

    A DFA pass first checks whether ``P`` without its constraint accepts.  If
    not, the word is accepted with the flag ``c = 1`` (last dimension).
    Otherwise ``P`` runs and its value must violate the constraint:
    ``ψ̄ = (c = 1) ∨ ¬ψ``.
    """
    _require_det(P)
    d = P.dimension
    B = _Assembly(P, d + 1)
    acc = B.state("acc", halting=True, accepting=True)
    B.state("rej", left=True, halting=True)
    dfa = underlying_dfa(P)
    start = B.state("start")
    starts = B.embed(P, "run", 0, acc, "rej")
    rw = B.rewind("rw", starts[0] if starts else None)
    (d0,) = dfa.initial
    B.add(start, BEGIN, ("dfa", d0))
    for q in dfa.states:
        B.state(("dfa", q))
    for u, a, v in dfa.edges:
        B.add(("dfa", u), a, ("dfa", v))
    for q in dfa.states:
        if q in dfa.final:
            B.add(("dfa", q), END, rw)
        else:
            B.add(("dfa", q), END, acc, B.vec(extra={d: 1}))
    c = f"x{d + 1}"
    psi = disj(eq(Var(c), ONE), negate(P.constraint))
    return B.build(psi, [start])


def union(P1: TwoWayParikhAutomaton, P2: TwoWayParikhAutomaton) -> TwoWayParikhAutomaton:
    """Two guarded phases with flags ``h1``, ``h2`` (the last two dimensions).

    Phase i runs ``Pi`` only when its constraint-free version accepts, so the
    composition always halts; ``ψ = (h1 = 1 ∧ ψ1) ∨ (h2 = 1 ∧ ψ2)``.
    """
    _require_det(P1, P2)
    _require_same_alphabet(P1, P2)
    d1, d2 = P1.dimension, P2.dimension
    h1, h2 = d1 + d2, d1 + d2 + 1
    B = _Assembly(P1, d1 + d2 + 2)
    acc = B.state("acc", halting=True, accepting=True)
    s2 = _guard(B, P2, "g2", d1, h2, acc)
    mid = B.rewind("mid", s2)
    s1 = _guard(B, P1, "g1", 0, h1, mid)
    psi = disj(
        conj(eq(Var(f"x{h1 + 1}"), ONE), P1.constraint),
        conj(eq(Var(f"x{h2 + 1}"), ONE), shift_constraint(P2.constraint, d1, d2)),
    )
    return B.build(psi, [s1])


# ------------------------------------------------------------ comparisons

def inclusion_automaton(P1: TwoWayParikhAutomaton, P2: TwoWayParikhAutomaton) -> TwoWayParikhAutomaton:
    """``P1 ∩ complement(P2)``; its constraint is the glued formula of the inclusion test."""
    return intersect(P1, complement(P2))


def includes(P1: TwoWayParikhAutomaton, P2: TwoWayParikhAutomaton) -> bool:
    """Whether ``L(P1) ⊆ L(P2)``."""
    return is_empty(inclusion_automaton(P1, P2)).empty


def is_universal(P: TwoWayParikhAutomaton) -> bool:
    return is_empty(complement(P)).empty


def equivalent(P1: TwoWayParikhAutomaton, P2: TwoWayParikhAutomaton) -> bool:
    return includes(P1, P2) and includes(P2, P1)
