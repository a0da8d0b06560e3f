"""Plain finite automata over arbitrary hashable labels (``None`` is the empty word)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, List, Optional, Sequence, Set, Tuple

from .core import BEGIN, END, Transition, TwoWayParikhAutomaton

Edge = Tuple[Hashable, Hashable, Hashable]  # (source, label, target)


class TooLarge(RuntimeError):
    pass


@dataclass
class NFA:
    states: List[Hashable]
    initial: Set[Hashable]
    final: Set[Hashable]
    edges: List[Edge] = field(default_factory=list)

    @property
    def labels(self) -> List[Hashable]:
        return list(dict.fromkeys(a for _, a, _ in self.edges if a is not None))

    def out(self) -> Dict[Hashable, List[Tuple[Hashable, Hashable]]]:
        table: Dict[Hashable, List[Tuple[Hashable, Hashable]]] = {}
        for u, a, v in self.edges:
            table.setdefault(u, []).append((a, v))
        return table

    def has_epsilon(self) -> bool:
        return any(a is None for _, a, _ in self.edges)

    def trim(self) -> "NFA":
        fwd: Dict[Hashable, list] = {}
        bwd: Dict[Hashable, list] = {}
        for u, _, v in self.edges:
            fwd.setdefault(u, []).append(v)
            bwd.setdefault(v, []).append(u)
        reach = _closure(self.initial, fwd)
        coreach = _closure(self.final, bwd)
        keep = reach & coreach
        return NFA(
            [q for q in self.states if q in keep],
            {q for q in self.initial if q in keep},
            {q for q in self.final if q in keep},
            [e for e in self.edges if e[0] in keep and e[2] in keep],
        )

    def eps_closure(self, qs) -> FrozenSet:
        eps: Dict[Hashable, list] = {}
        for u, a, v in self.edges:
            if a is None:
                eps.setdefault(u, []).append(v)
        return frozenset(_closure(qs, eps))

    def accepts(self, word: Sequence) -> bool:
        out = self.out()
        cur = self.eps_closure(self.initial)
        for a in word:
            nxt = {v for q in cur for b, v in out.get(q, ()) if b == a}
            cur = self.eps_closure(nxt)
        return bool(cur & self.final)

    def determinize(self, cap: Optional[int] = None) -> "NFA":
        """Subset construction (reachable part only); raises :class:`TooLarge` past ``cap`` states."""
        out = self.out()
        start = self.eps_closure(self.initial)
        labels = self.labels
        states = [start]
        index = {start: 0}
        edges = []
        i = 0
        while i < len(states):
            S = states[i]
            i += 1
            for a in labels:
                T = self.eps_closure({v for q in S for b, v in out.get(q, ()) if b == a})
                if not T:
                    continue
                if T not in index:
                    if cap is not None and len(states) >= cap:
                        raise TooLarge(f"subset construction exceeds {cap} states")
                    index[T] = len(states)
                    states.append(T)
                edges.append((index[S], a, index[T]))
        final = {index[S] for S in states if S & self.final}
        return NFA(list(range(len(states))), {0}, final, edges)

    def complete(self, labels: Sequence[Hashable]) -> "NFA":
        """Add a sink so every state has a successor on every label (deterministic input)."""
        out = {(u, a) for u, a, _ in self.edges}
        sink = ("sink",)
        edges = list(self.edges)
        need_sink = False
        for q in self.states:
            for a in labels:
                if (q, a) not in out:
                    edges.append((q, a, sink))
                    need_sink = True
        states = list(self.states)
        if need_sink or not states:
            states.append(sink)
            edges.extend((sink, a, sink) for a in labels)
        initial = set(self.initial) or {sink}
        return NFA(states, initial, set(self.final), edges)

    def minimize(self) -> "NFA":
        """Moore partition refinement of a deterministic automaton (missing moves go to a dead class)."""
        if len(self.initial) > 1 or self.has_epsilon():
            raise ValueError("minimize expects a deterministic automaton")
        delta = {(u, a): v for u, a, v in self.edges}
        labels = self.labels
        block = {q: (q in self.final) for q in self.states}
        while True:
            sig = {
                q: (block[q],) + tuple(block.get(delta.get((q, a)), None) if (q, a) in delta else None for a in labels)
                for q in self.states
            }
            ids: Dict[tuple, int] = {}
            new = {q: ids.setdefault(sig[q], len(ids)) for q in self.states}
            if len(set(new.values())) == len(set(block.values())):
                block = new
                break
            block = new
        edges = list(dict.fromkeys((block[u], a, block[v]) for u, a, v in self.edges))
        return NFA(
            sorted(set(block.values())),
            {block[q] for q in self.initial},
            {block[q] for q in self.final},
            edges,
        )

    def reverse(self) -> "NFA":
        return NFA(list(self.states), set(self.final), set(self.initial), [(v, a, u) for u, a, v in self.edges])


def _closure(start, succ) -> Set:
    seen = set(start)
    todo = list(start)
    while todo:
        q = todo.pop()
        for v in succ.get(q, ()):
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def from_one_way(A: TwoWayParikhAutomaton, label: Callable[[Transition], Hashable]) -> NFA:
    """The runs of a one-way automaton on ``⊢w⊣`` as an NFA over ``label(t)``.

    States are (state, phase): phase 0 before ⊢, 1 inside the word, 2 after ⊣.
    A transition may fire only in the phase where its symbol can be read.
    """
    if not A.is_one_way:
        raise ValueError("expected a one-way automaton (no L-reading states)")
    states = []
    edges = []
    for q in A.states:
        for ph in (0, 1, 2):
            states.append((q, ph))
    for t in A.transitions:
        lab = label(t)
        if t.symbol == BEGIN:
            edges.append(((t.source, 0), lab, (t.target, 1)))
        elif t.symbol == END:
            edges.append(((t.source, 1), lab, (t.target, 2)))
        else:
            edges.append(((t.source, 1), lab, (t.target, 1)))
    initial = {(q, 0) for q in A.initial}
    final = {(q, 2) for q in A.accepting}
    return NFA(states, initial, final, edges)


def letters_of(A: TwoWayParikhAutomaton) -> NFA:
    """NFA for ``L(A)`` ignoring the constraint: endmarker moves are silent."""
    return from_one_way(A, lambda t: None if t.symbol in (BEGIN, END) else t.symbol)
