"""Two-way Parikh automata: data model, validation, simulation.

The head sits between letters of ``⊢ w ⊣``.  A configuration is the number
of letters to the left of the head together with the current state.  An
R-reading state consumes the letter on its right and moves right; an
L-reading state consumes the letter on its left and moves left.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from .presburger import TRUE, Formula, free_vars, is_satisfied_ground

BEGIN = "⊢"
END = "⊣"
ENDMARKERS = (BEGIN, END)

State = Hashable
Symbol = str
Vector = Tuple[int, ...]
Word = Tuple[Symbol, ...]


# ------------------------------------------------------------ errors

class ValidationError(ValueError):
    """The automaton description breaks one of the structural conditions."""


class Condition1Error(ValidationError):
    """A halting state has an outgoing transition."""


class Condition2Error(ValidationError):
    """A transition would move the head past an endmarker."""


class Condition3Error(ValidationError):
    """A transition into a halting state does not read ⊣ from an R-reading state."""


class PartitionError(ValidationError):
    """Initial/accepting/halting sets are inconsistent with the state partition."""


class ArityError(ValidationError):
    """Vector lengths or constraint variables do not match the dimension."""


class WordError(ValueError):
    pass


# ------------------------------------------------------------ model

@dataclass(frozen=True)
class Transition:
    source: State
    symbol: Symbol
    target: State
    vector: Vector = ()

    def __repr__(self):
        return f"({self.source!r} -{self.symbol}|{self.vector}-> {self.target!r})"


@dataclass(frozen=True)
class Configuration:
    position: int
    state: State


def var_names(d: int) -> List[str]:
    return [f"x{i + 1}" for i in range(d)]


@dataclass(frozen=True)
class TwoWayParikhAutomaton:
    alphabet: Tuple[Symbol, ...]
    dimension: int
    states: Tuple[State, ...]
    left: FrozenSet[State]
    initial: FrozenSet[State]
    halting: FrozenSet[State]
    accepting: FrozenSet[State]
    transitions: Tuple[Transition, ...]
    constraint: Formula = TRUE

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(dict.fromkeys(self.states)))
        for name in ("left", "initial", "halting", "accepting"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        object.__setattr__(self, "transitions", tuple(dict.fromkeys(
            Transition(t.source, t.symbol, t.target, tuple(int(a) for a in t.vector)) for t in self.transitions
        )))

    @property
    def right(self) -> FrozenSet[State]:
        return frozenset(self.states) - self.left

    def is_left(self, q: State) -> bool:
        return q in self.left

    @cached_property
    def out(self) -> Dict[Tuple[State, Symbol], List[Transition]]:
        table: Dict[Tuple[State, Symbol], List[Transition]] = {}
        for t in self.transitions:
            table.setdefault((t.source, t.symbol), []).append(t)
        return table

    def successors(self, q: State, a: Symbol) -> List[Transition]:
        return self.out.get((q, a), [])

    @property
    def mu(self) -> int:
        """Largest absolute entry of any weight vector."""
        return max((abs(x) for t in self.transitions for x in t.vector), default=0)

    @property
    def is_one_way(self) -> bool:
        return not self.left

    def zero(self) -> Vector:
        return (0,) * self.dimension

    def satisfies(self, value: Sequence[int]) -> bool:
        env = dict(zip(var_names(self.dimension), value))
        return is_satisfied_ground(self.constraint, env)

    def replace(self, **changes) -> "TwoWayParikhAutomaton":
        import dataclasses
        return dataclasses.replace(self, **changes)

    def word(self, w) -> Word:
        return as_word(self, w)


def as_word(A: TwoWayParikhAutomaton, w) -> Word:
    """Normalise ``w`` to a tuple of alphabet symbols.

    Strings are split into characters when every symbol is one character,
    otherwise on whitespace.
    """
    if isinstance(w, str):
        if all(len(a) == 1 for a in A.alphabet):
            word = tuple(w)
        else:
            word = tuple(w.split())
    else:
        word = tuple(w)
    foreign = [a for a in word if a not in A.alphabet]
    if foreign:
        raise WordError(f"symbol {foreign[0]!r} is not in the alphabet {list(A.alphabet)}")
    return word


def tape(word: Sequence[Symbol]) -> Word:
    return (BEGIN,) + tuple(word) + (END,)


# ------------------------------------------------------------ validation

def validate(A: TwoWayParikhAutomaton) -> None:
    """Raise a :class:`ValidationError` subclass naming the first problem found."""
    states = set(A.states)
    for a in A.alphabet:
        if a in ENDMARKERS:
            raise ValidationError(f"endmarker {a!r} cannot be an alphabet symbol")
    if len(set(A.alphabet)) != len(A.alphabet):
        raise ValidationError("alphabet has repeated symbols")
    if A.dimension < 0:
        raise ArityError("dimension must be a natural number")
    for name in ("left", "initial", "halting", "accepting"):
        unknown = getattr(A, name) - states
        if unknown:
            raise PartitionError(f"{name} set mentions unknown state {sorted(map(repr, unknown))[0]}")
    bad = A.initial & A.left
    if bad:
        raise PartitionError(f"initial state {next(iter(bad))!r} is L-reading")
    bad = A.accepting - A.halting
    if bad:
        raise PartitionError(f"accepting state {next(iter(bad))!r} is not halting")
    for t in A.transitions:
        if t.source not in states or t.target not in states:
            raise ValidationError(f"transition {t!r} uses an unknown state")
        if t.symbol not in A.alphabet and t.symbol not in ENDMARKERS:
            raise ValidationError(f"transition {t!r} reads unknown symbol {t.symbol!r}")
        if len(t.vector) != A.dimension:
            raise ArityError(f"transition {t!r} has a vector of length {len(t.vector)}, expected {A.dimension}")
        if t.source in A.halting:
            raise Condition1Error(f"halting state {t.source!r} has outgoing transition {t!r}")
        src_left = t.source in A.left
        tgt_left = t.target in A.left
        if t.symbol == BEGIN and src_left and tgt_left:
            raise Condition2Error(f"transition {t!r} reads ⊢ between two L-reading states")
        if t.symbol == END and not src_left and not tgt_left and t.target not in A.accepting:
            raise Condition2Error(f"transition {t!r} reads ⊣ into a non-accepting R-reading state")
        if t.target in A.halting and (src_left or t.symbol != END):
            raise Condition3Error(f"transition {t!r} enters halting state without reading ⊣ rightwards")
    extra = free_vars(A.constraint) - set(var_names(A.dimension))
    if extra:
        raise ArityError(
            f"constraint mentions {sorted(extra)}; only x1..x{A.dimension} are allowed"
        )


# ------------------------------------------------------------ runs

@dataclass(frozen=True)
class Run:
    """A run as its configuration sequence and the transitions between them."""
    word: Word
    configs: Tuple[Configuration, ...]
    transitions: Tuple[Transition, ...] = ()
    value: Vector = ()

    @property
    def steps(self) -> List[Tuple[Configuration, Transition]]:
        return list(zip(self.configs, self.transitions))

    @property
    def final(self) -> Configuration:
        return self.configs[-1]

    def __len__(self) -> int:
        return len(self.transitions)


def make_run(A: TwoWayParikhAutomaton, word, start: Configuration, transitions: Sequence[Transition]) -> Run:
    """Replay ``transitions`` from ``start``; raises ``ValueError`` if a step is impossible."""
    word = as_word(A, word)
    configs = [start]
    value = list(A.zero())
    for t in transitions:
        succ = dict(step(A, word, configs[-1]))
        if t not in succ:
            raise ValueError(f"transition {t!r} cannot fire from {configs[-1]!r}")
        configs.append(succ[t])
        for i, x in enumerate(t.vector):
            value[i] += x
    return Run(word, tuple(configs), tuple(transitions), tuple(value))


def step(A: TwoWayParikhAutomaton, word, c: Configuration) -> FrozenSet[Tuple[Transition, Configuration]]:
    """All one-step successors of ``c`` on ``word``."""
    tp = tape(word)
    if not 0 <= c.position <= len(tp):
        raise ValueError(f"position {c.position} outside [0, {len(tp)}]")
    return frozenset(_succ(A, tp, c.position, c.state))


def _succ(A, tp, pos, q):
    if q in A.halting:
        return
    if q in A.left:
        if pos == 0:
            return
        for t in A.successors(q, tp[pos - 1]):
            yield t, Configuration(pos - 1, t.target)
    else:
        if pos == len(tp):
            return
        for t in A.successors(q, tp[pos]):
            yield t, Configuration(pos + 1, t.target)


def is_accepting_config(A: TwoWayParikhAutomaton, word, c: Configuration) -> bool:
    return c.state in A.accepting and c.position == len(word) + 2


def is_accepting_run(A: TwoWayParikhAutomaton, r: Run) -> bool:
    return (
        r.configs[0].position == 0
        and r.configs[0].state in A.initial
        and is_accepting_config(A, r.word, r.final)
        and A.satisfies(r.value)
    )


def is_deterministic(A: TwoWayParikhAutomaton) -> bool:
    """At most one transition per (state, symbol) and at most one initial state."""
    if len(A.initial) > 1:
        return False
    return all(len(ts) <= 1 for ts in A.out.values())


# ------------------------------------------------------------ oracles

ACCEPTED = "accepted"
REJECTED = "rejected"
BOUND_EXHAUSTED = "bound_exhausted"


def _add(v, w):
    return tuple(a + b for a, b in zip(v, w))


def _deterministic_run(A, word) -> Tuple[str, Optional[Run]]:
    if not A.initial:
        return REJECTED, None
    tp = tape(word)
    (q0,) = A.initial
    pos, q = 0, q0
    seen = set()
    configs = [Configuration(0, q0)]
    trans: List[Transition] = []
    value = A.zero()
    while True:
        if q in A.halting:
            run = Run(tuple(word), tuple(configs), tuple(trans), value)
            if is_accepting_run(A, run):
                return ACCEPTED, run
            return REJECTED, run
        if (pos, q) in seen:
            return REJECTED, None
        seen.add((pos, q))
        nxt = next(iter(_succ(A, tp, pos, q)), None)
        if nxt is None:
            return REJECTED, None
        t, c = nxt
        trans.append(t)
        configs.append(c)
        value = _add(value, t.vector)
        pos, q = c.position, c.state


INF = float("inf")


class _Pruner:
    """Cuts search branches that can no longer end in an accepting run.

    On a fixed word the configurations form a finite weighted graph.  For
    every configuration and every counter we compute the least and greatest
    total change along a path to an accepting configuration (infinite when a
    cycle can pump it).  A branch whose current value, shifted by these
    intervals, admits no model of the constraint is dead.  The test is exact
    (it calls the Presburger solver), so pruning never loses an accepting run.
    """

    def __init__(self, A: TwoWayParikhAutomaton, word: Word):
        self.A = A
        tp = tape(word)
        end = len(tp)
        nodes = []
        edges = []
        seen = set()
        todo = [(0, q) for q in A.states if q in A.initial]
        seen.update(todo)
        while todo:
            node = todo.pop()
            nodes.append(node)
            for t, c in _succ(A, tp, *node):
                nxt = (c.position, c.state)
                edges.append((node, nxt, t.vector))
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        goal = {n for n in nodes if n[1] in A.accepting and n[0] == end}
        self.hi = [self._longest(nodes, edges, goal, k, 1) for k in range(A.dimension)]
        self.lo = [self._longest(nodes, edges, goal, k, -1) for k in range(A.dimension)]
        self.alive = self._coreach(nodes, edges, goal)
        self._cache: Dict[tuple, bool] = {}

    @staticmethod
    def _coreach(nodes, edges, goal):
        back: Dict[tuple, list] = {}
        for u, v, _ in edges:
            back.setdefault(v, []).append(u)
        alive = set(goal)
        todo = list(goal)
        while todo:
            v = todo.pop()
            for u in back.get(v, ()):
                if u not in alive:
                    alive.add(u)
                    todo.append(u)
        return alive

    @staticmethod
    def _longest(nodes, edges, goal, k, sign):
        dist = {n: (0 if n in goal else -INF) for n in nodes}
        for _ in range(len(nodes)):
            changed = False
            for u, v, w in edges:
                cand = dist[v] + sign * w[k]
                if cand > dist[u]:
                    dist[u] = cand
                    changed = True
            if not changed:
                break
        else:
            # still improving: some cycle pumps; flood +inf backwards
            for _ in range(len(nodes)):
                for u, v, w in edges:
                    if dist[v] + sign * w[k] > dist[u]:
                        dist[u] = INF
            changed = True
            while changed:
                changed = False
                for u, v, _ in edges:
                    if dist[v] == INF and dist[u] != INF:
                        dist[u] = INF
                        changed = True
        return {n: d * sign for n, d in dist.items()}

    def hopeless(self, pos, q, value) -> bool:
        node = (pos, q)
        if node not in self.alive:
            return True
        A = self.A
        if A.dimension == 0:
            return False
        box = []
        for k in range(A.dimension):
            lo = self.lo[k][node]
            hi = self.hi[k][node]
            box.append((value[k] + lo if lo != -INF else None, value[k] + hi if hi != INF else None))
        box = tuple(box)
        if all(a is None and b is None for a, b in box):
            return False
        if box not in self._cache:
            from .presburger import ZERO, Le, Lin, conj, find_model
            parts = [A.constraint]
            for name, (a, b) in zip(var_names(A.dimension), box):
                if a is not None:
                    parts.append(Le(Lin.constant(a), Lin.var(name)))
                if b is not None:
                    parts.append(Le(Lin.var(name), Lin.constant(b)))
            self._cache[box] = find_model(conj(*parts)) is None
        return self._cache[box]


def _search(A, word, step_bound) -> Tuple[str, Optional[Run]]:
    """Breadth-first search over (configuration, value) up to ``step_bound`` steps."""
    tp = tape(word)
    end = len(tp)
    pruner = _Pruner(A, word)
    start = [(0, q, A.zero()) for q in A.states if q in A.initial and not pruner.hopeless(0, q, A.zero())]
    parent: Dict[tuple, Optional[tuple]] = {s: None for s in start}
    frontier = list(start)

    def build(node):
        path = []
        while node is not None:
            path.append(node)
            node = parent[node][0] if parent[node] else None
        path.reverse()
        configs = tuple(Configuration(p, q) for p, q, _ in path)
        trans = tuple(parent[n][1] for n in path[1:])
        return Run(tuple(word), configs, trans, path[-1][2])

    for node in frontier:
        if node[1] in A.accepting and node[0] == end and A.satisfies(node[2]):
            return ACCEPTED, build(node)
    depth = 0
    while frontier:
        if depth >= step_bound:
            return BOUND_EXHAUSTED, None
        depth += 1
        nxt = []
        for node in frontier:
            pos, q, val = node
            for t, c in _succ(A, tp, pos, q):
                child = (c.position, c.state, _add(val, t.vector))
                if child in parent or pruner.hopeless(*child):
                    continue
                parent[child] = (node, t)
                if c.state in A.accepting and c.position == end and A.satisfies(child[2]):
                    return ACCEPTED, build(child)
                nxt.append(child)
        frontier = nxt
    return REJECTED, None


def accepts_oracle(A: TwoWayParikhAutomaton, word, step_bound: int = 1000) -> str:
    """Reference acceptance by direct simulation.

    Deterministic automata are simulated exactly (a repeated configuration
    means the run loops).  Otherwise every (configuration, value) reachable
    within ``step_bound`` steps is explored; the result is ``bound_exhausted``
    when the search was cut short without finding an accepting run.
    """
    if step_bound < 0:
        raise ValueError("step_bound must be >= 0")
    word = as_word(A, word)
    if is_deterministic(A):
        return _deterministic_run(A, word)[0]
    return _search(A, word, step_bound)[0]


def accepting_run(A: TwoWayParikhAutomaton, word, step_bound: int = 1000) -> Optional[Run]:
    """Some accepting run (a shortest one for nondeterministic automata), or ``None``."""
    word = as_word(A, word)
    if is_deterministic(A):
        verdict, run = _deterministic_run(A, word)
    else:
        verdict, run = _search(A, word, step_bound)
    return run if verdict == ACCEPTED else None


def accepting_runs(A: TwoWayParikhAutomaton, word, step_bound: int = 1000) -> Iterator[Run]:
    """Enumerate accepting runs of length at most ``step_bound``.

    Depth-first; a branch is cut when it repeats a (configuration, value)
    pair already on the current path, since such a cycle contributes nothing.
    """
    word = as_word(A, word)
    tp = tape(word)
    end = len(tp)
    pruner = _Pruner(A, word)
    for q0 in A.states:
        if q0 not in A.initial or pruner.hopeless(0, q0, A.zero()):
            continue
        start = (0, q0, A.zero())
        stack = [(start, iter(_succ(A, tp, 0, q0)))]
        on_path = {start}
        trans: List[Transition] = []
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                on_path.discard(node)
                if trans:
                    trans.pop()
                continue
            t, c = nxt
            child = (c.position, c.state, _add(node[2], t.vector))
            if child in on_path or pruner.hopeless(*child):
                continue
            if c.state in A.halting:
                if c.state in A.accepting and c.position == end and A.satisfies(child[2]):
                    configs = tuple(Configuration(p, q) for (p, q, _), _ in stack) + (c,)
                    yield Run(word, configs, tuple(trans) + (t,), child[2])
                continue
            if len(stack) >= step_bound:
                continue
            trans.append(t)
            on_path.add(child)
            stack.append((child, iter(_succ(A, tp, c.position, c.state))))


def words(alphabet: Sequence[Symbol], max_len: int) -> Iterator[Word]:
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def language_sample(A: TwoWayParikhAutomaton, max_len: int, step_bound: int = 1000) -> set:
    """Accepted words of length at most ``max_len`` (as tuples of symbols)."""
    return {w for w in words(A.alphabet, max_len) if accepts_oracle(A, w, step_bound) == ACCEPTED}


# ------------------------------------------------------------ visits

def visits(r: Run) -> Dict[int, int]:
    counts: Dict[int, int] = {}
    for c in r.configs:
        counts[c.position] = counts.get(c.position, 0) + 1
    return counts


def max_visits(r: Run) -> int:
    """Largest number of configurations of ``r`` sharing one head position."""
    if not r.transitions:
        return 0
    return max(visits(r).values())


@dataclass(frozen=True)
class KVisitCheck:
    consistent: bool
    counterexample: Optional[Run] = None


def check_k_visit(A: TwoWayParikhAutomaton, k: int, max_len: int, step_bound: int = 200) -> KVisitCheck:
    """Look for an accepting run on a short word that visits some position more than ``k`` times."""
    if k < 1:
        raise ValueError("k must be >= 1")
    for w in words(A.alphabet, max_len):
        for r in accepting_runs(A, w, step_bound):
            if max_visits(r) > k:
                return KVisitCheck(False, r)
    return KVisitCheck(True)
