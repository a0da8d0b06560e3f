"""Crossing sections and the conversion of bounded-visit two-way automata to one-way ones.

A crossing section is the list of transitions a run fires while reading one
fixed letter of ``⊢w⊣``, in run order.  Sources alternate between
R-reading (odd indices, the head crosses the letter rightwards) and
L-reading (even indices).  Cancelling immediate turn-arounds leaves the
anchorages: the left one is what the section expects from the run to its
left, the right one what it offers to its right.  Adjacent sections of a run
match (right anchorage of one = left anchorage of the next), and conversely
every matching sequence can be stitched back into a run (:func:`merge`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import (
    BEGIN,
    END,
    Configuration,
    Run,
    Transition,
    TwoWayParikhAutomaton,
    as_word,
    is_deterministic,
    make_run,
    tape,
)

TOP = "⊤"


class SectionError(ValueError):
    """A transition sequence is not a well-formed crossing section."""


class MergeError(ValueError):
    """A section sequence cannot be stitched into a run."""


@dataclass(frozen=True)
class CrossingSection:
    symbol: str
    transitions: Tuple[Transition, ...]
    # reading direction of each source / target (True = L-reading)
    source_left: Tuple[bool, ...]
    target_left: Tuple[bool, ...]

    def __post_init__(self):
        n = len(self.transitions)
        if n == 0:
            raise SectionError("a crossing section is nonempty")
        if len(self.source_left) != n or len(self.target_left) != n:
            raise SectionError("direction flags do not match the transitions")
        for i, t in enumerate(self.transitions):
            if t.symbol != self.symbol:
                raise SectionError(f"transition {t!r} does not read {self.symbol!r}")
            # odd positions (1-based) cross rightwards, even ones leftwards
            if self.source_left[i] != (i % 2 == 1):
                raise SectionError(f"source directions must alternate R, L, R, ... at index {i}")
        if n % 2 == 0:
            raise SectionError("a crossing section has odd length")
        if self.target_left[-1]:
            raise SectionError("the last transition of a section must lead to an R-reading state")

    @staticmethod
    def of(A: TwoWayParikhAutomaton, transitions: Sequence[Transition]) -> "CrossingSection":
        transitions = tuple(transitions)
        if not transitions:
            raise SectionError("a crossing section is nonempty")
        return CrossingSection(
            transitions[0].symbol,
            transitions,
            tuple(t.source in A.left for t in transitions),
            tuple(t.target in A.left for t in transitions),
        )

    def __len__(self) -> int:
        return len(self.transitions)

    def value(self, dim: Optional[int] = None) -> Tuple[int, ...]:
        d = dim if dim is not None else len(self.transitions[0].vector)
        out = [0] * d
        for t in self.transitions:
            for k, x in enumerate(t.vector):
                out[k] += x
        return tuple(out)

    def __repr__(self):
        inner = ", ".join(f"({t.source}, {t.symbol}, {t.target})" for t in self.transitions)
        return f"[{inner}]"


def section_value(c: CrossingSection) -> Tuple[int, ...]:
    return c.value()


def anchorage(c: CrossingSection, side: str) -> Tuple:
    """Left (``"L"``) or right (``"R"``) anchorage of a section."""
    ts = c.transitions
    n = len(ts)
    if side == "L":
        out = [ts[0].source]
        # pairs (q_2i, p_2i+1): erased when equal and R-reading
        for i in range(1, n - 1, 2):
            q, p = ts[i].target, ts[i + 1].source
            if not (q == p and not c.target_left[i]):
                out.extend((q, p))
        return tuple(out)
    if side == "R":
        out = []
        # pairs (q_2i-1, p_2i): erased when equal and L-reading
        for i in range(0, n - 1, 2):
            q, p = ts[i].target, ts[i + 1].source
            if not (q == p and c.target_left[i]):
                out.extend((q, p))
        out.append(ts[-1].target)
        return tuple(out)
    raise ValueError("side must be 'L' or 'R'")


def is_matching(c1: CrossingSection, c2: CrossingSection) -> bool:
    return anchorage(c1, "R") == anchorage(c2, "L")


def is_initial_section(A: TwoWayParikhAutomaton, c: CrossingSection) -> bool:
    anch = anchorage(c, "L")
    return c.symbol == BEGIN and len(anch) == 1 and anch[0] in A.initial


def is_accepting_section(A: TwoWayParikhAutomaton, c: CrossingSection) -> bool:
    anch = anchorage(c, "R")
    return c.symbol == END and len(anch) == 1 and anch[0] in A.accepting


# ------------------------------------------------------------ runs <-> sections

def crossing_sections_of(r: Run, A: Optional[TwoWayParikhAutomaton] = None) -> List[CrossingSection]:
    """One section per letter of ``⊢w⊣``, each listing the transitions reading it in run order.

    Reading directions come from ``A`` when given, otherwise from the head
    moves of the run itself (the final state is taken as R-reading).
    """
    tp = tape(r.word)
    per: List[List[int]] = [[] for _ in tp]
    src_left: List[bool] = []
    for j, t in enumerate(r.transitions):
        before, after = r.configs[j].position, r.configs[j + 1].position
        moved_left = after < before
        src_left.append(moved_left)
        idx = after if moved_left else before
        per[idx].append(j)
    tgt_left = src_left[1:] + [False]
    out = []
    for i, idxs in enumerate(per):
        if not idxs:
            raise SectionError(f"run never reads position {i} of the tape")
        ts = tuple(r.transitions[j] for j in idxs)
        if A is not None:
            out.append(CrossingSection.of(A, ts))
        else:
            out.append(CrossingSection(tp[i], ts, tuple(src_left[j] for j in idxs), tuple(tgt_left[j] for j in idxs)))
    return out


def merge(sections: Sequence[CrossingSection], word, A: TwoWayParikhAutomaton) -> Run:
    """Stitch a matching section sequence into an accepting run of ``A``.

    The head starts left of the first section in its first source state.  An
    R-reading state consumes the next unused transition of the section on
    its right, an L-reading state that of the section on its left.  The
    result is replayed through the step relation before it is returned.
    """
    word = as_word(A, word)
    tp = tape(word)
    sections = list(sections)
    if len(sections) != len(tp):
        raise MergeError(f"{len(sections)} sections for a tape of length {len(tp)}")
    for i, (c, a) in enumerate(zip(sections, tp)):
        if c.symbol != a:
            raise MergeError(f"section {i} reads {c.symbol!r} but the tape has {a!r}")
    if not is_initial_section(A, sections[0]):
        raise MergeError("first section is not initial")
    if not is_accepting_section(A, sections[-1]):
        raise MergeError("last section is not accepting")
    for i in range(len(sections) - 1):
        if not is_matching(sections[i], sections[i + 1]):
            raise MergeError(f"sections {i} and {i + 1} do not match")
    used = [0] * len(sections)
    total = sum(len(c) for c in sections)
    pos = 0
    q = sections[0].transitions[0].source
    trans: List[Transition] = []
    while len(trans) < total:
        idx = pos - 1 if q in A.left else pos
        if not 0 <= idx < len(sections) or used[idx] >= len(sections[idx]):
            raise MergeError(f"run leaves the sections at position {pos} in state {q!r}")
        t = sections[idx].transitions[used[idx]]
        if t.source != q:
            raise MergeError(f"section {idx} expects {t.source!r} but the run is in {q!r}")
        used[idx] += 1
        trans.append(t)
        pos = pos - 1 if q in A.left else pos + 1
        q = t.target
    start = Configuration(0, sections[0].transitions[0].source)
    return make_run(A, word, start, trans)


# ------------------------------------------------------------ section enumeration

_ACC = "accept"


def suffix_behaviours(A: TwoWayParikhAutomaton) -> Tuple[tuple, List[tuple]]:
    """Behaviours of the deterministic ``A`` on tape suffixes, computed right to left.

    A behaviour maps every R-reading state entering the suffix from the left
    to the L-reading state in which the run leaves it again, to ``"accept"``
    when the run halts accepting inside it, or to ``None``.  Returns the
    behaviour of the empty suffix and the list for all suffixes in ``Σ*⊣``.
    """
    rights = sorted((q for q in A.states if q not in A.left), key=repr)

    def move(q, a):
        ts = A.successors(q, a)
        return ts[0].target if ts else None

    def extend(g, b):
        table = dict(zip(rights, g))
        out = []
        for q in rights:
            seen = set()
            res = None
            p = q
            while True:
                if p in seen:
                    res = None
                    break
                seen.add(p)
                r = move(p, b)
                if r is None:
                    break
                if r in A.halting:
                    res = _ACC if r in A.accepting and b == END else None
                    break
                if r not in A.left:
                    r = table.get(r)
                    if r is None or r == _ACC:
                        res = r
                        break
                s = move(r, b)
                if s is None:
                    break
                if s in A.left:
                    res = s
                    break
                p = s
            out.append(res)
        return tuple(out)

    empty = tuple(_ACC if q in A.accepting else None for q in rights)
    first = extend(empty, END)
    seen = {first: None}
    todo = [first]
    while todo:
        g = todo.pop()
        for a in A.alphabet:
            g2 = extend(g, a)
            if g2 not in seen:
                seen[g2] = None
                todo.append(g2)
    return dict(zip(rights, range(len(rights)))), [empty] + list(seen)


class _SectionSpace:
    """Lazily enumerates sections with a prescribed left anchorage.

    Returns from the right are guessed.  A return to an L-reading target
    is forced, and for deterministic automata the guess ranges over the
    finitely many suffix behaviours instead of over single states.
    """

    def __init__(self, A: TwoWayParikhAutomaton, k: int, prune_repeats: bool):
        self.A = A
        self.k = k
        self.prune = prune_repeats
        self.left_states = [q for q in A.states if q in A.left]
        self._cache: Dict[Tuple[tuple, str], List[CrossingSection]] = {}
        self.behaviours = None
        if prune_repeats:
            index, gs = suffix_behaviours(A)
            self.behaviours = (index, gs[0], gs[1:])

    def with_left_anchorage(self, anch: tuple, b: str) -> List[CrossingSection]:
        key = (anch, b)
        if key not in self._cache:
            found = []
            if self.behaviours is None:
                found = list(self._generate(anch, b, None))
            else:
                index, empty, rest = self.behaviours
                for g in ([empty] if b == END else rest):
                    found.extend(self._generate(anch, b, lambda q, g=g: g[index[q]]))
            self._cache[key] = list(dict.fromkeys(found))
        return self._cache[key]

    def _generate(self, anch, b, behaviour):
        A = self.A
        if not anch or anch[0] in A.left:
            return
        out = []

        def from_source(p, ts, j):
            # fire an odd (rightward) transition from R-reading p
            if len(ts) + 1 > self.k:
                return
            for t in A.successors(p, b):
                after_odd(ts + (t,), j)

        def after_odd(ts, j):
            q = ts[-1].target
            if q in A.left:
                returns = [q]          # turns around at once
            elif behaviour is not None:
                r = behaviour(q)
                if r == _ACC:
                    if j == len(anch):
                        out.append(ts)
                    return
                returns = [] if r is None else [r]
            else:
                if j == len(anch):
                    out.append(ts)
                returns = self.left_states
            if len(ts) + 2 > self.k:
                return
            for p in returns:
                for t in A.successors(p, b):
                    after_even(ts + (t,), j)

        def after_even(ts, j):
            q = ts[-1].target
            if q not in A.left:
                # immediate turn-around: the next source is q itself
                from_source(q, ts, j)
            elif j + 1 < len(anch) and anch[j] == q and anch[j + 1] not in A.left:
                from_source(anch[j + 1], ts, j + 2)

        from_source(anch[0], (), 1)
        for ts in out:
            c = CrossingSection.of(A, ts)
            if self.prune and _repeats(c):
                continue
            yield c


def _repeats(c: CrossingSection) -> bool:
    """Whether the section visits the same configuration twice (impossible in deterministic runs)."""
    ts = c.transitions
    # a turn-around target equals the next source: same configuration, count once
    lv, rv = [], []
    for i, t in enumerate(ts):
        if i % 2 == 0:
            if not (lv and i > 0 and ts[i - 1].target == t.source and not c.target_left[i - 1]):
                lv.append(t.source)
            rv.append(t.target)
        else:
            if not (rv and ts[i - 1].target == t.source and c.target_left[i - 1]):
                rv.append(t.source)
            lv.append(t.target)
    return len(set(lv)) != len(lv) or len(set(rv)) != len(rv)


def _check_k(k: int):
    if k < 1:
        raise ValueError("k must be >= 1")


def _reachable_sections(P: TwoWayParikhAutomaton, k: int):
    """Forward exploration: returns (states, initial, edges) of the section graph."""
    _check_k(k)
    space = _SectionSpace(P, k, prune_repeats=is_deterministic(P))
    initial = []
    for q0 in P.states:
        if q0 in P.initial:
            initial.extend(c for c in space.with_left_anchorage((q0,), BEGIN) if is_initial_section(P, c))
    initial = list(dict.fromkeys(initial))
    seen = dict.fromkeys(initial)
    todo = list(initial)
    edges: List[Tuple[CrossingSection, str, object]] = []
    while todo:
        c = todo.pop()
        if c.symbol == END:
            if is_accepting_section(P, c):
                edges.append((c, END, TOP))
            continue
        r_anch = anchorage(c, "R")
        for b in tuple(P.alphabet) + (END,):
            for c2 in space.with_left_anchorage(r_anch, b):
                edges.append((c, c.symbol, c2))
                if c2 not in seen:
                    seen[c2] = None
                    todo.append(c2)
    return list(seen), initial, edges


def _trim(states, initial, edges):
    back: Dict[object, list] = {}
    for u, _, v in edges:
        back.setdefault(v, []).append(u)
    alive = {TOP}
    todo = [TOP]
    while todo:
        v = todo.pop()
        for u in back.get(v, ()):
            if u not in alive:
                alive.add(u)
                todo.append(u)
    states = [c for c in states if c in alive]
    initial = [c for c in initial if c in alive]
    edges = [e for e in edges if e[0] in alive and e[2] in alive]
    return states, initial, edges


def to_one_way(P: TwoWayParikhAutomaton, k: int, trim: bool = True) -> TwoWayParikhAutomaton:
    """One-way automaton over crossing sections of length at most ``k``.

    Reading ``⊢w⊣`` it guesses the section of every letter; a transition
    ``(c1, a, c2)`` requires matching anchorages and carries the value of
    ``c1``.  Accepting ⊣-sections move to the halting state ⊤.  When ``P``
    is k-visit the languages agree; when it is not, the result accepts a
    subset of ``L(P)``.
    """
    states, initial, edges = _reachable_sections(P, k)
    if trim:
        states, initial, edges = _trim(states, initial, edges)
    transitions = []
    for c1, a, c2 in edges:
        transitions.append(Transition(c1, a, c2, c1.value(P.dimension)))
    return TwoWayParikhAutomaton(
        alphabet=P.alphabet,
        dimension=P.dimension,
        states=tuple(states) + (TOP,),
        left=frozenset(),
        initial=frozenset(initial),
        halting=frozenset({TOP}),
        accepting=frozenset({TOP}),
        transitions=tuple(transitions),
        constraint=P.constraint,
    )


def pad_symbol(alphabet: Iterable[str]) -> str:
    """``#`` unless the alphabet already uses it, then ``$``, ``%``, ... or ``#1``, ``#2``, ..."""
    alphabet = set(alphabet)
    for s in ("#", "$", "%", "&", "@"):
        if s not in alphabet:
            return s
    i = 1
    while f"#{i}" in alphabet:
        i += 1
    return f"#{i}"


@dataclass(frozen=True)
class SplitState:
    """Intermediate state number ``i`` on the split of transition ``index``."""
    index: int
    i: int

    def __repr__(self):
        return f"split{self.index}.{self.i}"


def to_one_way_emptiness(P: TwoWayParikhAutomaton, k: int, R: Optional[TwoWayParikhAutomaton] = None):
    """Like :func:`to_one_way`, with every weight a weight of ``P``.

    A transition leaving a section of length m becomes m transitions, one per
    transition of the section, carrying its vector.  The extra m-1 of them
    read a fresh padding symbol (see :func:`pad_symbol`); for ⊣ the padding
    comes first so that ⊣ stays the last letter, otherwise the real letter
    comes first.  Emptiness is preserved, and erasing the padding from an
    accepted word gives a word accepted by ``P``.
    """
    if R is None:
        R = to_one_way(P, k)
    pad = pad_symbol(P.alphabet)
    states = list(R.states)
    transitions = []
    for idx, t in enumerate(R.transitions):
        c1: CrossingSection = t.source
        m = len(c1)
        if m == 1:
            transitions.append(t)
            continue
        mids = [SplitState(idx, i) for i in range(1, m)]
        states.extend(mids)
        chain = [c1] + mids + [t.target]
        if t.symbol == END:
            symbols = [pad] * (m - 1) + [END]
        else:
            symbols = [t.symbol] + [pad] * (m - 1)
        for i, tr in enumerate(c1.transitions):
            transitions.append(Transition(chain[i], symbols[i], chain[i + 1], tr.vector))
    return TwoWayParikhAutomaton(
        alphabet=tuple(P.alphabet) + (pad,),
        dimension=P.dimension,
        states=tuple(states),
        left=frozenset(),
        initial=R.initial,
        halting=R.halting,
        accepting=R.accepting,
        transitions=tuple(transitions),
        constraint=P.constraint,
    )


def erase(word: Sequence[str], pad: str) -> Tuple[str, ...]:
    return tuple(a for a in word if a != pad)


def sections_of_one_way_run(r: Run) -> List[CrossingSection]:
    """The section sequence visited by a run of a converted automaton (without ⊤)."""
    return [c.state for c in r.configs[:-1]]
