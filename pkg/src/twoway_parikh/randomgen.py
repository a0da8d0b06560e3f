"""Random sweeping automata and formulas for property tests.

A sweeping automaton makes ``k`` full passes over the tape, alternating
directions, so every position is read at most ``k`` times and the machine is
k-visit by construction.  Passes own one or two working states; the fixed
gadget states (start, turn-around, accept) come on top.
"""
from __future__ import annotations

import random
from typing import List, Optional, Sequence

from .core import BEGIN, END, Transition, TwoWayParikhAutomaton, validate
from .presburger import TRUE, Formula, parse_formula

# constraint templates by dimension
_TEMPLATES = {
    1: ["true", "x1 = 0", "1 <= x1", "x1 <= 1", "exists y. x1 = y + y", "x1 >= 0 /\\ x1 <= 2"],
    2: ["true", "x1 = x2", "x1 <= x2", "1 <= x1", "x1 + x2 = 1", "exists y. x1 = y + y /\\ x2 <= y",
        "x1 = x2 \\/ x1 = 0"],
}


def random_vector(rng: random.Random, d: int) -> tuple:
    return tuple(rng.choice((-1, 0, 1)) for _ in range(d))


def random_constraint(rng: random.Random, d: int) -> Formula:
    if d == 0:
        return TRUE
    return parse_formula(rng.choice(_TEMPLATES[min(d, 2)]))


def random_sweeping(rng: random.Random, k: Optional[int] = None, deterministic: bool = False,
                    letters: Optional[int] = None, dim: Optional[int] = None,
                    constraint: Optional[Formula] = None) -> TwoWayParikhAutomaton:
    """A random k-pass sweeping 2PA (``k`` odd, so the last pass ends on ⊣)."""
    k = k if k is not None else rng.choice((1, 3))
    if k % 2 == 0 or k < 1:
        raise ValueError("sweeping automata need an odd number of passes")
    n_letters = letters if letters is not None else rng.choice((1, 2))
    alphabet = ("a", "b")[:n_letters]
    d = dim if dim is not None else rng.choice((0, 1, 2))
    budget = 4
    passes: List[List[str]] = []
    for i in range(k):
        left_to_spend = budget - sum(map(len, passes)) - (k - i - 1)
        m = rng.randint(1, max(1, min(2, left_to_spend)))
        passes.append([f"p{i}{j}" for j in range(m)])
    states = ["s"] + [q for ps in passes for q in ps]
    left = set()
    for i, ps in enumerate(passes):
        if i % 2 == 1:
            left.update(ps)
    turns = []
    for i in range(1, k, 2):
        turns.append(f"t{i}")
    states += turns + ["acc"]
    trans: List[Transition] = []

    def pick_targets(pool: Sequence[str]) -> List[str]:
        if deterministic:
            return [rng.choice(pool)] if rng.random() < 0.9 else []
        n = rng.choice((0, 1, 1, 2))
        return rng.sample(list(pool), min(n, len(pool)))

    def add(src, sym, tgt):
        trans.append(Transition(src, sym, tgt, random_vector(rng, d)))

    # ⊢ into the first pass
    for tgt in (pick_targets(passes[0]) or [passes[0][0]]):
        add("s", BEGIN, tgt)
    for i, ps in enumerate(passes):
        last = i == k - 1
        for q in ps:
            for a in alphabet:
                for tgt in pick_targets(ps):
                    add(q, a, tgt)
            if i % 2 == 0:
                # rightward pass meets ⊣
                if last:
                    if rng.random() < 0.8:
                        add(q, END, "acc")
                else:
                    for tgt in pick_targets(passes[i + 1]):
                        add(q, END, tgt)
            else:
                # leftward pass starts by reading ⊣ and ends on ⊢
                for tgt in pick_targets(ps):
                    add(q, END, tgt)
                if rng.random() < 0.9:
                    add(q, BEGIN, f"t{i}")
        if i % 2 == 1:
            for tgt in (pick_targets(passes[i + 1]) or [passes[i + 1][0]]):
                add(f"t{i}", BEGIN, tgt)
    if constraint is None:
        constraint = random_constraint(rng, d)
    A = TwoWayParikhAutomaton(
        alphabet=alphabet,
        dimension=d,
        states=tuple(states),
        left=frozenset(left),
        initial=frozenset({"s"}),
        halting=frozenset({"acc"}),
        accepting=frozenset({"acc"}),
        transitions=tuple(trans),
        constraint=constraint,
    )
    validate(A)
    return A


def corpus(seed: int, n: int, **kw) -> List[TwoWayParikhAutomaton]:
    rng = random.Random(seed)
    return [random_sweeping(rng, **kw) for _ in range(n)]
