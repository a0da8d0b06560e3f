import itertools
import random

import pytest
from hypothesis import given, strategies as st

from oracles import all_words
from twoway_parikh.constructions import Builder, build_sweep
from twoway_parikh.core import BEGIN, END, WordError, accepting_run, language_sample
from twoway_parikh.crossing import to_one_way
from twoway_parikh.nfa import NFA, TooLarge, from_one_way, letters_of
from twoway_parikh.parikh import (
    VectorAlphabetView,
    flow_formula,
    length_formula,
    parikh_image_formula,
    parikh_vector,
    semilinear_image,
)
from twoway_parikh.presburger import (
    TRUE,
    Exists,
    Var,
    conj,
    const_term,
    eq,
    exists,
    free_vars,
    is_satisfiable,
    parse_formula,
)


def with_values(f, values):
    return conj(f, *[eq(Var(n), const_term(v)) for n, v in values.items()])


def random_one_way(rng, letters=("a", "b"), n=None, dim=0):
    """Arbitrary one-way automaton with at most four working states."""
    n = n or rng.randint(1, 4)
    B = Builder(letters, dim)
    B.state("s", initial=True)
    B.state("f", accepting=True)
    work = [B.state(f"w{i}") for i in range(n)]
    vec = lambda: tuple(rng.choice((-1, 0, 1)) for _ in range(dim))
    for q in rng.sample(work, rng.randint(1, n)):
        B.trans("s", BEGIN, q, vec())
    for p in work:
        for a in letters:
            for q in work:
                if rng.random() < 0.35:
                    B.trans(p, a, q, vec())
        if rng.random() < 0.6:
            B.trans(p, END, "f", vec())
    return B.build()


# ------------------------------------------------------------ Parikh vectors

def test_parikh_vector_examples():
    assert parikh_vector("abba", ("a", "b")) == (2, 2)
    assert parikh_vector("", ("a", "b")) == (0, 0)
    with pytest.raises(WordError):
        parikh_vector("abc", ("a", "b"))


@given(st.lists(st.sampled_from("abc"), max_size=12), st.randoms(use_true_random=False))
def test_parikh_vector_ignores_order(w, rnd):
    shuffled = list(w)
    rnd.shuffle(shuffled)
    assert parikh_vector(w, "abc") == parikh_vector(shuffled, "abc")
    assert sum(parikh_vector(w, "abc")) == len(w)


# ------------------------------------------------------------ Parikh image

def test_image_of_single_word():
    B = Builder(("a", "b"), 0)
    B.state("s", initial=True)
    B.state("p")
    B.state("q")
    B.state("r")
    B.state("f", accepting=True)
    B.trans("s", BEGIN, "p")
    B.trans("p", "a", "q")
    B.trans("q", "b", "r")
    B.trans("r", END, "f")
    f = parikh_image_formula(B.build())
    assert free_vars(f) == {"t1", "t2"}
    models = {v for v in itertools.product(range(4), repeat=2) if is_satisfiable(with_values(f, {"t1": v[0], "t2": v[1]}))}
    assert models == {(1, 1)}


def test_image_of_star():
    B = Builder(("a",), 0)
    B.state("s", initial=True)
    B.state("p")
    B.state("f", accepting=True)
    B.trans("s", BEGIN, "p")
    B.trans("p", "a", "p")
    B.trans("p", END, "f")
    f = parikh_image_formula(B.build())
    assert is_satisfiable(with_values(f, {"t1": 5}))
    assert not is_satisfiable(conj(f, parse_formula("t1 + 1 <= 0")))


def test_image_matches_enumeration():
    rng = random.Random(50)
    for _ in range(12):
        N = random_one_way(rng)
        f = parikh_image_formula(N)
        seen = {parikh_vector(w, N.alphabet) for w in language_sample(N, 8)}
        for v in itertools.product(range(9), repeat=2):
            if sum(v) > 8:
                continue  # longer words are outside the sample
            sat = is_satisfiable(with_values(f, {"t1": v[0], "t2": v[1]}))
            assert sat == (v in seen), (v, N)


def test_image_rejects_two_way(sweep):
    with pytest.raises(ValueError):
        parikh_image_formula(sweep)


def test_flow_formula_connectivity_matters():
    # the a-cycle is only reachable through c; using it without c is a detached cycle
    nfa = NFA(["i", "x", "y"], {"i"}, {"i"},
              [("i", "b", "i"), ("i", "c", "x"), ("x", "a", "y"), ("y", "a", "x"), ("x", "d", "i")])
    counters = {"a": "na", "b": "nb", "c": "nc", "d": "nd"}
    detached = {"na": 2, "nb": 0, "nc": 0, "nd": 0}
    assert not is_satisfiable(with_values(flow_formula(nfa, counters).formula, detached))
    assert is_satisfiable(with_values(flow_formula(nfa, counters, connected=False).formula, detached))
    assert is_satisfiable(with_values(flow_formula(nfa, counters).formula, dict(detached, nc=1, nd=1)))


def test_semilinear_image_ignores_constraint(sweep):
    R = to_one_way(sweep, 3)
    assert semilinear_image(R, 2) == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}


# ------------------------------------------------------------ length formula

def test_length_formula_empty_language():
    B = Builder(("a",), 0)
    B.state("s", initial=True)
    B.state("p")
    B.state("f", accepting=True)
    B.trans("s", BEGIN, "p")
    B.trans("p", "a", "p")
    f = length_formula(B.build())
    assert not is_satisfiable(exists("l", f))


def test_length_formula_sweep_matches_sample(sweep):
    R = to_one_way(sweep, 3)
    f = length_formula(R)
    assert free_vars(f) == {"l"}
    lengths = {len(w) for w in language_sample(sweep, 8)}
    for l in range(9):
        assert is_satisfiable(with_values(f, {"l": l})) == (l in lengths)


def test_length_formula_dimension_zero():
    rng = random.Random(51)
    for _ in range(8):
        N = random_one_way(rng)
        f = length_formula(N)
        lengths = {len(w) for w in language_sample(N, 6)}
        for l in range(7):
            assert is_satisfiable(with_values(f, {"l": l})) == (l in lengths)


def test_length_formula_with_counters():
    rng = random.Random(52)
    psi = parse_formula("x1 = x2")
    for _ in range(8):
        N = random_one_way(rng, dim=2).replace(constraint=psi)
        f = length_formula(N)
        lengths = {len(w) for w in language_sample(N, 6)}
        for l in range(7):
            assert is_satisfiable(with_values(f, {"l": l})) == (l in lengths)


def test_run_counts_are_a_model(sweep):
    # the occurrence counts of an actual run satisfy the body of φ(|w|)
    R = to_one_way(sweep, 3)
    view = VectorAlphabetView.of(R)
    f = length_formula(R)
    body = f
    while isinstance(body, Exists) and (body.var.startswith("t") or body.var.startswith("c")):
        body = body.body
    for w in ["ab", "aabb", "ba"]:
        r = accepting_run(R, w)
        counts = {f"t{j + 1}": sum(1 for t in r.transitions if t.vector == v) for j, v in enumerate(view.vectors)}
        values = dict(counts, l=len(w))
        values.update({f"c{k + 1}": r.value[k] for k in range(2)})
        assert is_satisfiable(with_values(body, values))
        wrong = dict(values, c1=r.value[0] + 1)
        assert not is_satisfiable(with_values(body, wrong))


def test_vector_view_shares_labels(sweep):
    R = to_one_way(sweep, 3)
    view = VectorAlphabetView.of(R)
    assert view.gamma == len({t.vector for t in R.transitions})
    assert sorted(view.vectors) == sorted({t.vector for t in R.transitions})


# ------------------------------------------------------------ plain automata

def random_nfa(rng):
    n = rng.randint(1, 5)
    edges = [(p, a, q) for p in range(n) for a in "ab" for q in range(n) if rng.random() < 0.3]
    edges += [(p, None, q) for p in range(n) for q in range(n) if p != q and rng.random() < 0.1]
    return NFA(list(range(n)), {0}, {q for q in range(n) if rng.random() < 0.4}, edges)


def test_determinize_and_minimize_keep_language():
    rng = random.Random(53)
    for _ in range(40):
        A = random_nfa(rng)
        D = A.determinize()
        M = D.minimize()
        C = D.complete("ab")
        for w in all_words("ab", 5):
            want = A.accepts(w)
            assert D.accepts(w) == want
            assert M.accepts(w) == want
            assert C.accepts(w) == want
        assert len(M.states) <= len(D.states)


def test_reverse_accepts_mirror():
    rng = random.Random(54)
    for _ in range(20):
        A = random_nfa(rng)
        R = A.reverse()
        for w in all_words("ab", 4):
            assert R.accepts(w[::-1]) == A.accepts(w)


def test_trim_keeps_language():
    rng = random.Random(55)
    for _ in range(20):
        A = random_nfa(rng)
        T = A.trim()
        assert all(T.accepts(w) == A.accepts(w) for w in all_words("ab", 4))


def test_determinize_cap():
    # the classic "k-th letter from the end" blow-up
    n = 8
    edges = [(0, "a", 0), (0, "b", 0), (0, "a", 1)] + [(i, c, i + 1) for i in range(1, n) for c in "ab"]
    A = NFA(list(range(n + 1)), {0}, {n}, edges)
    with pytest.raises(TooLarge):
        A.determinize(cap=50)


def test_minimize_needs_deterministic_input():
    with pytest.raises(ValueError):
        NFA([0, 1], {0, 1}, {1}, []).minimize()


def test_letters_of_matches_language(sweep):
    R = to_one_way(build_sweep(TRUE), 3)
    nfa = letters_of(R)
    for w in all_words("ab", 4):
        assert nfa.accepts(w) == bool(accepting_run(R, w))
    with pytest.raises(ValueError):
        from_one_way(sweep, lambda t: t.symbol)
