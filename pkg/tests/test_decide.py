import pytest

from oracles import all_words
from twoway_parikh.constructions import Builder, build_mismatch, build_sweep
from twoway_parikh.core import (
    ACCEPTED,
    BEGIN,
    END,
    WordError,
    accepts_oracle,
    is_accepting_run,
    is_deterministic,
    language_sample,
    make_run,
    validate,
)
from twoway_parikh.decide import (
    AlphabetMismatch,
    NotDeterministic,
    complement,
    configuration_automaton,
    equivalent,
    includes,
    intersect,
    is_empty,
    is_empty_generalized,
    is_universal,
    membership,
    underlying_dfa,
    union,
    value_satisfies,
)
from twoway_parikh.presburger import TRUE, classify, parse_formula
from twoway_parikh.randomgen import corpus

AB = ("a", "b")


def count_a_automaton(psi):
    """One-way, one counter: the number of a's."""
    B = Builder(AB, 1)
    B.state("s", initial=True)
    B.state("p")
    B.state("f", accepting=True)
    B.trans("s", BEGIN, "p", (0,))
    B.trans("p", "a", "p", (1,))
    B.trans("p", "b", "p", (0,))
    B.trans("p", END, "f", (0,))
    return B.build(parse_formula(psi))


def everything():
    B = Builder(AB, 0)
    B.state("s", initial=True)
    B.state("p")
    B.state("f", accepting=True)
    B.trans("s", BEGIN, "p")
    B.trans("p", AB, "p")
    B.trans("p", END, "f")
    return B.build()


def no_accepting(P):
    """``P`` with Q_F empty; halting states become L-reading to keep ⊣-moves legal."""
    return P.replace(accepting=frozenset(), left=P.left | P.halting)


def nothing():
    return no_accepting(everything())


def sample(P, n=5):
    return language_sample(P, n)


def universe(n=5):
    return set(all_words(AB, n))


# ------------------------------------------------------------ emptiness

def test_no_accepting_states_is_empty(sweep):
    assert is_empty(no_accepting(sweep)).empty


def test_sweep_nonempty_with_empty_witness(sweep):
    v = is_empty(sweep, 3, witness=True)
    assert not v.empty
    assert v.witness.word == ()
    assert v.witness.value == (0, 0)


def test_shortest_witness_for_stronger_constraint():
    P = build_sweep(parse_formula("x1 = x2 /\\ 1 <= x1"))
    v = is_empty(P, 3, witness=True)
    assert not v.empty
    assert v.witness.word in {("a", "b"), ("b", "a")}
    shortest = min(len(w) for w in language_sample(P, 4))
    assert len(v.witness.word) == shortest == 2


def test_witness_replays_and_satisfies(sweep):
    P = build_sweep(parse_formula("exists y. x1 = y + y /\\ 1 <= y /\\ x2 <= x1"))
    v = is_empty(P, 3, witness=True)
    w = v.witness
    again = make_run(P, w.word, w.run.configs[0], w.run.transitions)
    assert is_accepting_run(P, again)
    assert again.value == w.value
    assert value_satisfies(P, w.value)
    assert accepts_oracle(P, w.word) == ACCEPTED


def test_visit_bound_rules(mult, sweep):
    with pytest.raises(ValueError):
        is_empty(sweep, 0)
    with pytest.raises(ValueError):
        is_empty(mult)


def test_verdict_reports_constraint_class(sweep):
    assert is_empty(sweep).constraint_class == (0, "Sigma")


def test_tautological_universal_constraint(sweep):
    taut = build_sweep(parse_formula("forall y. y + 1 <= x1 \\/ x1 <= y"))
    assert classify(taut.constraint) == (1, "Pi")
    assert is_empty_generalized(taut, 3).empty == is_empty(build_sweep(TRUE), 3).empty == False


def test_no_integer_is_below_everything(sweep):
    assert is_empty_generalized(build_sweep(parse_formula("forall y. x1 <= y")), 3).empty


def test_sigma2_constraints_agree_with_search():
    constraints = [
        "exists u. forall v. x1 <= v \\/ u <= v + x2",
        "exists u. x1 = u + u /\\ forall v. v <= u \\/ x2 <= v",
        "forall v. exists u. x1 + v = u + u \\/ x2 <= x1",
    ]
    for text in constraints:
        for P in corpus(60, 6, k=3, dim=2, constraint=parse_formula(text)):
            v = is_empty_generalized(P, 3, witness=True, max_witness_len=6)
            found = language_sample(P, 5)
            if found:
                assert not v.empty
            if v.empty:
                assert not found
            elif v.witness is not None:
                assert accepts_oracle(P, v.witness.word) == ACCEPTED


# ------------------------------------------------------------ membership

def test_membership_multiplication(mult):
    assert membership(mult, "aa#aaa#aaaaaa")
    assert not membership(mult, "aa#aaa#aaaaa")


def test_membership_mismatch(mismatch1):
    assert membership(mismatch1, "a#bc")
    assert membership(mismatch1, "#")
    assert not membership(mismatch1, "#bc")


def test_membership_matches_oracle(det_corpus, small_corpus):
    for P in det_corpus[:15] + small_corpus[:10]:
        for w in all_words(P.alphabet, 3):
            assert membership(P, w) == (accepts_oracle(P, w) == ACCEPTED), (P, w)


def test_configuration_automaton_is_one_way(sweep):
    Pw = configuration_automaton(sweep, "ab")
    validate(Pw)
    assert Pw.is_one_way
    with pytest.raises(WordError):
        membership(sweep, "abc")


# ------------------------------------------------------------ closures

def test_intersect_idempotent(sweep):
    I = intersect(sweep, sweep)
    assert is_deterministic(I)
    assert I.dimension == 4
    assert sample(I) == sample(sweep)


def test_intersect_with_even_count(sweep):
    even = count_a_automaton("exists y. x1 = 2*(y)")
    I = intersect(sweep, even)
    expected = {w for w in universe(6) if w.count("a") == w.count("b") and w.count("a") % 2 == 0}
    assert sample(I, 6) == expected


def test_intersect_with_empty(sweep):
    assert is_empty(intersect(sweep, nothing())).empty


def test_closure_input_checks(mult, sweep):
    with pytest.raises(NotDeterministic):
        intersect(mult, mult)
    with pytest.raises(NotDeterministic):
        complement(mult)
    with pytest.raises(AlphabetMismatch):
        union(sweep, build_mismatch(0))


def test_complement_of_sweep(sweep):
    C = complement(sweep)
    assert is_deterministic(C)
    assert sample(C, 6) == {w for w in universe(6) if w.count("a") != w.count("b")}


def test_complement_involution(sweep):
    assert sample(complement(complement(sweep))) == sample(sweep)


def test_complement_of_everything_is_empty():
    assert is_empty(complement(everything())).empty


def test_complement_flips_class():
    P = build_sweep(parse_formula("exists y. x1 = y + y /\\ x2 <= y"))
    assert classify(P.constraint) == (1, "Sigma")
    assert classify(complement(P).constraint) == (1, "Pi")


def test_union_examples(sweep):
    assert sample(union(sweep, sweep)) == sample(sweep)
    assert sample(union(sweep, complement(sweep)), 6) == universe(6)
    assert sample(union(sweep, nothing())) == sample(sweep)
    assert sample(union(nothing(), sweep)) == sample(sweep)
    assert is_deterministic(union(sweep, complement(sweep)))


def test_underlying_dfa_ignores_counters(det_corpus):
    for P in det_corpus[:15]:
        D = underlying_dfa(P)
        plain = language_sample(P.replace(constraint=TRUE), 4)
        for w in all_words(P.alphabet, 4):
            assert D.accepts(w) == (w in plain)


# ------------------------------------------------------------ comparisons

def test_equivalent_reflexive(sweep, mismatch1):
    assert equivalent(sweep, sweep)
    assert equivalent(mismatch1, mismatch1)


def test_includes_strict_sublanguage(sweep):
    stronger = build_sweep(parse_formula("x1 = x2 /\\ x1 >= 1"))
    assert includes(stronger, sweep)
    assert not includes(sweep, stronger)
    assert sample(stronger, 6) < sample(sweep, 6)
    assert not equivalent(sweep, stronger)


def test_universality(sweep):
    assert is_universal(everything())
    assert not is_universal(sweep)
    assert is_universal(union(sweep, complement(sweep)))
