import pytest

from oracles import all_words, count_accepting_runs
from twoway_parikh.core import BEGIN, END, Transition, accepting_run, accepting_runs, language_sample, max_visits, tape
from twoway_parikh.crossing import (
    TOP,
    CrossingSection,
    MergeError,
    SectionError,
    anchorage,
    crossing_sections_of,
    erase,
    is_matching,
    merge,
    pad_symbol,
    sections_of_one_way_run,
    to_one_way,
    to_one_way_emptiness,
)
from twoway_parikh.decide import is_empty
from twoway_parikh.randomgen import corpus


def a_section(zigzag):
    r = accepting_run(zigzag, "ab")
    return crossing_sections_of(r, zigzag)[1]


# ------------------------------------------------------------ sections and anchorages

def test_worked_section_contents(zigzag):
    c = a_section(zigzag)
    assert [(t.source, t.target) for t in c.transitions] == [
        ("q2", "q3"), ("q3", "q4"), ("q4", "q5"), ("q11", "q12"), ("q12", "q13")]
    assert c.value() == (2 + 3 + 4 + 11 + 12,)


def test_worked_anchorages(zigzag):
    c = a_section(zigzag)
    assert anchorage(c, "L") == ("q2",)
    assert anchorage(c, "R") == ("q5", "q11", "q13")


def test_singleton_anchorages():
    c = CrossingSection("a", (Transition("p", "a", "q"),), (False,), (False,))
    assert anchorage(c, "L") == ("p",)
    assert anchorage(c, "R") == ("q",)


def test_matching_singletons():
    c1 = CrossingSection("a", (Transition("p", "a", "q"),), (False,), (False,))
    c2 = CrossingSection("b", (Transition("q", "b", "r"),), (False,), (False,))
    c3 = CrossingSection("b", (Transition("r", "b", "s"),), (False,), (False,))
    assert is_matching(c1, c2)
    assert not is_matching(c1, c3)


def test_adjacent_zigzag_sections_match(zigzag):
    cs = crossing_sections_of(accepting_run(zigzag, "ab"), zigzag)
    assert len(cs) == 4
    assert all(is_matching(x, y) for x, y in zip(cs, cs[1:]))


def test_malformed_sections_rejected():
    t = Transition("p", "a", "q")
    with pytest.raises(SectionError):
        CrossingSection("a", (t, t), (False, True), (True, False))
    with pytest.raises(SectionError):
        CrossingSection("a", (t, t, t), (False, False, False), (True, False, False))
    with pytest.raises(SectionError):
        CrossingSection("b", (t,), (False,), (False,))
    with pytest.raises(ValueError):
        anchorage(CrossingSection("a", (t,), (False,), (False,)), "X")


def test_one_way_run_sections_are_singletons():
    A = corpus(40, 1, k=1)[0]
    for w in all_words(A.alphabet, 3):
        for r in accepting_runs(A, w):
            cs = crossing_sections_of(r, A)
            assert len(cs) == len(w) + 2
            assert all(len(c) == 1 for c in cs)


def test_sweep_interior_sections_have_three_transitions(sweep):
    cs = crossing_sections_of(accepting_run(sweep, "ab"), sweep)
    assert len(cs) == 4
    assert [len(c) for c in cs[1:-1]] == [3, 3]


def test_sections_are_well_formed_and_bounded(small_corpus):
    for A in small_corpus:
        for w in all_words(A.alphabet, 3):
            for r in accepting_runs(A, w, 60):
                cs = crossing_sections_of(r, A)
                assert len(cs) == len(tape(r.word))
                for c, a in zip(cs, tape(r.word)):
                    assert c.symbol == a
                    assert len(c) <= max_visits(r)
                    assert not c.source_left[0] and not c.target_left[-1]


# ------------------------------------------------------------ merging

def test_merge_round_trip(small_corpus, sweep, zigzag):
    for A in small_corpus + [sweep, zigzag]:
        for w in all_words(A.alphabet, 3):
            for r in accepting_runs(A, w, 60):
                cs = crossing_sections_of(r, A)
                back = merge(cs, w, A)
                assert back.transitions == r.transitions and back.configs == r.configs
                total = tuple(sum(c.value(A.dimension)[k] for c in cs) for k in range(A.dimension))
                assert back.value == total == r.value


def test_merge_reports_first_mismatch(sweep, zigzag):
    zs = crossing_sections_of(accepting_run(zigzag, "ab"), zigzag)
    with pytest.raises(MergeError, match="sections 1 and 2"):
        merge([zs[0], zs[1], zs[1], zs[3]], "aa", zigzag)
    cs = crossing_sections_of(accepting_run(sweep, "ab"), sweep)
    with pytest.raises(MergeError):
        merge(cs[:3], "a", sweep)
    with pytest.raises(MergeError, match="not initial"):
        not_initial = CrossingSection.of(sweep, [Transition("turn", BEGIN, "p3", (0, 0))])
        merge([not_initial] + cs[1:], "ab", sweep)


# ------------------------------------------------------------ conversion

def test_to_one_way_sweep_language(sweep):
    R = to_one_way(sweep, 3)
    assert R.is_one_way
    assert language_sample(R, 5) == language_sample(sweep, 5)


def test_to_one_way_on_one_way_input():
    for A in corpus(41, 10, k=1):
        R = to_one_way(A, 1)
        assert language_sample(R, 4) == language_sample(A, 4)


def test_to_one_way_deterministic_is_unambiguous(det_corpus, sweep):
    for A in det_corpus[:20] + [sweep]:
        R = to_one_way(A, len(A.states))
        for w in all_words(A.alphabet, 4):
            assert count_accepting_runs(R, w) <= 1


def test_converted_runs_read_back_as_sections(sweep):
    R = to_one_way(sweep, 3)
    r = accepting_run(R, "ab")
    cs = sections_of_one_way_run(r)
    m = merge(cs, "ab", sweep)
    assert m.value == r.value == (1, 1)


def test_state_count_bound(small_corpus):
    for A in small_corpus[:20]:
        k = 3
        R = to_one_way(A, k)
        n = len(A.transitions)
        assert len(R.states) <= sum(n ** l for l in range(1, k + 1)) + 1
        assert TOP in R.accepting


def test_k_must_be_positive(sweep):
    with pytest.raises(ValueError):
        to_one_way(sweep, 0)


def test_small_k_under_approximates(sweep):
    R = to_one_way(sweep, 1)
    assert language_sample(R, 3) <= language_sample(sweep, 3)
    assert language_sample(R, 3) == set()


# ------------------------------------------------------------ emptiness variant

def test_emptiness_variant_without_long_sections_is_the_same():
    for A in corpus(42, 5, k=1):
        R = to_one_way(A, 1)
        N = to_one_way_emptiness(A, 1, R)
        assert set(N.transitions) == set(R.transitions)
        assert set(N.states) == set(R.states)


def test_emptiness_variant_keeps_weights_and_counts_fresh_states(small_corpus):
    for A in small_corpus[:20]:
        R = to_one_way(A, 3)
        N = to_one_way_emptiness(A, 3, R)
        assert {t.vector for t in N.transitions} <= {t.vector for t in A.transitions}
        assert len(N.states) - len(R.states) == sum(len(t.source) - 1 for t in R.transitions)


def test_emptiness_variant_of_sweep(sweep):
    N = to_one_way_emptiness(sweep, 3)
    pad = pad_symbol(sweep.alphabet)
    assert pad == "#"
    assert () in {erase(w, pad) for w in language_sample(N, 7)}
    assert not is_empty(N, 1).empty and not is_empty(sweep, 3).empty


def test_pad_symbol_avoids_alphabet():
    assert pad_symbol(["a", "#"]) == "$"
    assert pad_symbol(["#", "$", "%", "&", "@"]) == "#1"
