import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_words
from twoway_parikh.constructions import build_mismatch, build_sweep, mismatch_predicate, multiplication_predicate
from twoway_parikh.core import (
    ACCEPTED,
    BEGIN,
    BOUND_EXHAUSTED,
    END,
    REJECTED,
    ArityError,
    Condition1Error,
    Condition2Error,
    Condition3Error,
    Configuration,
    PartitionError,
    Run,
    Transition,
    TwoWayParikhAutomaton,
    WordError,
    accepting_run,
    accepting_runs,
    accepts_oracle,
    check_k_visit,
    is_accepting_run,
    is_deterministic,
    language_sample,
    make_run,
    max_visits,
    step,
    validate,
)
from twoway_parikh.presburger import TRUE, parse_formula
from twoway_parikh.randomgen import corpus


def tiny(transitions, left=(), initial=("p",), halting=("f",), accepting=("f",), dim=0, constraint=TRUE,
         states=("p", "q", "f")):
    return TwoWayParikhAutomaton(
        alphabet=("a",),
        dimension=dim,
        states=states,
        left=frozenset(left),
        initial=frozenset(initial),
        halting=frozenset(halting),
        accepting=frozenset(accepting),
        transitions=tuple(transitions),
        constraint=constraint,
    )


def T(p, a, q, v=()):
    return Transition(p, a, q, v)


# ------------------------------------------------------------ validation

def test_validate_accepts_worked_examples(mult, mismatch1, sweep):
    for A in (mult, mismatch1, sweep):
        validate(A)


def test_condition1_outgoing_from_halting():
    A = tiny([T("p", BEGIN, "q"), T("q", END, "f"), T("f", "a", "q")])
    with pytest.raises(Condition1Error) as err:
        validate(A)
    assert "f" in str(err.value)


def test_condition2_left_states_on_begin():
    A = tiny([T("p", BEGIN, "q"), T("q", BEGIN, "q"), T("p", END, "f")], left=("q",))
    with pytest.raises(Condition2Error):
        validate(A)


def test_condition2_right_to_right_on_end_must_accept():
    A = tiny([T("p", BEGIN, "p"), T("p", END, "q"), T("p", END, "f")])
    with pytest.raises(Condition2Error):
        validate(A)


def test_condition3_into_halting_reads_end():
    A = tiny([T("p", BEGIN, "q"), T("q", "a", "f")])
    with pytest.raises(Condition3Error):
        validate(A)


def test_condition3_into_halting_from_right_state():
    A = tiny([T("p", BEGIN, "q"), T("q", END, "f")], left=("q",))
    with pytest.raises(Condition3Error):
        validate(A)


def test_partition_initial_must_read_right():
    A = tiny([T("p", END, "f")], left=("p",))
    with pytest.raises(PartitionError):
        validate(A)


def test_partition_accepting_must_halt():
    A = tiny([T("p", END, "f")], halting=(), accepting=("f",))
    with pytest.raises(PartitionError):
        validate(A)


def test_arity_of_vectors_and_constraint():
    with pytest.raises(ArityError):
        validate(tiny([T("p", END, "f", (1,))], dim=2))
    with pytest.raises(ArityError):
        validate(tiny([T("p", END, "f", (1,))], dim=1, constraint=parse_formula("x1 <= x2")))


def test_mu_is_largest_absolute_entry():
    A = tiny([T("p", BEGIN, "q", (3, -7)), T("q", END, "f", (0, 1))], dim=2)
    assert A.mu == 7


# ------------------------------------------------------------ step

def test_step_from_halting_is_empty(sweep):
    assert step(sweep, ("a",), Configuration(3, "acc")) == frozenset()


def test_step_multiplication_first_move(mult):
    succ = step(mult, "a#a#a", Configuration(0, "q0"))
    assert len(succ) == 1
    (t, c), = succ
    assert t.symbol == BEGIN and t.vector == (0, 0)
    assert c == Configuration(1, "q1")


def test_step_deterministic_has_at_most_one_successor(det_corpus):
    for A in det_corpus:
        for w in all_words(A.alphabet, 2):
            for pos in range(len(w) + 3):
                for q in A.states:
                    assert len(step(A, w, Configuration(pos, q))) <= 1


def test_step_position_out_of_range(sweep):
    with pytest.raises(ValueError):
        step(sweep, "ab", Configuration(5, "p1"))


def test_left_state_reading_begin_stays_at_zero(sweep):
    (t, c), = step(sweep, "ab", Configuration(1, "back"))
    assert t.symbol == BEGIN and c == Configuration(0, "turn")


def test_foreign_symbol_rejected(sweep):
    with pytest.raises(WordError):
        accepts_oracle(sweep, "abc")


# ------------------------------------------------------------ oracle and sampling

def test_multiplication_oracle(mult):
    assert accepts_oracle(mult, "aa#aaa#aaaaaa") == ACCEPTED
    assert accepts_oracle(mult, "aa#aaa#aaaaa", 2000) != ACCEPTED
    assert accepts_oracle(mult, "#a#") == ACCEPTED


def test_multiplication_matches_predicate_on_short_words(mult):
    for w in all_words(mult.alphabet, 6):
        assert (accepts_oracle(mult, w, 400) == ACCEPTED) == multiplication_predicate(w), w


def test_mismatch_oracle(mismatch1):
    assert accepts_oracle(mismatch1, "a#bc") == ACCEPTED
    assert accepts_oracle(mismatch1, "#bc") == REJECTED


def test_language_sample_examples(sweep):
    assert language_sample(build_mismatch(0), 1) == {("#",)}
    assert language_sample(sweep, 2) == {(), ("a", "b"), ("b", "a")}
    assert language_sample(sweep.replace(accepting=frozenset()), 3) == set()


def test_bound_exhausted_is_a_value(mult):
    assert accepts_oracle(mult, "aa#aa#aaaa", 3) == BOUND_EXHAUSTED


def test_dimension_zero_oracle_is_plain_acceptance():
    # the sweeper without counters accepts everything
    plain = build_sweep(TRUE).replace(dimension=0, transitions=tuple(
        Transition(t.source, t.symbol, t.target, ()) for t in build_sweep().transitions))
    validate(plain)
    assert language_sample(plain, 3) == set(all_words(("a", "b"), 3))


def test_deterministic_oracle_terminates_fast(det_corpus):
    # a looping machine is rejected by configuration repetition, independent of the bound
    for A in det_corpus[:10]:
        for w in all_words(A.alphabet, 3):
            assert accepts_oracle(A, w, 0) == accepts_oracle(A, w, 10 ** 6)


# ------------------------------------------------------------ runs

def test_runs_replay_through_step(small_corpus):
    for A in small_corpus[:15]:
        for w in all_words(A.alphabet, 3):
            for r in accepting_runs(A, w, 60):
                again = make_run(A, w, r.configs[0], r.transitions)
                assert again.configs == r.configs and again.value == r.value
                assert is_accepting_run(A, r)


def test_empty_word_run(sweep):
    r = accepting_run(sweep, "")
    assert r is not None and r.value == (0, 0)
    assert r.final.position == 2


def test_value_is_order_independent(sweep):
    r = accepting_run(sweep, "abab")
    total = [0, 0]
    for t in reversed(r.transitions):
        total = [a + b for a, b in zip(total, t.vector)]
    assert tuple(total) == r.value == (2, 2)


def test_deterministic_accepting_runs_never_repeat(det_corpus):
    for A in det_corpus:
        for w in all_words(A.alphabet, 4):
            r = accepting_run(A, w)
            if r is None:
                continue
            assert len(set(r.configs)) == len(r.configs)
            assert max_visits(r) <= len(A.states)


# ------------------------------------------------------------ visits

def test_max_visits_one_way():
    A = corpus(20, 1, k=1)[0]
    for w in all_words(A.alphabet, 3):
        for r in accepting_runs(A, w):
            assert max_visits(r) == 1


def test_max_visits_empty_run():
    assert max_visits(Run((), (Configuration(0, "p"),))) == 0


def test_max_visits_zigzag(zigzag):
    # five configurations sit between a and b: the a-section has five transitions
    r = accepting_run(zigzag, "ab")
    assert max_visits(r) == 5


def test_sweep_is_three_visit(sweep):
    assert max_visits(accepting_run(sweep, "ab")) == 3
    assert check_k_visit(sweep, 3, 4).consistent


def test_check_k_visit_examples(mult, det_corpus):
    for A in det_corpus[:10]:
        assert check_k_visit(A, len(A.states), 3).consistent
    res = check_k_visit(mult, 3, 6, 400)
    assert not res.consistent and max_visits(res.counterexample) > 3
    for A in corpus(21, 5, k=1):
        assert check_k_visit(A, 1, 3).consistent


def test_check_k_visit_rejects_bad_k(sweep):
    with pytest.raises(ValueError):
        check_k_visit(sweep, 0, 2)


# ------------------------------------------------------------ determinism

def test_is_deterministic_examples(mult, mismatch1):
    assert is_deterministic(mismatch1)
    assert not is_deterministic(mult)
    assert is_deterministic(tiny([]))


@given(st.lists(st.sampled_from(["b", "c"]), max_size=6), st.integers(min_value=0, max_value=4))
@settings(max_examples=80, deadline=None)
def test_mismatch_language_is_its_predicate(u, k):
    n = 1
    A = build_mismatch(n)
    w = ("a",) * k + ("#",) + tuple(u)
    assert (accepts_oracle(A, w) == ACCEPTED) == mismatch_predicate(n, w)
