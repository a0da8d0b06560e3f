import random

import pytest

from oracles import all_words
from twoway_parikh.core import check_k_visit, is_deterministic, validate
from twoway_parikh.randomgen import corpus, random_sweeping


def test_generated_automata_validate_and_respect_k():
    for k in (1, 3):
        for A in corpus(80, 30, k=k):
            validate(A)
            assert check_k_visit(A, k, 4, 400).consistent


def test_one_pass_is_one_way():
    assert all(A.is_one_way for A in corpus(81, 20, k=1))


def test_deterministic_flag():
    assert all(is_deterministic(A) for A in corpus(82, 40, deterministic=True))


def test_working_state_budget():
    # four working states at most; start, turn-around and accept gadgets come on top
    for A in corpus(83, 40, k=3):
        working = [q for q in A.states if q.startswith("p")]
        assert 1 <= len(working) <= 4
        assert len(A.alphabet) <= 2 and A.dimension <= 2
        assert all(x in (-1, 0, 1) for t in A.transitions for x in t.vector)


def test_even_passes_refused():
    with pytest.raises(ValueError):
        random_sweeping(random.Random(0), k=2)


def test_corpus_is_reproducible():
    assert corpus(84, 5) == corpus(84, 5)
