import pytest

from twoway_parikh.constructions import (
    build_mismatch,
    build_multiplication,
    build_section_example,
    build_sweep,
    encode_system,
    parse_equations,
)
from twoway_parikh.core import BEGIN, END, language_sample
from twoway_parikh.crossing import to_one_way
from twoway_parikh.presburger import is_valid, iff
from twoway_parikh.randomgen import corpus
from twoway_parikh.textformat import TextFormatError, format_2pa, load_2pa, parse_2pa

EXAMPLE = """\
// two letters, counting nothing
alphabet a b #
dim 2
state q0 R initial
state q1 R
state q5 L
state qf R halting accepting
trans q0 BEGIN q1 (0,0)
trans q1 a q1 (1,0)
trans q1 # q1 (0,0)
trans q1 b q1 (0,1)
trans q1 END qf (0,0)
constraint: exists y. x1 = y + y /\\ x2 <= x1
"""


def same(A, B):
    return (A.alphabet, A.dimension, A.states, A.left, A.initial, A.halting, A.accepting, A.transitions) == (
        B.alphabet, B.dimension, B.states, B.left, B.initial, B.halting, B.accepting, B.transitions
    ) and is_valid(iff(A.constraint, B.constraint))


def test_parse_documented_example():
    A = parse_2pa(EXAMPLE)
    assert A.alphabet == ("a", "b", "#")
    assert A.dimension == 2
    assert A.left == {"q5"}
    assert A.accepting == {"qf"}
    assert any(t.symbol == BEGIN for t in A.transitions)
    assert any(t.symbol == END for t in A.transitions)
    assert ("a", "a", "b") in language_sample(A, 3)
    assert ("a",) not in language_sample(A, 3)


@pytest.mark.parametrize("make", [
    build_sweep,
    build_multiplication,
    build_section_example,
    lambda: build_mismatch(2),
    lambda: encode_system(parse_equations("x*y + 3 = z*z")),
])
def test_round_trip_generated(make):
    A = make()
    assert same(parse_2pa(format_2pa(A)), A)


def test_round_trip_random_corpus():
    for A in corpus(30, 30):
        assert same(parse_2pa(format_2pa(A)), A)


def test_round_trip_structured_states_is_stable():
    # section states get canonical names, so printing is a fixed point after one pass
    R = to_one_way(build_sweep(), 3)
    text = format_2pa(R)
    assert "[(" in text
    again = format_2pa(parse_2pa(text))
    assert [l for l in again.splitlines() if not l.startswith("//")] == \
        [l for l in text.splitlines() if not l.startswith("//")]


def test_load_from_file(tmp_path):
    p = tmp_path / "ex.2pa"
    p.write_text(EXAMPLE)
    assert load_2pa(str(p)).dimension == 2


@pytest.mark.parametrize("text, line", [
    ("alphabet a\ndim x\n", 2),
    ("alphabet a\ndim 0\nstate p Q\n", 3),
    ("alphabet a\ndim 0\nstate p R initial\ntrans p c p ()\n", 4),
    ("alphabet a\ndim 1\nstate p R initial\ntrans p a p (1,2)\n", 4),
    ("alphabet a\ndim 0\nconstraint: x1 <=\n", 3),
    ("alphabet a\ndim 0\nfrobnicate\n", 3),
])
def test_errors_name_the_line(text, line):
    with pytest.raises(TextFormatError) as err:
        parse_2pa(text, filename="bad.2pa")
    assert err.value.line == line
    assert str(err.value).startswith(f"bad.2pa:{line}:")


def test_invalid_automaton_is_reported():
    text = "alphabet a\ndim 0\nstate p R initial\nstate f R halting accepting\ntrans p a f ()\n"
    with pytest.raises(TextFormatError) as err:
        parse_2pa(text)
    assert "invalid automaton" in str(err.value)
