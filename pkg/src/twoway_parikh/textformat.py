"""Line-oriented ``.2pa`` text format.

    alphabet a b #
    dim 2
    state q0 R initial
    state q5 L
    state qf R halting accepting
    trans q0 BEGIN q1 (0,0)
    trans q3 END qf (0,0)
    constraint: exists y. x1 = y + y /\\ x2 <= x1

Lines starting with ``//`` are comments (``#`` is a common alphabet symbol).  ``BEGIN``
and ``END`` stand for the endmarkers.  The vector may be omitted in
dimension 0.
"""
from __future__ import annotations

import re
from typing import Dict, List, Optional

from .core import BEGIN, END, Transition, TwoWayParikhAutomaton, ValidationError, validate
from .presburger import TRUE, ParseError, parse_formula, to_str


class TextFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, filename: Optional[str] = None):
        self.message = message
        self.line = line
        self.filename = filename
        where = ""
        if filename:
            where = f"{filename}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


_NAME = re.compile(r"^[^\s(),]+$")
_FLAGS = {"initial", "halting", "accepting"}


def _symbol_in(tok: str) -> str:
    return {"BEGIN": BEGIN, "END": END}.get(tok, tok)


def _symbol_out(sym: str) -> str:
    return {BEGIN: "BEGIN", END: "END"}.get(sym, sym)


def _vector(text: str, lineno: int):
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise TextFormatError(f"expected a vector like (0,1), found {text!r}", lineno)
    inner = text[1:-1].strip()
    if not inner:
        return ()
    try:
        return tuple(int(x) for x in inner.split(","))
    except ValueError:
        raise TextFormatError(f"bad vector {text!r}", lineno) from None


def parse_2pa(text: str, filename: Optional[str] = None, check: bool = True) -> TwoWayParikhAutomaton:
    alphabet: List[str] = []
    dim: Optional[int] = None
    states: List[str] = []
    left, initial, halting, accepting = set(), set(), set(), set()
    transitions: List[Transition] = []
    constraint = TRUE
    seen_alphabet = False
    try:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("//"):
                continue
            if line.startswith("constraint"):
                m = re.match(r"constraint\s*:?\s*(.*)$", line)
                body = m.group(1)
                try:
                    constraint = parse_formula(body)
                except ParseError as e:
                    raise TextFormatError(f"constraint: {e}", lineno) from None
                continue
            toks = line.split()
            head = toks[0]
            if head == "alphabet":
                if seen_alphabet:
                    raise TextFormatError("alphabet declared twice", lineno)
                seen_alphabet = True
                alphabet = toks[1:]
                for a in alphabet:
                    if a in ("BEGIN", "END"):
                        raise TextFormatError(f"{a} is reserved for the endmarkers", lineno)
            elif head == "dim":
                if len(toks) != 2 or not toks[1].isdigit():
                    raise TextFormatError("dim expects one natural number", lineno)
                dim = int(toks[1])
            elif head == "state":
                if len(toks) < 3 or toks[2] not in ("R", "L"):
                    raise TextFormatError("expected: state <name> R|L [initial] [halting] [accepting]", lineno)
                name = toks[1]
                if name in states:
                    raise TextFormatError(f"state {name} declared twice", lineno)
                states.append(name)
                if toks[2] == "L":
                    left.add(name)
                for flag in toks[3:]:
                    if flag not in _FLAGS:
                        raise TextFormatError(f"unknown state flag {flag!r}", lineno)
                    {"initial": initial, "halting": halting, "accepting": accepting}[flag].add(name)
            elif head == "trans":
                m = re.match(r"trans\s+(\S+)\s+(\S+)\s+(\S+)\s*(\(.*\))?\s*$", line)
                if not m:
                    raise TextFormatError("expected: trans <source> <symbol> <target> (v1,...,vd)", lineno)
                src, sym, tgt, vec = m.groups()
                for s in (src, tgt):
                    if s not in states:
                        raise TextFormatError(f"unknown state {s}", lineno)
                sym = _symbol_in(sym)
                if sym not in (BEGIN, END) and sym not in alphabet:
                    raise TextFormatError(f"symbol {sym!r} is not in the alphabet", lineno)
                vector = _vector(vec, lineno) if vec else ()
                if dim is not None and len(vector) != dim:
                    if not vector and dim == 0:
                        pass
                    else:
                        raise TextFormatError(f"vector has length {len(vector)}, expected {dim}", lineno)
                transitions.append(Transition(src, sym, tgt, vector))
            else:
                raise TextFormatError(f"unknown directive {head!r}", lineno)
    except TextFormatError as e:
        if filename and not e.filename:
            raise TextFormatError(e.message, e.line, filename) from None
        raise
    if dim is None:
        raise TextFormatError("missing 'dim' line", None, filename)
    A = TwoWayParikhAutomaton(
        alphabet=tuple(alphabet),
        dimension=dim,
        states=tuple(states),
        left=frozenset(left),
        initial=frozenset(initial),
        halting=frozenset(halting),
        accepting=frozenset(accepting),
        transitions=tuple(transitions),
        constraint=constraint,
    )
    if check:
        try:
            validate(A)
        except ValidationError as e:
            raise TextFormatError(f"invalid automaton: {e}", None, filename) from None
    return A


def load_2pa(path: str, check: bool = True) -> TwoWayParikhAutomaton:
    with open(path, encoding="utf-8") as fh:
        return parse_2pa(fh.read(), filename=path, check=check)


def state_names(A: TwoWayParikhAutomaton) -> Dict[object, str]:
    """Printable names: plain string states keep theirs, others get ``s<i>``."""
    names: Dict[object, str] = {}
    taken = {q for q in A.states if isinstance(q, str) and _NAME.match(q) and q not in ("BEGIN", "END")}
    i = 0
    for q in A.states:
        if q in taken:
            names[q] = q
            continue
        while f"s{i}" in taken:
            i += 1
        names[q] = f"s{i}"
        taken.add(f"s{i}")
    return names


def describe_state(q) -> str:
    """Readable rendering of structured states (crossing sections print as transition lists)."""
    from .crossing import CrossingSection
    if isinstance(q, CrossingSection):
        return "[" + ", ".join(f"({t.source}, {_symbol_out(t.symbol)}, {t.target})" for t in q.transitions) + "]"
    return str(q)


def format_2pa(A: TwoWayParikhAutomaton) -> str:
    names = state_names(A)
    out = []
    out.append("alphabet " + " ".join(A.alphabet) if A.alphabet else "alphabet")
    out.append(f"dim {A.dimension}")
    for q in A.states:
        if names[q] != q:
            out.append(f"// {names[q]} = {describe_state(q)}")
    for q in A.states:
        flags = [f for f, s in (("initial", A.initial), ("halting", A.halting), ("accepting", A.accepting)) if q in s]
        out.append(" ".join(["state", names[q], "L" if q in A.left else "R"] + flags))
    for t in A.transitions:
        vec = "(" + ",".join(str(x) for x in t.vector) + ")"
        out.append(f"trans {names[t.source]} {_symbol_out(t.symbol)} {names[t.target]} {vec}")
    out.append(f"constraint: {to_str(A.constraint)}")
    return "\n".join(out) + "\n"
