"""Example automata and the polynomial encoder.

* :func:`build_mismatch` -- deterministic automaton for
  ``{ a^k # u : u in {b,c}*, k = #{i : u[i] != u[i+n]} }``.
* :func:`build_multiplication` -- nondeterministic automaton for
  ``{ a^n # a^m # a^(n*m) }``; it is not bounded-visit.
* :func:`build_sweep` -- three-pass deterministic sweeper accepting the
  words over {a, b} with as many a's as b's.
* :func:`encode_polynomial` / :func:`encode_system` -- automata whose accepted
  words encode valuations of polynomials (see the docstrings below).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import BEGIN, END, Transition, TwoWayParikhAutomaton, validate
from .presburger import TRUE, Formula, Var, conj, const_term, eq, parse_formula
from .presburger.semilinear import SemiLinearSet, semilinear_to_formula


class Builder:
    """Small helper to assemble an automaton state by state."""

    def __init__(self, alphabet: Sequence[str], dim: int):
        self.alphabet = tuple(alphabet)
        self.dim = dim
        self.states: List = []
        self.left = set()
        self.initial = set()
        self.halting = set()
        self.accepting = set()
        self.transitions: List[Transition] = []

    def state(self, name, left=False, initial=False, halting=False, accepting=False):
        if name not in self.states:
            self.states.append(name)
        if left:
            self.left.add(name)
        if initial:
            self.initial.add(name)
        if halting or accepting:
            self.halting.add(name)
        if accepting:
            self.accepting.add(name)
        return name

    def trans(self, src, symbols, tgt, vector=None):
        if isinstance(symbols, str):
            symbols = [symbols]
        vec = tuple(vector) if vector is not None else (0,) * self.dim
        if len(vec) != self.dim:
            raise ValueError(f"vector {vec} has wrong length for dimension {self.dim}")
        for a in symbols:
            self.transitions.append(Transition(src, a, tgt, vec))

    def unit(self, i: int, k: int = 1) -> Tuple[int, ...]:
        v = [0] * self.dim
        v[i] = k
        return tuple(v)

    def build(self, constraint: Formula = TRUE, check: bool = True) -> TwoWayParikhAutomaton:
        A = TwoWayParikhAutomaton(
            alphabet=self.alphabet,
            dimension=self.dim,
            states=tuple(self.states),
            left=frozenset(self.left),
            initial=frozenset(self.initial),
            halting=frozenset(self.halting),
            accepting=frozenset(self.accepting),
            transitions=tuple(self.transitions),
            constraint=constraint,
        )
        if check:
            validate(A)
        return A


# ------------------------------------------------------------ worked examples

def build_mismatch(n: int) -> TwoWayParikhAutomaton:
    """Deterministic automaton counting mismatches at distance ``n``.

    It adds one per leading ``a``, then for every position i of u with
    i + n <= |u| walks n letters right, compares, subtracts one on a
    mismatch and walks back.  Reaching ⊣ in the forward walk accepts when
    the counter is zero.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    B = Builder(("a", "b", "c", "#"), 1)
    qI = B.state("qI", initial=True)
    qa = B.state("qa")
    q0 = B.state("q0")
    qF = B.state("qF", accepting=True)
    B.trans(qI, BEGIN, qa, (0,))
    B.trans(qa, "a", qa, (1,))
    B.trans(qa, "#", q0, (0,))
    B.trans(q0, END, qF, (0,))
    if n == 0:
        # u[i] never differs from itself
        B.trans(q0, ("b", "c"), q0, (0,))
        return B.build(parse_formula("x1 = 0"))
    chain = {}
    for s in ("b", "c"):
        chain[s] = [B.state(f"q{j}{s}") for j in range(1, n + 1)]
    ps = [B.state(f"p{j}", left=True) for j in range(1, n + 1)]
    for s in ("b", "c"):
        qs = chain[s]
        B.trans(q0, s, qs[0], (0,))
        for j in range(n - 1):
            B.trans(qs[j], ("b", "c"), qs[j + 1], (0,))
        for q in qs:
            B.trans(q, END, qF, (0,))
    B.trans(chain["b"][-1], "b", ps[0], (0,))
    B.trans(chain["b"][-1], "c", ps[0], (-1,))
    B.trans(chain["c"][-1], "b", ps[0], (-1,))
    B.trans(chain["c"][-1], "c", ps[0], (0,))
    for j in range(n - 1):
        B.trans(ps[j], ("b", "c"), ps[j + 1], (0,))
    B.trans(ps[-1], ("b", "c"), q0, (0,))
    return B.build(semilinear_to_formula(SemiLinearSet.single((0,))))


def mismatch_predicate(n: int, word: Sequence[str]) -> bool:
    """Direct membership test for the mismatch language."""
    word = tuple(word)
    if "#" not in word:
        return False
    i = word.index("#")
    prefix, u = word[:i], word[i + 1:]
    if any(x != "a" for x in prefix) or any(x not in ("b", "c") for x in u):
        return False
    k = sum(1 for j in range(len(u) - n) if u[j] != u[j + n])
    return k == len(prefix)


def build_multiplication() -> TwoWayParikhAutomaton:
    """Nondeterministic automaton for ``a^n # a^m # a^(n*m)``.

    Each leftward pass over the first block adds n to the first counter and
    one to the second; the second and third blocks then subtract m and the
    product.
    """
    B = Builder(("a", "#"), 2)
    q = [B.state(f"q{i}") for i in range(4)]
    B.initial.add("q0")
    q4 = B.state("q4", accepting=True)
    q5 = B.state("q5", left=True)
    B.trans(q[0], BEGIN, q[1], (0, 0))
    B.trans(q[1], "a", q[1], (0, 0))
    B.trans(q[1], "#", q[2], (0, 0))
    B.trans(q[2], "a", q[2], (0, -1))
    B.trans(q[2], "#", q[3], (0, 0))
    B.trans(q[3], "a", q[3], (-1, 0))
    B.trans(q[3], END, q4, (0, 0))
    B.trans(q[1], "#", q5, (0, 1))
    B.trans(q5, "a", q5, (1, 0))
    B.trans(q5, "#", q5, (0, 0))
    B.trans(q5, BEGIN, q[0], (0, 0))
    return B.build(semilinear_to_formula(SemiLinearSet.single((0, 0))))


def multiplication_predicate(word: Sequence[str]) -> bool:
    s = "".join(word)
    parts = s.split("#")
    if len(parts) != 3 or any(set(p) - {"a"} for p in parts):
        return False
    n, m, l = (len(p) for p in parts)
    return l == n * m


def build_sweep(constraint: Optional[Formula] = None) -> TwoWayParikhAutomaton:
    """Three passes over {a,b}: count a's rightwards, return, count b's rightwards.

    Default constraint ``x1 = x2``.
    """
    B = Builder(("a", "b"), 2)
    s0 = B.state("s0", initial=True)
    p1 = B.state("p1")
    back = B.state("back", left=True)
    turn = B.state("turn")
    p3 = B.state("p3")
    acc = B.state("acc", accepting=True)
    B.trans(s0, BEGIN, p1, (0, 0))
    B.trans(p1, "a", p1, (1, 0))
    B.trans(p1, "b", p1, (0, 0))
    B.trans(p1, END, back, (0, 0))
    B.trans(back, ("a", "b", END), back, (0, 0))
    # an L-reading state that reads ⊢ leaves the head at position 0,
    # so the third pass starts by reading ⊢ again
    B.trans(back, BEGIN, turn, (0, 0))
    B.trans(turn, BEGIN, p3, (0, 0))
    B.trans(p3, "a", p3, (0, 0))
    B.trans(p3, "b", p3, (0, 1))
    B.trans(p3, END, acc, (0, 0))
    return B.build(constraint if constraint is not None else parse_formula("x1 = x2"))


def build_section_example() -> TwoWayParikhAutomaton:
    """Deterministic automaton whose run on ``ab`` zigzags like the crossing-section picture.

    States q1..q15, transition i carries the vector (i,).  The a-position is
    crossed by (q2,a,q3)(q3,a,q4)(q4,a,q5)(q11,a,q12)(q12,a,q13).
    """
    B = Builder(("a", "b"), 1)
    left = {3, 7, 8, 10, 11}
    for i in range(1, 16):
        B.state(f"q{i}", left=i in left, initial=i == 1, accepting=i == 15)
    reads = [BEGIN, "a", "a", "a", "b", END, END, "b", "b", "b", "a", "a", "b", END]
    for i, a in enumerate(reads, start=1):
        B.trans(f"q{i}", a, f"q{i + 1}", (i,))
    return B.build()


# ------------------------------------------------------------ polynomials

@dataclass(frozen=True)
class Polynomial:
    """``kind`` is "const", "var", "add" or "mul"."""
    kind: str
    value: int = 0
    name: str = ""
    left: Optional["Polynomial"] = None
    right: Optional["Polynomial"] = None

    def __post_init__(self):
        if self.kind not in ("const", "var", "add", "mul"):
            raise ValueError(f"unknown polynomial kind {self.kind!r}")
        if self.kind == "const" and self.value < 0:
            raise ValueError("constants must be natural numbers")
        if self.kind == "var" and not self.name:
            raise ValueError("variable needs a name")
        if self.kind in ("add", "mul") and (self.left is None or self.right is None):
            raise ValueError(f"{self.kind} needs two operands")

    def __add__(self, other):
        return Polynomial("add", left=self, right=_poly(other))

    def __radd__(self, other):
        return Polynomial("add", left=_poly(other), right=self)

    def __mul__(self, other):
        return Polynomial("mul", left=self, right=_poly(other))

    def __rmul__(self, other):
        return Polynomial("mul", left=_poly(other), right=self)

    def __str__(self):
        if self.kind == "const":
            return str(self.value)
        if self.kind == "var":
            return self.name
        op = "+" if self.kind == "add" else "*"
        return f"({self.left}{op}{self.right})"

    def evaluate(self, env: Dict[str, int]) -> int:
        if self.kind == "const":
            return self.value
        if self.kind == "var":
            return env[self.name]
        a, b = self.left.evaluate(env), self.right.evaluate(env)
        return a + b if self.kind == "add" else a * b

    def variables(self) -> List[str]:
        if self.kind == "var":
            return [self.name]
        if self.kind in ("add", "mul"):
            return list(dict.fromkeys(self.left.variables() + self.right.variables()))
        return []


def const(a: int) -> Polynomial:
    return Polynomial("const", value=a)


def var(name: str) -> Polynomial:
    return Polynomial("var", name=name)


def _poly(p) -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    if isinstance(p, int):
        return const(p)
    raise TypeError(f"cannot make a polynomial from {p!r}")


def sub(p: Polynomial) -> List[Polynomial]:
    """Subpolynomials in post-order, without repetition."""
    out: List[Polynomial] = []

    def walk(q):
        if q.kind in ("add", "mul"):
            walk(q.left)
            walk(q.right)
        if q not in out:
            out.append(q)

    walk(p)
    return out


def zero_symbol(x: str) -> str:
    return f"0_{x}"


def one_symbol(p: Polynomial) -> str:
    return f"1_{str(p).replace(' ', '')}"


def poly_alphabet(p: Polynomial) -> Tuple[str, ...]:
    """``0_x`` for each variable, ``1_q`` for each subpolynomial q."""
    syms = [zero_symbol(x) for x in p.variables()]
    syms += [one_symbol(q) for q in sub(p)]
    return tuple(dict.fromkeys(syms))


def parse_polynomial(text: str) -> Polynomial:
    """Infix polynomial: naturals, identifiers, ``+``, ``*``, parentheses."""
    import re
    toks = re.findall(r"\d+|[A-Za-z_][A-Za-z0-9_]*|[+*()]|\S", text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take():
        nonlocal pos
        t = peek()
        if t is None:
            raise ValueError(f"unexpected end of polynomial {text!r}")
        pos += 1
        return t

    def expr():
        p = term()
        while peek() == "+":
            take()
            p = p + term()
        return p

    def term():
        p = atom()
        while peek() == "*":
            take()
            p = p * atom()
        return p

    def atom():
        t = take()
        if t == "(":
            p = expr()
            if take() != ")":
                raise ValueError(f"expected ')' in {text!r}")
            return p
        if t.isdigit():
            return const(int(t))
        if re.match(r"[A-Za-z_]", t):
            return var(t)
        raise ValueError(f"unexpected {t!r} in polynomial {text!r}")

    p = expr()
    if peek() is not None:
        raise ValueError(f"trailing {peek()!r} in polynomial {text!r}")
    return p


def parse_equations(text: str) -> List[Tuple[Polynomial, Polynomial]]:
    """One equation ``lhs = rhs`` per non-empty line (``//`` starts a comment)."""
    eqs = []
    for line in text.splitlines():
        line = line.split("//")[0].strip()
        if not line:
            continue
        if line.count("=") != 1:
            raise ValueError(f"expected exactly one '=' in {line!r}")
        lhs, rhs = line.split("=")
        eqs.append((parse_polynomial(lhs), parse_polynomial(rhs)))
    if not eqs:
        raise ValueError("no equations given")
    return eqs


# ------------------------------------------------------------ Diophantine encoder

@dataclass
class _Phase:
    """One block of passes; ``dims`` names the counters it owns."""
    node: Polynomial
    dims: Dict[str, int]


def _layout(nodes: Sequence[Polynomial], extra: int = 0) -> Tuple[List[_Phase], int]:
    phases, d = [], 0
    for q in nodes:
        if q.kind == "var":
            names = ["nu", "val"]
        elif q.kind == "mul":
            names = ["pass", "mult", "val"]
        else:
            names = ["val"]
        dims = {}
        for n in names:
            dims[n] = d
            d += 1
        phases.append(_Phase(q, dims))
    return phases, d


def polynomial_layout(p: Polynomial) -> Dict[str, int]:
    """Dimension map of :func:`encode_polynomial`: ``"<role>:<subpolynomial>"`` -> 1-based index."""
    phases, _ = _layout(sub(p))
    return {f"{role}:{ph.node}": i + 1 for ph in phases for role, i in ph.dims.items()}


def _encoder(alphabet: Sequence[str], nodes: Sequence[Polynomial], finals: Sequence[Tuple[Polynomial, Polynomial]]):
    """Shared body of the polynomial and system encoders.

    Every phase starts in an R-reading state on ⊢ and ends reading ⊣; between
    phases an L-reading state rewinds.  ``finals`` adds one closing pass per
    equation counting both sides.
    """
    phases, d = _layout(nodes)
    index = {ph.node: ph for ph in phases}
    final_dims = []
    for _ in finals:
        final_dims.append((d, d + 1))
        d += 2
    B = Builder(alphabet, d)
    acc = B.state("acc", accepting=True)
    n_blocks = len(phases) + len(finals)
    starts = [B.state(f"start{i}", initial=i == 0) for i in range(n_blocks)]

    def after(i):
        # state entered when block i reads ⊣
        if i + 1 == n_blocks:
            return acc
        rw = B.state(f"rw{i}", left=True)
        B.trans(rw, list(alphabet) + [END], rw)
        B.trans(rw, BEGIN, starts[i + 1])
        return rw

    def counting_pass(name, counts: Dict[str, int], end, end_vec=None):
        # one R-reading sweep adding unit vectors for the listed symbols
        st = B.state(name)
        for a in alphabet:
            B.trans(st, a, st, B.unit(counts[a]) if a in counts else None)
        B.trans(st, END, end, end_vec)
        return st

    parts: List[Formula] = []
    x = lambda i: Var(f"x{i + 1}")  # noqa: E731
    for i, ph in enumerate(phases):
        q, dims = ph.node, ph.dims
        nxt = after(i)
        val = dims["val"]
        if q.kind == "const":
            p1 = counting_pass(f"count{i}", {one_symbol(q): val}, nxt)
            B.trans(starts[i], BEGIN, p1)
            parts.append(eq(x(val), const_term(q.value)))
        elif q.kind == "var":
            p1 = counting_pass(f"count{i}", {zero_symbol(q.name): dims["nu"], one_symbol(q): val}, nxt)
            B.trans(starts[i], BEGIN, p1)
            parts.append(eq(x(val), x(dims["nu"])))
        elif q.kind == "add":
            p1 = counting_pass(f"count{i}", {one_symbol(q): val}, nxt)
            B.trans(starts[i], BEGIN, p1)
            l, r = index[q.left].dims["val"], index[q.right].dims["val"]
            parts.append(eq(x(val), x(l) + x(r)))
        else:
            # product: any number of passes adding |1_right|, then the counting pass
            rw = B.state(f"again{i}", left=True)
            B.trans(rw, list(alphabet) + [END], rw)
            B.trans(rw, BEGIN, starts[i])
            rep = counting_pass(f"pass{i}", {one_symbol(q.right): dims["mult"]}, rw)
            last = counting_pass(f"count{i}", {one_symbol(q): val}, nxt)
            B.trans(starts[i], BEGIN, rep, B.unit(dims["pass"]))
            B.trans(starts[i], BEGIN, last)
            l = index[q.left].dims["val"]
            parts.append(eq(x(dims["pass"]), x(l)))
            parts.append(eq(x(dims["mult"]), x(val)))
    for j, (lhs, rhs) in enumerate(finals):
        i = len(phases) + j
        a, b = final_dims[j]
        p1 = counting_pass(f"count{i}", {one_symbol(lhs): a, one_symbol(rhs): b} if lhs != rhs else {one_symbol(lhs): a}, after(i))
        B.trans(starts[i], BEGIN, p1)
        parts.append(eq(x(a), x(b)) if lhs != rhs else TRUE)
    return B.build(conj(*parts))


def encode_polynomial(p: Polynomial) -> TwoWayParikhAutomaton:
    """A 2PA over ``poly_alphabet(p)`` whose language is a good encoding of ``p``.

    Accepted words ``w`` satisfy ``|1_q|_w = ν_w(q)`` for every subpolynomial
    ``q`` (``ν_w(x) = |0_x|_w``), and every valuation has an accepted encoding.
    """
    if not isinstance(p, Polynomial):
        raise TypeError("encode_polynomial expects a Polynomial")
    return _encoder(poly_alphabet(p), sub(p), [])


def _system_nodes(equations):
    nodes: List[Polynomial] = []
    for lhs, rhs in equations:
        for q in sub(lhs) + sub(rhs):
            if q not in nodes:
                nodes.append(q)
    return nodes


def system_alphabet(equations) -> Tuple[str, ...]:
    syms: List[str] = []
    for lhs, rhs in equations:
        syms += poly_alphabet(lhs) + poly_alphabet(rhs)
    return tuple(dict.fromkeys(sorted(set(syms), key=syms.index)))


def encode_system(equations: Sequence[Tuple[Polynomial, Polynomial]]) -> TwoWayParikhAutomaton:
    """Nonempty iff the system has a solution over the naturals."""
    equations = list(equations)
    if not equations:
        raise ValueError("encode_system needs at least one equation")
    for lhs, rhs in equations:
        if not isinstance(lhs, Polynomial) or not isinstance(rhs, Polynomial):
            raise TypeError("equations are pairs of polynomials")
    return _encoder(system_alphabet(equations), _system_nodes(equations), equations)


def system_layout(equations) -> Dict[str, int]:
    equations = list(equations)
    phases, d = _layout(_system_nodes(equations))
    out = {f"{role}:{ph.node}": i + 1 for ph in phases for role, i in ph.dims.items()}
    for j, (lhs, rhs) in enumerate(equations):
        out[f"lhs:{lhs}={rhs}"] = d + 2 * j + 1
        out[f"rhs:{lhs}={rhs}"] = d + 2 * j + 2
    return out


def canonical_encoding(nodes: Sequence[Polynomial], env: Dict[str, int]) -> Tuple[str, ...]:
    """The sorted ``ν``-encoding: ``ν(x)`` copies of ``0_x``, ``ν(q)`` copies of ``1_q``."""
    w: List[str] = []
    seen_vars = []
    for q in nodes:
        for v in q.variables():
            if v not in seen_vars:
                seen_vars.append(v)
    for v in seen_vars:
        w += [zero_symbol(v)] * env[v]
    for q in nodes:
        w += [one_symbol(q)] * q.evaluate(env)
    return tuple(w)


def nu(word: Sequence[str], variables: Sequence[str]) -> Dict[str, int]:
    return {v: sum(1 for a in word if a == zero_symbol(v)) for v in variables}


def is_good_encoding(p: Polynomial, word: Sequence[str]) -> bool:
    """Whether ``word`` is a ``ν_w``-encoding of every subpolynomial of ``p``."""
    env = nu(word, p.variables())
    return all(sum(1 for a in word if a == one_symbol(q)) == q.evaluate(env) for q in sub(p))
