"""Command-line front end.

Exit codes: 0 when the property asked about holds (nonempty, member,
universal, included, equivalent, satisfiable, valid file), 1 when it does
not, 2 on usage, file or validation errors, 3 when ``--oracle-check``
finds a disagreement with brute-force sampling.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional, Sequence

from . import __version__
from .constructions import (
    build_mismatch,
    build_multiplication,
    build_sweep,
    encode_system,
    parse_equations,
    system_layout,
)
from .core import (
    TwoWayParikhAutomaton,
    WordError,
    accepts_oracle,
    is_deterministic,
    language_sample,
    words,
    ACCEPTED,
    BOUND_EXHAUSTED,
)
from .crossing import to_one_way, to_one_way_emptiness
from .decide import (
    AlphabetMismatch,
    NotDeterministic,
    complement,
    equivalent,
    includes,
    intersect,
    is_empty,
    is_universal,
    membership,
    union,
)
from .parikh import length_formula, parikh_image_formula, semilinear_image
from .presburger import ParseError, eliminate_all, find_model, parse_formula, to_str
from .textformat import TextFormatError, format_2pa, load_2pa

EXIT_HOLDS, EXIT_FAILS, EXIT_ERROR, EXIT_ORACLE = 0, 1, 2, 3


class CliError(Exception):
    pass


def show_word(w: Sequence[str]) -> str:
    if all(len(a) == 1 for a in w):
        return "".join(w)
    return " ".join(w)


def show_vector(v: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


class Report:
    """Collects ``KEY: value`` lines, or a JSON record with ``--json``."""

    def __init__(self, command: str, as_json: bool, out):
        self.command = command
        self.as_json = as_json
        self.out = out
        self.fields = {"command": command}
        self.lines: List[str] = []
        self.start = time.perf_counter()

    def put(self, key: str, value):
        self.fields[key.lower()] = value
        if isinstance(value, (list, tuple)) and key in ("VALUE",):
            value = show_vector(value)
        self.lines.append(f"{key}: {value}")

    def text(self, body: str):
        self.fields.setdefault("output", "")
        self.fields["output"] += body
        self.lines.append(body.rstrip("\n"))

    def flush(self):
        if self.as_json:
            self.fields["timings"] = {"total_s": round(time.perf_counter() - self.start, 6)}
            print(json.dumps(self.fields, ensure_ascii=False, sort_keys=True), file=self.out)
        else:
            for line in self.lines:
                print(line, file=self.out)


def _load(path: str) -> TwoWayParikhAutomaton:
    return load_2pa(path)


def _k_for(P: TwoWayParikhAutomaton, k: Optional[int]) -> int:
    if k is not None:
        if k < 1:
            raise CliError("--k must be at least 1")
        return k
    if not is_deterministic(P):
        raise CliError("--k is required for nondeterministic automata")
    return max(1, len(P.states))


def _oracle_mismatch(rep: Report, what: str) -> int:
    rep.put("ORACLE", f"mismatch: {what}")
    return EXIT_ORACLE


# ------------------------------------------------------------ commands

def cmd_validate(a, rep):
    P = _load(a.file)
    rep.put("VERDICT", "valid")
    rep.put("STATES", len(P.states))
    rep.put("DETERMINISTIC", "yes" if is_deterministic(P) else "no")
    return EXIT_HOLDS


def cmd_member(a, rep):
    P = _load(a.file)
    w = P.word(a.word)
    ok = membership(P, w)
    rep.put("VERDICT", "member" if ok else "nonmember")
    if a.oracle_check is not None:
        res = accepts_oracle(P, w)
        if res != BOUND_EXHAUSTED and (res == ACCEPTED) != ok:
            return _oracle_mismatch(rep, f"oracle says {res}")
        rep.put("ORACLE", "agree" if res != BOUND_EXHAUSTED else "inconclusive")
    return EXIT_HOLDS if ok else EXIT_FAILS


def cmd_empty(a, rep):
    P = _load(a.file)
    k = _k_for(P, a.k)
    v = is_empty(P, k, witness=not a.no_witness)
    rep.put("VERDICT", "empty" if v.empty else "nonempty")
    if v.witness is not None:
        rep.put("WITNESS", show_word(v.witness.word))
        rep.put("VALUE", tuple(v.witness.value))
        if a.witness:
            trace = " ".join(f"({c.position},{c.state})" for c in v.witness.run.configs)
            rep.put("RUN", trace)
    if a.oracle_check is not None:
        sample = language_sample(P, a.oracle_check)
        if v.empty and sample:
            return _oracle_mismatch(rep, f"oracle accepts {show_word(min(sample, key=lambda w: (len(w), w)))}")
        if v.witness is not None and len(v.witness.word) <= a.oracle_check and not sample:
            return _oracle_mismatch(rep, "oracle accepts nothing")
        rep.put("ORACLE", "agree")
    return EXIT_FAILS if v.empty else EXIT_HOLDS


def _sample_check(rep, a, P1, P2, relation) -> Optional[int]:
    if a.oracle_check is None:
        return None
    s1, s2 = language_sample(P1, a.oracle_check), language_sample(P2, a.oracle_check)
    if not relation(s1, s2):
        return _oracle_mismatch(rep, "sampled languages contradict the verdict")
    rep.put("ORACLE", "agree")
    return None


def cmd_universal(a, rep):
    P = _load(a.file)
    ok = is_universal(P)
    rep.put("VERDICT", "universal" if ok else "not universal")
    if a.oracle_check is not None:
        sample = language_sample(P, a.oracle_check)
        if ok and len(sample) != sum(1 for _ in words(P.alphabet, a.oracle_check)):
            return _oracle_mismatch(rep, "oracle rejects some word")
        rep.put("ORACLE", "agree")
    return EXIT_HOLDS if ok else EXIT_FAILS


def cmd_include(a, rep):
    P1, P2 = _load(a.file1), _load(a.file2)
    ok = includes(P1, P2)
    rep.put("VERDICT", "included" if ok else "not included")
    bad = _sample_check(rep, a, P1, P2, lambda s1, s2: not ok or s1 <= s2)
    if bad is not None:
        return bad
    return EXIT_HOLDS if ok else EXIT_FAILS


def cmd_equiv(a, rep):
    P1, P2 = _load(a.file1), _load(a.file2)
    ok = equivalent(P1, P2)
    rep.put("VERDICT", "equivalent" if ok else "not equivalent")
    bad = _sample_check(rep, a, P1, P2, lambda s1, s2: not ok or s1 == s2)
    if bad is not None:
        return bad
    return EXIT_HOLDS if ok else EXIT_FAILS


def cmd_convert(a, rep):
    P = _load(a.file)
    k = _k_for(P, a.k)
    R = to_one_way_emptiness(P, k) if a.emptiness else to_one_way(P, k)
    rep.text(format_2pa(R))
    return EXIT_HOLDS


def _emit(rep, A):
    rep.text(format_2pa(A))
    return EXIT_HOLDS


def cmd_complement(a, rep):
    return _emit(rep, complement(_load(a.file)))


def cmd_union(a, rep):
    return _emit(rep, union(_load(a.file1), _load(a.file2)))


def cmd_intersect(a, rep):
    return _emit(rep, intersect(_load(a.file1), _load(a.file2)))


def _one_way(P, k, padded):
    if P.is_one_way:
        return P
    if k is None:
        raise CliError("automaton is two-way; pass --k to convert it first")
    return to_one_way_emptiness(P, k) if padded else to_one_way(P, k)


def cmd_parikh(a, rep):
    P = _one_way(_load(a.file), a.k, False)
    rep.put("LETTERS", " ".join(P.alphabet))
    rep.put("FORMULA", to_str(parikh_image_formula(P)))
    if a.semilinear is not None:
        # bounded enumeration, only meant for eyeballing the formula
        image = sorted(semilinear_image(P, a.semilinear))
        rep.put("IMAGE", " ".join(show_vector(v) for v in image))
    return EXIT_HOLDS


def cmd_lengthformula(a, rep):
    P = _one_way(_load(a.file), a.k, True)
    text = to_str(length_formula(P))
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        rep.put("WROTE", a.output)
    else:
        rep.put("FORMULA", text)
    return EXIT_HOLDS


def cmd_qe(a, rep):
    rep.put("RESULT", to_str(eliminate_all(parse_formula(a.formula))))
    return EXIT_HOLDS


def cmd_sat(a, rep):
    f = parse_formula(a.formula)
    model = find_model(f)
    rep.put("VERDICT", "sat" if model is not None else "unsat")
    if model is not None:
        from .presburger import free_vars
        shown = {v: model[v] for v in sorted(free_vars(f))}
        rep.put("MODEL", ", ".join(f"{v}={x}" for v, x in shown.items()))
    return EXIT_HOLDS if model is not None else EXIT_FAILS


def cmd_gen(a, rep):
    if a.family == "mismatch":
        if a.arg is None or not a.arg.isdigit():
            raise CliError("gen mismatch needs a natural number n")
        A = build_mismatch(int(a.arg))
    elif a.family == "mult":
        A = build_multiplication()
    elif a.family == "sweep":
        A = build_sweep()
    else:
        if a.arg is None:
            raise CliError("gen diophantine needs an equation file")
        with open(a.arg, encoding="utf-8") as fh:
            eqs = parse_equations(fh.read())
        A = encode_system(eqs)
        for name, i in system_layout(eqs).items():
            rep.text(f"// x{i} = {name}\n")
    return _emit(rep, A)


def cmd_sample(a, rep):
    P = _load(a.file)
    found = sorted(language_sample(P, a.len), key=lambda w: (len(w), w))
    rep.put("COUNT", len(found))
    rep.fields["words"] = [show_word(w) for w in found]
    for w in found:
        rep.lines.append(show_word(w) if w else "ε")
    return EXIT_HOLDS if found else EXIT_FAILS


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--oracle-check", type=int, metavar="LEN",
                        help="recheck the verdict against brute-force sampling up to LEN")
    p = argparse.ArgumentParser(prog="twoway-parikh", description="Two-way Parikh automata toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = cmd("validate", cmd_validate, "parse and check an automaton")
    sp.add_argument("file")
    sp = cmd("member", cmd_member, "decide w in L(P)")
    sp.add_argument("file")
    sp.add_argument("word", help="word; multi-letter symbols separated by spaces")
    sp = cmd("empty", cmd_empty, "decide emptiness of a bounded-visit automaton")
    sp.add_argument("file")
    sp.add_argument("--k", type=int)
    sp.add_argument("--witness", action="store_true", help="also print the run trace")
    sp.add_argument("--no-witness", action="store_true", help="skip witness extraction")
    sp = cmd("universal", cmd_universal, "decide L(P) = all words (deterministic P)")
    sp.add_argument("file")
    sp.add_argument("--k", type=int)
    for name, fn, h in (("include", cmd_include, "decide L(P1) included in L(P2)"),
                        ("equiv", cmd_equiv, "decide L(P1) = L(P2)")):
        sp = cmd(name, fn, h)
        sp.add_argument("file1")
        sp.add_argument("file2")
        sp.add_argument("--k", type=int)
    sp = cmd("convert", cmd_convert, "crossing-section conversion to a one-way automaton")
    sp.add_argument("file")
    sp.add_argument("--k", type=int)
    sp.add_argument("--emptiness", action="store_true", help="padded variant keeping only original weights")
    sp = cmd("complement", cmd_complement, "complement of a deterministic automaton")
    sp.add_argument("file")
    for name, fn in (("union", cmd_union), ("intersect", cmd_intersect)):
        sp = cmd(name, fn, f"{name} of two deterministic automata")
        sp.add_argument("file1")
        sp.add_argument("file2")
    sp = cmd("parikh", cmd_parikh, "Parikh image formula of a one-way automaton")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, help="convert a two-way automaton first")
    sp.add_argument("--semilinear", type=int, metavar="LEN",
                    help="also list the Parikh vectors of accepted words up to LEN")
    sp = cmd("lengthformula", cmd_lengthformula, "length formula of a one-way automaton")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, help="convert a two-way automaton first (padded variant)")
    sp.add_argument("-o", "--output", help="write the formula to a file")
    sp = cmd("qe", cmd_qe, "quantifier elimination")
    sp.add_argument("formula")
    sp = cmd("sat", cmd_sat, "satisfiability of a formula")
    sp.add_argument("formula")
    sp = cmd("gen", cmd_gen, "generate example automata")
    sp.add_argument("family", choices=["mismatch", "mult", "sweep", "diophantine"])
    sp.add_argument("arg", nargs="?")
    sp = cmd("sample", cmd_sample, "accepted words up to a length")
    sp.add_argument("file")
    sp.add_argument("--len", type=int, default=4)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code not in (0, None) else 0
    rep = Report(args.command, args.json, out)
    try:
        code = args.fn(args, rep)
    except (CliError, TextFormatError, ParseError, WordError, NotDeterministic, AlphabetMismatch,
            OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    rep.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
