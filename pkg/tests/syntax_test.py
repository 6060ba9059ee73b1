import sys
from pathlib import Path
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

sys.path.append(str(Path(__file__).resolve().parent.parent))

from evidence_logic.errors import FormulaSyntaxError, InvalidInputError, LanguageError
from evidence_logic.representation.generators import random_formula
from evidence_logic.syntax import (
    FULL,
    And,
    Atom,
    B,
    Box,
    Forall,
    K,
    LanguageTag,
    Not,
    Share,
    absorb,
    agent_names,
    atoms,
    closure_set,
    disj,
    expand_kb,
    implies,
    in_language,
    is_static,
    language_of,
    modal_depth,
    parse,
    parse_group,
    reduce_dynamic,
    to_static,
    to_text,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")
a, b, ab = frozenset({"a"}), frozenset({"b"}), frozenset({"a", "b"})


def test_parse_nodes():
    assert parse("K{a}p") == K(a, p)
    assert parse("B{A} p") == B(FULL, p)
    assert parse("Box{a,b}(p & q)") == Box(ab, And(p, q))
    assert parse("Dia{a} p") == Not(Box(a, Not(p)))
    assert parse("Exists{b} p") == Not(Forall(b, Not(p)))
    assert parse("<K{a}> p") == Not(K(a, Not(p)))
    assert parse("<B{a}> p") == Not(B(a, Not(p)))
    assert parse("[share{a,b}] p") == Share(ab, p)


def test_precedence():
    assert parse("p & q | r") == disj(And(p, q), r)
    assert parse("p | q & r") == disj(p, And(q, r))
    assert parse("p -> q -> r") == implies(p, implies(q, r))
    assert parse("~p & q") == And(Not(p), q)
    assert parse("K{a} p & q") == And(K(a, p), q)
    assert parse("p & q & r") == And(And(p, q), r)


def test_printing():
    assert to_text(parse("~(K{a}p -> p)")) == "~(K{a} p -> p)"
    assert to_text(parse("p & (q & r)")) == "p & (q & r)"
    assert to_text(parse("(p -> q) -> r")) == "(p -> q) -> r"
    assert to_text(parse("((p -> q) -> r) -> s")) == "((p -> q) -> r) -> s"
    assert to_text(parse("(K{a}p -> p) -> q")) == "(K{a} p -> p) -> q"
    assert to_text(parse("p | q")) == "p | q"
    assert to_text(parse("~p -> q")) == "p | q"
    assert to_text(parse("p <-> q")) == "p <-> q"
    assert to_text(parse("Box{b,a} ~(p | q)")) == "Box{a,b} ~(p | q)"
    assert str(parse("[share{A}]B{a}p")) == "[share{A}] B{a} p"


@given(st.integers(0, 2**32 - 1), st.sampled_from(list(LanguageTag)))
@settings(max_examples=150, deadline=None)
def test_printed_formulas_parse_back(seed, tag):
    f = random_formula(Random(seed), 3, ("p", "q"), ("a", "b"), tag)
    assert parse(to_text(f)) == f


@pytest.mark.parametrize("text", ["K{a}", "p &", "p q", "Box{a p", "(p", "P", "K{a,}p", ""])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text)


def test_empty_group_is_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse("Box{} p")
    with pytest.raises(FormulaSyntaxError):
        parse_group("{}")
    assert parse_group("{a, b}") == ab
    assert parse_group("A") == FULL


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse("p & & q")
    assert info.value.line == 1
    assert info.value.column == 5


def test_structure():
    f = parse("K{a} (p & Box{b} q) | ~B{A} r")
    assert modal_depth(f) == 2
    assert atoms(f) == ["p", "q", "r"]
    assert agent_names(f) == ["a", "b"]
    assert not is_static(parse("[share{a}] p"))


def test_languages():
    assert in_language(parse("K{a}p & B{A}q"), LanguageTag.KB_IA)
    assert not in_language(parse("K{a,b}p"), LanguageTag.KB_IA)
    assert in_language(parse("K{a,b}p"), LanguageTag.KB_IA, agents=["a", "b"])
    assert in_language(parse("K{a,b}p"), LanguageTag.KB_FULL)
    assert in_language(parse("[share{a}]Box{b}p"), LanguageTag.EV_DYN)
    assert not in_language(parse("[share{a}]K{a}p"), LanguageTag.KB_DYN)
    assert in_language(parse("[share{A}]K{a}p"), LanguageTag.KB_DYN)
    assert LanguageTag.EV_FULL in language_of(parse("Forall{a,b} p"))
    assert LanguageTag.EV_IA not in language_of(parse("Forall{a,b} p"))


def test_translation():
    assert to_text(expand_kb(parse("B{a}p"))) == "Forall{a} Dia{a} Box{a} p"
    assert to_text(expand_kb(parse("K{a}p"))) == "Box{a} p & Forall{a} Dia{a} Box{a} p"
    with pytest.raises(LanguageError):
        expand_kb(parse("[share{a}]K{a}p"))
    kept = expand_kb(parse("[share{a}]B{a}p"), keep_share=True)
    assert kept == Share(a, expand_kb(parse("B{a}p")))


def test_absorb():
    assert absorb(a, b) == a
    assert absorb(a, ab) == ab
    assert absorb(ab, b) == ab
    assert absorb(a, FULL) == FULL


def test_evidence_reduction():
    assert to_text(reduce_dynamic(parse("[share{a}][share{a}]p"))) == "p"
    assert to_text(reduce_dynamic(parse("[share{a,b}]Box{a}p"))) == "Box{a,b} p"
    assert to_text(reduce_dynamic(parse("[share{b}]Forall{a}p"))) == "Forall{a} p"
    assert to_text(reduce_dynamic(parse("[share{a}]~(p & Box{a}q)"))) == "~(p & Box{a} q)"
    assert to_text(reduce_dynamic(parse("[share{a}][share{b}]Box{b}p"))) == "Box{b} p"
    assert to_text(reduce_dynamic(parse("[share{b}][share{a,b}]Box{a}p"))) == "Box{a,b} p"
    with pytest.raises(LanguageError):
        reduce_dynamic(parse("[share{a}]K{a}p"))


def test_knowledge_reduction():
    kb = LanguageTag.KB_DYN
    assert to_text(reduce_dynamic(parse("[share{A}]K{a}p"), kb)) == "K{A} p"
    assert to_text(reduce_dynamic(parse("[share{A}]~B{b}p"), kb)) == "~B{A} p"
    assert to_text(reduce_dynamic(parse("[share{a,b}]K{a}p"), kb, ["a", "b"])) == "K{a,b} p"
    with pytest.raises(LanguageError):
        reduce_dynamic(parse("[share{a}]K{a}p"), kb)
    with pytest.raises(LanguageError):
        reduce_dynamic(p, LanguageTag.EV_FULL)


def test_to_static():
    assert to_text(to_static(parse("[share{A}]B{a}p"))) == "Forall{A} Dia{A} Box{A} p"
    assert to_static(parse("[share{a}]K{b}p")) == expand_kb(parse("K{b}p"))
    assert to_static(parse("Box{a}p")) == parse("Box{a}p")


def test_closure_sets():
    assert len(closure_set(parse("Box{a}p"), ["a"])) == 4
    assert len(closure_set(parse("Box{a}p"), ["a", "b"])) == 6
    members = closure_set(parse("Forall{a}p"), ["a"])
    assert len(members) == 10
    assert parse("Box{a} Forall{a} p") in members
    assert parse("Box{a} ~Forall{a} p") in members
    assert parse("Forall{a,b} p") in closure_set(parse("Forall{a}p"), ["a", "b"])
    assert Box(ab, p) in closure_set(parse("Box{A}p"), ["a", "b"])


def test_closure_set_errors():
    with pytest.raises(LanguageError):
        closure_set(parse("K{a}p"), ["a"])
    with pytest.raises(InvalidInputError):
        closure_set(parse("Box{c}p"), ["a", "b"])
    with pytest.raises(InvalidInputError):
        closure_set(p, [])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
