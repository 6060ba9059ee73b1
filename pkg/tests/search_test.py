import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))

from evidence_logic.errors import InvalidInputError, LanguageError
from evidence_logic.models import EvPseudoModel, TopoEModel, validate_ev_pseudo, validate_relational
from evidence_logic.representation import bounded_sat, enumerate_models, valid_up_to
from evidence_logic.representation.search import evidence_pairs, preorders
from evidence_logic.semantics import eval_topo, evaluate
from evidence_logic.syntax import parse


def test_preorder_counts():
    assert [len(preorders(n)) for n in range(1, 4)] == [1, 4, 29]
    assert len(evidence_pairs(1)) == 1
    assert len(evidence_pairs(2)) == 5
    assert len(evidence_pairs(3)) == 42


def test_enumerated_models_are_valid():
    for model in enumerate_models(2, ("a", "b"), ("p",)):
        assert validate_relational(model).ok
    for model in enumerate_models(2, ("a", "b"), ("p",), semantics="ev_pseudo", fragment="full"):
        assert validate_ev_pseudo(model).ok


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pruning_keeps_fewer_models(n):
    pruned = sum(1 for _ in enumerate_models(n, ("a",), ("p",)))
    naive = sum(1 for _ in enumerate_models(n, ("a",), ("p",), pruned=False))
    assert pruned <= naive
    if n == 1:
        assert pruned == naive == 2
    else:
        assert pruned < naive


def test_enumeration_needs_a_state():
    with pytest.raises(InvalidInputError):
        list(enumerate_models(0))


def test_group_knowledge_below_individual_knowledge():
    verdict = bounded_sat(parse("K{a}p & K{b}p & ~B{A}p"), 4)
    assert verdict.satisfiable
    assert verdict.outcome == "SAT"
    assert verdict.bound <= 4
    assert isinstance(verdict.model, TopoEModel)
    assert eval_topo(verdict.model, verdict.formula).holds_at(verdict.state)
    assert verdict.to_dict()["closure_bound"] == f"2^{verdict.closure_size}"


@pytest.mark.parametrize("text", ["~(K{a}p -> p)", "Box{a}p & ~p", "~([share{a,b}]p <-> p)"])
def test_unsatisfiable_up_to_three_states(text):
    verdict = bounded_sat(parse(text), 3)
    assert verdict.outcome == "UNSAT_UP_TO"
    assert verdict.bound == 3
    assert verdict.model is None
    assert verdict.models_examined > 0
    assert verdict.closure_bound == 2 ** verdict.closure_size


@pytest.mark.slow
@pytest.mark.parametrize("text", ["~(K{a}p -> p)", "~([share{a,b}]p <-> p)"])
def test_unsatisfiable_up_to_four_states(text):
    verdict = bounded_sat(parse(text), 4)
    assert verdict.outcome == "UNSAT_UP_TO"
    assert verdict.bound == 4


@pytest.mark.parametrize("text", ["Box{a}p & ~Forall{a}p", "K{a}p & ~Box{b}p", "B{a}p & ~p", "Forall{a}p & ~p"])
def test_pruned_and_naive_search_agree(text):
    for n in (1, 2, 3):
        pruned = bounded_sat(parse(text), n, workers=2)
        naive = bounded_sat(parse(text), n, workers=2, pruned=False)
        assert pruned.outcome == naive.outcome
        assert pruned.bound == naive.bound


def test_pseudo_model_search():
    sat = bounded_sat(parse("Box{A}p & ~Box{a}p"), 2, "ev_pseudo", agents=["a", "b"])
    assert sat.satisfiable
    assert isinstance(sat.model, EvPseudoModel)
    assert sat.model.fragment == "iA"
    assert evaluate(sat.model, parse("Box{A}p & ~Box{a}p")).holds_at(sat.state)

    unsat = bounded_sat(parse("Box{a}p & ~Box{A}p"), 2, "ev_pseudo", agents=["a", "b"])
    assert unsat.outcome == "UNSAT_UP_TO"


def test_forced_pseudo_signature():
    verdict = bounded_sat(parse("Box{a}p & ~p | q"), 1, "ev_pseudo", fragment="full")
    assert verdict.model.fragment == "full"
    with pytest.raises(LanguageError):
        bounded_sat(parse("Box{a,b}p"), 1, "ev_pseudo", agents=["a", "b", "c"], fragment="iA")


def test_knowledge_formulas_in_pseudo_search():
    verdict = bounded_sat(parse("B{a}p & ~K{a}p"), 2, "ev_pseudo")
    assert verdict.satisfiable
    assert verdict.bound == 2


def test_validity_up_to_a_bound():
    assert valid_up_to(parse("K{a}p -> B{a}p"), 3).outcome == "UNSAT_UP_TO"
    assert valid_up_to(parse("B{a}p -> p"), 2).outcome == "SAT"


def test_search_arguments():
    with pytest.raises(InvalidInputError):
        bounded_sat(parse("p"), 0)
    with pytest.raises(InvalidInputError):
        bounded_sat(parse("Box{b}p"), 2, agents=["a"])
    with pytest.raises(InvalidInputError):
        bounded_sat(parse("p"), 2, "kb_pseudo")


@pytest.mark.parametrize("text, bound", [("K{a}p & K{b}p & ~B{A}p", 4), ("Box{a}p & ~Forall{a}p", 3), ("Box{a}p & ~p", 3)])
def test_reports_do_not_depend_on_the_worker_count(text, bound):
    reports = [bounded_sat(parse(text), bound, workers=w).to_dict() for w in (1, 2, 4, 8)]
    assert all(report == reports[0] for report in reports)
    again = bounded_sat(parse(text), bound, workers=4).to_dict()
    assert again == reports[0]


def test_single_state_witness():
    verdict = bounded_sat(parse("p & K{a}p"), 3)
    assert verdict.bound == 1
    assert verdict.state == 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
