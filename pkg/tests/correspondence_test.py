import sys
from pathlib import Path
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

sys.path.append(str(Path(__file__).resolve().parent.parent))

from evidence_logic.errors import InvalidInputError
from evidence_logic.models import EvPseudoModel, KBPseudoModel, validate_ev_pseudo, validate_kb_pseudo
from evidence_logic.representation import evidence_from_kb, indistinguishability, kb_from_evidence
from evidence_logic.representation.generators import random_formula, random_pseudo_model
from evidence_logic.semantics import eval_kb_pseudo, evaluate
from evidence_logic.syntax import LanguageTag
from evidence_logic.topology import identity, total

seeds = st.integers(0, 2**32 - 1)
AGENTS = st.sampled_from([("a",), ("a", "b"), ("a", "b", "c")])


@given(seeds, AGENTS)
@settings(max_examples=60, deadline=None)
def test_induced_kb_models_are_valid(seed, agents):
    rng = Random(seed)
    model = random_pseudo_model(rng, rng.randint(1, 5), agents, fragment="iA")
    kb = kb_from_evidence(model)
    report = validate_kb_pseudo(kb)
    assert report.ok, str(report)
    assert report.properties["knowledge weakly directed"]


@given(seeds, AGENTS)
@settings(max_examples=60, deadline=None)
def test_evidence_from_kb_represents_the_kb_model(seed, agents):
    rng = Random(seed)
    kb = kb_from_evidence(random_pseudo_model(rng, rng.randint(1, 5), agents, fragment="iA"))
    evidence = evidence_from_kb(kb)
    assert evidence.fragment == "iA"
    assert validate_ev_pseudo(evidence).ok
    assert kb_from_evidence(evidence) == kb


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_kb_formulas_survive_the_representation(seed):
    rng = Random(seed)
    model = random_pseudo_model(rng, rng.randint(1, 4), ("a", "b"), fragment="iA")
    kb = kb_from_evidence(model)
    f = random_formula(rng, 3, tag=LanguageTag.KB_IA)
    ext = eval_kb_pseudo(kb, f).extension
    assert evaluate(model, f).extension == ext
    assert evaluate(evidence_from_kb(kb), f).extension == ext


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_indistinguishability_readings_coincide(seed):
    rng = Random(seed)
    model = random_pseudo_model(rng, rng.randint(1, 5), ("a", "b"), fragment="iA")
    kb = kb_from_evidence(model)
    for g in kb.labels():
        by_knowledge, by_belief, by_successors = indistinguishability(kb, g)
        assert by_knowledge == by_belief == by_successors == model.equivalence(g)


def test_evidence_is_not_determined_by_knowledge():
    n = 2
    flat = EvPseudoModel(n, ("a",), {1: identity(n)}, {1: total(n)}, {"p": 0b01}, "iA")
    clustered = EvPseudoModel(n, ("a",), {1: total(n)}, {1: total(n)}, {"p": 0b01}, "iA")
    assert flat != clustered
    assert kb_from_evidence(flat) == kb_from_evidence(clustered)
    assert kb_from_evidence(flat).belief[1] == total(n)


def test_kb_from_evidence_needs_a_valid_model():
    n = 2
    broken = EvPseudoModel(n, ("a",), {1: total(n)}, {1: identity(n)}, {}, "iA")
    with pytest.raises(InvalidInputError):
        kb_from_evidence(broken)


def test_evidence_from_kb_needs_a_valid_model():
    n = 2
    no_belief = KBPseudoModel(n, ("a",), {1: identity(n)}, {1: (0, 0)})
    assert validate_kb_pseudo(no_belief).failed("belief serial")
    with pytest.raises(InvalidInputError):
        evidence_from_kb(no_belief)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
