import sys
from pathlib import Path
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

sys.path.append(str(Path(__file__).resolve().parent.parent))

from evidence_logic.errors import InvalidInputError
from evidence_logic.models import EvPseudoModel, is_standard, validate_relational
from evidence_logic.representation import History, last_pmorphism_check, unravel
from evidence_logic.representation.generators import random_formula, random_pseudo_model
from evidence_logic.semantics import evaluate
from evidence_logic.syntax import LanguageTag, parse, to_text
from evidence_logic.topology import from_pairs, identity, reflexive_transitive_closure, total

seeds = st.integers(0, 2**32 - 1)


def two_agent_chain() -> EvPseudoModel:
    """States s0, u, v; a sees s0 <= u, b sees s0 <= v and u <= v, p only at u."""
    n = 3
    le_a = reflexive_transitive_closure(from_pairs([(0, 1)], n))
    le_b = reflexive_transitive_closure(from_pairs([(0, 2), (1, 2)], n))
    return EvPseudoModel(
        n,
        ("a", "b"),
        {0b01: le_a, 0b10: le_b, 0b11: identity(n)},
        {0b01: total(n), 0b10: total(n), 0b11: total(n)},
        {"p": 0b010},
        "iA",
    )


def test_depth_zero_is_the_root():
    tree = unravel(two_agent_chain(), 1, 0)
    assert len(tree.histories) == 1
    assert tree.histories[0] == History(1)
    assert tree.frontier == [0]
    # the chain is standard, so its three states are joined behind the root
    assert tree.copies == (0, 1, 2)
    assert tree.model.carrier_size == 4
    assert tree.model.valuation["p"] == 0b0101
    assert [tree.last(x) for x in range(4)] == [1, 0, 1, 2]

    bare = unravel(two_agent_chain(), 1, 0, graft=False)
    assert not bare.grafted
    assert bare.model.valuation["p"] == 0b1


def test_histories_of_depth_one():
    model = two_agent_chain()
    tree = unravel(model, 0, 1)
    # per group: one P-step per order successor and one E-step per equivalent state
    expected = 1 + sum(
        bin(model.preorder(g)[0]).count("1") + bin(model.equivalence(g)[0]).count("1") for g in model.groups()
    )
    assert len(tree.histories) == expected
    assert all(len(h) <= 1 for h in tree.histories)
    assert validate_relational(tree.model).ok
    h = tree.histories[1]
    assert tree.last(tree.index(h)) == h.last
    assert h.show(["s0", "u", "v"], model.agents).startswith("s0 P{a} ")


def test_last_is_a_pmorphism_everywhere_after_grafting():
    tree = unravel(two_agent_chain(), 0, 2)
    assert tree.grafted
    assert tree.open == []
    check = last_pmorphism_check(tree)
    assert check.ok, str(check.report)
    assert check.interior == len(tree.histories)
    assert check.copies == 3
    assert check.to_dict()["conditions"] == {"atoms": True, "forth": True, "back": True}


@given(seeds, st.integers(0, 2))
@settings(max_examples=15, deadline=None)
def test_pmorphism_on_random_models(seed, depth):
    rng = Random(seed)
    model = random_pseudo_model(rng, rng.randint(1, 3), ("a", "b"), fragment=rng.choice(["full", "iA"]))
    tree = unravel(model, rng.randrange(model.carrier_size), depth)
    assert validate_relational(tree.model).ok
    check = last_pmorphism_check(tree)
    assert check.ok
    assert check.interior + len(tree.open) == len(tree.histories)


@given(seeds, st.integers(0, 2))
@settings(max_examples=50, deadline=None)
def test_truncation_preserves_the_root_of_standard_models(seed, depth):
    rng = Random(seed)
    fragment = rng.choice(["full", "iA"])
    model = random_pseudo_model(rng, rng.randint(1, 3), ("a", "b"), fragment=fragment, standard=True)
    root = rng.randrange(model.carrier_size)
    tree = unravel(model, root, depth)
    assert tree.grafted
    tag = LanguageTag.EV_FULL if fragment == "full" else LanguageTag.EV_IA
    for _ in range(5):
        f = random_formula(rng, depth, tag=tag)
        assert evaluate(tree.model, f).holds_at(0) == evaluate(model, f).holds_at(root), to_text(f)


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_shallow_formulas_are_preserved_at_the_root(seed):
    rng = Random(seed)
    model = random_pseudo_model(rng, rng.randint(1, 3), ("a", "b"), fragment="iA")
    root = rng.randrange(model.carrier_size)
    tree = unravel(model, root, 1)
    f = random_formula(rng, 1, tag=LanguageTag.EV_IA)
    assert evaluate(tree.model, f).holds_at(0) == evaluate(model, f).holds_at(root)


def test_deeper_formulas_keep_their_value_once_grafted():
    model = two_agent_chain()
    f = parse("Box{a} ~Box{b} p")
    assert evaluate(model, f).holds_at(0)
    assert evaluate(unravel(model, 0, 2).model, f).holds_at(0)
    # without the copy, the frontier history 0 P{a} u P{a} u has no b-successor
    assert not evaluate(unravel(model, 0, 2, graft=False).model, f).holds_at(0)


def two_agent_cluster() -> EvPseudoModel:
    """Both agents order the two states as one cluster, the group orders nothing, p at 1."""
    n = 2
    return EvPseudoModel(
        n,
        ("a", "b"),
        {0b01: total(n), 0b10: total(n), 0b11: identity(n)},
        {0b01: total(n), 0b10: total(n), 0b11: total(n)},
        {"p": 0b10},
        "iA",
    )


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_non_standard_frontier_stays_open(depth):
    model = two_agent_cluster()
    assert not is_standard(model)
    tree = unravel(model, 0, depth)
    assert not tree.grafted
    assert tree.open == tree.frontier
    check = last_pmorphism_check(tree)
    assert check.ok
    assert check.frontier == len(tree.frontier)
    # 0 P{a} 0 ... P{a} 0 is one a-step from the root and sees no p
    f = parse("Box{a} Dia{a} p")
    assert evaluate(model, f).holds_at(0)
    assert not evaluate(tree.model, f).holds_at(0)


def test_frontier_histories_skip_the_back_check():
    tree = unravel(two_agent_chain(), 0, 1, graft=False)
    report = last_pmorphism_check(tree)
    assert report.ok
    assert report.frontier == len(tree.histories) - 1
    assert report.interior == 1


def test_bad_arguments():
    model = two_agent_chain()
    with pytest.raises(ValueError):
        unravel(model, 0, -1)
    with pytest.raises(InvalidInputError):
        unravel(model, 3, 1)
    broken = EvPseudoModel(2, ("a",), {1: total(2)}, {1: identity(2)}, {}, "iA")
    with pytest.raises(InvalidInputError):
        unravel(broken, 0, 1)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
