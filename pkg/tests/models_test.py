import sys
from pathlib import Path
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

sys.path.append(str(Path(__file__).resolve().parent.parent))

from evidence_logic.errors import InvalidInputError
from evidence_logic.model_file import load_example
from evidence_logic.models import (
    EvPseudoModel,
    RelationalEvidenceModel,
    TopoEModel,
    all_groups,
    dense_group_topology,
    ev_pseudo_of_rel,
    fragment_groups,
    group_structure,
    is_max_dense,
    is_standard,
    max_worlds,
    rel_of_standard_pseudo,
    rel_of_topo,
    resolve_group,
    share_update,
    topo_of_rel,
    validate_ev_pseudo,
    validate_relational,
    validate_topo,
)
from evidence_logic.representation.generators import (
    random_pseudo_model,
    random_relational_model,
    random_topo_model,
)
from evidence_logic.topology import Partition, Topology, from_pairs, identity, total

seeds = st.integers(0, 2**32 - 1)


def example() -> TopoEModel:
    return load_example().model


def test_groups():
    assert all_groups(2) == [0b01, 0b10, 0b11]
    assert fragment_groups(3) == [0b001, 0b010, 0b100, 0b111]
    assert fragment_groups(1) == [0b1]
    assert resolve_group(["A"], ("a", "b")) == 0b11
    assert resolve_group(["b"], ("a", "b")) == 0b10
    with pytest.raises(InvalidInputError):
        resolve_group(["c"], ("a", "b"))
    with pytest.raises(InvalidInputError):
        resolve_group([], ("a", "b"))


def test_example_is_valid():
    report = validate_topo(example())
    assert report.ok, str(report)


def test_group_structure_of_example():
    model = example()
    pi, tau = group_structure(model, 0b11)
    assert pi == Partition.indiscrete(4)
    assert tau.is_discrete()
    assert len(tau.opens) == 16
    assert group_structure(model, 0b01) == (model.partitions[0], model.topologies[0])
    # inside one cell only opens that are dense in the whole carrier survive
    assert dense_group_topology(model, 0b11).opens == frozenset({0, 0b1111})
    assert len(dense_group_topology(model, 0b01).opens) == 6


def test_hard_evidence_must_be_open():
    model = TopoEModel(
        2, ("a",), (Partition.discrete(2),), (Topology.indiscrete(2),), {"p": 0b01}
    )
    report = validate_topo(model)
    assert not report.ok
    assert len(report.failed("hard evidence is evidence")) == 2
    assert report.passed("partition")
    assert report.to_dict()["conditions"]["topology"]


def test_bad_names_are_reported():
    model = TopoEModel(1, ("A",), (Partition.indiscrete(1),), (Topology.indiscrete(1),), {"P": 1})
    report = validate_topo(model)
    assert report.failed("agents")
    assert report.failed("valuation")


def test_share_update_of_example():
    model = example()
    assert share_update(model, 0b01) == model
    shared = share_update(model, 0b11)
    assert all(tau.is_discrete() for tau in shared.topologies)
    assert shared.valuation == model.valuation
    assert validate_topo(shared).ok


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_share_update_changes_only_members(seed):
    rng = Random(seed)
    model = random_topo_model(rng, rng.randint(1, 4), ("a", "b", "c"))
    shared = share_update(model, 0b011)
    assert shared.topologies[2] == model.topologies[2]
    assert shared.partitions[2] == model.partitions[2]
    assert shared.topologies[0] == shared.topologies[1] == group_structure(model, 0b011)[1]
    assert validate_topo(shared).ok


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_topo_relational_round_trip(seed):
    rng = Random(seed)
    model = random_topo_model(rng, rng.randint(1, 5))
    rel = rel_of_topo(model)
    assert validate_relational(rel).ok
    assert topo_of_rel(rel) == model


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_relational_topo_round_trip(seed):
    rng = Random(seed)
    rel = random_relational_model(rng, rng.randint(1, 5))
    assert rel_of_topo(topo_of_rel(rel)) == rel


def test_relations_of_example():
    rel = rel_of_topo(example())
    assert rel.preorders[0] == (0b1111, 0b1010, 0b1100, 0b1000)
    assert rel.equivalences[0] == total(4)
    assert rel.group_preorder(0b11) == identity(4)


@given(seeds, st.sampled_from(["full", "iA"]))
@settings(max_examples=40, deadline=None)
def test_standard_pseudo_models(seed, fragment):
    rng = Random(seed)
    rel = random_relational_model(rng, rng.randint(1, 4), ("a", "b", "c"))
    pseudo = ev_pseudo_of_rel(rel, fragment)
    assert validate_ev_pseudo(pseudo).ok
    assert is_standard(pseudo)
    assert rel_of_standard_pseudo(pseudo) == rel


@given(seeds, st.sampled_from(["full", "iA"]))
@settings(max_examples=40, deadline=None)
def test_random_pseudo_models_are_valid(seed, fragment):
    rng = Random(seed)
    model = random_pseudo_model(rng, rng.randint(1, 4), ("a", "b", "c"), fragment=fragment)
    assert validate_ev_pseudo(model).ok


def test_pseudo_model_violations():
    n = 2
    grown = EvPseudoModel(
        n,
        ("a", "b"),
        {0b01: identity(n), 0b10: identity(n), 0b11: total(n)},
        {0b01: total(n), 0b10: total(n), 0b11: total(n)},
    )
    report = validate_ev_pseudo(grown)
    assert report.failed("anti-monotonicity")
    assert report.passed("inclusion")

    missing = EvPseudoModel(n, ("a", "b"), {0b01: identity(n)}, {0b01: total(n)})
    assert validate_ev_pseudo(missing).failed("groups")

    loose = EvPseudoModel(n, ("a",), {0b1: total(n)}, {0b1: identity(n)})
    assert validate_ev_pseudo(loose).failed("inclusion")


def test_non_standard_pseudo_model():
    n = 2
    model = EvPseudoModel(
        n,
        ("a", "b"),
        {0b01: total(n), 0b10: total(n), 0b11: identity(n)},
        {0b01: total(n), 0b10: total(n), 0b11: total(n)},
    )
    assert validate_ev_pseudo(model).ok
    assert not is_standard(model)
    with pytest.raises(InvalidInputError):
        rel_of_standard_pseudo(model)


def test_relational_violations():
    rel = RelationalEvidenceModel(
        3, ("a",), (from_pairs([(0, 1), (1, 2)], 3),), (identity(3),)
    )
    report = validate_relational(rel)
    assert report.failed("preorder")
    assert report.failed("inclusion")
    with pytest.raises(InvalidInputError):
        topo_of_rel(rel)


def test_max_worlds():
    chain = (0b111, 0b110, 0b100)
    assert max_worlds(chain) == 0b100
    assert is_max_dense(chain)
    cluster = (0b011, 0b011, 0b100)
    assert max_worlds(cluster) == 0b111
    with pytest.raises(InvalidInputError):
        is_max_dense(from_pairs([(0, 1)], 2))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
