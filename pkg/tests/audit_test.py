import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))

from evidence_logic.model_file import load_example
from evidence_logic.models import TopoEModel
from evidence_logic.representation import AuditConfig, axiom_audit
from evidence_logic.representation.audit import default_schemes
from evidence_logic.topology import Partition, Topology


def small_config(**kwargs) -> AuditConfig:
    return AuditConfig(n_models=6, seed=7, max_states=3, pool_size=12, instances=2, **kwargs)


def test_schemes_are_distinct():
    names = [s.name for s in default_schemes()]
    assert len(names) == len(set(names))
    assert {"Inclusion", "CBD", "WM", "SI", "share Box", "K group monotonicity"} <= set(names)


def test_audit_finds_no_unexpected_results():
    report = axiom_audit(small_config(), seed_models=[load_example().model])
    assert report.ok, [r.to_dict() for r in report.failures()]
    assert all(r.instances > 0 for r in report.results)
    assert report.result("CBD", "kb_pseudo").counterexample is None


def test_invalid_schemes_fail_on_the_example():
    report = axiom_audit(small_config(semantics=("topo",)), seed_models=[load_example().model])
    for name in ("K group monotonicity", "individual knowledge gives group belief"):
        result = report.result(name)
        assert not result.expected_valid
        assert result.counterexample is not None
        assert result.counterexample.model_index == 0
        assert not result.unexpected


def test_corrupted_model_breaks_inclusion():
    corrupted = TopoEModel(
        2,
        ("a", "b"),
        (Partition.discrete(2), Partition.discrete(2)),
        (Topology.indiscrete(2), Topology.indiscrete(2)),
        {"p": 0b01, "q": 0},
    )
    report = axiom_audit(small_config(semantics=("topo",)), extra_models=[corrupted])
    inclusion = report.result("Inclusion")
    assert inclusion.unexpected
    assert inclusion.counterexample.model_index == 6
    assert inclusion.counterexample.model.partitions == corrupted.partitions
    assert not report.ok
    assert inclusion in report.failures()


def test_audit_is_reproducible():
    config = small_config(semantics=("ev_pseudo",))
    assert axiom_audit(config).to_dict() == axiom_audit(small_config(semantics=("ev_pseudo",))).to_dict()


@pytest.mark.slow
def test_full_audit_of_a_thousand_models():
    report = axiom_audit(AuditConfig(n_models=1000, seed=0), seed_models=[load_example().model])
    assert report.ok, [r.to_dict() for r in report.failures()]
    assert report.result("Inclusion").counterexample is None
    assert report.result("K group monotonicity").counterexample is not None


def test_unknown_result_lookup():
    report = axiom_audit(small_config(semantics=("kb_pseudo",)))
    with pytest.raises(KeyError):
        report.result("Inclusion", "kb_pseudo")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
